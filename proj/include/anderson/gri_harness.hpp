#pragma once

#include <cstdint>

#include "anderson/disorder.hpp"
#include "anderson/scale_params.hpp"

namespace anderson {

// Randomized check of the geometric resolvent inequality: for each sample,
// the sliding ball B_ell(x) is placed at every site of the outer ball, the
// resolvent form is evaluated at energies between consecutive outer
// eigenvalues against every exterior target site, and the eigenfunction form
// against every outer eigenpair. Energies or eigenvalues too close to a
// spectrum are skipped and counted, never asserted.
struct GriFuzzConfig {
  int dim = 1;
  int L = 8;
  int ell = 2;
  double g = 1.0;
  GeneratorSpec generator = GeneratorSpec::iid_uniform();
  long samples = 200;
  int energies_per_sample = 5;
  std::uint64_t seed = 1;
  int workers = 0;
  ScaleParams params;
};

struct GriFuzzReport {
  long resolvent_checked = 0;
  long resolvent_violations = 0;
  long ef_checked = 0;
  long ef_violations = 0;
  long skipped = 0;
  double worst_resolvent_ratio = 0.0;
  double worst_ef_ratio = 0.0;
};

GriFuzzReport run_gri_fuzz(const GriFuzzConfig& cfg);

}  // namespace anderson
