#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "anderson/lattice.hpp"

namespace anderson {

/**
 * Disorder generators.
 *
 * iid_uniform     — IID site potentials, uniform on [0,1]. The marginal CDF is
 *                   Lipschitz, hence uniformly Holder with exponent 1.
 * iid_custom_cdf  — IID with a piecewise-linear marginal CDF given by knots
 *                   (t_i, F_i); sampled by inverse transform.
 * moving_average  — V(x) = sum_{|y| <= r} a_y U(x+y) over IID uniform U.
 *                   Finite range makes sites independent beyond distance 2r,
 *                   and the a_0 != 0 tap keeps the conditional CDF Lipschitz.
 */
struct GeneratorSpec {
  enum class Kind { iid_uniform, iid_custom_cdf, moving_average };

  Kind kind = Kind::iid_uniform;
  std::vector<std::pair<double, double>> cdf_knots;  // (t, F(t)), custom CDF only
  std::vector<std::pair<Site, double>> kernel;       // (offset, weight), MA only

  static GeneratorSpec iid_uniform();
  static GeneratorSpec custom_cdf(std::vector<std::pair<double, double>> knots);
  static GeneratorSpec moving_average(std::vector<std::pair<Site, double>> kernel);
  // Product kernel with per-axis taps {-1: 1/2, 0: 1, +1: 1/2}.
  static GeneratorSpec default_moving_average(int dim);

  void validate(int dim) const;  // throws std::invalid_argument
  int range(int dim) const;      // max offset norm (0 for IID kinds)
  bool iid() const { return kind != Kind::moving_average; }

  double marginal_mean() const;
  double support_min() const;
  double support_max() const;
  bool nonconstant() const { return support_max() > support_min(); }

  std::string kind_name() const;
};

struct Provenance {
  std::string kind;
  std::uint64_t stream_seed = 0;
  std::uint64_t sample_index = 0;
};

// One disorder realization on a ball. Values are aligned with the ball's
// site enumeration; regeneration from the provenance is bit-identical.
struct PotentialField {
  LatticeBall ball;
  Eigen::VectorXd values;
  Provenance provenance;

  double at(const Site& x) const {
    int i = ball.index_of(x);
    if (i < 0) throw std::invalid_argument("PotentialField: site outside the field");
    return values[i];
  }
};

PotentialField sample_iid(const LatticeBall& ball, const GeneratorSpec& spec,
                          std::uint64_t sample_index, std::uint64_t stream_seed);
PotentialField sample_ma(const LatticeBall& ball, const GeneratorSpec& spec,
                         std::uint64_t sample_index, std::uint64_t stream_seed);
// Dispatch on spec.kind.
PotentialField sample_field(const LatticeBall& ball, const GeneratorSpec& spec,
                            std::uint64_t sample_index, std::uint64_t stream_seed);

}  // namespace anderson
