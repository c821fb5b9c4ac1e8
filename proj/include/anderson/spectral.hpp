#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "anderson/hamiltonian.hpp"
#include "anderson/lattice.hpp"

namespace anderson {

struct ResonanceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EigenFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double e) const { return e >= lo && e <= hi; }
  double width() const { return hi - lo; }
};

/**
 * Full eigendecomposition of a finite-volume Hamiltonian. Eigenvalues are
 * ascending; eigenvector signs are canonicalized (largest-magnitude entry
 * positive) so artifacts are reproducible. boundary_bonds caches the exact
 * |boundary| of the ball relative to its ambient region.
 */
struct SpectralData {
  LatticeBall ball;
  double coupling = 0.0;
  BoundaryCondition bc = BoundaryCondition::dirichlet;
  KineticConvention convention = KineticConvention::adjacency;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // column j <-> eigenvalue j
  long boundary_bonds = 0;

  int size() const { return static_cast<int>(eigenvalues.size()); }
  double min_gap(double E) const { return (eigenvalues.array() - E).abs().minCoeff(); }
  double spectral_radius() const {
    return std::max(std::abs(eigenvalues[0]), std::abs(eigenvalues[size() - 1]));
  }
};

// Residual and orthonormality are verified to 1e-10 * (1 + |H|); failure
// throws EigenFailure carrying a matrix dump.
SpectralData eig(const FiniteHamiltonian& H);

// Green function (H - E)^{-1}(x, y) via the eigen-expansion
// sum_j psi_j(x) psi_j(y) / (E_j - E). Throws ResonanceError when E is within
// 1e-12 of the spectrum.
double green(const SpectralData& sd, double E, int x_index, int y_index);

struct GreenNorm {
  double value = 0.0;  // +inf when resonant
  bool resonant = false;
};

// Operator norm of the resolvent: 1 / min_j |E_j - E|.
GreenNorm green_norm(const SpectralData& sd, double E);

// <delta_x | phi(H) P_I(H) | delta_y>, with phi clamped to |phi| <= 1.
double apply_function(const SpectralData& sd, const std::function<double(double)>& phi,
                      Interval I, int x_index, int y_index);

// --- Geometric resolvent inequality -----------------------------------------
//
// For the sliding ball Q = B_ell(x) clipped to the outer region, the second
// resolvent identity gives, for y outside Q and E off both spectra,
//
//   |G_outer(x,y;E)| <= |bd Q| * max_{v in inner(Q)} |G_Q(x,v;E)|
//                              * max_{v' in outer(Q)} |G_outer(v',y;E)|
//
// and for every eigenfunction psi of the outer operator (eigenvalue off
// the spectrum of Q),
//
//   |psi(x)| <= |bd Q| * max_{v} |G_Q(x,v;E_j)| * max_{v'} |psi(v')|.

struct GriPairCheck {
  bool applicable = false;
  bool violated = false;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string skip_reason;
};

struct GriReport {
  GriPairCheck resolvent;
  int ef_checked = 0;
  int ef_skipped = 0;
  int ef_violations = 0;
  double ef_worst_ratio = 0.0;  // max lhs/rhs over checked eigenfunctions
};

// `inner` must be the spectral data of B_ell(x) clipped to the outer ball,
// assembled from the same potential with Dirichlet truncation.
GriReport verify_gri(const SpectralData& outer, const SpectralData& inner, double E,
                     const Site& x, const Site& y);

}  // namespace anderson
