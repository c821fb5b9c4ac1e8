#include "anderson/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

namespace anderson {

namespace {

std::string matrix_dump(const Eigen::MatrixXd& M) {
  std::ostringstream os;
  const int cap = 16;
  const int n = std::min<int>(cap, static_cast<int>(M.rows()));
  os.precision(17);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) os << M(i, j) << (j + 1 < n ? " " : "");
    os << "\n";
  }
  if (M.rows() > cap) os << "... (" << M.rows() << "x" << M.cols() << " truncated)\n";
  return os.str();
}

}  // namespace

SpectralData eig(const FiniteHamiltonian& H) {
  const auto& M = H.matrix;
  const double scale = M.size() ? M.cwiseAbs().maxCoeff() : 0.0;
  if (M.rows() != M.cols() || (M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1 + scale))
    throw EigenFailure("eig: matrix is not symmetric\n" + matrix_dump(M));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M);
  if (solver.info() != Eigen::Success)
    throw EigenFailure("eig: eigensolver did not converge\n" + matrix_dump(M));

  SpectralData sd;
  sd.ball = H.ball;
  sd.coupling = H.coupling;
  sd.bc = H.bc;
  sd.convention = H.convention;
  sd.eigenvalues = solver.eigenvalues();
  sd.eigenvectors = solver.eigenvectors();

  // Sign canonicalization: largest-magnitude entry positive (first on ties).
  for (int j = 0; j < sd.eigenvectors.cols(); ++j) {
    int imax = 0;
    double best = -1.0;
    for (int i = 0; i < sd.eigenvectors.rows(); ++i) {
      double a = std::abs(sd.eigenvectors(i, j));
      if (a > best) {
        best = a;
        imax = i;
      }
    }
    if (sd.eigenvectors(imax, j) < 0) sd.eigenvectors.col(j) = -sd.eigenvectors.col(j);
  }

  const double hnorm = sd.eigenvalues.size()
                           ? std::max(std::abs(sd.eigenvalues[0]),
                                      std::abs(sd.eigenvalues[sd.eigenvalues.size() - 1]))
                           : 0.0;
  const double tol = 1e-10 * (1.0 + hnorm);
  double resid =
      (M * sd.eigenvectors - sd.eigenvectors * sd.eigenvalues.asDiagonal()).cwiseAbs().maxCoeff();
  if (resid > tol)
    throw EigenFailure("eig: residual above tolerance\n" + matrix_dump(M));
  double ortho = (sd.eigenvectors.transpose() * sd.eigenvectors -
                  Eigen::MatrixXd::Identity(M.rows(), M.cols()))
                     .cwiseAbs()
                     .maxCoeff();
  if (ortho > 1e-10)
    throw EigenFailure("eig: eigenvectors not orthonormal\n" + matrix_dump(M));

  sd.boundary_bonds = boundary_bond_count(H.ball);
  return sd;
}

double green(const SpectralData& sd, double E, int x_index, int y_index) {
  if (sd.min_gap(E) <= 1e-12)
    throw ResonanceError("green: energy within 1e-12 of the spectrum");
  return (sd.eigenvectors.row(x_index).array() * sd.eigenvectors.row(y_index).array() /
          (sd.eigenvalues.array().transpose() - E))
      .sum();
}

GreenNorm green_norm(const SpectralData& sd, double E) {
  double gap = sd.min_gap(E);
  if (gap == 0.0) return {std::numeric_limits<double>::infinity(), true};
  return {1.0 / gap, false};
}

double apply_function(const SpectralData& sd, const std::function<double(double)>& phi,
                      Interval I, int x_index, int y_index) {
  double acc = 0.0;
  for (int j = 0; j < sd.size(); ++j) {
    double e = sd.eigenvalues[j];
    if (!I.contains(e)) continue;
    double f = std::clamp(phi(e), -1.0, 1.0);
    acc += f * sd.eigenvectors(x_index, j) * sd.eigenvectors(y_index, j);
  }
  return acc;
}

GriReport verify_gri(const SpectralData& outer, const SpectralData& inner, double E,
                     const Site& x, const Site& y) {
  GriReport rep;
  const BoundarySet bset = boundary(inner.ball);
  const double C = static_cast<double>(bset.bonds.size());
  const int ix_outer = outer.ball.index_of(x);
  const int iy_outer = outer.ball.index_of(y);
  const int ix_inner = inner.ball.index_of(x);
  if (ix_outer < 0 || iy_outer < 0 || ix_inner < 0)
    throw std::invalid_argument("verify_gri: sites outside the balls");

  const double scale = 1.0 + std::abs(E);
  const double rel = 1e-9;

  std::vector<int> inner_idx, outer_idx;
  for (const Site& v : bset.inner) {
    int k = inner.ball.index_of(v);
    if (k >= 0) inner_idx.push_back(k);
  }
  for (const Site& v : bset.outer) {
    int k = outer.ball.index_of(v);
    if (k >= 0) outer_idx.push_back(k);
  }

  // Resolvent form.
  auto& rc = rep.resolvent;
  if (inner.ball.contains(y)) {
    rc.skip_reason = "target inside the sliding ball";
  } else if (outer.min_gap(E) < 1e-8 * scale || inner.min_gap(E) < 1e-8 * scale) {
    rc.skip_reason = "energy too close to a spectrum";
  } else {
    rc.applicable = true;
    rc.lhs = std::abs(green(outer, E, ix_outer, iy_outer));
    double first = 0.0, second = 0.0;
    for (int k : inner_idx) first = std::max(first, std::abs(green(inner, E, ix_inner, k)));
    for (int k : outer_idx) second = std::max(second, std::abs(green(outer, E, k, iy_outer)));
    rc.rhs = C * first * second;
    rc.violated = rc.lhs > rc.rhs * (1.0 + rel) + 1e-300;
  }

  // Eigenfunction form, one check per eigenpair of the outer operator.
  for (int j = 0; j < outer.size(); ++j) {
    double Ej = outer.eigenvalues[j];
    if (inner.min_gap(Ej) < 1e-8 * (1.0 + std::abs(Ej))) {
      ++rep.ef_skipped;
      continue;
    }
    double lhs = std::abs(outer.eigenvectors(ix_outer, j));
    double first = 0.0, second = 0.0;
    for (int k : inner_idx) first = std::max(first, std::abs(green(inner, Ej, ix_inner, k)));
    for (int k : outer_idx) second = std::max(second, std::abs(outer.eigenvectors(k, j)));
    double rhs = C * first * second;
    ++rep.ef_checked;
    if (rhs > 0) rep.ef_worst_ratio = std::max(rep.ef_worst_ratio, lhs / rhs);
    if (lhs > rhs * (1.0 + rel) + 1e-300) ++rep.ef_violations;
  }
  return rep;
}

}  // namespace anderson
