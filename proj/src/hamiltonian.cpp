#include "anderson/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

namespace anderson {

FiniteHamiltonian assemble(const LatticeBall& ball, const PotentialField& V, double g,
                           BoundaryCondition bc, KineticConvention conv) {
  const int n = ball.size();
  const int d = ball.dim();
  FiniteHamiltonian H;
  H.ball = ball;
  H.coupling = g;
  H.bc = bc;
  H.convention = conv;
  H.matrix = Eigen::MatrixXd::Zero(n, n);

  const bool same_extent = V.ball.size() == n && V.ball.radius() == ball.radius() &&
                           (V.ball.center().array() == ball.center().array()).all();

  Eigen::VectorXi degree = Eigen::VectorXi::Zero(n);
  Site y(d);
  for (int i = 0; i < n; ++i) {
    Site x = ball.site(i);
    for (int j = 0; j < d; ++j) {
      y = x;
      y[j] += 1;
      int k = ball.index_of(y);
      if (k >= 0) {
        H.matrix(i, k) = -1.0;
        H.matrix(k, i) = -1.0;
        ++degree[i];
        ++degree[k];
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    double v = same_extent ? V.values[i] : V.at(ball.site(i));
    if (!std::isfinite(v)) throw std::invalid_argument("assemble: non-finite potential value");
    double diag = g * v;
    if (bc == BoundaryCondition::neumann) {
      diag += degree[i];
    } else if (conv == KineticConvention::graph_laplacian) {
      diag += 2.0 * d;
    }
    H.matrix(i, i) = diag;
  }
  return H;
}

}  // namespace anderson
