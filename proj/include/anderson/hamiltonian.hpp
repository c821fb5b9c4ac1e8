#pragma once

#include <Eigen/Core>

#include "anderson/disorder.hpp"
#include "anderson/lattice.hpp"

namespace anderson {

enum class BoundaryCondition { dirichlet, neumann };

// adjacency:       H = -A + gV          (tight-binding form)
// graph_laplacian: H = -Delta + gV with (Delta u)(x) = sum_{y~x} (u(y) - u(x));
//                  under Dirichlet conditions the diagonal keeps the full
//                  lattice degree 2d, so the spectrum is the adjacency one
//                  shifted by exactly 2d.
// Under Neumann conditions the kinetic diagonal is the in-ball degree, so the
// kinetic part annihilates constants; the convention flag is then irrelevant.
enum class KineticConvention { adjacency, graph_laplacian };

struct FiniteHamiltonian {
  LatticeBall ball;
  Eigen::MatrixXd matrix;  // symmetric, over the ball's site index
  double coupling = 0.0;
  BoundaryCondition bc = BoundaryCondition::dirichlet;
  KineticConvention convention = KineticConvention::adjacency;
};

// Dirichlet means plain truncation to the ball: no boundary correction term.
FiniteHamiltonian assemble(const LatticeBall& ball, const PotentialField& V, double g,
                           BoundaryCondition bc = BoundaryCondition::dirichlet,
                           KineticConvention conv = KineticConvention::adjacency);

}  // namespace anderson
