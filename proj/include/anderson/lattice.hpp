#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace anderson {

// A lattice site is an integer coordinate vector of length d.
using Site = Eigen::VectorXi;

struct InvalidGeometry : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// max-norm distance ||x - y||_inf
int dist_max(const Site& x, const Site& y);
// graph (bond-path, l1) distance
int dist_graph(const Site& x, const Site& y);

// Unclipped extent of a ball; used as the clipping region for another ball.
struct BallSpec {
  Site center;
  int radius = 0;
  bool contains(const Site& x) const { return dist_max(center, x) <= radius; }
};

/**
 * Max-norm ball B_L(u) in Z^d, i.e. the cube of side 2L+1, optionally
 * intersected with an ambient ball (clipping). Sites are enumerated in
 * lexicographic coordinate order, which fixes the matrix layout of every
 * operator built on the ball.
 */
class LatticeBall {
 public:
  LatticeBall() = default;

  // Throws InvalidGeometry when the center lies outside the ambient region.
  static LatticeBall make(Site center, int radius,
                          std::optional<BallSpec> ambient = std::nullopt);

  int dim() const { return static_cast<int>(center_.size()); }
  int radius() const { return radius_; }
  const Site& center() const { return center_; }
  const std::optional<BallSpec>& ambient() const { return ambient_; }

  int size() const { return static_cast<int>(sites_.rows()); }
  const Eigen::MatrixXi& sites() const { return sites_; }
  Site site(int i) const { return sites_.row(i).transpose(); }

  // Index of a site in the enumeration, -1 when the site is not in the ball.
  int index_of(const Site& x) const;
  bool contains(const Site& x) const { return index_of(x) >= 0; }

  // True when the ambient region removed at least one site of the cube.
  bool clipped() const;

  BallSpec spec() const { return BallSpec{center_, radius_}; }

 private:
  Site center_;
  int radius_ = 0;
  std::optional<BallSpec> ambient_;
  Eigen::MatrixXi sites_;  // one row per site, lexicographic
};

// Boundary objects of a ball relative to its ambient region:
//   inner = sites of the ball at max-norm distance exactly L from the center,
//   outer = sites outside the (unclipped) cube at graph distance 1 from it,
//           intersected with the ambient region,
//   bonds = adjacent (inner, outer) pairs, both endpoints in the ambient.
struct BoundarySet {
  std::vector<Site> inner;
  std::vector<Site> outer;
  std::vector<std::pair<Site, Site>> bonds;
};

std::vector<Site> ball_sites(const Site& center, int radius, int dim,
                             const std::optional<BallSpec>& ambient = std::nullopt);

BoundarySet boundary(const LatticeBall& ball);

// |bonds| without materializing the full BoundarySet.
long boundary_bond_count(const LatticeBall& ball);

}  // namespace anderson
