#include "anderson/lattice.hpp"

#include <algorithm>
#include <cstdlib>

namespace anderson {

int dist_max(const Site& x, const Site& y) {
  if (x.size() != y.size()) throw std::invalid_argument("dist_max: dimension mismatch");
  return (x - y).cwiseAbs().maxCoeff();
}

int dist_graph(const Site& x, const Site& y) {
  if (x.size() != y.size()) throw std::invalid_argument("dist_graph: dimension mismatch");
  return (x - y).cwiseAbs().sum();
}

namespace {

// Advances a mixed-radix odometer over [-L, L]^d, first coordinate slowest,
// so the visit order is lexicographic on absolute coordinates.
bool advance(Site& offset, int radius) {
  for (int i = static_cast<int>(offset.size()) - 1; i >= 0; --i) {
    if (offset[i] < radius) {
      ++offset[i];
      for (int j = i + 1; j < offset.size(); ++j) offset[j] = -radius;
      return true;
    }
  }
  return false;
}

bool lex_less_row(const Eigen::MatrixXi& rows, int r, const Site& x) {
  for (int j = 0; j < rows.cols(); ++j) {
    if (rows(r, j) != x[j]) return rows(r, j) < x[j];
  }
  return false;
}

}  // namespace

LatticeBall LatticeBall::make(Site center, int radius, std::optional<BallSpec> ambient) {
  if (center.size() < 1) throw InvalidGeometry("ball dimension must be >= 1");
  if (radius < 0) throw InvalidGeometry("ball radius must be >= 0");
  if (ambient) {
    if (ambient->center.size() != center.size())
      throw InvalidGeometry("ambient dimension mismatch");
    if (!ambient->contains(center))
      throw InvalidGeometry("ball center outside the ambient region");
  }

  const int d = static_cast<int>(center.size());
  std::vector<int> flat;
  Site offset = Site::Constant(d, -radius);
  Site x(d);
  do {
    x = center + offset;
    if (ambient && !ambient->contains(x)) continue;
    for (int j = 0; j < d; ++j) flat.push_back(x[j]);
  } while (advance(offset, radius));

  LatticeBall ball;
  ball.center_ = std::move(center);
  ball.radius_ = radius;
  ball.ambient_ = std::move(ambient);
  const int n = static_cast<int>(flat.size()) / d;
  ball.sites_.resize(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) ball.sites_(i, j) = flat[static_cast<size_t>(i) * d + j];
  return ball;
}

int LatticeBall::index_of(const Site& x) const {
  if (x.size() != center_.size()) throw std::invalid_argument("index_of: dimension mismatch");
  int lo = 0, hi = size();
  while (lo < hi) {
    int mid = lo + (hi - lo) / 2;
    if (lex_less_row(sites_, mid, x))
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < size() && (sites_.row(lo).transpose().array() == x.array()).all()) return lo;
  return -1;
}

bool LatticeBall::clipped() const {
  long long cube = 1;
  for (int j = 0; j < dim(); ++j) cube *= 2LL * radius_ + 1;
  return size() < cube;
}

std::vector<Site> ball_sites(const Site& center, int radius, int dim,
                             const std::optional<BallSpec>& ambient) {
  if (center.size() != dim) throw InvalidGeometry("ball_sites: center/dim mismatch");
  LatticeBall ball = LatticeBall::make(center, radius, ambient);
  std::vector<Site> out;
  out.reserve(ball.size());
  for (int i = 0; i < ball.size(); ++i) out.push_back(ball.site(i));
  return out;
}

namespace {

struct LexLess {
  bool operator()(const Site& a, const Site& b) const {
    for (int j = 0; j < a.size(); ++j)
      if (a[j] != b[j]) return a[j] < b[j];
    return false;
  }
};

template <class Fn>
void for_each_shell_bond(const LatticeBall& ball, Fn&& fn) {
  // Every bond of the cube leaves through a site of the exact shell.
  const Site& u = ball.center();
  const int d = ball.dim();
  const int L = ball.radius();
  const auto& amb = ball.ambient();
  Site offset = Site::Constant(d, -L);
  Site x(d), y(d);
  do {
    x = u + offset;
    if (dist_max(x, u) != L) continue;
    const bool x_in_region = !amb || amb->contains(x);
    for (int j = 0; j < d; ++j) {
      for (int s = -1; s <= 1; s += 2) {
        y = x;
        y[j] += s;
        if (dist_max(y, u) <= L) continue;  // still inside the cube
        const bool y_in_ambient = !amb || amb->contains(y);
        fn(x, y, x_in_region, y_in_ambient);
      }
    }
  } while (advance(offset, L));
}

}  // namespace

BoundarySet boundary(const LatticeBall& ball) {
  BoundarySet b;
  const Site& u = ball.center();
  const int L = ball.radius();
  for (int i = 0; i < ball.size(); ++i) {
    Site x = ball.site(i);
    if (dist_max(x, u) == L) b.inner.push_back(std::move(x));
  }
  std::vector<Site> outer;
  for_each_shell_bond(ball, [&](const Site& x, const Site& y, bool x_in, bool y_in) {
    if (!y_in) return;
    outer.push_back(y);
    if (x_in) b.bonds.emplace_back(x, y);
  });
  std::sort(outer.begin(), outer.end(), LexLess{});
  outer.erase(std::unique(outer.begin(), outer.end(),
                          [](const Site& a, const Site& c) {
                            return (a.array() == c.array()).all();
                          }),
              outer.end());
  b.outer = std::move(outer);
  return b;
}

long boundary_bond_count(const LatticeBall& ball) {
  long count = 0;
  for_each_shell_bond(ball, [&](const Site&, const Site&, bool x_in, bool y_in) {
    if (x_in && y_in) ++count;
  });
  return count;
}

}  // namespace anderson
