#include "anderson/disorder.hpp"

#include <cmath>
#include <stdexcept>

#include "anderson/rng.hpp"

namespace anderson {

GeneratorSpec GeneratorSpec::iid_uniform() { return GeneratorSpec{}; }

GeneratorSpec GeneratorSpec::custom_cdf(std::vector<std::pair<double, double>> knots) {
  GeneratorSpec s;
  s.kind = Kind::iid_custom_cdf;
  s.cdf_knots = std::move(knots);
  return s;
}

GeneratorSpec GeneratorSpec::moving_average(std::vector<std::pair<Site, double>> kernel) {
  GeneratorSpec s;
  s.kind = Kind::moving_average;
  s.kernel = std::move(kernel);
  return s;
}

GeneratorSpec GeneratorSpec::default_moving_average(int dim) {
  std::vector<std::pair<Site, double>> kernel;
  Site off = Site::Constant(dim, -1);
  for (;;) {
    double w = 1.0;
    for (int j = 0; j < dim; ++j) w *= (off[j] == 0) ? 1.0 : 0.5;
    kernel.emplace_back(off, w);
    int j = dim - 1;
    while (j >= 0 && off[j] == 1) off[j--] = -1;
    if (j < 0) break;
    ++off[j];
  }
  return moving_average(std::move(kernel));
}

void GeneratorSpec::validate(int dim) const {
  switch (kind) {
    case Kind::iid_uniform:
      return;
    case Kind::iid_custom_cdf: {
      if (cdf_knots.size() < 2) throw std::invalid_argument("custom CDF needs >= 2 knots");
      if (cdf_knots.front().second != 0.0 || cdf_knots.back().second != 1.0)
        throw std::invalid_argument("custom CDF must start at F=0 and end at F=1");
      for (size_t i = 1; i < cdf_knots.size(); ++i) {
        if (!(cdf_knots[i].first > cdf_knots[i - 1].first))
          throw std::invalid_argument("custom CDF abscissae must be strictly increasing");
        if (cdf_knots[i].second < cdf_knots[i - 1].second)
          throw std::invalid_argument("custom CDF must be nondecreasing");
      }
      return;
    }
    case Kind::moving_average: {
      if (kernel.empty()) throw std::invalid_argument("moving-average kernel is empty");
      bool has_center = false;
      for (const auto& [off, w] : kernel) {
        if (off.size() != dim)
          throw std::invalid_argument("moving-average kernel offset dimension mismatch");
        if (!std::isfinite(w)) throw std::invalid_argument("non-finite kernel weight");
        if (off.cwiseAbs().maxCoeff() == 0 && off.size() == dim) {
          if ((off.array() == 0).all()) {
            if (w == 0.0)
              throw std::invalid_argument("moving-average kernel requires a_0 != 0");
            has_center = true;
          }
        }
      }
      if (!has_center)
        throw std::invalid_argument("moving-average kernel requires a zero-offset tap");
      return;
    }
  }
  throw std::invalid_argument("unknown generator kind");
}

int GeneratorSpec::range(int dim) const {
  if (iid()) return 0;
  int r = 0;
  for (const auto& [off, w] : kernel) {
    (void)w;
    if (off.size() != dim) throw std::invalid_argument("kernel offset dimension mismatch");
    r = std::max(r, off.cwiseAbs().maxCoeff());
  }
  return r;
}

double GeneratorSpec::marginal_mean() const {
  switch (kind) {
    case Kind::iid_uniform:
      return 0.5;
    case Kind::iid_custom_cdf: {
      double mean = 0.0;
      for (size_t i = 1; i < cdf_knots.size(); ++i) {
        double dF = cdf_knots[i].second - cdf_knots[i - 1].second;
        mean += dF * 0.5 * (cdf_knots[i].first + cdf_knots[i - 1].first);
      }
      return mean;
    }
    case Kind::moving_average: {
      double s = 0.0;
      for (const auto& [off, w] : kernel) {
        (void)off;
        s += w;
      }
      return 0.5 * s;
    }
  }
  return 0.0;
}

double GeneratorSpec::support_min() const {
  switch (kind) {
    case Kind::iid_uniform:
      return 0.0;
    case Kind::iid_custom_cdf:
      return cdf_knots.front().first;
    case Kind::moving_average: {
      double s = 0.0;
      for (const auto& [off, w] : kernel) {
        (void)off;
        if (w < 0) s += w;
      }
      return s;
    }
  }
  return 0.0;
}

double GeneratorSpec::support_max() const {
  switch (kind) {
    case Kind::iid_uniform:
      return 1.0;
    case Kind::iid_custom_cdf:
      return cdf_knots.back().first;
    case Kind::moving_average: {
      double s = 0.0;
      for (const auto& [off, w] : kernel) {
        (void)off;
        if (w > 0) s += w;
      }
      return s;
    }
  }
  return 0.0;
}

std::string GeneratorSpec::kind_name() const {
  switch (kind) {
    case Kind::iid_uniform:
      return "iid-uniform";
    case Kind::iid_custom_cdf:
      return "iid-custom-cdf";
    case Kind::moving_average:
      return "moving-average";
  }
  return "?";
}

namespace {

double inverse_cdf(const std::vector<std::pair<double, double>>& knots, double u) {
  // u in [0,1); plateaus in F map to the right endpoint of the gap.
  for (size_t i = 1; i < knots.size(); ++i) {
    if (u <= knots[i].second) {
      double dF = knots[i].second - knots[i - 1].second;
      if (dF <= 0.0) return knots[i].first;
      double t = (u - knots[i - 1].second) / dF;
      return knots[i - 1].first + t * (knots[i].first - knots[i - 1].first);
    }
  }
  return knots.back().first;
}

}  // namespace

PotentialField sample_iid(const LatticeBall& ball, const GeneratorSpec& spec,
                          std::uint64_t sample_index, std::uint64_t stream_seed) {
  if (!spec.iid()) throw std::invalid_argument("sample_iid: generator is not IID");
  spec.validate(ball.dim());
  PotentialField f;
  f.ball = ball;
  f.values.resize(ball.size());
  for (int i = 0; i < ball.size(); ++i) {
    double u = u01(site_hash(stream_seed, sample_index, ball.sites().row(i).transpose()));
    f.values[i] =
        (spec.kind == GeneratorSpec::Kind::iid_uniform) ? u : inverse_cdf(spec.cdf_knots, u);
  }
  f.provenance = {spec.kind_name(), stream_seed, sample_index};
  return f;
}

PotentialField sample_ma(const LatticeBall& ball, const GeneratorSpec& spec,
                         std::uint64_t sample_index, std::uint64_t stream_seed) {
  if (spec.kind != GeneratorSpec::Kind::moving_average)
    throw std::invalid_argument("sample_ma: generator is not moving-average");
  spec.validate(ball.dim());
  PotentialField f;
  f.ball = ball;
  f.values.resize(ball.size());
  Site y(ball.dim());
  for (int i = 0; i < ball.size(); ++i) {
    Site x = ball.site(i);
    double v = 0.0;
    for (const auto& [off, w] : spec.kernel) {
      y = x + off;
      v += w * u01(site_hash(stream_seed, sample_index, y));
    }
    f.values[i] = v;
  }
  f.provenance = {spec.kind_name(), stream_seed, sample_index};
  return f;
}

PotentialField sample_field(const LatticeBall& ball, const GeneratorSpec& spec,
                            std::uint64_t sample_index, std::uint64_t stream_seed) {
  return spec.iid() ? sample_iid(ball, spec, sample_index, stream_seed)
                    : sample_ma(ball, spec, sample_index, stream_seed);
}

}  // namespace anderson
