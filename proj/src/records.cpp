#include "anderson/records.hpp"

#include <cstdio>
#include <stdexcept>

namespace anderson::io {

json to_json(const MonteCarloEstimate& e) {
  return json{{"event", e.event},   {"trials", e.trials},   {"hits", e.hits},
              {"p_hat", e.p_hat},   {"ci_low", e.ci_low},   {"ci_high", e.ci_high},
              {"seed", e.seed}};
}

json generator_to_json(const GeneratorSpec& spec) {
  json j;
  j["kind"] = spec.kind_name();
  if (spec.kind == GeneratorSpec::Kind::iid_custom_cdf) {
    json knots = json::array();
    for (const auto& [t, F] : spec.cdf_knots) knots.push_back(json::array({t, F}));
    j["cdf_knots"] = knots;
  } else if (spec.kind == GeneratorSpec::Kind::moving_average) {
    json kernel = json::array();
    for (const auto& [off, w] : spec.kernel) {
      json o = json::array();
      for (int i = 0; i < off.size(); ++i) o.push_back(off[i]);
      kernel.push_back(json{{"offset", o}, {"weight", w}});
    }
    j["kernel"] = kernel;
  }
  return j;
}

GeneratorSpec generator_from_json(const json& j, int dim) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "iid-uniform") return GeneratorSpec::iid_uniform();
  if (kind == "iid-custom-cdf") {
    std::vector<std::pair<double, double>> knots;
    for (const auto& k : j.at("cdf_knots")) knots.emplace_back(k.at(0), k.at(1));
    auto spec = GeneratorSpec::custom_cdf(std::move(knots));
    spec.validate(dim);
    return spec;
  }
  if (kind == "moving-average") {
    if (!j.contains("kernel")) {
      auto spec = GeneratorSpec::default_moving_average(dim);
      spec.validate(dim);
      return spec;
    }
    std::vector<std::pair<Site, double>> kernel;
    for (const auto& k : j.at("kernel")) {
      const auto& o = k.at("offset");
      Site off(static_cast<int>(o.size()));
      for (size_t i = 0; i < o.size(); ++i) off[static_cast<int>(i)] = o.at(i).get<int>();
      kernel.emplace_back(off, k.at("weight").get<double>());
    }
    auto spec = GeneratorSpec::moving_average(std::move(kernel));
    spec.validate(dim);
    return spec;
  }
  throw std::invalid_argument("unknown generator kind: " + kind);
}

json params_to_json(const ScaleParams& p) {
  return json{{"L0", p.L0},     {"alpha", p.alpha}, {"beta", p.beta},
              {"beta_prime", p.beta_prime}, {"rho", p.rho},     {"tau", p.tau},
              {"m", p.m},       {"p", p.p},         {"b", p.b},
              {"dim", p.dim}};
}

ScaleParams params_from_json(const json& j) {
  ScaleParams p;
  if (j.contains("L0")) p.L0 = j.at("L0").get<int>();
  if (j.contains("alpha")) p.alpha = j.at("alpha").get<double>();
  if (j.contains("beta")) p.beta = j.at("beta").get<double>();
  if (j.contains("beta_prime")) p.beta_prime = j.at("beta_prime").get<double>();
  if (j.contains("rho")) p.rho = j.at("rho").get<double>();
  if (j.contains("tau")) p.tau = j.at("tau").get<double>();
  if (j.contains("m")) p.m = j.at("m").get<double>();
  if (j.contains("p")) p.p = j.at("p").get<double>();
  if (j.contains("b")) p.b = j.at("b").get<double>();
  if (j.contains("dim")) p.dim = j.at("dim").get<int>();
  return p;
}

JsonlWriter::JsonlWriter(const std::filesystem::path& path) {
  if (!path.parent_path().empty()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::trunc);
  if (!out_) throw std::runtime_error("cannot open " + path.string());
}

void JsonlWriter::write(const json& j) {
  out_ << j.dump() << "\n";
  ++lines_;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  if (!path.parent_path().empty()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  for (size_t i = 0; i < header.size(); ++i) out << header[i] << (i + 1 < header.size() ? "," : "");
  out << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) out << row[i] << (i + 1 < row.size() ? "," : "");
    out << "\n";
  }
}

std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace anderson::io
