#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "anderson/disorder.hpp"
#include "anderson/mc_stats.hpp"
#include "anderson/scale_params.hpp"

namespace anderson::io {

using nlohmann::json;

// Result files carry this tag; the aggregator refuses mixed versions.
inline constexpr const char* kSchemaVersion = "anderson-lab-1";

json to_json(const MonteCarloEstimate& e);

json generator_to_json(const GeneratorSpec& spec);
GeneratorSpec generator_from_json(const json& j, int dim);

json params_to_json(const ScaleParams& p);
ScaleParams params_from_json(const json& j);

// One JSON object per line, written in canonical (already sorted) order.
class JsonlWriter {
 public:
  explicit JsonlWriter(const std::filesystem::path& path);
  void write(const json& j);
  long lines() const { return lines_; }

 private:
  std::ofstream out_;
  long lines_ = 0;
};

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::string csv_num(double v);

}  // namespace anderson::io
