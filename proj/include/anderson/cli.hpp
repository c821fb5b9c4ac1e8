#pragma once

#include <string>
#include <vector>

namespace anderson {

// Entry point shared by the binary and the tests. Exit codes:
//   0  run completed, no deterministic property violated
//   1  a deterministic property was violated
//   2  configuration error (schema, types, parameter validation)
//   3  budget exceeded; partial artifacts written and flagged
int run_cli(const std::vector<std::string>& args);

}  // namespace anderson
