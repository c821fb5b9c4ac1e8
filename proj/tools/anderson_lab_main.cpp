#include <string>
#include <vector>

#include "anderson/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return anderson::run_cli(args);
}
