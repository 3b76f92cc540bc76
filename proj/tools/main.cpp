#include <vector>
#include <string>

#include "exlgm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return exlgm::run_cli(args);
}
