#include <vector>
#include <string>

#include "tube/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tube::cli::run(args);
}
