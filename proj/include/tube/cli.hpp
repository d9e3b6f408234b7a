#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace tube::cli {

inline int run(const std::vector<std::string>& args) {
  (void)args;
  std::cerr << "tube: not wired yet\n";
  return 2;
}

}  // namespace tube::cli
