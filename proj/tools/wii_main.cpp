#include <string>
#include <vector>

#include "wii/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return wii::run_cli(args);
}
