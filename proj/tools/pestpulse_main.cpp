#include <string>
#include <vector>

#include "pestpulse/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pestpulse::cli::run(args);
}
