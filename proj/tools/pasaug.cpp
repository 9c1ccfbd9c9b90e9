#include <string>
#include <vector>

#include "pasaug/cli.hpp"

int main(int argc, char** argv) {
  return pasaug::run_cli(std::vector<std::string>(argv, argv + argc));
}
