#include <string>
#include <vector>

#include "bumplab/cli.hpp"

int main(int argc, char** argv) {
  return bumplab::run_command(std::vector<std::string>(argv + 1, argv + argc));
}
