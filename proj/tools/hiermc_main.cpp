#include "hiermc/cli.hpp"

int main(int argc, char** argv) {
  return hiermc::cli_main(argc, argv);
}
