// Command line front end; subcommands are wired up in qsix/cli.hpp.
#include <cstdio>

int main() {
  std::printf("qsix: command line interface not wired yet\n");
  return 2;
}
