#include <cstdio>

int main() {
  std::puts("d1: command-line front end (subcommands pending)");
  return 0;
}
