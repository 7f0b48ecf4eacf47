#include <cstdio>

int main() {
  std::puts("fpsolve: subcommands land with the pipeline");
  return 0;
}
