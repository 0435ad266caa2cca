#include <cstdio>

int main() {
  std::puts("kgalign: CLI under construction");
  return 1;
}
