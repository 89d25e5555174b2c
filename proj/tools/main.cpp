#include "cptv/harness/cli.hpp"

#include <malloc.h>

#include <iostream>

int main(int argc, char** argv) {
  // Tape buffers are reallocated every step; keep them off mmap.
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
  mallopt(M_TRIM_THRESHOLD, 256 << 20);
  std::vector<std::string> args(argv, argv + argc);
  return cptv::harness::run_cli(args, std::cout, std::cerr);
}
