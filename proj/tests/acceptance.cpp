// Runs the full acceptance suite: one line per criterion, nonzero exit on any failure.

#include <cstdlib>
#include <iostream>

#include "verify_suite.hpp"

int main(int argc, char** argv) {
  moebius::verify::Options opt;
  opt.suite = moebius::verify::Suite::Full;
  if (argc > 1 && std::string(argv[1]) == "fast") opt.suite = moebius::verify::Suite::Fast;
  const int failed = moebius::verify::run_suite(opt, std::cout);
  std::cout << "acceptance failed=" << failed << '\n';
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
