#include <clocale>
#include <iostream>

#include "ncerg/cli/run.hpp"

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  std::ios::sync_with_stdio(false);
  auto parsed = ncerg::cli::parse_args(argc, argv, std::cout, std::cerr);
  if (const int* code = std::get_if<int>(&parsed)) return *code;
  return ncerg::cli::run(std::get<ncerg::cli::ExperimentConfig>(parsed), std::cout, std::cerr);
}
