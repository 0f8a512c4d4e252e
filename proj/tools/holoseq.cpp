#include <iostream>

#include "holoseq/cli.hpp"

int main(int argc, char** argv) { return holoseq::cli::main_entry(argc, argv, std::cout, std::cerr); }
