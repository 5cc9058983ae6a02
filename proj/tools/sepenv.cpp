// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "sepenv/cli.hpp"

int main(int argc, char** argv) { return sepenv::cli::run(argc, argv, std::cout, std::cerr); }
