// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "stc/cli.hpp"

int main(int argc, char** argv) { return stc::cli::run(argc, argv, std::cout, std::cerr); }
