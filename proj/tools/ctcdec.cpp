// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "ctcdec/cli/commands.hpp"

int main(int argc, char** argv) { return ctcdec::cli::Run(argc, argv, std::cout, std::cerr); }
