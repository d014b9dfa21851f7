// SPDX-License-Identifier: Apache-2.0
#include "housebot/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return housebot::run_cli(argc, argv, std::cout, std::cerr); }
