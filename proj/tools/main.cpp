// SPDX-License-Identifier: Apache-2.0

#include "pimsim/cli.hpp"

int main(int argc, char** argv) { return pimsim::cli_main(argc, argv); }
