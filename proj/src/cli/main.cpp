//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include <iostream>

#include "cardiogen/cli/cli.h"
#include "cardiogen/core/allocator.h"

int main(int argc, char **argv) {
  cardiogen::retain_heap_memory();
  return cardiogen::cli::run_command(
      std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
