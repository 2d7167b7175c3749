//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_CLI_CLI_H_
#define CARDIOGEN_CLI_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace cardiogen::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable naming a default JSON configuration file.
inline constexpr const char *kConfigEnv = "CARDIOGEN_CONFIG";

/// Runs one subcommand. `args` excludes the program name. Results go to
/// `out` (or --out files), diagnostics to `err`.
int run_command(const std::vector<std::string> &args, std::ostream &out,
                std::ostream &err);

}  // namespace cardiogen::cli

#endif  // CARDIOGEN_CLI_CLI_H_
