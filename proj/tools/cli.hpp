#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qthermo::cli {

/// Runs the command line in-process. Exit codes: 0 ok, 1 runtime failure,
/// 2 usage or config error.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

/// Output directory precedence: --out, then QTHERMO_OUT_DIR, then the config.
std::string resolve_output_dir(const std::string &flag, const std::string &config_value);

}  // namespace qthermo::cli
