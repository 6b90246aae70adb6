#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lasm {

/// Exit codes: 0 success, 1 I/O failure, 2 usage/parse/validation failure, 3 numerical guard.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lasm
