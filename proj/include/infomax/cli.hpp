#ifndef INFOMAX_CLI_HPP
#define INFOMAX_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace infomax::cli {

enum ExitCode : int {
  kOk = 0,
  kIoError = 1,
  kInvalidArgument = 2,
  kCapacity = 3,
};

/// Entry point for the `infomax` tool. args[0] is the program name. Errors are
/// reported as one JSON line on `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace infomax::cli

#endif  // INFOMAX_CLI_HPP
