#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spotfit::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kIo = 3,
  kMalformed = 4,
};

// Runs the command line given without the program name. Reports go to the
// files named on the command line; diagnostics and summaries go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace spotfit::cli
