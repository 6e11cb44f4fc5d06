#ifndef COVPARSE_CLI_H_
#define COVPARSE_CLI_H_

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "covparse/treebank.h"

namespace covparse {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitModel = 3,
};

// Runs the command line `args` (args[0] is the program name). Normal output
// goes to `out`; diagnostics and log lines go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// First min(take, size) sentences of every source, in source order.
std::vector<Sentence> merge_treebanks(const std::vector<std::vector<Sentence>>& sources,
                                      std::size_t take);

struct RankedSource {
  std::string name;
  double las = 0.0;
};

// Scores each source with its scorer and sorts by decreasing LAS; ties keep
// argument order.
std::vector<RankedSource> rank_sources(const std::vector<std::string>& names,
                                       const std::vector<std::function<double()>>& scorers);

}  // namespace covparse

#endif  // COVPARSE_CLI_H_
