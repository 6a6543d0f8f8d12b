#pragma once

#include <string>
#include <vector>

namespace sfdel {

// Command line front end.  Subcommands: simulate, fit, test, coverage,
// semivariogram.  Machine-readable JSON goes to stdout (or --json FILE); a
// short human summary goes to stderr.  Returns 0 on success, 1 on usage
// errors, 2 on data/numeric errors.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args);  // args without argv[0]

}  // namespace sfdel
