#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dada {

/// Entry point of the `dada` tool. Returns 0 on success, 2 on usage or
/// configuration errors and 1 on runtime failures.
int cli_main(int argc, char** argv);

/// Same, with explicit arguments (without the program name) and streams.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dada
