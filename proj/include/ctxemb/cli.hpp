#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ctxemb::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kData = 2,
    kInternal = 3,
};

// Runs one subcommand (build, neighbors, phrase, top-norm, eval, alpha-sweep,
// norms, convert). `args` excludes the program name. Errors go to `err` as a
// single "error\t<kind>\t<message>" line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ctxemb::cli
