#ifndef ITTS_CLI_HPP
#define ITTS_CLI_HPP

#include <string>
#include <vector>

namespace itts {

// One sentence per non-empty line.
std::vector<std::string> load_corpus(const std::string& path);

// Entry point behind the itts binary. Exit codes: 0 success, 1 usage error,
// 2 runtime error.
int run_cli(int argc, const char* const* argv);

}  // namespace itts

#endif  // ITTS_CLI_HPP
