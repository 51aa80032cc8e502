#ifndef SG_CLI_HPP
#define SG_CLI_HPP

#include <string>
#include <vector>

namespace sg::cli {

// Exit codes: 0 success, 1 invariant violation / computation failure,
// 2 configuration error.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace sg::cli

#endif  // SG_CLI_HPP
