#ifndef LTT_CLI_HPP
#define LTT_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace ltt {

// Runs one CLI invocation; the verdict document goes to `out`, diagnostics
// to `err`.  Exit code: 0 conclusive verdict, 2 unknown under budget,
// 1 usage or input error.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ltt

#endif
