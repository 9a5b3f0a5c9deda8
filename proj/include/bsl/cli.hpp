#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bsl::cli {

// Exit codes: 0 all requested checks pass, 1 a stage failed, 2 bad configuration.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace bsl::cli
