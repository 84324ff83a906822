#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gmoe::cli {

/// Runs one command line (without the program name). Exit codes: 0 ok,
/// 1 usage or parameter error, 2 verification failure, 3 inconclusive
/// truncation.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gmoe::cli
