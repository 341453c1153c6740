#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "cantor/cylinder.hpp"

namespace cantor::cli {

/// Exit codes: 0 success, 1 computation failure, 2 usage error.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kUsage = 2;

/// Runs one subcommand (args exclude the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "3,0;0,3;1,1*3": cylinders (a,b) separated by ';', "*k" repeats. Throws
/// ParseError.
std::vector<Cylinder> parse_parts(const std::string& text);
/// "a,b". Throws ParseError.
Cylinder parse_cylinder(const std::string& text);

}  // namespace cantor::cli
