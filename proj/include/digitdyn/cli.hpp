#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "digitdyn/integer.hpp"

namespace digitdyn {

// Parses "123" or a digit vector "[d_k,...,d_1,d_0]@base" (most significant
// digit first).  Digit vectors are range checked against the base.
Int parse_integer_arg(const std::string& text);

// Parses "p/q" or a plain integer.  The denominator must be positive.
Rat parse_rational_arg(const std::string& text);

// Runs one tool invocation.  `args` is the command line without the program
// name.  Returns 0 on success, 1 when the command ran but the answer is a
// refusal or a failed check, 2 for usage and precondition problems.
int cli_dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace digitdyn
