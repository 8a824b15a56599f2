#pragma once

#include <string>
#include <string_view>

namespace ctxgames {

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

/// Strict full-string number parsing; throws ctxgames::Error on garbage.
double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

}  // namespace ctxgames
