#include "ctxgames/format.hpp"

#include <charconv>

#include "ctxgames/error.hpp"

namespace ctxgames {

std::string format_double(double x) {
  if (x == 0.0) return "0";  // folds -0 so files stay byte-stable
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw Error("could not format number");
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last)
    throw Error("not a number: '" + std::string(text) + "'");
  return v;
}

long long parse_integer(std::string_view text) {
  long long v = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last)
    throw Error("not an integer: '" + std::string(text) + "'");
  return v;
}

}  // namespace ctxgames
