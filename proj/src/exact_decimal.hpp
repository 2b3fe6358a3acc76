#pragma once

// Exact rational arithmetic over the shortest decimal form of doubles.

#include <charconv>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace evorl::detail {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

/// The rational equal to the shortest decimal string that round-trips to x,
/// e.g. 0.1 -> 1/10. x must be finite.
inline Rational decimal_rational(double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  std::string_view text(buf, static_cast<std::size_t>(end - buf));

  bool negative = false;
  if (!text.empty() && text.front() == '-') {
    negative = true;
    text.remove_prefix(1);
  }
  int exponent = 0;
  if (const auto e = text.find('e'); e != std::string_view::npos) {
    std::string_view exp_text = text.substr(e + 1);
    if (!exp_text.empty() && exp_text.front() == '+') exp_text.remove_prefix(1);
    std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
    text = text.substr(0, e);
  }
  Integer digits = 0;
  for (const char c : text) {
    if (c != '.') digits = digits * 10 + (c - '0');
  }
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    exponent -= static_cast<int>(text.size() - dot - 1);
  }
  Integer scale = 1;
  for (int i = 0; i < (exponent < 0 ? -exponent : exponent); ++i) scale *= 10;
  Rational value = exponent >= 0 ? Rational(digits * scale) : Rational(digits, scale);
  return negative ? Rational(-value) : value;
}

}  // namespace evorl::detail
