#include "rfsel/mtry_expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "rfsel/error.hpp"

namespace rfsel {

namespace {

bool take_number(std::string_view& s, double& out) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr == begin) return false;
  s.remove_prefix(static_cast<std::size_t>(ptr - begin));
  return true;
}

bool take(std::string_view& s, std::string_view token) {
  if (s.substr(0, token.size()) != token) return false;
  s.remove_prefix(token.size());
  return true;
}

}  // namespace

MtryExpr MtryExpr::parse(const std::string& text) {
  std::string compact;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) {
      compact.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
  }
  if (compact.empty()) throw ConfigError("empty mtry expression");

  MtryExpr expr;
  expr.label_ = compact;
  std::string_view s = compact;
  double number = 0.0;
  const bool leading_number = take_number(s, number);
  if (leading_number) {
    if (s.empty()) {
      expr.base_ = Base::Constant;
      expr.coefficient_ = number;
      if (number < 0) throw ConfigError(fmt::format("negative mtry '{}'", text));
      return expr;
    }
    expr.coefficient_ = number;
    take(s, "*");
  }
  if (take(s, "sqrt(p)") || take(s, "sqrtp") || take(s, "sqrt")) {
    expr.base_ = Base::SqrtP;
  } else if (take(s, "p")) {
    expr.base_ = Base::P;
  } else {
    throw ConfigError(fmt::format("cannot parse mtry expression '{}'", text));
  }
  if (take(s, "/")) {
    if (!take_number(s, expr.divisor_) || expr.divisor_ <= 0) {
      throw ConfigError(fmt::format("bad divisor in mtry expression '{}'", text));
    }
  }
  if (!s.empty()) throw ConfigError(fmt::format("trailing characters in mtry expression '{}'", text));
  if (expr.coefficient_ <= 0) throw ConfigError(fmt::format("non-positive coefficient in '{}'", text));
  return expr;
}

MtryExpr MtryExpr::constant(double value) {
  MtryExpr e;
  e.coefficient_ = value;
  e.label_ = fmt::format("{}", value);
  return e;
}

MtryExpr MtryExpr::sqrt_p() { return parse("sqrt(p)"); }

MtryExpr MtryExpr::p_over(double divisor) { return parse(fmt::format("p/{}", divisor)); }

double MtryExpr::raw(std::size_t p) const {
  const double pd = static_cast<double>(p);
  double base = 1.0;
  switch (base_) {
    case Base::Constant: base = 1.0; break;
    case Base::P: base = pd; break;
    case Base::SqrtP: base = std::sqrt(pd); break;
  }
  return coefficient_ * base / divisor_;
}

std::size_t MtryExpr::resolve(std::size_t p) const {
  const double v = std::floor(raw(p) + 1e-9);
  const auto value = static_cast<std::size_t>(std::max(1.0, v));
  if (value > p) throw ConfigError(fmt::format("mtry '{}' evaluates to {} > p = {}", label_, value, p));
  return value;
}

std::size_t MtryExpr::resolve_strict(std::size_t p) const {
  const double v = std::floor(raw(p) + 1e-9);
  if (v < 1.0 || v > static_cast<double>(p)) {
    throw ConfigError(fmt::format("mtry '{}' evaluates to {} outside 1..{}", label_, v, p));
  }
  return static_cast<std::size_t>(v);
}

}  // namespace rfsel
