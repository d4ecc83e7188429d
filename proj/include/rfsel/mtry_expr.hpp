#pragma once

#include <cstddef>
#include <string>

namespace rfsel {

// A feature count written as an expression of the dimension p, e.g. "7",
// "sqrt(p)", "sqrt", "2sqrt(p)", "sqrt(p)/2", "p/3", "3p/4", "p". The value
// is coefficient * base / divisor, floored.
class MtryExpr {
 public:
  enum class Base { Constant, P, SqrtP };

  static MtryExpr parse(const std::string& text);
  static MtryExpr constant(double value);
  static MtryExpr sqrt_p();
  static MtryExpr p_over(double divisor);

  double raw(std::size_t p) const;
  // floor(raw(p)), clamped to at least 1. Throws ConfigError when it
  // exceeds p.
  std::size_t resolve(std::size_t p) const;
  // floor(raw(p)) without clamping; throws ConfigError outside 1..p.
  std::size_t resolve_strict(std::size_t p) const;

  const std::string& label() const { return label_; }

 private:
  Base base_ = Base::Constant;
  double coefficient_ = 1.0;
  double divisor_ = 1.0;
  std::string label_;
};

}  // namespace rfsel
