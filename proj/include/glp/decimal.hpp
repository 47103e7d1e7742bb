#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace glp {

// Exact decimal number: unscaled * 10^-scale, kept normalized so that equal
// values have equal representations.
class Decimal {
public:
  Decimal() = default;
  explicit Decimal(long v) : unscaled_(v) {}
  Decimal(mpz_class unscaled, unsigned scale);

  static std::optional<Decimal> parse(std::string_view text);

  bool is_integer() const { return scale_ == 0; }
  bool is_zero() const { return unscaled_ == 0; }
  const mpz_class& unscaled() const { return unscaled_; }
  unsigned scale() const { return scale_; }

  std::string str() const;

  friend Decimal operator+(const Decimal& a, const Decimal& b);
  friend Decimal operator-(const Decimal& a, const Decimal& b);
  friend Decimal operator*(const Decimal& a, const Decimal& b);
  Decimal operator-() const;

  // Quotient truncated to kDivisionDigits fractional digits; nullopt on zero divisor.
  static std::optional<Decimal> divide(const Decimal& a, const Decimal& b);
  // Integer remainder with the sign of the divisor; nullopt unless both are integers
  // and the divisor is nonzero.
  static std::optional<Decimal> mod(const Decimal& a, const Decimal& b);

  int compare(const Decimal& other) const;
  bool operator==(const Decimal& o) const { return compare(o) == 0; }
  bool operator<(const Decimal& o) const { return compare(o) < 0; }

  static constexpr unsigned kDivisionDigits = 30;

private:
  void normalize();
  mpz_class unscaled_ = 0;
  unsigned scale_ = 0;
};

}  // namespace glp
