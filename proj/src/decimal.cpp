#include "glp/decimal.hpp"

#include <cctype>

namespace glp {

namespace {

mpz_class pow10(unsigned n) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, n);
  return r;
}

}  // namespace

Decimal::Decimal(mpz_class unscaled, unsigned scale) : unscaled_(std::move(unscaled)), scale_(scale) {
  normalize();
}

void Decimal::normalize() {
  if (unscaled_ == 0) {
    scale_ = 0;
    return;
  }
  while (scale_ > 0 && mpz_divisible_ui_p(unscaled_.get_mpz_t(), 10)) {
    unscaled_ /= 10;
    --scale_;
  }
}

std::optional<Decimal> Decimal::parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool neg = false;
  size_t i = 0;
  if (text[0] == '-') {
    neg = true;
    i = 1;
  }
  std::string digits;
  unsigned scale = 0;
  bool seen_dot = false;
  bool any = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c == '.' && !seen_dot) {
      seen_dot = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    digits.push_back(c);
    any = true;
    if (seen_dot) ++scale;
  }
  if (!any || (seen_dot && scale == 0)) return std::nullopt;
  mpz_class v(digits, 10);
  if (neg) v = -v;
  return Decimal(std::move(v), scale);
}

std::string Decimal::str() const {
  mpz_class mag = abs(unscaled_);
  std::string s = mag.get_str(10);
  if (scale_ > 0) {
    if (s.size() <= scale_) s.insert(0, scale_ - s.size() + 1, '0');
    s.insert(s.size() - scale_, 1, '.');
  }
  if (unscaled_ < 0) s.insert(0, 1, '-');
  return s;
}

static void align(const Decimal& a, const Decimal& b, mpz_class& x, mpz_class& y, unsigned& scale) {
  scale = std::max(a.scale(), b.scale());
  x = a.unscaled() * pow10(scale - a.scale());
  y = b.unscaled() * pow10(scale - b.scale());
}

Decimal operator+(const Decimal& a, const Decimal& b) {
  mpz_class x, y;
  unsigned s;
  align(a, b, x, y, s);
  return Decimal(x + y, s);
}

Decimal operator-(const Decimal& a, const Decimal& b) {
  mpz_class x, y;
  unsigned s;
  align(a, b, x, y, s);
  return Decimal(x - y, s);
}

Decimal operator*(const Decimal& a, const Decimal& b) {
  return Decimal(a.unscaled() * b.unscaled(), a.scale() + b.scale());
}

Decimal Decimal::operator-() const { return Decimal(-unscaled_, scale_); }

std::optional<Decimal> Decimal::divide(const Decimal& a, const Decimal& b) {
  if (b.is_zero()) return std::nullopt;
  // a/b = (ua * 10^(sb + D)) / (ub * 10^sa) * 10^-D
  mpz_class num = a.unscaled() * pow10(b.scale() + kDivisionDigits);
  mpz_class den = b.unscaled() * pow10(a.scale());
  mpz_class q;
  mpz_tdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return Decimal(q, kDivisionDigits);
}

std::optional<Decimal> Decimal::mod(const Decimal& a, const Decimal& b) {
  if (!a.is_integer() || !b.is_integer() || b.is_zero()) return std::nullopt;
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), a.unscaled().get_mpz_t(), b.unscaled().get_mpz_t());
  return Decimal(r, 0);
}

int Decimal::compare(const Decimal& other) const {
  mpz_class x, y;
  unsigned s;
  align(*this, other, x, y, s);
  int c = cmp(x, y);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

}  // namespace glp
