#include "rational.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>

namespace hamreach {

namespace {

using i128 = __int128;

std::int64_t checked_narrow(i128 v, const char* what) {
  if (v > INT64_MAX || v < INT64_MIN) throw Error(std::string("rational overflow in ") + what);
  return static_cast<std::int64_t>(v);
}

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw DomainError("rational with zero denominator");
  i128 nn = n, dd = d;
  if (dd < 0) {
    nn = -nn;
    dd = -dd;
  }
  i128 g = gcd128(nn, dd);
  if (g > 1) {
    nn /= g;
    dd /= g;
  }
  num_ = checked_narrow(nn, "construction");
  den_ = checked_narrow(dd, "construction");
}

Rational Rational::from_double(double x) {
  if (!std::isfinite(x)) throw Error("non-finite value has no rational form");
  if (x == 0.0) return Rational(0);
  int exp = 0;
  double f = std::frexp(x, &exp);  // x = f * 2^exp, |f| in [0.5, 1)
  auto mant = static_cast<std::int64_t>(std::ldexp(f, 53));
  exp -= 53;
  // mant * 2^exp with exp in roughly [-1074, 971]; only modest exponents fit int64.
  if (exp >= 0) {
    if (exp > 10) throw Error("double too large for exact rational");
    i128 n = i128(mant) << exp;
    return Rational(checked_narrow(n, "from_double"), 1);
  }
  int shift = -exp;
  // Strip trailing zero bits of the mantissa first.
  while (shift > 0 && mant % 2 == 0) {
    mant /= 2;
    --shift;
  }
  if (shift > 62) throw Error("double too small for exact rational");
  return Rational(mant, std::int64_t(1) << shift);
}

Rational Rational::from_decimal(const std::string& text) {
  // digits [. digits] [ (e|E) [+-] digits ]
  i128 mant = 0;
  int frac_digits = 0;
  long expo = 0;
  std::size_t i = 0;
  bool any = false;
  for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i) {
    mant = mant * 10 + (text[i] - '0');
    if (mant > i128(INT64_MAX)) throw Error("numeric literal too large");
    any = true;
  }
  if (i < text.size() && text[i] == '.') {
    ++i;
    for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i) {
      mant = mant * 10 + (text[i] - '0');
      if (mant > i128(INT64_MAX)) throw Error("numeric literal too precise");
      ++frac_digits;
      any = true;
    }
  }
  if (!any) throw Error("empty numeric literal");
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool neg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      neg = text[i] == '-';
      ++i;
    }
    if (i >= text.size()) throw Error("missing exponent digits");
    long e = 0;
    for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i) {
      e = e * 10 + (text[i] - '0');
      if (e > 18) throw Error("exponent out of range");
    }
    expo = neg ? -e : e;
  }
  if (i != text.size()) throw Error("malformed numeric literal");

  long net = expo - frac_digits;  // value = mant * 10^net
  i128 n = mant, d = 1;
  for (; net > 0; --net) {
    n *= 10;
    if (n > i128(INT64_MAX)) throw Error("numeric literal too large");
  }
  for (; net < 0; ++net) {
    d *= 10;
    if (d > i128(INT64_MAX)) throw Error("numeric literal too precise");
  }
  return Rational(checked_narrow(n, "literal"), checked_narrow(d, "literal"));
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::operator-() const {
  Rational r;
  r.num_ = checked_narrow(-i128(num_), "negation");
  r.den_ = den_;
  return r;
}

Rational Rational::operator+(const Rational& o) const {
  i128 n = i128(num_) * o.den_ + i128(o.num_) * den_;
  i128 d = i128(den_) * o.den_;
  i128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  Rational r;
  r.num_ = checked_narrow(n, "addition");
  r.den_ = checked_narrow(d, "addition");
  return r;
}

Rational Rational::operator-(const Rational& o) const { return *this + (-o); }

Rational Rational::operator*(const Rational& o) const {
  i128 n = i128(num_) * o.num_;
  i128 d = i128(den_) * o.den_;
  i128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  Rational r;
  r.num_ = checked_narrow(n, "multiplication");
  r.den_ = checked_narrow(d, "multiplication");
  return r;
}

Rational Rational::operator/(const Rational& o) const {
  if (o.num_ == 0) throw DomainError("rational division by zero");
  i128 n = i128(num_) * o.den_;
  i128 d = i128(den_) * o.num_;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  i128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  Rational r;
  r.num_ = checked_narrow(n, "division");
  r.den_ = checked_narrow(d, "division");
  return r;
}

Rational Rational::pow(std::int64_t e) const {
  if (e == 0) return Rational(1);
  if (num_ == 0) {
    if (e < 0) throw DomainError("zero to a negative power");
    return Rational(0);
  }
  bool invert = e < 0;
  std::uint64_t n = invert ? static_cast<std::uint64_t>(-e) : static_cast<std::uint64_t>(e);
  Rational base = *this;
  Rational acc(1);
  while (n > 0) {
    if (n & 1) acc = acc * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return invert ? Rational(1) / acc : acc;
}

bool Rational::operator<(const Rational& o) const {
  return i128(num_) * o.den_ < i128(o.num_) * den_;
}

}  // namespace hamreach
