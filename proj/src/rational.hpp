#pragma once

#include <cstdint>
#include <string>

#include "error.hpp"

namespace hamreach {

// Exact rational on int64 with overflow-checked arithmetic. All operations
// normalize (gcd reduced, positive denominator). Overflow throws Error rather
// than silently wrapping; the expression layer treats that as a hard failure.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rational(std::int64_t n, std::int64_t d);

  // Exact conversion: every finite double is a dyadic rational.
  static Rational from_double(double x);
  // Exact conversion of a decimal literal like "1.25" or "3e-2".
  static Rational from_decimal(const std::string& text);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_zero() const { return num_ == 0; }
  bool is_one() const { return num_ == 1 && den_ == 1; }
  bool is_integer() const { return den_ == 1; }
  bool negative() const { return num_ < 0; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  Rational operator-() const;
  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;  // throws DomainError on /0
  Rational pow(std::int64_t e) const;           // throws DomainError on 0^negative

  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const;

 private:
  std::int64_t num_;
  std::int64_t den_;
};

}  // namespace hamreach
