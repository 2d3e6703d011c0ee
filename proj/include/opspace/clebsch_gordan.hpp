// Copyright 2026 The opspace authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OPSPACE_CLEBSCH_GORDAN_HPP
#define OPSPACE_CLEBSCH_GORDAN_HPP

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace opspace::exact {

using BigInt = boost::multiprecision::cpp_int;

/// Arbitrary-precision rational, normalized with positive denominator.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long long v) : num_(v), den_(1) {}  // NOLINT: implicit by design
  Rational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_ == 0) throw std::invalid_argument("Rational: zero denominator");
    normalize();
  }

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }
  bool is_zero() const { return num_ == 0; }
  int sign() const { return num_ == 0 ? 0 : (num_ > 0 ? 1 : -1); }

  Rational operator-() const { return Rational(-num_, den_); }
  Rational operator+(const Rational& o) const {
    return Rational(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
  }
  Rational operator-(const Rational& o) const {
    return Rational(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
  }
  Rational operator*(const Rational& o) const { return Rational(num_ * o.num_, den_ * o.den_); }
  Rational operator/(const Rational& o) const {
    if (o.num_ == 0) throw std::invalid_argument("Rational: division by zero");
    return Rational(num_ * o.den_, den_ * o.num_);
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rational& o) const { return !(*this == o); }

  double to_double() const { return num_.convert_to<double>() / den_.convert_to<double>(); }

 private:
  void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    BigInt g = boost::multiprecision::gcd(num_ < 0 ? BigInt(-num_) : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }

  BigInt num_, den_;
};

inline const BigInt& factorial(int n) {
  if (n < 0) throw std::invalid_argument("factorial: negative argument");
  static const auto table = [] {
    std::vector<BigInt> t(201);
    t[0] = 1;
    for (int i = 1; i <= 200; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  if (n >= static_cast<int>(table.size())) throw std::invalid_argument("factorial: argument too large");
  return table[n];
}

}  // namespace opspace::exact

namespace opspace {

/// Angular momenta as doubled integers, so half-integer spins stay exact
/// (two_j1 = 2*j1 and so on).
struct CgKey {
  int two_j1, two_m1, two_j2, two_m2, two_k, two_q;
};

/// Exact Clebsch-Gordan coefficient in the real Condon-Shortley convention,
/// factored as  coefficient = racah_sum * sqrt(rank_radicand * weight_radicand).
///
/// racah_sum carries the sign; rank_radicand depends only on (j1,j2,K,Q) and
/// weight_radicand only on (j1,m1,j2,m2), which lets sums of coefficient
/// products at fixed (j1,j2,Q) be evaluated fully in rational arithmetic.
struct CgValue {
  exact::Rational racah_sum;        // alternating factorial sum
  exact::Rational rank_radicand;    // (2K+1) * triangle(j1,j2,K) * (K+Q)!(K-Q)!
  exact::Rational weight_radicand;  // (j1-m1)!(j1+m1)!(j2-m2)!(j2+m2)!
  double value = 0.0;

  bool is_zero() const { return racah_sum.is_zero(); }

  /// sign(coefficient) * coefficient^2, exact.
  exact::Rational signed_square() const {
    exact::Rational sq = racah_sum * racah_sum * rank_radicand * weight_radicand;
    return racah_sum.sign() < 0 ? -sq : sq;
  }
};

namespace detail {

inline void check_jm_pair(int two_j, int two_m, const char* what) {
  if (two_j < 0) throw std::invalid_argument(std::string("clebsch_gordan: negative j in ") + what);
  if (((two_j + two_m) & 1) != 0)
    throw std::invalid_argument(std::string("clebsch_gordan: m not half-integer-compatible with j in ") + what);
  if (std::abs(two_m) > two_j)
    throw std::invalid_argument(std::string("clebsch_gordan: |m| > j in ") + what);
}

}  // namespace detail

inline CgValue clebsch_gordan(const CgKey& key) {
  using exact::factorial;
  using exact::Rational;
  detail::check_jm_pair(key.two_j1, key.two_m1, "(j1,m1)");
  detail::check_jm_pair(key.two_j2, key.two_m2, "(j2,m2)");
  detail::check_jm_pair(key.two_k, key.two_q, "(K,Q)");

  CgValue out;  // zero-initialized racah_sum => selection-rule zero
  if (key.two_q != key.two_m1 + key.two_m2) return out;
  if (key.two_k < std::abs(key.two_j1 - key.two_j2) || key.two_k > key.two_j1 + key.two_j2) return out;
  if (((key.two_j1 + key.two_j2 + key.two_k) & 1) != 0) return out;

  const int j1pj2mk = (key.two_j1 + key.two_j2 - key.two_k) / 2;
  const int j1mj2pk = (key.two_j1 - key.two_j2 + key.two_k) / 2;
  const int mj1pj2pk = (-key.two_j1 + key.two_j2 + key.two_k) / 2;
  const int j1pj2pk1 = (key.two_j1 + key.two_j2 + key.two_k) / 2 + 1;
  const int kpq = (key.two_k + key.two_q) / 2;
  const int kmq = (key.two_k - key.two_q) / 2;
  const int j1mm1 = (key.two_j1 - key.two_m1) / 2;
  const int j1pm1 = (key.two_j1 + key.two_m1) / 2;
  const int j2mm2 = (key.two_j2 - key.two_m2) / 2;
  const int j2pm2 = (key.two_j2 + key.two_m2) / 2;

  out.rank_radicand = Rational(exact::BigInt(key.two_k + 1) * factorial(j1pj2mk) * factorial(j1mj2pk) *
                                   factorial(mj1pj2pk) * factorial(kpq) * factorial(kmq),
                               factorial(j1pj2pk1));
  out.weight_radicand =
      Rational(factorial(j1mm1) * factorial(j1pm1) * factorial(j2mm2) * factorial(j2pm2), 1);

  // Racah's single-sum form; n ranges over all values keeping factorial
  // arguments non-negative.
  const int kmj2pm1 = (key.two_k - key.two_j2 + key.two_m1) / 2;
  const int kmj1mm2 = (key.two_k - key.two_j1 - key.two_m2) / 2;
  const int n_min = std::max({0, -kmj2pm1, -kmj1mm2});
  const int n_max = std::min({j1pj2mk, j1mm1, j2pm2});
  Rational sum = 0;
  for (int n = n_min; n <= n_max; ++n) {
    Rational term(1, factorial(n) * factorial(j1pj2mk - n) * factorial(j1mm1 - n) *
                         factorial(j2pm2 - n) * factorial(kmj2pm1 + n) * factorial(kmj1mm2 + n));
    sum += (n & 1) ? -term : term;
  }
  out.racah_sum = sum;

  const Rational sq = sum * sum * out.rank_radicand * out.weight_radicand;
  out.value = sum.sign() * std::sqrt(sq.to_double());
  return out;
}

inline double clebsch_gordan_value(int two_j1, int two_m1, int two_j2, int two_m2, int two_k,
                                   int two_q) {
  return clebsch_gordan(CgKey{two_j1, two_m1, two_j2, two_m2, two_k, two_q}).value;
}

/// Convenience overload on floating half-integers (1.5 means j = 3/2).
inline CgValue clebsch_gordan(double j1, double m1, double j2, double m2, double k, double q) {
  auto to_twice = [](double x, const char* what) {
    const double t = 2.0 * x;
    const double r = std::round(t);
    if (std::abs(t - r) > 1e-9)
      throw std::invalid_argument(std::string("clebsch_gordan: ") + what + " is not a half-integer");
    return static_cast<int>(r);
  };
  return clebsch_gordan(CgKey{to_twice(j1, "j1"), to_twice(m1, "m1"), to_twice(j2, "j2"),
                              to_twice(m2, "m2"), to_twice(k, "K"), to_twice(q, "Q")});
}

}  // namespace opspace

#endif  // OPSPACE_CLEBSCH_GORDAN_HPP
