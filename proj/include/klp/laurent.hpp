#pragma once

// Exact integer Laurent polynomials in v.
//
// The Hecke algebra constants are derived, never stored: alpha = v^-1 - v and
// q = v^-2. Coefficients default to arbitrary precision integers.

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"
#include "klp/errors.hpp"

namespace klp {

using BigInt = boost::multiprecision::cpp_int;

template <class Int>
class BasicLaurent {
 public:
  using coefficient_type = Int;

  struct Term {
    int exp;
    Int coef;
    friend bool operator==(const Term&, const Term&) = default;
  };

  BasicLaurent() = default;

  /// Constant polynomial.
  BasicLaurent(Int c)  // NOLINT(google-explicit-constructor)
  {
    if (c != 0) terms_.push_back({0, std::move(c)});
  }
  BasicLaurent(int c) : BasicLaurent(Int(c)) {}  // NOLINT(google-explicit-constructor)

  static BasicLaurent monomial(Int coef, int exp) {
    BasicLaurent p;
    if (coef != 0) p.terms_.push_back({exp, std::move(coef)});
    return p;
  }

  /// v^exp
  static BasicLaurent v(int exp = 1) { return monomial(Int(1), exp); }

  /// q^k = v^{-2k}
  static BasicLaurent q(int k = 1) { return monomial(Int(1), -2 * k); }

  /// alpha = v^-1 - v
  static BasicLaurent alpha() {
    BasicLaurent p;
    p.terms_.push_back({-1, Int(1)});
    p.terms_.push_back({1, Int(-1)});
    return p;
  }

  /// Builds from (exponent, coefficient) pairs in any order; repeated exponents add up.
  static BasicLaurent from_terms(std::initializer_list<std::pair<int, long long>> pairs) {
    std::map<int, Int> acc;
    for (auto [e, c] : pairs) acc[e] += Int(c);
    return from_map(acc);
  }

  static BasicLaurent from_map(const std::map<int, Int>& acc) {
    BasicLaurent p;
    for (const auto& [e, c] : acc)
      if (c != 0) p.terms_.push_back({e, c});
    return p;
  }

  /// Coefficients indexed by q-degree, i.e. sum_k coefs[k] q^k.
  static BasicLaurent from_q_coefficients(const std::vector<Int>& coefs) {
    BasicLaurent p;
    for (std::size_t k = coefs.size(); k-- > 0;)
      if (coefs[k] != 0) p.terms_.push_back({-2 * static_cast<int>(k), coefs[k]});
    return p;
  }

  [[nodiscard]] bool is_zero() const { return terms_.empty(); }
  [[nodiscard]] const std::vector<Term>& terms() const { return terms_; }
  [[nodiscard]] int min_exp() const { return terms_.empty() ? 0 : terms_.front().exp; }
  [[nodiscard]] int max_exp() const { return terms_.empty() ? 0 : terms_.back().exp; }

  [[nodiscard]] Int coeff(int exp) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), exp,
                               [](const Term& t, int e) { return t.exp < e; });
    if (it != terms_.end() && it->exp == exp) return it->coef;
    return Int(0);
  }

  /// Multiplication by v^k.
  [[nodiscard]] BasicLaurent shifted(int k) const {
    BasicLaurent p = *this;
    for (auto& t : p.terms_) t.exp += k;
    return p;
  }

  BasicLaurent& operator+=(const BasicLaurent& o) { return merge(o, false); }
  BasicLaurent& operator-=(const BasicLaurent& o) { return merge(o, true); }

  BasicLaurent& operator*=(const BasicLaurent& o) {
    *this = *this * o;
    return *this;
  }

  BasicLaurent operator-() const {
    BasicLaurent p = *this;
    for (auto& t : p.terms_) t.coef = -t.coef;
    return p;
  }

  friend BasicLaurent operator+(BasicLaurent a, const BasicLaurent& b) { return a += b; }
  friend BasicLaurent operator-(BasicLaurent a, const BasicLaurent& b) { return a -= b; }

  friend BasicLaurent operator*(const BasicLaurent& a, const BasicLaurent& b) {
    if (a.is_zero() || b.is_zero()) return {};
    if (b.terms_.size() == 1) return a.scaled(b.terms_[0].coef, b.terms_[0].exp);
    if (a.terms_.size() == 1) return b.scaled(a.terms_[0].coef, a.terms_[0].exp);
    const int lo = a.min_exp() + b.min_exp();
    std::vector<Int> dense(static_cast<std::size_t>(a.max_exp() + b.max_exp() - lo + 1));
    for (const auto& x : a.terms_)
      for (const auto& y : b.terms_) dense[static_cast<std::size_t>(x.exp + y.exp - lo)] += x.coef * y.coef;
    BasicLaurent p;
    for (std::size_t i = 0; i < dense.size(); ++i)
      if (dense[i] != 0) p.terms_.push_back({lo + static_cast<int>(i), std::move(dense[i])});
    return p;
  }

  friend bool operator==(const BasicLaurent&, const BasicLaurent&) = default;

  friend std::ostream& operator<<(std::ostream& os, const BasicLaurent& p) { return os << to_string(p); }

 private:
  BasicLaurent scaled(const Int& c, int shift) const {
    BasicLaurent p;
    p.terms_.reserve(terms_.size());
    for (const auto& t : terms_) p.terms_.push_back({t.exp + shift, t.coef * c});
    return p;
  }

  BasicLaurent& merge(const BasicLaurent& o, bool negate) {
    if (o.is_zero()) return *this;
    std::vector<Term> out;
    out.reserve(terms_.size() + o.terms_.size());
    auto i = terms_.begin();
    auto j = o.terms_.begin();
    while (i != terms_.end() || j != o.terms_.end()) {
      if (j == o.terms_.end() || (i != terms_.end() && i->exp < j->exp)) {
        out.push_back(std::move(*i++));
      } else if (i == terms_.end() || j->exp < i->exp) {
        out.push_back({j->exp, negate ? Int(-j->coef) : j->coef});
        ++j;
      } else {
        Int c = negate ? Int(i->coef - j->coef) : Int(i->coef + j->coef);
        if (c != 0) out.push_back({i->exp, std::move(c)});
        ++i;
        ++j;
      }
    }
    terms_ = std::move(out);
    return *this;
  }

  std::vector<Term> terms_;  // ascending exponent, no zero coefficients
};

using Laurent = BasicLaurent<BigInt>;

/// The involution d with d(v) = v^-1.
template <class Int>
BasicLaurent<Int> bar(const BasicLaurent<Int>& p) {
  std::map<int, Int> acc;
  for (const auto& t : p.terms()) acc[-t.exp] = t.coef;
  return BasicLaurent<Int>::from_map(acc);
}

/// Membership in L^+ (all coefficients non-negative).
template <class Int>
bool is_nonneg(const BasicLaurent<Int>& p) {
  return std::all_of(p.terms().begin(), p.terms().end(), [](const auto& t) { return t.coef >= 0; });
}

/// Exact division; throws DomainError when the divisor does not divide p.
template <class Int>
BasicLaurent<Int> divide_exact(const BasicLaurent<Int>& p, const BasicLaurent<Int>& divisor) {
  if (divisor.is_zero()) throw DomainError("division by the zero polynomial");
  const auto& lead = divisor.terms().back();
  const int span = divisor.max_exp() - divisor.min_exp();
  std::map<int, Int> quotient;
  BasicLaurent<Int> rest = p;
  while (!rest.is_zero()) {
    if (rest.max_exp() - rest.min_exp() < span)
      throw DomainError("inexact division: non-zero remainder " + to_string(rest));
    const auto& top = rest.terms().back();
    if (top.coef % lead.coef != 0)
      throw DomainError("inexact division: coefficient " + to_string(rest) + " not divisible");
    Int c = top.coef / lead.coef;
    const int e = top.exp - lead.exp;
    quotient[e] += c;
    rest -= divisor * BasicLaurent<Int>::monomial(c, e);
  }
  return BasicLaurent<Int>::from_map(quotient);
}

template <class Int>
BasicLaurent<Int> div_alpha(const BasicLaurent<Int>& p) {
  return divide_exact(p, BasicLaurent<Int>::alpha());
}

/// q-view: coefficients indexed by q-degree. Requires every v-exponent even and <= 0.
template <class Int>
std::vector<Int> as_q_polynomial(const BasicLaurent<Int>& p) {
  std::vector<Int> coefs;
  for (const auto& t : p.terms()) {
    if (t.exp > 0 || t.exp % 2 != 0)
      throw DomainError("not a polynomial in q = v^-2: " + to_string(p));
    const auto k = static_cast<std::size_t>(-t.exp / 2);
    if (coefs.size() <= k) coefs.resize(k + 1);
    coefs[k] = t.coef;
  }
  return coefs;
}

template <class Int>
bool is_q_polynomial(const BasicLaurent<Int>& p) {
  return std::all_of(p.terms().begin(), p.terms().end(),
                     [](const auto& t) { return t.exp <= 0 && t.exp % 2 == 0; });
}

/// Recovers the unique x in v Z[v] with (bar(x) - x) / alpha = p.
template <class Int>
BasicLaurent<Int> peel_symmetric(const BasicLaurent<Int>& p) {
  if (bar(p) != p) throw DomainError("peel_symmetric: argument is not bar-invariant: " + to_string(p));
  std::map<int, Int> x;
  BasicLaurent<Int> rest = p;
  while (!rest.is_zero()) {
    const int k = rest.max_exp() + 1;
    if (k < 1) throw DomainError("peel_symmetric: malformed residue " + to_string(rest));
    const Int a = rest.terms().back().coef;
    x[k] += a;
    std::map<int, Int> block;
    for (int e = -(k - 1); e <= k - 1; e += 2) block[e] = a;
    rest -= BasicLaurent<Int>::from_map(block);
  }
  return BasicLaurent<Int>::from_map(x);
}

namespace detail {

template <class Int>
std::string decimal(const Int& c) {
  std::ostringstream os;
  os << c;
  return os.str();
}

inline void append_term(std::string& out, const std::string& mag, bool negative, const std::string& var) {
  if (out.empty()) {
    if (negative) out += "-";
  } else {
    out += negative ? " - " : " + ";
  }
  if (var.empty()) {
    out += mag;
  } else {
    if (mag != "1") out += mag;
    out += var;
  }
}

template <class Int>
nlohmann::json coefficient_json(const Int& c) {
  std::string s = decimal(c);
  if (s.size() <= 18) return std::stoll(s);
  return s;
}

}  // namespace detail

/// Canonical v-form, ascending exponent: "v^-2 - 1 + 2v^3".
template <class Int>
std::string to_string(const BasicLaurent<Int>& p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (const auto& t : p.terms()) {
    const bool neg = t.coef < 0;
    std::string mag = detail::decimal(neg ? Int(-t.coef) : t.coef);
    std::string var;
    if (t.exp == 1) var = "v";
    else if (t.exp != 0) var = "v^" + std::to_string(t.exp);
    detail::append_term(out, mag, neg, var);
  }
  return out;
}

/// q-form, ascending q-degree: "1 + q + q^2". Throws DomainError outside Z[q].
template <class Int>
std::string to_q_string(const BasicLaurent<Int>& p) {
  const auto coefs = as_q_polynomial(p);
  if (coefs.empty()) return "0";
  std::string out;
  for (std::size_t k = 0; k < coefs.size(); ++k) {
    if (coefs[k] == 0) continue;
    const bool neg = coefs[k] < 0;
    std::string mag = detail::decimal(neg ? Int(-coefs[k]) : coefs[k]);
    std::string var;
    if (k == 1) var = "q";
    else if (k > 1) var = "q^" + std::to_string(k);
    detail::append_term(out, mag, neg, var);
  }
  return out;
}

/// {"variable":"v"|"q","terms":[{"exp":..,"coef":..}]}; the q variant requires a q-polynomial.
template <class Int>
nlohmann::json to_json(const BasicLaurent<Int>& p, bool q_form) {
  nlohmann::json terms = nlohmann::json::array();
  if (q_form) {
    const auto coefs = as_q_polynomial(p);
    for (std::size_t k = 0; k < coefs.size(); ++k)
      if (coefs[k] != 0) terms.push_back({{"exp", k}, {"coef", detail::coefficient_json(coefs[k])}});
  } else {
    for (const auto& t : p.terms()) terms.push_back({{"exp", t.exp}, {"coef", detail::coefficient_json(t.coef)}});
  }
  return {{"variable", q_form ? "q" : "v"}, {"terms", terms}};
}

/// Inverse of to_json.
inline Laurent laurent_from_json(const nlohmann::json& j) {
  const std::string var = j.at("variable").get<std::string>();
  if (var != "v" && var != "q") throw ParseError("unknown polynomial variable '" + var + "'");
  std::map<int, BigInt> acc;
  for (const auto& t : j.at("terms")) {
    const int e = t.at("exp").get<int>();
    const auto& c = t.at("coef");
    BigInt coef = c.is_string() ? BigInt(c.get<std::string>()) : BigInt(c.get<long long>());
    acc[var == "q" ? -2 * e : e] += coef;
  }
  return Laurent::from_map(acc);
}

}  // namespace klp
