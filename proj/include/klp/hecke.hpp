#pragma once

// Hecke algebra of a tabulated Coxeter system, on the standard basis {h_w}.
//
//   h_s^2 = alpha h_s + 1,  alpha = v^-1 - v,  h_s^-1 = h_s - alpha
//
// Unnormalized tables (Rc = R-check, Pc = P-check) are stored; normalized views
// multiply by v^{l(x) - l(y)}.

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "klp/coxeter.hpp"
#include "klp/laurent.hpp"

namespace klp {

class HeckeElement {
 public:
  using Map = std::map<Element, Laurent>;

  HeckeElement() = default;

  static HeckeElement basis(Element x, Laurent c = Laurent(1)) {
    HeckeElement h;
    h.add(x, c);
    return h;
  }

  [[nodiscard]] const Laurent& coeff(Element x) const {
    static const Laurent zero;
    auto it = coeffs_.find(x);
    return it == coeffs_.end() ? zero : it->second;
  }

  void add(Element x, const Laurent& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = coeffs_.try_emplace(x, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) coeffs_.erase(it);
    }
  }

  [[nodiscard]] const Map& terms() const { return coeffs_; }
  [[nodiscard]] bool is_zero() const { return coeffs_.empty(); }
  [[nodiscard]] std::size_t size() const { return coeffs_.size(); }

  HeckeElement& operator+=(const HeckeElement& o) {
    for (const auto& [x, c] : o.coeffs_) add(x, c);
    return *this;
  }
  HeckeElement& operator-=(const HeckeElement& o) {
    for (const auto& [x, c] : o.coeffs_) add(x, -c);
    return *this;
  }
  HeckeElement& operator*=(const Laurent& s) {
    if (s.is_zero()) {
      coeffs_.clear();
      return *this;
    }
    for (auto& [x, c] : coeffs_) c *= s;
    return *this;
  }
  friend HeckeElement operator+(HeckeElement a, const HeckeElement& b) { return a += b; }
  friend HeckeElement operator-(HeckeElement a, const HeckeElement& b) { return a -= b; }
  friend HeckeElement operator*(const Laurent& s, HeckeElement a) { return a *= s; }
  friend bool operator==(const HeckeElement&, const HeckeElement&) = default;

 private:
  Map coeffs_;
};

inline std::string to_string(const CoxeterSystem& sys, const HeckeElement& h) {
  if (h.is_zero()) return "0";
  std::string out;
  for (const auto& [x, c] : h.terms()) {
    if (!out.empty()) out += " + ";
    out += "(" + to_string(c) + ")h[" + format_element(sys, x) + "]";
  }
  return out;
}

/// Dense (x, y) -> T table over a system.
template <class T>
class PairTable {
 public:
  PairTable() = default;
  explicit PairTable(std::size_t n) : n_(n), data_(n * n) {}
  [[nodiscard]] const T& at(Element x, Element y) const { return data_[index(x, y)]; }
  T& at(Element x, Element y) { return data_[index(x, y)]; }
  [[nodiscard]] std::size_t dim() const { return n_; }

 private:
  [[nodiscard]] std::size_t index(Element x, Element y) const { return std::size_t{x.id} * n_ + y.id; }
  std::size_t n_ = 0;
  std::vector<T> data_;
};

/// Standard-basis arithmetic and the d involution.
class HeckeAlgebra {
 public:
  explicit HeckeAlgebra(const CoxeterSystem& sys) : sys_(&sys) {}

  [[nodiscard]] const CoxeterSystem& system() const { return *sys_; }

  /// X * h_s
  [[nodiscard]] HeckeElement rmul_gen(const HeckeElement& X, int g) const {
    HeckeElement out;
    const Laurent a = Laurent::alpha();
    for (const auto& [w, c] : X.terms()) {
      const Element ws = sys_->rmul(w, g);
      out.add(ws, c);
      if (sys_->length(ws) < sys_->length(w)) out.add(w, a * c);
    }
    return out;
  }

  /// h_s * X
  [[nodiscard]] HeckeElement lmul_gen(int g, const HeckeElement& X) const {
    HeckeElement out;
    const Laurent a = Laurent::alpha();
    for (const auto& [w, c] : X.terms()) {
      const Element sw = sys_->lmul(g, w);
      out.add(sw, c);
      if (sys_->length(sw) < sys_->length(w)) out.add(w, a * c);
    }
    return out;
  }

  /// h_s^-1 * X
  [[nodiscard]] HeckeElement lmul_gen_inverse(int g, const HeckeElement& X) const {
    HeckeElement out = lmul_gen(g, X);
    out -= Laurent::alpha() * X;
    return out;
  }

  /// h_x * X
  [[nodiscard]] HeckeElement lmul_basis(Element x, HeckeElement X) const {
    const auto& word = sys_->reduced_word(x);
    for (auto it = word.rbegin(); it != word.rend(); ++it) X = lmul_gen(*it, X);
    return X;
  }

  /// h_x^-1 * X
  [[nodiscard]] HeckeElement lmul_basis_inverse(Element x, HeckeElement X) const {
    for (int g : sys_->reduced_word(x)) X = lmul_gen_inverse(g, X);
    return X;
  }

  [[nodiscard]] HeckeElement mul(const HeckeElement& X, const HeckeElement& Y) const {
    HeckeElement out;
    for (const auto& [y, c] : Y.terms()) {
      HeckeElement part = X;
      for (int g : sys_->reduced_word(y)) part = rmul_gen(part, g);
      out += c * part;
    }
    return out;
  }

  [[nodiscard]] HeckeElement h(Element x) const { return HeckeElement::basis(x); }

  /// h_s^-1 = h_s - alpha
  [[nodiscard]] HeckeElement h_inverse_gen(int g) const {
    HeckeElement out = HeckeElement::basis(sys_->generator(g));
    out.add(sys_->identity(), -Laurent::alpha());
    return out;
  }

  /// d(h_x), memoized by induction on length.
  [[nodiscard]] const HeckeElement& d_h(Element x) const {
    std::call_once(d_once_, [this] { build_d_table(); });
    return d_table_[x.id];
  }

  [[nodiscard]] HeckeElement d(const HeckeElement& X) const {
    HeckeElement out;
    for (const auto& [w, c] : X.terms()) out += bar(c) * d_h(w);
    return out;
  }

 private:
  void build_d_table() const {
    const auto& sys = *sys_;
    d_table_.resize(sys.size());
    d_table_[0] = HeckeElement::basis(sys.identity());
    const Laurent a = Laurent::alpha();
    for (std::size_t i = 1; i < sys.size(); ++i) {
      const Element x = sys.element(i);
      const auto& word = sys.reduced_word(x);
      const int g = word.back();
      const Element prefix = sys.rmul(x, g);
      const HeckeElement& base = d_table_[prefix.id];
      HeckeElement next = rmul_gen(base, g);
      next -= a * base;
      d_table_[i] = std::move(next);
    }
  }

  const CoxeterSystem* sys_;
  mutable std::once_flag d_once_;
  mutable std::vector<HeckeElement> d_table_;
};

/// Lazily computed tables for one system. All accessors are safe to call concurrently.
class KLContext {
 public:
  explicit KLContext(const CoxeterSystem& sys) : sys_(&sys), alg_(sys) {}
  KLContext(const KLContext&) = delete;
  KLContext& operator=(const KLContext&) = delete;

  [[nodiscard]] const CoxeterSystem& system() const { return *sys_; }
  [[nodiscard]] const HeckeAlgebra& algebra() const { return alg_; }

  // ----- R-polynomials -----

  [[nodiscard]] const PairTable<Laurent>& r_check_table() const {
    std::call_once(r_once_, [this] { build_r_table(); });
    return r_check_;
  }
  [[nodiscard]] const Laurent& r_check(Element x, Element y) const { return r_check_table().at(x, y); }
  [[nodiscard]] Laurent r(Element x, Element y) const { return r_check(x, y).shifted(shift(x, y)); }

  // ----- KL polynomials -----

  [[nodiscard]] const PairTable<Laurent>& p_check_table() const {
    std::call_once(p_once_, [this] { build_kl_table(); });
    return p_check_;
  }
  [[nodiscard]] const Laurent& p_check(Element x, Element y) const { return p_check_table().at(x, y); }
  [[nodiscard]] Laurent p(Element x, Element y) const { return p_check(x, y).shifted(shift(x, y)); }

  /// Unnormalized q-derived polynomial, (d(Pc) - Pc) / alpha.
  [[nodiscard]] Laurent p_derived_check(Element x, Element y) const {
    const Laurent& pc = p_check(x, y);
    try {
      return div_alpha(bar(pc) - pc);
    } catch (const DomainError& e) {
      throw ConsistencyError(std::string("q-derived polynomial: ") + e.what());
    }
  }
  [[nodiscard]] Laurent p_derived(Element x, Element y) const {
    return p_derived_check(x, y).shifted(shift(x, y) + 1);
  }

  /// c_y = sum_x Pc_{x,y} h_x
  [[nodiscard]] HeckeElement canonical(Element y) const {
    const auto& tab = p_check_table();
    HeckeElement c;
    const Bitset& below = sys_->below(y);
    for (auto i = below.find_first(); i != Bitset::npos; i = below.find_next(i))
      c.add(sys_->element(i), tab.at(sys_->element(i), y));
    return c;
  }

  // ----- Dyer-Lehrer bases -----

  /// f_{w,tau} = h_tau^-1 h_{tau w}
  [[nodiscard]] HeckeElement f_basis_element(Element w, Element tau) const {
    return alg_.lmul_basis_inverse(tau, alg_.h(sys_->mul(tau, w)));
  }

  /// <f^{x,tau}, X> = coefficient of h_{tau x} in h_tau X.
  [[nodiscard]] Laurent pairing_f(Element tau, Element x, const HeckeElement& X) const {
    return alg_.lmul_basis(tau, X).coeff(sys_->mul(tau, x));
  }

  /// x -> <f^{x,tau}, X> for every x.
  [[nodiscard]] std::vector<Laurent> pairing_f_column(Element tau, const HeckeElement& X) const {
    const HeckeElement prod = alg_.lmul_basis(tau, X);
    std::vector<Laurent> out(sys_->size());
    const Element tinv = sys_->inverse(tau);
    for (const auto& [z, c] : prod.terms()) out[sys_->mul(tinv, z).id] = c;
    return out;
  }

  /// x -> <f^{x,tau}, c_y>, cached per (tau, y).
  [[nodiscard]] const std::vector<Laurent>& pairing_canonical(Element tau, Element y) const {
    {
      std::lock_guard lock(mu_);
      auto it = pairing_cache_.find({tau, y});
      if (it != pairing_cache_.end()) return it->second;
    }
    auto col = pairing_f_column(tau, canonical(y));
    std::lock_guard lock(mu_);
    return pairing_cache_.try_emplace({tau, y}, std::move(col)).first->second;
  }

  /// Sum over decreasing chains along a convex tuple (independent of the algebra products).
  [[nodiscard]] Laurent convex_pairing_oracle(Element tau, Element kappa, Element x, Element y) const {
    auto tuple = convex_tuple(*sys_, tau, kappa);
    if (!tuple) throw PreconditionError("convex_pairing_oracle: tau is not weakly below kappa");
    if (x == y) return Laurent(1);
    const Laurent step = -Laurent::alpha();
    Laurent total;
    // Unrolling f_{y, tau t_1 ... t_k} through the generator recursion one step at a time
    // gives chains x < t_{i1} x < t_{i2} t_{i1} x < ... < y with i1 < i2 < ...
    std::function<void(Element, int, const Laurent&)> walk = [&](Element cur, int from, const Laurent& acc) {
      for (int i = from; i < static_cast<int>(tuple->size()); ++i) {
        const Element next = sys_->mul((*tuple)[static_cast<std::size_t>(i)], cur);
        if (!sys_->bruhat_leq(cur, next) || !sys_->bruhat_leq(next, y)) continue;
        const Laurent here = acc * step;
        if (next == y) total += here;
        walk(next, i + 1, here);
      }
    };
    walk(x, 0, Laurent(1));
    return total;
  }

  // ----- J-relative R-polynomials -----

  /// Rc_{x,y,J} = coefficient of h_{w0 w0^J x} in h_{w0 w0^J} h_y.
  [[nodiscard]] const PairTable<Laurent>& jrel_check_table(GeneratorSet J) const {
    const Parabolic& par = sys_->parabolic(J);
    {
      std::lock_guard lock(mu_);
      auto it = jrel_cache_.find(J);
      if (it != jrel_cache_.end()) return *it->second;
    }
    auto tab = std::make_unique<PairTable<Laurent>>(sys_->size());
    const Element lead = sys_->mul(sys_->longest(), par.longest);
    const Element lead_inv = sys_->inverse(lead);
    std::vector<HeckeElement> y_prod(sys_->size());
    y_prod[0] = alg_.h(lead);
    for (std::size_t i = 0; i < sys_->size(); ++i) {
      const Element y = sys_->element(i);
      if (i > 0) {
        const int g = sys_->reduced_word(y).back();
        y_prod[i] = alg_.rmul_gen(y_prod[sys_->rmul(y, g).id], g);
      }
      for (const auto& [z, c] : y_prod[i].terms()) tab->at(sys_->mul(lead_inv, z), y) = c;
    }
    std::lock_guard lock(mu_);
    return *jrel_cache_.try_emplace(J, std::move(tab)).first->second;
  }
  [[nodiscard]] const Laurent& jrel_check(Element x, Element y, GeneratorSet J) const {
    return jrel_check_table(J).at(x, y);
  }
  [[nodiscard]] Laurent jrel(Element x, Element y, GeneratorSet J) const {
    return jrel_check(x, y, J).shifted(shift(x, y));
  }

  // ----- hybrid basis -----

  /// h_{y,J} = c_{y_J} h_{^J y}
  [[nodiscard]] HeckeElement hybrid_basis_element(Element y, GeneratorSet J) const {
    const auto [yj, rep] = coset_factorize(*sys_, y, J);
    HeckeElement out;
    const Bitset& below = sys_->below(yj);
    for (auto i = below.find_first(); i != Bitset::npos; i = below.find_next(i)) {
      const Element k = sys_->element(i);
      out.add(sys_->mul(k, rep), p_check(k, yj));
    }
    return out;
  }

  /// x -> gamma-check^J_{x,y}: coefficients of c_y on the hybrid basis.
  [[nodiscard]] const std::vector<Laurent>& gamma_check_column(Element y, GeneratorSet J) const {
    {
      std::lock_guard lock(mu_);
      auto it = gamma_cache_.find({J, y});
      if (it != gamma_cache_.end()) return it->second;
    }
    std::vector<Laurent> gamma(sys_->size());
    HeckeElement rest = canonical(y);
    // h_{x,J} = h_x + (terms of smaller id), so peel from the top id down.
    while (!rest.is_zero()) {
      const auto& [x, c] = *rest.terms().rbegin();
      const Element top = x;
      const Laurent coef = c;
      gamma[top.id] = coef;
      rest -= coef * hybrid_basis_element(top, J);
      if (!rest.coeff(top).is_zero()) throw ConsistencyError("hybrid basis is not unitriangular");
    }
    std::lock_guard lock(mu_);
    return gamma_cache_.try_emplace({J, y}, std::move(gamma)).first->second;
  }
  [[nodiscard]] Laurent gamma(Element x, Element y, GeneratorSet J) const {
    return gamma_check_column(y, J)[x.id].shifted(shift(x, y));
  }

  /// v^{l(x) - l(y)}
  [[nodiscard]] int shift(Element x, Element y) const { return sys_->length(x) - sys_->length(y); }

 private:
  void build_r_table() const {
    const auto& sys = *sys_;
    r_check_ = PairTable<Laurent>(sys.size());
    for (std::size_t j = 0; j < sys.size(); ++j) {
      const Element y = sys.element(j);
      for (const auto& [x, c] : alg_.d_h(y).terms()) r_check_.at(x, y) = bar(c);
    }
  }

  void build_kl_table() const {
    const auto& sys = *sys_;
    const auto& rt = r_check_table();
    p_check_ = PairTable<Laurent>(sys.size());
    for (std::size_t j = 0; j < sys.size(); ++j) {
      const Element y = sys.element(j);
      p_check_.at(y, y) = Laurent(1);
      const Bitset& below = sys.below(y);
      // descending x; every kappa in (x, y] has a larger id and is already done
      for (std::size_t i = j; i-- > 0;) {
        if (!below.test(i)) continue;
        const Element x = sys.element(i);
        Laurent sum;
        const Bitset between = below & sys.above(x);
        for (auto k = between.find_next(i); k != Bitset::npos; k = between.find_next(k)) {
          const Element kappa = sys.element(k);
          sum += rt.at(x, kappa) * p_check_.at(kappa, y);
        }
        try {
          p_check_.at(x, y) = peel_symmetric(div_alpha(sum));
        } catch (const DomainError& e) {
          throw ConsistencyError("KL recursion failed at (" + format_element(sys, x) + ", " +
                                 format_element(sys, y) + "): " + e.what());
        }
      }
    }
  }

  const CoxeterSystem* sys_;
  HeckeAlgebra alg_;
  mutable std::once_flag r_once_;
  mutable std::once_flag p_once_;
  mutable PairTable<Laurent> r_check_;
  mutable PairTable<Laurent> p_check_;
  mutable std::mutex mu_;
  mutable std::map<GeneratorSet, std::unique_ptr<PairTable<Laurent>>> jrel_cache_;
  mutable std::map<std::pair<Element, Element>, std::vector<Laurent>> pairing_cache_;
  mutable std::map<std::pair<GeneratorSet, Element>, std::vector<Laurent>> gamma_cache_;
};

}  // namespace klp
