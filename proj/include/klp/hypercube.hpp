#pragma once

// S_n combinatorics for J = {s_1, ..., s_{n-2}}: the sets D(x), P(x), S(x), the maps
// A -> A^x and B -> B_x, x^A, and the hypercube formulas for the J-relative R and for Q^J.
// t_i is the transposition (i, n). Index sets are sorted lists of indices in 1..n-1.

#include <bit>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "klp/decomp.hpp"

namespace klp {

using IndexSet = std::vector<int>;

class Hypercube {
 public:
  Hypercube(const CoxeterSystem& sys, Element sigma) : sys_(&sys), sigma_(sigma) {
    require_type_a(sys, "hypercube");
    n_ = sys.degree();
    if (n_ < 2) throw UnsupportedError("hypercube needs n >= 2");
    const auto& b = sys.backing(sigma);
    pos_.assign(static_cast<std::size_t>(n_ + 1), 0);
    for (int p = 0; p < n_; ++p) pos_[static_cast<std::size_t>(b[static_cast<std::size_t>(p)])] = p + 1;
    for (int i = 1; i < n_; ++i) {
      const bool by_position = pos(i) < pos(n_);
      const Element up = sys.mul(t(i), sigma);
      const bool by_order = sigma != up && sys.bruhat_leq(sigma, up);
      if (by_position != by_order) throw ConsistencyError("D(sigma): position test and Bruhat test disagree");
      if (by_position) d_mask_ |= bit(i);
    }
  }

  [[nodiscard]] const CoxeterSystem& system() const { return *sys_; }
  [[nodiscard]] Element sigma() const { return sigma_; }
  [[nodiscard]] int n() const { return n_; }
  /// W_J fixing n.
  [[nodiscard]] GeneratorSet J() const { return GeneratorSet::all(n_ - 2); }

  /// sigma^{-1}(i), 1-based.
  [[nodiscard]] int pos(int i) const { return pos_[static_cast<std::size_t>(i)]; }

  /// (i, n)
  [[nodiscard]] Element t(int i) const {
    std::vector<int> b(static_cast<std::size_t>(n_));
    for (int a = 0; a < n_; ++a) b[static_cast<std::size_t>(a)] = a + 1;
    std::swap(b[static_cast<std::size_t>(i - 1)], b[static_cast<std::size_t>(n_ - 1)]);
    return *sys_->find(b);
  }

  [[nodiscard]] IndexSet D() const { return to_set(d_mask_); }
  [[nodiscard]] std::uint32_t d_mask() const { return d_mask_; }

  /// All subsets of D(sigma), as masks in increasing numeric order.
  [[nodiscard]] std::vector<std::uint32_t> P_masks() const {
    std::vector<std::uint32_t> out;
    std::uint32_t sub = 0;
    do {
      out.push_back(sub);
      sub = (sub - d_mask_) & d_mask_;
    } while (sub != 0);
    return out;
  }

  [[nodiscard]] std::uint32_t reduce(std::uint32_t B) const {
    require_in_D(B, "reduce_B");
    std::uint32_t out = 0;
    int last = 0;
    for (int i = 1; i < n_; ++i) {
      if (!(B & bit(i))) continue;
      if (last == 0 || pos(i) < pos(last)) {
        out |= bit(i);
        last = i;
      }
    }
    return out;
  }

  [[nodiscard]] std::uint32_t closure(std::uint32_t A) const {
    require_in_D(A, "closure_A");
    std::uint32_t out = 0;
    for (int j = 1; j < n_; ++j)
      for (int i = 1; i <= j; ++i)
        if ((A & bit(i)) && pos(i) <= pos(j) && pos(j) <= pos(n_)) {
          out |= bit(j);
          break;
        }
    return out;
  }

  /// sigma^{-1}(i_k) < ... < sigma^{-1}(i_1) < sigma^{-1}(n)
  [[nodiscard]] bool admissible(std::uint32_t A) const {
    int prev = pos(n_);
    for (int i = 1; i < n_; ++i) {
      if (!(A & bit(i))) continue;
      if (pos(i) >= prev) return false;
      prev = pos(i);
    }
    return true;
  }

  /// sigma < t_{i1} sigma < t_{i2} t_{i1} sigma < ...
  [[nodiscard]] bool chain_condition(std::uint32_t A) const {
    Element cur = sigma_;
    for (int i = 1; i < n_; ++i) {
      if (!(A & bit(i))) continue;
      const Element next = sys_->mul(t(i), cur);
      if (next == cur || !sys_->bruhat_leq(cur, next)) return false;
      cur = next;
    }
    return true;
  }

  /// sigma < t_i sigma for i in A, and the t_i sigma pairwise incomparable.
  [[nodiscard]] bool incomparability_condition(std::uint32_t A) const {
    std::vector<Element> ups;
    for (int i = 1; i < n_; ++i) {
      if (!(A & bit(i))) continue;
      const Element up = sys_->mul(t(i), sigma_);
      if (up == sigma_ || !sys_->bruhat_leq(sigma_, up)) return false;
      ups.push_back(up);
    }
    for (std::size_t a = 0; a < ups.size(); ++a)
      for (std::size_t b = a + 1; b < ups.size(); ++b)
        if (sys_->bruhat_leq(ups[a], ups[b]) || sys_->bruhat_leq(ups[b], ups[a])) return false;
    return true;
  }

  /// (i_1, ..., i_k, n) sigma, with l(sigma^A) - l(sigma) = 2|A^sigma| - |A| enforced.
  [[nodiscard]] Element raise(std::uint32_t A) const {
    if (!admissible(A)) throw PreconditionError("sigma_A: " + format_index_set(to_set(A)) + " is not admissible");
    Element cur = sigma_;
    for (int i = 1; i < n_; ++i)
      if (A & bit(i)) cur = sys_->mul(t(i), cur);
    const int lhs = sys_->length(cur) - sys_->length(sigma_);
    const int rhs = 2 * std::popcount(closure(A)) - std::popcount(A);
    if (lhs != rhs) throw ConsistencyError("length identity fails for A=" + format_index_set(to_set(A)));
    return cur;
  }

  /// join({sigma} u {t_i sigma : i in B}); join({sigma}) = sigma.
  [[nodiscard]] std::optional<Element> join_of(std::uint32_t B) const {
    std::vector<Element> elems{sigma_};
    for (int i = 1; i < n_; ++i)
      if (B & bit(i)) elems.push_back(sys_->mul(t(i), sigma_));
    return bruhat_join(*sys_, elems);
  }

  static std::uint32_t bit(int i) { return 1u << i; }
  static IndexSet to_set(std::uint32_t m) {
    IndexSet out;
    for (int i = 1; i < 32; ++i)
      if (m & bit(i)) out.push_back(i);
    return out;
  }
  [[nodiscard]] std::uint32_t to_mask(const IndexSet& s) const {
    std::uint32_t m = 0;
    for (int i : s) {
      if (i < 1 || i >= n_) throw PreconditionError("index " + std::to_string(i) + " outside 1..n-1");
      m |= bit(i);
    }
    return m;
  }
  static std::string format_index_set(const IndexSet& s) {
    std::string out = "{";
    for (std::size_t k = 0; k < s.size(); ++k) out += (k ? "," : "") + std::to_string(s[k]);
    return out + "}";
  }

 private:
  void require_in_D(std::uint32_t m, const char* what) const {
    if (m & ~d_mask_) throw PreconditionError(std::string(what) + ": set is not contained in D(sigma)");
  }

  const CoxeterSystem* sys_;
  Element sigma_;
  int n_ = 0;
  std::vector<int> pos_;
  std::uint32_t d_mask_ = 0;
};

inline IndexSet reduce_B(const Hypercube& hc, const IndexSet& B) { return Hypercube::to_set(hc.reduce(hc.to_mask(B))); }
inline IndexSet closure_A(const Hypercube& hc, const IndexSet& A) { return Hypercube::to_set(hc.closure(hc.to_mask(A))); }
inline Element sigma_A(const Hypercube& hc, const IndexSet& A) { return hc.raise(hc.to_mask(A)); }

/// S(sigma), in increasing mask order; includes the empty set.
inline std::vector<IndexSet> admissible_sets(const Hypercube& hc) {
  std::vector<IndexSet> out;
  for (std::uint32_t m : hc.P_masks())
    if (hc.admissible(m)) out.push_back(Hypercube::to_set(m));
  return out;
}

/// The three characterizations of S(sigma) agree on all subsets of {1..n-1}, and S(sigma) is the
/// image of B -> B_sigma.
inline bool check_admissibility_conditions(const Hypercube& hc) {
  const std::uint32_t full = (1u << hc.n()) - 2u;
  for (std::uint32_t A = 0; A <= full; A += 2) {
    const bool c2 = hc.admissible(A);
    if (hc.chain_condition(A) != c2 || hc.incomparability_condition(A) != c2) return false;
  }
  std::vector<bool> image(full + 2, false);
  for (std::uint32_t B : hc.P_masks()) image[hc.reduce(B)] = true;
  for (std::uint32_t A : hc.P_masks())
    if (image[A] != hc.admissible(A)) return false;
  return true;
}

/// A <= (A_x)^x, (A^x)_x <= A, and both maps idempotent, for every A in P(x).
inline bool check_galois_connection(const Hypercube& hc) {
  const auto sub = [](std::uint32_t a, std::uint32_t b) { return (a & ~b) == 0; };
  for (std::uint32_t A : hc.P_masks()) {
    const std::uint32_t lo = hc.reduce(A), hi = hc.closure(A);
    if (!sub(A, hc.closure(lo)) || !sub(hc.reduce(hi), A)) return false;
    if (hc.reduce(lo) != lo || hc.closure(hi) != hi) return false;
  }
  return true;
}

/// {B : B_x = A} = {B : A <= B <= A^x} for A in S(x).
inline bool check_fibers(const Hypercube& hc) {
  const auto masks = hc.P_masks();
  for (std::uint32_t A : masks) {
    if (!hc.admissible(A)) continue;
    const std::uint32_t hi = hc.closure(A);
    for (std::uint32_t B : masks) {
      const bool in_fiber = hc.reduce(B) == A;
      const bool in_box = (A & ~B) == 0 && (B & ~hi) == 0;
      if (in_fiber != in_box) return false;
    }
  }
  return true;
}

/// x^A for every admissible A; raise() enforces the length identity.
inline bool check_length_identity(const Hypercube& hc) {
  try {
    for (std::uint32_t A : hc.P_masks())
      if (hc.admissible(A)) (void)hc.raise(A);
  } catch (const ConsistencyError&) {
    return false;
  }
  return true;
}

/// x^B = join{t_i x : i in B} for nonempty B in P(x).
inline bool check_supremum(const Hypercube& hc) {
  for (std::uint32_t B : hc.P_masks()) {
    if (B == 0) continue;
    const auto j = hc.join_of(B);
    if (!j || *j != hc.raise(hc.reduce(B))) return false;
  }
  return true;
}

struct HypercubeR {
  Laurent r_check;
  Laurent r;
  std::optional<IndexSet> admissible;  // A with omega = sigma^A
  std::vector<IndexSet> contributing_B;
};

/// Rc_{x,y,J} = alpha^{|A|} when y = x^A, and R_{x,y,J} = sum_{B in P(x), x^B = y} (q-1)^{|B|};
/// checked against each other and against the algebraic J-relative R when ctx is given.
inline HypercubeR hypercube_r(const Hypercube& hc, Element omega, const KLContext* ctx = nullptr) {
  const auto& sys = hc.system();
  HypercubeR out;
  for (std::uint32_t A : hc.P_masks())
    if (hc.admissible(A) && hc.raise(A) == omega) {
      if (out.admissible) throw ConsistencyError("two admissible sets reach the same omega");
      out.admissible = Hypercube::to_set(A);
      Laurent a(1);
      for (int k = 0; k < std::popcount(A); ++k) a = a * Laurent::alpha();
      out.r_check = a;
    }
  const Laurent qm1 = Laurent::q() - Laurent(1);
  for (std::uint32_t B : hc.P_masks()) {
    if (hc.raise(hc.reduce(B)) != omega) continue;
    out.contributing_B.push_back(Hypercube::to_set(B));
    Laurent term(1);
    for (int k = 0; k < std::popcount(B); ++k) term = term * qm1;
    out.r += term;
  }
  if (out.r != out.r_check.shifted(sys.length(hc.sigma()) - sys.length(omega)))
    throw ConsistencyError("hypercube R: normalized and unnormalized formulas disagree");
  if (ctx && ctx->jrel_check(hc.sigma(), omega, hc.J()) != out.r_check)
    throw ConsistencyError("hypercube R differs from the algebraic J-relative R for sigma=" +
                           format_element(sys, hc.sigma()) + " omega=" + format_element(sys, omega));
  return out;
}

/// R_{x,y,J} for any J: the hypercube formula for J = {s_1..s_{n-2}} in type A, the generic table otherwise.
inline Laurent relative_r(const KLContext& ctx, Element x, Element y, GeneratorSet J) {
  const auto& sys = ctx.system();
  if (sys.family() == Family::A && sys.degree() >= 2 && J == GeneratorSet::all(sys.rank() - 1))
    return hypercube_r(Hypercube(sys, x), y).r;
  return ctx.jrel(x, y, J);
}

/// {B : B <= D(x), join({x} u {t_i x}) = y}.
inline std::vector<IndexSet> join_hypercube_sets(const Hypercube& hc, Element omega) {
  std::vector<IndexSet> out;
  for (std::uint32_t B : hc.P_masks()) {
    const auto j = hc.join_of(B);
    if (j && *j == omega) out.push_back(Hypercube::to_set(B));
  }
  return out;
}

inline Laurent join_formula_r(const Hypercube& hc, Element omega) {
  Laurent sum;
  const Laurent qm1 = Laurent::q() - Laurent(1);
  for (const auto& B : join_hypercube_sets(hc, omega)) {
    Laurent term(1);
    for (std::size_t k = 0; k < B.size(); ++k) term = term * qm1;
    sum += term;
  }
  return sum;
}

/// Q^J_{x,y} = q^{l(y)-l(x)} / (1-q) * sum_{B != {}} (q^-1 - 1)^{|B|} d(P_{x^B, y}),
/// with x^B taken both as x^{B_x} and as a Bruhat join; cross-checked against the pairing route.
inline Laurent hypercube_Q(const KLContext& ctx, const Hypercube& hc, Element omega) {
  const auto& sys = ctx.system();
  const Element sigma = hc.sigma();
  detail::require_below(sys, sigma, omega, "hypercube_Q");
  const Laurent step = Laurent::q(-1) - Laurent(1);
  Laurent sum;
  for (std::uint32_t B : hc.P_masks()) {
    if (B == 0) continue;
    const Element via_reduce = hc.raise(hc.reduce(B));
    const auto via_join = hc.join_of(B);
    if (!via_join || *via_join != via_reduce)
      throw ConsistencyError("sigma^B: reduction and Bruhat join disagree for B=" +
                             Hypercube::format_index_set(Hypercube::to_set(B)));
    if (!sys.bruhat_leq(via_reduce, omega)) continue;
    Laurent term = bar(ctx.p(via_reduce, omega));
    for (int k = 0; k < std::popcount(B); ++k) term = term * step;
    sum += term;
  }
  Laurent q_j;
  try {
    q_j = divide_exact(Laurent::q(sys.length(omega) - sys.length(sigma)) * sum, detail::one_minus_q());
  } catch (const DomainError& e) {
    throw ConsistencyError(std::string("hypercube_Q: ") + e.what());
  }
  const Element tau = sys.parabolic(hc.J()).longest;
  if (q_j != q_tau_check(ctx, sigma, omega, tau).shifted(ctx.shift(sigma, omega) + 1))
    throw ConsistencyError("hypercube Q^J differs from the parabolic decomposition");
  return q_j;
}

}  // namespace klp
