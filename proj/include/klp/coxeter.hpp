#pragma once

// Fully tabulated finite Coxeter systems of types A, B, D and I2(m).
//
// Elements are indexed by a BFS enumeration from the identity: level by level in
// length, ties broken by lexicographic order of the backing representation. Ids
// therefore refine length, which every triangular solve in the library relies on.
//
// Composition convention: (xy)(i) = x(y(i)).

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "klp/errors.hpp"

namespace klp {

enum class Family { A, B, D, I2 };

inline std::string family_name(Family f) {
  switch (f) {
    case Family::A: return "A";
    case Family::B: return "B";
    case Family::D: return "D";
    case Family::I2: return "I2";
  }
  return "?";
}

inline Family parse_family(const std::string& s) {
  if (s == "A" || s == "a") return Family::A;
  if (s == "B" || s == "b") return Family::B;
  if (s == "D" || s == "d") return Family::D;
  if (s == "I2" || s == "i2" || s == "I") return Family::I2;
  throw ConfigError("unsupported Coxeter family '" + s + "' (expected A, B, D or I2)");
}

/// A group element, identified by its index in the system's enumeration.
struct Element {
  std::uint32_t id = 0;
  friend auto operator<=>(const Element&, const Element&) = default;
};

/// Subset J of the generators, as a bitmask over 0-based generator indices.
class GeneratorSet {
 public:
  constexpr GeneratorSet() = default;
  constexpr explicit GeneratorSet(std::uint32_t bits) : bits_(bits) {}

  static constexpr GeneratorSet all(int rank) { return GeneratorSet((1u << rank) - 1u); }

  /// From 1-based generator indices.
  static GeneratorSet from_one_based(std::span<const int> indices) {
    GeneratorSet j;
    for (int i : indices) {
      if (i < 1 || i > 31) throw ConfigError("generator index out of range: " + std::to_string(i));
      j.bits_ |= 1u << (i - 1);
    }
    return j;
  }
  static GeneratorSet from_one_based(std::initializer_list<int> indices) {
    return from_one_based(std::span<const int>(indices.begin(), indices.size()));
  }

  [[nodiscard]] constexpr bool contains(int g) const { return ((bits_ >> g) & 1u) != 0; }
  [[nodiscard]] constexpr std::uint32_t bits() const { return bits_; }
  [[nodiscard]] constexpr int size() const { return std::popcount(bits_); }
  [[nodiscard]] constexpr bool empty() const { return bits_ == 0; }
  [[nodiscard]] constexpr bool subset_of(GeneratorSet o) const { return (bits_ & ~o.bits_) == 0; }
  constexpr void insert(int g) { bits_ |= 1u << g; }

  [[nodiscard]] std::vector<int> indices() const {
    std::vector<int> out;
    for (int g = 0; g < 32; ++g)
      if (contains(g)) out.push_back(g);
    return out;
  }

  friend constexpr bool operator==(GeneratorSet, GeneratorSet) = default;
  friend constexpr auto operator<=>(GeneratorSet a, GeneratorSet b) { return a.bits_ <=> b.bits_; }

 private:
  std::uint32_t bits_ = 0;
};

/// W_J, its longest element and the coset factorization x = x_J * ^J x for every x.
struct Parabolic {
  GeneratorSet J;
  std::vector<Element> subgroup;       // ascending id
  std::vector<char> in_subgroup;       // indexed by id
  Element longest;
  std::vector<Element> min_reps;       // ^J W, ascending id
  std::vector<Element> part;           // x_J, indexed by id of x
  std::vector<Element> rep;            // ^J x, indexed by id of x

  [[nodiscard]] bool contains(Element x) const { return in_subgroup[x.id] != 0; }
};

/// Strict chain {} = J_0 < J_1 < ... < J_r = S.
struct Filtration {
  std::vector<GeneratorSet> chain;

  [[nodiscard]] int length() const { return static_cast<int>(chain.size()) - 1; }

  /// J_k = first k generators.
  static Filtration standard_flag(int rank) {
    Filtration f;
    for (int k = 0; k <= rank; ++k) f.chain.push_back(GeneratorSet::all(k));
    return f;
  }

  /// {} < S.
  static Filtration trivial(int rank) { return Filtration{{GeneratorSet{}, GeneratorSet::all(rank)}}; }

  void validate(int rank) const {
    if (chain.size() < 2) throw ConfigError("filtration needs at least {} and S");
    if (!chain.front().empty()) throw ConfigError("filtration must start with the empty set");
    if (chain.back() != GeneratorSet::all(rank)) throw ConfigError("filtration must end with all of S");
    for (std::size_t i = 1; i < chain.size(); ++i)
      if (!chain[i - 1].subset_of(chain[i]) || chain[i - 1] == chain[i])
        throw ConfigError("filtration inclusions must be strict");
  }
};

using Bitset = boost::dynamic_bitset<std::uint64_t>;

class CoxeterSystem {
 public:
  /// rank_or_m is the Coxeter rank for A, B, D (A_r realized as S_{r+1}) and m for I2(m).
  static CoxeterSystem build(Family family, int rank_or_m) {
    CoxeterSystem sys;
    sys.family_ = family;
    switch (family) {
      case Family::A:
        if (rank_or_m < 1 || rank_or_m > 7) throw ConfigError("type A rank must be in [1, 7]");
        sys.degree_ = rank_or_m + 1;
        sys.rank_ = rank_or_m;
        break;
      case Family::B:
        if (rank_or_m < 1 || rank_or_m > 5) throw ConfigError("type B rank must be in [1, 5]");
        sys.degree_ = rank_or_m;
        sys.rank_ = rank_or_m;
        break;
      case Family::D:
        if (rank_or_m < 2 || rank_or_m > 5) throw ConfigError("type D rank must be in [2, 5]");
        sys.degree_ = rank_or_m;
        sys.rank_ = rank_or_m;
        break;
      case Family::I2:
        if (rank_or_m < 3 || rank_or_m > 64) throw ConfigError("I2(m) requires 3 <= m <= 64");
        sys.degree_ = rank_or_m;
        sys.rank_ = 2;
        break;
    }
    sys.enumerate();
    sys.tabulate_reflections();
    sys.tabulate_bruhat();
    sys.tabulate_parabolics();
    return sys;
  }

  /// Symmetric group S_n (type A_{n-1}).
  static CoxeterSystem symmetric(int n) { return build(Family::A, n - 1); }

  [[nodiscard]] Family family() const { return family_; }
  [[nodiscard]] int rank() const { return rank_; }
  /// n for S_n, B_n, D_n; m for I2(m).
  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] std::size_t size() const { return backing_.size(); }
  [[nodiscard]] GeneratorSet all_generators() const { return GeneratorSet::all(rank_); }

  [[nodiscard]] Element identity() const { return Element{0}; }
  [[nodiscard]] Element longest() const { return Element{static_cast<std::uint32_t>(size() - 1)}; }
  [[nodiscard]] Element element(std::size_t id) const { return Element{static_cast<std::uint32_t>(id)}; }
  [[nodiscard]] Element generator(int g) const { return rmul_[g][0]; }

  [[nodiscard]] int length(Element x) const { return length_[x.id]; }
  [[nodiscard]] const std::vector<int>& backing(Element x) const { return backing_[x.id]; }
  [[nodiscard]] const std::vector<int>& reduced_word(Element x) const { return word_[x.id]; }

  [[nodiscard]] Element rmul(Element x, int g) const { return rmul_[g][x.id]; }
  [[nodiscard]] Element lmul(int g, Element x) const { return lmul_[g][x.id]; }
  [[nodiscard]] Element inverse(Element x) const { return inverse_[x.id]; }

  [[nodiscard]] Element mul(Element x, Element y) const {
    for (int g : word_[y.id]) x = rmul_[g][x.id];
    return x;
  }

  [[nodiscard]] std::optional<Element> find(const std::vector<int>& backing) const {
    auto it = index_.find(backing);
    if (it == index_.end()) return std::nullopt;
    return Element{it->second};
  }

  [[nodiscard]] const std::vector<Element>& reflections() const { return reflections_; }
  [[nodiscard]] bool is_reflection(Element x) const { return is_reflection_[x.id] != 0; }

  [[nodiscard]] bool bruhat_leq(Element x, Element y) const { return below_[y.id].test(x.id); }
  /// {x : x <= y}
  [[nodiscard]] const Bitset& below(Element y) const { return below_[y.id]; }
  /// {y : x <= y}
  [[nodiscard]] const Bitset& above(Element x) const { return above_[x.id]; }
  /// Bruhat covers x < y, stored per y.
  [[nodiscard]] const std::vector<Element>& lower_covers(Element y) const { return lower_covers_[y.id]; }

  /// [x, y] in ascending id order (empty if x is not below y).
  [[nodiscard]] std::vector<Element> interval(Element x, Element y) const {
    std::vector<Element> out;
    if (!bruhat_leq(x, y)) return out;
    Bitset b = below_[y.id] & above_[x.id];
    for (auto i = b.find_first(); i != Bitset::npos; i = b.find_next(i)) out.push_back(element(i));
    return out;
  }

  [[nodiscard]] const Parabolic& parabolic(GeneratorSet J) const {
    if (!J.subset_of(all_generators())) throw ConfigError("generator subset not contained in S");
    return parabolics_[J.bits()];
  }

  [[nodiscard]] std::string name() const {
    if (family_ == Family::A) return "S_" + std::to_string(degree_);
    if (family_ == Family::I2) return "I2(" + std::to_string(degree_) + ")";
    return family_name(family_) + "_" + std::to_string(degree_);
  }

 private:
  CoxeterSystem() = default;

  // ----- family specific backings -----

  [[nodiscard]] std::vector<int> identity_backing() const {
    if (family_ == Family::I2) return {0, 0};
    std::vector<int> b(static_cast<std::size_t>(degree_));
    std::iota(b.begin(), b.end(), 1);
    return b;
  }

  [[nodiscard]] std::vector<int> right_gen(std::vector<int> b, int g) const {
    switch (family_) {
      case Family::A:
        std::swap(b[g], b[g + 1]);
        return b;
      case Family::B:
        if (g == 0) b[0] = -b[0];
        else std::swap(b[g - 1], b[g]);
        return b;
      case Family::D:
        if (g == 0) {
          const int x = b[0];
          b[0] = -b[1];
          b[1] = -x;
        } else {
          std::swap(b[g - 1], b[g]);
        }
        return b;
      case Family::I2: {
        // (k, f) * s1 = (k, f+1);  (k, f) * s2 = (k +- 1, f+1)   with s1 = f, s2 = r f
        const int m = degree_;
        if (g == 1) b[0] = ((b[0] + (b[1] != 0 ? -1 : 1)) % m + m) % m;
        b[1] ^= 1;
        return b;
      }
    }
    return b;
  }

  [[nodiscard]] std::vector<int> left_gen(int g, std::vector<int> b) const {
    auto relabel = [&](auto&& map) {
      for (int& x : b) x = (x < 0) ? -map(-x) : map(x);
    };
    switch (family_) {
      case Family::A: {
        const int i = g + 1;
        for (int& x : b) x = x == i ? i + 1 : (x == i + 1 ? i : x);
        return b;
      }
      case Family::B:
        if (g == 0) {
          for (int& x : b)
            if (x == 1 || x == -1) x = -x;
        } else {
          relabel([g](int x) { return x == g ? g + 1 : (x == g + 1 ? g : x); });
        }
        return b;
      case Family::D:
        if (g == 0) {
          // s0'(1) = -2, s0'(2) = -1
          for (int& x : b) {
            if (x == 1) x = -2;
            else if (x == -1) x = 2;
            else if (x == 2) x = -1;
            else if (x == -2) x = 1;
          }
        } else {
          relabel([g](int x) { return x == g ? g + 1 : (x == g + 1 ? g : x); });
        }
        return b;
      case Family::I2: {
        const int m = degree_;
        // s1 * (k, f) = (-k, f+1);  s2 * (k, f) = (1 - k, f+1)
        b[0] = g == 0 ? (m - b[0]) % m : ((1 - b[0]) % m + m) % m;
        b[1] ^= 1;
        return b;
      }
    }
    return b;
  }

  [[nodiscard]] std::vector<int> inverse_backing(const std::vector<int>& b) const {
    if (family_ == Family::I2) return b[1] != 0 ? b : std::vector<int>{(degree_ - b[0]) % degree_, 0};
    std::vector<int> inv(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
      const int x = b[i];
      const int pos = static_cast<int>(i) + 1;
      inv[static_cast<std::size_t>(std::abs(x) - 1)] = x < 0 ? -pos : pos;
    }
    return inv;
  }

  // ----- tabulation -----

  void enumerate() {
    std::vector<std::vector<int>> level{identity_backing()};
    std::set<std::vector<int>> seen{level.front()};
    std::vector<std::vector<int>> words{{}};
    int len = 0;
    std::map<std::vector<int>, std::vector<int>> word_of{{level.front(), {}}};
    while (!level.empty()) {
      std::sort(level.begin(), level.end());
      for (auto& b : level) {
        index_[b] = static_cast<std::uint32_t>(backing_.size());
        backing_.push_back(b);
        length_.push_back(len);
        word_.push_back(word_of[b]);
      }
      std::vector<std::vector<int>> next;
      for (const auto& b : level) {
        for (int g = 0; g < rank_; ++g) {
          auto c = right_gen(b, g);
          if (seen.insert(c).second) {
            auto w = word_of[b];
            w.push_back(g);
            word_of[c] = std::move(w);
            next.push_back(std::move(c));
          }
        }
      }
      level = std::move(next);
      ++len;
    }
    const std::size_t n = backing_.size();
    rmul_.assign(static_cast<std::size_t>(rank_), std::vector<Element>(n));
    lmul_.assign(static_cast<std::size_t>(rank_), std::vector<Element>(n));
    inverse_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (int g = 0; g < rank_; ++g) {
        rmul_[g][i] = Element{index_.at(right_gen(backing_[i], g))};
        lmul_[g][i] = Element{index_.at(left_gen(g, backing_[i]))};
      }
      inverse_[i] = Element{index_.at(inverse_backing(backing_[i]))};
    }
  }

  void tabulate_reflections() {
    is_reflection_.assign(size(), 0);
    for (std::size_t i = 0; i < size(); ++i) {
      const Element w = element(i);
      for (int g = 0; g < rank_; ++g) {
        const Element t = mul(mul(w, generator(g)), inverse(w));
        is_reflection_[t.id] = 1;
      }
    }
    for (std::size_t i = 0; i < size(); ++i)
      if (is_reflection_[i]) reflections_.push_back(element(i));
  }

  void tabulate_bruhat() {
    const std::size_t n = size();
    below_.assign(n, Bitset(n));
    lower_covers_.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
      const Element y = element(i);
      below_[i].set(i);
      for (Element t : reflections_) {
        const Element x = mul(t, y);
        if (length(x) + 1 == length(y)) {
          lower_covers_[i].push_back(x);
          below_[i] |= below_[x.id];
        }
      }
      std::sort(lower_covers_[i].begin(), lower_covers_[i].end());
    }
    above_.assign(n, Bitset(n));
    for (std::size_t y = 0; y < n; ++y)
      for (auto x = below_[y].find_first(); x != Bitset::npos; x = below_[y].find_next(x)) above_[x].set(y);
  }

  void tabulate_parabolics() {
    const std::size_t n = size();
    parabolics_.resize(std::size_t{1} << rank_);
    for (std::uint32_t bits = 0; bits < parabolics_.size(); ++bits) {
      Parabolic& p = parabolics_[bits];
      p.J = GeneratorSet(bits);
      p.in_subgroup.assign(n, 0);
      std::vector<Element> stack{identity()};
      p.in_subgroup[0] = 1;
      while (!stack.empty()) {
        const Element x = stack.back();
        stack.pop_back();
        for (int g : p.J.indices()) {
          const Element y = rmul(x, g);
          if (!p.in_subgroup[y.id]) {
            p.in_subgroup[y.id] = 1;
            stack.push_back(y);
          }
        }
      }
      for (std::size_t i = 0; i < n; ++i)
        if (p.in_subgroup[i]) p.subgroup.push_back(element(i));
      p.longest = p.subgroup.back();
      p.part.resize(n);
      p.rep.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        Element r = element(i);
        bool reduced = true;
        while (reduced) {
          reduced = false;
          for (int g : p.J.indices()) {
            const Element s = lmul(g, r);
            if (length(s) < length(r)) {
              r = s;
              reduced = true;
              break;
            }
          }
        }
        p.rep[i] = r;
        p.part[i] = mul(element(i), inverse(r));
        if (r.id == i) p.min_reps.push_back(r);
      }
    }
  }

  Family family_ = Family::A;
  int rank_ = 0;
  int degree_ = 0;
  std::vector<std::vector<int>> backing_;
  std::map<std::vector<int>, std::uint32_t> index_;
  std::vector<int> length_;
  std::vector<std::vector<int>> word_;
  std::vector<std::vector<Element>> rmul_;
  std::vector<std::vector<Element>> lmul_;
  std::vector<Element> inverse_;
  std::vector<Element> reflections_;
  std::vector<char> is_reflection_;
  std::vector<Bitset> below_;
  std::vector<Bitset> above_;
  std::vector<std::vector<Element>> lower_covers_;
  std::vector<Parabolic> parabolics_;
};

// ---------------------------------------------------------------------------
// Free-function queries

inline bool bruhat_leq(const CoxeterSystem& sys, Element x, Element y) { return sys.bruhat_leq(x, y); }

/// (x_J, ^J x) with x = x_J * ^J x.
inline std::pair<Element, Element> coset_factorize(const CoxeterSystem& sys, Element x, GeneratorSet J) {
  const Parabolic& p = sys.parabolic(J);
  return {p.part[x.id], p.rep[x.id]};
}

/// tau <=_L kappa: kappa = u tau with l(kappa) = l(u) + l(tau).
inline bool weak_left_leq(const CoxeterSystem& sys, Element tau, Element kappa) {
  const Element u = sys.mul(kappa, sys.inverse(tau));
  return sys.length(u) + sys.length(tau) == sys.length(kappa);
}

/// A (tau, kappa)-convex tuple of reflections, or nullopt when tau is not weakly below kappa.
/// Every step cur -> cur t is a left weak cover (cur t = s cur, s simple), so t = cur^-1 s cur.
/// Deterministic: each step takes the smallest reflection id that keeps completion possible.
inline std::optional<std::vector<Element>> convex_tuple(const CoxeterSystem& sys, Element tau, Element kappa) {
  if (!weak_left_leq(sys, tau, kappa)) return std::nullopt;
  std::vector<Element> tuple;
  Element cur = tau;
  while (cur != kappa) {
    bool advanced = false;
    for (Element t : sys.reflections()) {
      const Element next = sys.mul(cur, t);
      if (sys.length(next) == sys.length(cur) + 1 && weak_left_leq(sys, cur, next) && weak_left_leq(sys, next, kappa)) {
        tuple.push_back(t);
        cur = next;
        advanced = true;
        break;
      }
    }
    if (!advanced) throw ConsistencyError("convex_tuple: weak order step not found");
  }
  return tuple;
}

/// Least upper bound in Bruhat order, if it exists.
inline std::optional<Element> bruhat_join(const CoxeterSystem& sys, std::span<const Element> elems) {
  if (elems.empty()) throw PreconditionError("bruhat_join of an empty set");
  Bitset upper = sys.above(elems.front());
  for (Element z : elems.subspan(1)) upper &= sys.above(z);
  const auto first = upper.find_first();
  if (first == Bitset::npos) return std::nullopt;
  // ids refine length, so the first upper bound is of minimal length
  const Element m = sys.element(first);
  if (!upper.is_subset_of(sys.above(m))) return std::nullopt;
  return m;
}

inline void require_type_a(const CoxeterSystem& sys, const char* what) {
  if (sys.family() != Family::A) throw UnsupportedError(std::string(what) + " is only defined for type A");
}

/// sigma|_A in S_{|A|}, A a set of 1-based positions.
inline std::vector<int> restrict_permutation(const CoxeterSystem& sys, Element sigma, std::vector<int> A) {
  require_type_a(sys, "restrict_permutation");
  std::sort(A.begin(), A.end());
  A.erase(std::unique(A.begin(), A.end()), A.end());
  const auto& w = sys.backing(sigma);
  std::vector<std::pair<int, int>> values;
  for (std::size_t t = 0; t < A.size(); ++t) {
    if (A[t] < 1 || A[t] > sys.degree()) throw PreconditionError("restriction index out of range");
    values.emplace_back(w[static_cast<std::size_t>(A[t] - 1)], static_cast<int>(t));
  }
  std::sort(values.begin(), values.end());
  std::vector<int> out(A.size());
  for (std::size_t r = 0; r < values.size(); ++r) out[static_cast<std::size_t>(values[r].second)] = static_cast<int>(r) + 1;
  return out;
}

/// Reflection coloring: minimal i with t in W_{J_i}.
inline int reflection_color(const CoxeterSystem& sys, const Filtration& f, Element t) {
  for (int i = 0; i <= f.length(); ++i)
    if (sys.parabolic(f.chain[static_cast<std::size_t>(i)]).contains(t)) return i;
  throw ConsistencyError("element outside W_S");
}

// ---------------------------------------------------------------------------
// Text formats

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

inline std::optional<std::vector<int>> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& part : split(s, ',')) {
    const std::string t = trim(part);
    if (t.empty()) return std::nullopt;
    std::size_t used = 0;
    int x = 0;
    try {
      x = std::stoi(t, &used);
    } catch (const std::exception&) {
      return std::nullopt;
    }
    if (used != t.size()) return std::nullopt;
    out.push_back(x);
  }
  return out;
}

inline bool is_signed_permutation(const std::vector<int>& b, int n, bool allow_signs) {
  if (static_cast<int>(b.size()) != n) return false;
  std::vector<char> hit(static_cast<std::size_t>(n) + 1, 0);
  for (int x : b) {
    if (x < 0 && !allow_signs) return false;
    const int a = std::abs(x);
    if (a < 1 || a > n || hit[static_cast<std::size_t>(a)]) return false;
    hit[static_cast<std::size_t>(a)] = 1;
  }
  return true;
}

}  // namespace detail

/// Element from a 1-based generator word; "" is the identity.
inline Element element_from_word(const CoxeterSystem& sys, std::span<const int> word) {
  Element x = sys.identity();
  for (int g : word) {
    if (g < 1 || g > sys.rank()) throw ParseError("generator index " + std::to_string(g) + " out of range");
    x = sys.rmul(x, g - 1);
  }
  return x;
}

/// Accepted forms:
///   A:   one-line digits "4231" (n <= 9)
///   B/D: signed one-line "-2,1,3"
///   I2:  "r^k", "r^k f", "f", "r"
///   all: "e" for the identity, a generator word "1,2,1", or "word:1,2,1" to force a word.
/// A comma list that is a valid (signed) one-line permutation of the right size is
/// read as one-line notation; otherwise as a generator word.
inline Element parse_element(const CoxeterSystem& sys, const std::string& raw) {
  const std::string s = detail::trim(raw);
  if (s == "e" || s == "id") return sys.identity();
  if (s.rfind("word:", 0) == 0) {
    const std::string body = s.substr(5);
    if (body.empty()) return sys.identity();
    auto w = detail::parse_int_list(body);
    if (!w) throw ParseError("malformed generator word '" + s + "'");
    return element_from_word(sys, *w);
  }
  const int n = sys.degree();
  if (sys.family() == Family::I2) {
    int k = 0;
    bool flip = false;
    std::string rest = s;
    if (rest.rfind("r", 0) == 0) {
      rest = rest.substr(1);
      k = 1;
      if (rest.rfind("^", 0) == 0) {
        std::size_t used = 0;
        try {
          k = std::stoi(rest.substr(1), &used);
        } catch (const std::exception&) {
          throw ParseError("malformed dihedral element '" + s + "'");
        }
        rest = rest.substr(1 + used);
      }
      rest = detail::trim(rest);
      if (rest == "f") flip = true;
      else if (!rest.empty()) throw ParseError("malformed dihedral element '" + s + "'");
      return *sys.find({((k % n) + n) % n, flip ? 1 : 0});
    }
    if (s == "f") return *sys.find({0, 1});
  }
  if (sys.family() == Family::A && s.find(',') == std::string::npos &&
      std::all_of(s.begin(), s.end(), [](char c) { return c >= '1' && c <= '9'; }) && static_cast<int>(s.size()) == n && n > 1) {
    std::vector<int> b;
    for (char c : s) b.push_back(c - '0');
    if (detail::is_signed_permutation(b, n, false)) return *sys.find(b);
    throw ParseError("'" + s + "' is not a permutation of 1.." + std::to_string(n));
  }
  auto list = detail::parse_int_list(s);
  if (!list) throw ParseError("cannot parse element '" + s + "' for " + sys.name());
  if (sys.family() != Family::I2 && detail::is_signed_permutation(*list, n, sys.family() != Family::A)) {
    if (auto x = sys.find(*list)) return *x;
    throw ParseError("'" + s + "' is not an element of " + sys.name() + " (type D needs an even number of signs)");
  }
  return element_from_word(sys, *list);
}

inline std::string format_element(const CoxeterSystem& sys, Element x) {
  const auto& b = sys.backing(x);
  switch (sys.family()) {
    case Family::A: {
      std::string out;
      for (std::size_t i = 0; i < b.size(); ++i) {
        if (sys.degree() > 9 && i > 0) out += ",";
        out += std::to_string(b[i]);
      }
      return out;
    }
    case Family::B:
    case Family::D: {
      std::string out;
      for (std::size_t i = 0; i < b.size(); ++i) {
        if (i > 0) out += ",";
        out += std::to_string(b[i]);
      }
      return out;
    }
    case Family::I2:
      return "r^" + std::to_string(b[0]) + (b[1] != 0 ? " f" : "");
  }
  return {};
}

/// Parses a comma list of 1-based generator indices ("" or "none" is the empty set).
inline GeneratorSet parse_generator_set(const CoxeterSystem& sys, const std::string& raw) {
  const std::string s = detail::trim(raw);
  if (s.empty() || s == "none" || s == "{}") return {};
  if (s == "all" || s == "S") return sys.all_generators();
  auto list = detail::parse_int_list(s);
  if (!list) throw ParseError("malformed generator set '" + s + "'");
  for (int g : *list)
    if (g < 1 || g > sys.rank()) throw ConfigError("generator " + std::to_string(g) + " not in S for " + sys.name());
  return GeneratorSet::from_one_based(*list);
}

inline std::string format_generator_set(GeneratorSet J) {
  std::string out = "{";
  bool first = true;
  for (int g : J.indices()) {
    if (!first) out += ",";
    out += std::to_string(g + 1);
    first = false;
  }
  return out + "}";
}

}  // namespace klp
