#pragma once

// Invariant suites shared by the `verify` subcommand and the acceptance runner.

#include <random>
#include <string>
#include <vector>

#include "klp/decomp.hpp"
#include "klp/hypercube.hpp"

namespace klp {

struct SuiteResult {
  std::string name;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::string note;                   // e.g. why a suite was skipped
  std::vector<std::string> failures;  // first few diagnostics

  void check(bool ok, const std::string& what) {
    if (ok) {
      ++passed;
      return;
    }
    ++failed;
    if (failures.size() < 10) failures.push_back(what);
  }
  /// Runs f, counting a thrown klp::Error as a failure.
  template <class F>
  void guard(const std::string& what, F&& f) {
    try {
      check(f(), what);
    } catch (const Error& e) {
      check(false, what + ": " + e.what());
    }
  }
  [[nodiscard]] bool ok() const { return failed == 0; }
};

struct VerifyOptions {
  std::size_t samples = 0;  // 0: exhaustive where the suite allows it
  std::uint64_t seed = 1;
};

namespace detail {

inline std::string pair_name(const CoxeterSystem& sys, Element x, Element y) {
  return format_element(sys, x) + " <= " + format_element(sys, y);
}

inline std::vector<GeneratorSet> all_subsets(int rank) {
  std::vector<GeneratorSet> out;
  for (unsigned m = 0; m < (1u << rank); ++m) {
    GeneratorSet J;
    for (int i = 0; i < rank; ++i)
      if (m & (1u << i)) J.insert(i);
    out.push_back(J);
  }
  return out;
}

inline std::vector<std::pair<Element, Element>> bruhat_pairs(const CoxeterSystem& sys) {
  std::vector<std::pair<Element, Element>> out;
  for (std::size_t j = 0; j < sys.size(); ++j) {
    const Bitset& below = sys.below(sys.element(j));
    for (auto i = below.find_first(); i != Bitset::npos; i = below.find_next(i))
      out.emplace_back(sys.element(i), sys.element(j));
  }
  return out;
}

}  // namespace detail

/// c_y is bar-invariant, Pc has off-diagonal support in vZ[v], d(Pc_{x,y}) = sum_k Rc_{x,k} Pc_{k,y},
/// and P^d agrees with its q-form.
inline SuiteResult verify_kl(const KLContext& ctx) {
  const auto& sys = ctx.system();
  SuiteResult res;
  res.name = "kl";
  for (std::size_t j = 0; j < sys.size(); ++j) {
    const Element y = sys.element(j);
    const HeckeElement c = ctx.canonical(y);
    res.check(ctx.algebra().d(c) == c, "c_" + format_element(sys, y) + " is not bar-invariant");
    const Bitset& below = sys.below(y);
    for (std::size_t i = 0; i < sys.size(); ++i) {
      const Element x = sys.element(i);
      const Laurent& pc = ctx.p_check(x, y);
      if (x == y) {
        res.check(pc == Laurent(1), "diagonal entry " + format_element(sys, x));
        continue;
      }
      if (!below.test(i)) {
        res.check(pc.is_zero() && ctx.r_check(x, y).is_zero(), "nonzero entry off the interval");
        continue;
      }
      res.check(pc.is_zero() || pc.min_exp() >= 1, "degree condition at " + detail::pair_name(sys, x, y));
      Laurent rhs;
      const Bitset between = below & sys.above(x);
      for (auto k = between.find_first(); k != Bitset::npos; k = between.find_next(k))
        rhs += ctx.r_check(x, sys.element(k)) * ctx.p_check(sys.element(k), y);
      res.check(bar(pc) == rhs, "R-recursion at " + detail::pair_name(sys, x, y));
      res.guard("q-derived at " + detail::pair_name(sys, x, y), [&] { return is_q_polynomial(p_derived(ctx, x, y).normalized); });
    }
  }
  return res;
}

/// I + Q = P^d with nonnegative parts for (x, y, tau), and monotonicity along weak covers.
inline SuiteResult verify_iq(const KLContext& ctx, const VerifyOptions& opt) {
  const auto& sys = ctx.system();
  SuiteResult res;
  res.name = "iq";
  const auto pairs = detail::bruhat_pairs(sys);
  const auto one = [&](Element x, Element y, Element tau) {
    res.guard("I/Q at " + detail::pair_name(sys, x, y) + " tau=" + format_element(sys, tau), [&] {
      (void)iq_decomposition(ctx, x, y, tau);
      return true;
    });
  };
  if (opt.samples == 0) {
    for (std::size_t t = 0; t < sys.size(); ++t)
      for (const auto& [x, y] : pairs) one(x, y, sys.element(t));
    for (std::size_t t = 0; t < sys.size(); ++t)
      for (int g = 0; g < sys.rank(); ++g) {
        const Element t1 = sys.element(t), t2 = sys.lmul(g, t1);
        if (sys.length(t2) < sys.length(t1)) continue;
        for (const auto& [x, y] : pairs)
          res.guard("monotonicity", [&] { return monotonicity_check(ctx, x, y, t1, t2); });
      }
    return res;
  }
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::size_t> pick_pair(0, pairs.size() - 1), pick_el(0, sys.size() - 1);
  std::uniform_int_distribution<int> pick_gen(0, sys.rank() - 1);
  for (std::size_t s = 0; s < opt.samples; ++s) {
    const auto& [x, y] = pairs[pick_pair(rng)];
    const Element tau = sys.element(pick_el(rng));
    one(x, y, tau);
    const Element up = sys.lmul(pick_gen(rng), tau);
    const Element lo = sys.length(up) > sys.length(tau) ? tau : up, hi = sys.length(up) > sys.length(tau) ? up : tau;
    res.guard("monotonicity", [&] { return monotonicity_check(ctx, x, y, lo, hi); });
  }
  return res;
}

/// The three routes to I^J, Q^J and gamma' agree, for every J.
inline SuiteResult verify_parabolic(const KLContext& ctx, const VerifyOptions& opt) {
  const auto& sys = ctx.system();
  SuiteResult res;
  res.name = "parabolic";
  const auto pairs = detail::bruhat_pairs(sys);
  const auto subsets = detail::all_subsets(sys.rank());
  const auto one = [&](Element x, Element y, GeneratorSet J) {
    res.guard("decomposition routes at " + detail::pair_name(sys, x, y) + " J=" + format_generator_set(J), [&] {
      const auto pd = parabolic_decomposition(ctx, x, y, J);
      return is_nonneg(pd.i_j) && is_nonneg(pd.q_j);
    });
  };
  if (opt.samples == 0) {
    for (GeneratorSet J : subsets)
      for (const auto& [x, y] : pairs) one(x, y, J);
    return res;
  }
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::size_t> pick_pair(0, pairs.size() - 1), pick_j(0, subsets.size() - 1);
  for (std::size_t s = 0; s < opt.samples; ++s) {
    const auto& [x, y] = pairs[pick_pair(rng)];
    one(x, y, subsets[pick_j(rng)]);
  }
  return res;
}

/// The J-relative factorizations of R for every J, and the chain factorization along the standard flag.
inline SuiteResult verify_factorization(const KLContext& ctx, const VerifyOptions& opt) {
  const auto& sys = ctx.system();
  SuiteResult res;
  res.name = "factorization";
  const auto subsets = detail::all_subsets(sys.rank());
  const auto flag = Filtration::standard_flag(sys.rank());
  const auto one = [&](Element x, Element y, GeneratorSet J) {
    const auto rep = r_factorization_check(ctx, x, y, J);
    const std::string where = detail::pair_name(sys, x, y) + " J=" + format_generator_set(J);
    res.check(rep.unnormalized, "unnormalized factorization at " + where);
    res.check(rep.normalized, "normalized factorization at " + where);
    res.check(rep.inverse, "inverse relation at " + where);
  };
  const auto chain = [&](Element x, Element y) {
    res.check(chain_factorization(ctx, flag, x, y) == ctx.r(x, y), "chain factorization at " + detail::pair_name(sys, x, y));
  };
  if (opt.samples == 0) {
    for (GeneratorSet J : subsets)
      for (std::size_t i = 0; i < sys.size(); ++i)
        for (std::size_t j = 0; j < sys.size(); ++j) one(sys.element(i), sys.element(j), J);
    for (std::size_t i = 0; i < sys.size(); ++i)
      for (std::size_t j = 0; j < sys.size(); ++j) chain(sys.element(i), sys.element(j));
    return res;
  }
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::size_t> pick_el(0, sys.size() - 1), pick_j(0, subsets.size() - 1);
  for (std::size_t s = 0; s < opt.samples; ++s) {
    const Element x = sys.element(pick_el(rng)), y = sys.element(pick_el(rng));
    one(x, y, subsets[pick_j(rng)]);
    chain(x, y);
  }
  return res;
}

/// S_n combinatorics for every sigma, and the four R routes (two hypercube formulas, the
/// join-based sets, the algebraic table) on all or sampled pairs, plus Q^J on intervals.
inline SuiteResult verify_hypercube(const KLContext& ctx, const VerifyOptions& opt) {
  const auto& sys = ctx.system();
  SuiteResult res;
  res.name = "hypercube";
  if (sys.family() != Family::A) {
    res.note = "skipped: hypercube formulas are specific to type A";
    return res;
  }
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const Hypercube hc(sys, sys.element(i));
    const std::string name = format_element(sys, hc.sigma());
    res.check(check_admissibility_conditions(hc), "admissibility conditions at " + name);
    res.check(check_galois_connection(hc), "Galois connection at " + name);
    res.check(check_fibers(hc), "fibers at " + name);
    res.check(check_length_identity(hc), "length identity at " + name);
    res.check(check_supremum(hc), "supremum at " + name);
  }
  const auto one = [&](const Hypercube& hc, Element omega) {
    const std::string where = detail::pair_name(sys, hc.sigma(), omega);
    res.guard("hypercube R at " + where, [&] {
      const auto hr = hypercube_r(hc, omega, &ctx);
      return join_formula_r(hc, omega) == hr.r && ctx.jrel(hc.sigma(), omega, hc.J()) == hr.r;
    });
    if (sys.bruhat_leq(hc.sigma(), omega))
      res.guard("hypercube Q at " + where, [&] {
        (void)hypercube_Q(ctx, hc, omega);
        return true;
      });
  };
  if (opt.samples == 0) {
    for (std::size_t i = 0; i < sys.size(); ++i) {
      const Hypercube hc(sys, sys.element(i));
      for (std::size_t j = 0; j < sys.size(); ++j) one(hc, sys.element(j));
    }
    return res;
  }
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::size_t> pick_el(0, sys.size() - 1);
  for (std::size_t s = 0; s < opt.samples; ++s) {
    const Hypercube hc(sys, sys.element(pick_el(rng)));
    one(hc, sys.element(pick_el(rng)));
  }
  return res;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"kl", "iq", "parabolic", "hypercube", "factorization"};
  return names;
}

inline SuiteResult run_suite(const std::string& name, const KLContext& ctx, const VerifyOptions& opt) {
  if (name == "kl") return verify_kl(ctx);
  if (name == "iq") return verify_iq(ctx, opt);
  if (name == "parabolic") return verify_parabolic(ctx, opt);
  if (name == "hypercube") return verify_hypercube(ctx, opt);
  if (name == "factorization") return verify_factorization(ctx, opt);
  throw ConfigError("unknown suite '" + name + "'");
}

}  // namespace klp
