#pragma once

// Bruhat interval graphs, reflection colorings, colored isomorphism search and the
// relative / filtered combinatorial invariance checkers.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "klp/hecke.hpp"

namespace klp {

struct IntervalGraph {
  struct Edge {
    std::uint32_t from;
    std::uint32_t to;
    Element label;  // label * vertices[from] == vertices[to]
  };

  const CoxeterSystem* sys = nullptr;
  Element sigma;
  Element omega;
  std::vector<Element> vertices;  // ascending id, hence non-decreasing level
  std::vector<int> level;
  std::vector<Edge> edges;
  std::vector<std::vector<std::uint32_t>> out_edges;
  std::vector<std::vector<std::uint32_t>> in_edges;

  [[nodiscard]] std::size_t size() const { return vertices.size(); }
  [[nodiscard]] int edge_between(std::uint32_t u, std::uint32_t v) const {
    return matrix_[static_cast<std::size_t>(u) * size() + v];
  }
  [[nodiscard]] int height() const { return level.empty() ? 0 : level.back(); }
  /// number of vertices per level
  [[nodiscard]] std::vector<int> level_profile() const {
    std::vector<int> out(static_cast<std::size_t>(height() + 1), 0);
    for (int l : level) ++out[static_cast<std::size_t>(l)];
    return out;
  }

  std::vector<int> matrix_;
};

inline IntervalGraph build_interval_graph(const CoxeterSystem& sys, Element sigma, Element omega) {
  if (!sys.bruhat_leq(sigma, omega))
    throw PreconditionError("interval graph: " + format_element(sys, sigma) + " is not below " +
                            format_element(sys, omega));
  IntervalGraph g;
  g.sys = &sys;
  g.sigma = sigma;
  g.omega = omega;
  const Bitset inside = sys.above(sigma) & sys.below(omega);
  std::vector<int> index(sys.size(), -1);
  for (auto i = inside.find_first(); i != Bitset::npos; i = inside.find_next(i)) {
    index[i] = static_cast<int>(g.vertices.size());
    g.vertices.push_back(sys.element(i));
    g.level.push_back(sys.length(sys.element(i)) - sys.length(sigma));
  }
  const std::size_t n = g.size();
  g.matrix_.assign(n * n, -1);
  g.out_edges.resize(n);
  g.in_edges.resize(n);
  for (std::size_t u = 0; u < n; ++u) {
    const Element z = g.vertices[u];
    for (Element t : sys.reflections()) {
      const Element w = sys.mul(t, z);
      const int v = index[w.id];
      if (v < 0 || sys.length(w) <= sys.length(z)) continue;
      const auto e = static_cast<std::uint32_t>(g.edges.size());
      g.edges.push_back({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v), t});
      g.out_edges[u].push_back(e);
      g.in_edges[static_cast<std::size_t>(v)].push_back(e);
      g.matrix_[u * n + static_cast<std::size_t>(v)] = static_cast<int>(e);
    }
  }
  return g;
}

/// Default relative subset: every generator but the last.
inline GeneratorSet default_relative_J(const CoxeterSystem& sys) { return GeneratorSet::all(sys.rank() - 1); }

struct ColoredIntervalGraph {
  IntervalGraph graph;
  Filtration filtration;
  int colors = 0;                 // r
  std::vector<int> color;         // per edge, in 1..r
  GeneratorSet marking;           // J for the relative marking
  std::vector<char> marked;       // per edge: label in W_J
};

inline ColoredIntervalGraph color_edges(IntervalGraph graph, const Filtration& f, std::optional<GeneratorSet> J = {}) {
  const CoxeterSystem& sys = *graph.sys;
  f.validate(sys.rank());
  ColoredIntervalGraph out;
  out.filtration = f;
  out.colors = f.length();
  out.marking = J ? *J : default_relative_J(sys);
  const Parabolic& par = sys.parabolic(out.marking);
  for (const auto& e : graph.edges) {
    out.color.push_back(reflection_color(sys, f, e.label));
    out.marked.push_back(par.contains(e.label) ? 1 : 0);
  }
  out.graph = std::move(graph);
  return out;
}

inline std::string reflection_label(const CoxeterSystem& sys, Element t) {
  if (sys.family() == Family::A) {
    const auto& b = sys.backing(t);
    std::vector<int> moved;
    for (std::size_t p = 0; p < b.size(); ++p)
      if (b[p] != static_cast<int>(p) + 1) moved.push_back(static_cast<int>(p) + 1);
    if (moved.size() == 2) return "(" + std::to_string(moved[0]) + "," + std::to_string(moved[1]) + ")";
  }
  return format_element(sys, t);
}

inline std::string to_dot(const ColoredIntervalGraph& cg) {
  static const char* palette[] = {"black", "red", "blue", "darkgreen", "orange", "purple", "brown", "magenta"};
  const auto& g = cg.graph;
  std::ostringstream os;
  os << "digraph interval {\n  rankdir=BT;\n";
  for (std::size_t u = 0; u < g.size(); ++u)
    os << "  v" << u << " [label=\"" << format_element(*g.sys, g.vertices[u]) << "\", level=" << g.level[u] << "];\n";
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const int c = cg.color[e];
    os << "  v" << g.edges[e].from << " -> v" << g.edges[e].to << " [label=\"t=" << reflection_label(*g.sys, g.edges[e].label)
       << "\", color=\"" << palette[c % 8] << "\", colorindex=" << c << (cg.marked[e] ? ", marked=1" : "") << "];\n";
  }
  os << "}\n";
  return os.str();
}

enum class IsoMode { Plain, Relative, Filtered };
enum class IsoOutcome { Found, NotFound, Indeterminate };

inline const char* iso_mode_name(IsoMode m) {
  switch (m) {
    case IsoMode::Plain: return "plain";
    case IsoMode::Relative: return "relative";
    case IsoMode::Filtered: return "filtered";
  }
  return "?";
}
inline const char* iso_outcome_name(IsoOutcome o) {
  switch (o) {
    case IsoOutcome::Found: return "found";
    case IsoOutcome::NotFound: return "none";
    case IsoOutcome::Indeterminate: return "indeterminate";
  }
  return "?";
}

struct IsoResult {
  IsoOutcome outcome = IsoOutcome::NotFound;
  std::vector<std::uint32_t> phi;  // vertex map G1 -> G2
  std::vector<int> gamma;          // filtered mode: gamma[c] for c in 1..r1 (index 0 unused)
  std::size_t nodes = 0;
};

inline constexpr std::size_t kDefaultBudget = 1'000'000;

/// KLP_BUDGET, when set to a positive integer, overrides the default node budget.
inline std::size_t default_budget() {
  if (const char* env = std::getenv("KLP_BUDGET")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    throw ConfigError(std::string("KLP_BUDGET must be a positive integer, got '") + env + "'");
  }
  return kDefaultBudget;
}

namespace detail {

/// Can a partial strictly increasing map {1..r1} -> {1..r2} be completed?
inline bool gamma_extendable(const std::vector<int>& gamma, int r1, int r2) {
  int prev_c = 0, prev_d = 0;
  for (int c = 1; c <= r1; ++c) {
    const int d = gamma[static_cast<std::size_t>(c)];
    if (d == 0) continue;
    if (d - prev_d < c - prev_c) return false;
    prev_c = c;
    prev_d = d;
  }
  return r2 - prev_d >= r1 - prev_c;
}

inline void complete_gamma(std::vector<int>& gamma, int r1) {
  for (int c = 1; c <= r1; ++c)
    if (gamma[static_cast<std::size_t>(c)] == 0) gamma[static_cast<std::size_t>(c)] = gamma[static_cast<std::size_t>(c - 1)] + 1;
}

struct VertexKey {
  int level, in, out, in_marked, out_marked;
  std::vector<int> in_shape, out_shape;  // sorted per-color multiplicities
  auto operator<=>(const VertexKey&) const = default;
};

inline std::vector<int> color_shape(const ColoredIntervalGraph& cg, const std::vector<std::uint32_t>& es) {
  std::map<int, int> counts;
  for (auto e : es) ++counts[cg.color[e]];
  std::vector<int> out;
  for (const auto& [c, k] : counts) out.push_back(k);
  std::sort(out.begin(), out.end());
  return out;
}

inline VertexKey vertex_key(const ColoredIntervalGraph& cg, std::uint32_t u, IsoMode mode) {
  const auto& g = cg.graph;
  VertexKey k{g.level[u], static_cast<int>(g.in_edges[u].size()), static_cast<int>(g.out_edges[u].size()), 0, 0, {}, {}};
  if (mode == IsoMode::Relative) {
    for (auto e : g.in_edges[u]) k.in_marked += cg.marked[e];
    for (auto e : g.out_edges[u]) k.out_marked += cg.marked[e];
  }
  if (mode == IsoMode::Filtered) {
    k.in_shape = color_shape(cg, g.in_edges[u]);
    k.out_shape = color_shape(cg, g.out_edges[u]);
  }
  return k;
}

class IsoSearch {
 public:
  IsoSearch(const ColoredIntervalGraph& a, const ColoredIntervalGraph& b, IsoMode mode, std::size_t budget)
      : a_(a), b_(b), mode_(mode), budget_(budget) {}

  IsoResult run() {
    IsoResult res;
    const auto& ga = a_.graph;
    const auto& gb = b_.graph;
    if (ga.size() != gb.size() || ga.edges.size() != gb.edges.size() || ga.level_profile() != gb.level_profile()) return res;
    const std::size_t n = ga.size();
    std::map<VertexKey, int> classes;
    key_a_.resize(n);
    key_b_.resize(n);
    for (std::uint32_t u = 0; u < n; ++u) {
      key_a_[u] = classes.try_emplace(vertex_key(a_, u, mode_), static_cast<int>(classes.size())).first->second;
    }
    std::vector<int> count(classes.size(), 0);
    for (std::uint32_t u = 0; u < n; ++u) ++count[static_cast<std::size_t>(key_a_[u])];
    for (std::uint32_t v = 0; v < n; ++v) {
      auto it = classes.find(vertex_key(b_, v, mode_));
      if (it == classes.end()) return res;
      key_b_[v] = it->second;
      if (--count[static_cast<std::size_t>(it->second)] < 0) return res;
    }
    candidates_.assign(classes.size(), {});
    for (std::uint32_t v = 0; v < n; ++v) candidates_[static_cast<std::size_t>(key_b_[v])].push_back(v);
    phi_.assign(n, -1);
    used_.assign(n, 0);
    gamma_.assign(static_cast<std::size_t>(a_.colors + 1), 0);
    gamma_inv_.assign(static_cast<std::size_t>(b_.colors + 1), 0);
    const bool ok = extend(0);
    res.nodes = nodes_;
    if (exhausted_) {
      res.outcome = IsoOutcome::Indeterminate;
      return res;
    }
    if (!ok) return res;
    res.outcome = IsoOutcome::Found;
    for (int p : phi_) res.phi.push_back(static_cast<std::uint32_t>(p));
    if (mode_ == IsoMode::Filtered) {
      res.gamma = gamma_;
      complete_gamma(res.gamma, a_.colors);
    }
    return res;
  }

 private:
  bool edge_compatible(int ea, int eb, std::vector<int>& assigned) {
    if ((ea < 0) != (eb < 0)) return false;
    if (ea < 0) return true;
    if (mode_ == IsoMode::Relative) return a_.marked[static_cast<std::size_t>(ea)] == b_.marked[static_cast<std::size_t>(eb)];
    if (mode_ != IsoMode::Filtered) return true;
    const int c1 = a_.color[static_cast<std::size_t>(ea)], c2 = b_.color[static_cast<std::size_t>(eb)];
    int& fwd = gamma_[static_cast<std::size_t>(c1)];
    int& back = gamma_inv_[static_cast<std::size_t>(c2)];
    if (fwd != 0 || back != 0) return fwd == c2 && back == c1;
    fwd = c2;
    back = c1;
    assigned.push_back(c1);
    return gamma_extendable(gamma_, a_.colors, b_.colors);
  }

  void undo(const std::vector<int>& assigned) {
    for (int c1 : assigned) {
      int& fwd = gamma_[static_cast<std::size_t>(c1)];
      gamma_inv_[static_cast<std::size_t>(fwd)] = 0;
      fwd = 0;
    }
  }

  bool extend(std::uint32_t u) {
    const auto& ga = a_.graph;
    if (u == ga.size()) return true;
    for (std::uint32_t v : candidates_[static_cast<std::size_t>(key_a_[u])]) {
      if (used_[v]) continue;
      if (++nodes_ > budget_) {
        exhausted_ = true;
        return false;
      }
      std::vector<int> assigned;
      bool ok = true;
      for (std::uint32_t w = 0; w < u && ok; ++w) {
        const auto pw = static_cast<std::uint32_t>(phi_[w]);
        ok = edge_compatible(ga.edge_between(w, u), b_.graph.edge_between(pw, v), assigned) &&
             edge_compatible(ga.edge_between(u, w), b_.graph.edge_between(v, pw), assigned);
      }
      if (ok) {
        phi_[u] = static_cast<int>(v);
        used_[v] = 1;
        if (extend(u + 1)) return true;
        used_[v] = 0;
        phi_[u] = -1;
      }
      undo(assigned);
      if (exhausted_) return false;
    }
    return false;
  }

  const ColoredIntervalGraph& a_;
  const ColoredIntervalGraph& b_;
  IsoMode mode_;
  std::size_t budget_;
  std::size_t nodes_ = 0;
  bool exhausted_ = false;
  std::vector<int> key_a_, key_b_;
  std::vector<std::vector<std::uint32_t>> candidates_;
  std::vector<int> phi_;
  std::vector<char> used_;
  std::vector<int> gamma_, gamma_inv_;
};

}  // namespace detail

/// Independent re-check of a witness: bijection, edges both ways, and the mode's edge condition.
inline bool validate_isomorphism(const ColoredIntervalGraph& a, const ColoredIntervalGraph& b, IsoMode mode,
                                 const std::vector<std::uint32_t>& phi, const std::vector<int>& gamma = {}) {
  const auto& ga = a.graph;
  const auto& gb = b.graph;
  if (phi.size() != ga.size() || ga.size() != gb.size() || ga.edges.size() != gb.edges.size()) return false;
  std::vector<char> hit(gb.size(), 0);
  for (auto v : phi) {
    if (v >= gb.size() || hit[v]) return false;
    hit[v] = 1;
  }
  if (mode == IsoMode::Filtered) {
    if (gamma.size() != static_cast<std::size_t>(a.colors + 1)) return false;
    for (int c = 1; c <= a.colors; ++c) {
      const int d = gamma[static_cast<std::size_t>(c)];
      if (d < 1 || d > b.colors || (c > 1 && d <= gamma[static_cast<std::size_t>(c - 1)])) return false;
    }
  }
  for (std::size_t e = 0; e < ga.edges.size(); ++e) {
    const auto& edge = ga.edges[e];
    const int f = gb.edge_between(phi[edge.from], phi[edge.to]);
    if (f < 0) return false;
    // phi(t z) = t' phi(z) with t' the label of the image edge
    const auto& image = gb.edges[static_cast<std::size_t>(f)];
    if (gb.sys->mul(image.label, gb.vertices[image.from]) != gb.vertices[image.to]) return false;
    if (mode == IsoMode::Relative && a.marked[e] != b.marked[static_cast<std::size_t>(f)]) return false;
    if (mode == IsoMode::Filtered && gamma[static_cast<std::size_t>(a.color[e])] != b.color[static_cast<std::size_t>(f)])
      return false;
  }
  return true;
}

/// Backtracking search, level by level, pruned by per-vertex invariants. Returned witnesses are
/// re-validated; a failed validation is an internal error.
inline IsoResult find_isomorphism(const ColoredIntervalGraph& a, const ColoredIntervalGraph& b, IsoMode mode,
                                  std::size_t budget = kDefaultBudget) {
  IsoResult res = detail::IsoSearch(a, b, mode, budget).run();
  if (res.outcome == IsoOutcome::Found && !validate_isomorphism(a, b, mode, res.phi, res.gamma))
    throw ConsistencyError("isomorphism search returned an invalid witness");
  return res;
}

/// When ^Jx = ^Jy, k -> k . ^Jx maps G[x_J, y_J] onto G[x, y].
/// Returns the explicit vertex map, or nullopt when the cosets differ.
inline std::optional<std::vector<std::uint32_t>> coset_witness(const IntervalGraph& small, const IntervalGraph& big,
                                                               GeneratorSet J) {
  const CoxeterSystem& sys = *big.sys;
  const Parabolic& par = sys.parabolic(J);
  if (par.rep[big.sigma.id] != par.rep[big.omega.id]) return std::nullopt;
  const Element rep = par.rep[big.sigma.id];
  std::map<Element, std::uint32_t> where;
  for (std::uint32_t v = 0; v < big.size(); ++v) where[big.vertices[v]] = v;
  std::vector<std::uint32_t> phi;
  for (Element k : small.vertices) {
    auto it = where.find(sys.mul(k, rep));
    if (it == where.end()) return std::nullopt;
    phi.push_back(it->second);
  }
  return phi;
}

struct InvarianceReport {
  IsoOutcome outcome = IsoOutcome::NotFound;
  bool hypothesis_met = false;
  Laurent lhs;
  Laurent rhs;
  bool equal = false;
  [[nodiscard]] bool counterexample() const { return hypothesis_met && !equal; }
};

/// Relative invariance: a J-marking preserving isomorphism should force equal R_{.,.,J}.
inline InvarianceReport check_relative_invariance(const KLContext& c1, Element x1, Element y1, GeneratorSet J1,
                                                    const KLContext& c2, Element x2, Element y2, GeneratorSet J2,
                                                    std::size_t budget = kDefaultBudget) {
  const auto& s1 = c1.system();
  const auto& s2 = c2.system();
  const auto g1 = color_edges(build_interval_graph(s1, x1, y1), Filtration::trivial(s1.rank()), J1);
  const auto g2 = color_edges(build_interval_graph(s2, x2, y2), Filtration::trivial(s2.rank()), J2);
  InvarianceReport rep;
  rep.outcome = find_isomorphism(g1, g2, IsoMode::Relative, budget).outcome;
  rep.hypothesis_met = rep.outcome == IsoOutcome::Found;
  if (rep.hypothesis_met) {
    rep.lhs = c1.jrel(x1, y1, J1);
    rep.rhs = c2.jrel(x2, y2, J2);
    rep.equal = rep.lhs == rep.rhs;
  }
  return rep;
}

/// Filtered invariance: an isomorphism with an increasing color map should force equal P.
inline InvarianceReport check_filtered_invariance(const KLContext& c1, Element x1, Element y1, const Filtration& f1,
                                                       const KLContext& c2, Element x2, Element y2, const Filtration& f2,
                                                       std::size_t budget = kDefaultBudget) {
  const auto g1 = color_edges(build_interval_graph(c1.system(), x1, y1), f1);
  const auto g2 = color_edges(build_interval_graph(c2.system(), x2, y2), f2);
  InvarianceReport rep;
  rep.outcome = find_isomorphism(g1, g2, IsoMode::Filtered, budget).outcome;
  rep.hypothesis_met = rep.outcome == IsoOutcome::Found;
  if (rep.hypothesis_met) {
    rep.lhs = c1.p(x1, y1);
    rep.rhs = c2.p(x2, y2);
    rep.equal = rep.lhs == rep.rhs;
  }
  return rep;
}

/// Runs f(i) for i in [0, count) on up to `threads` workers.
template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& f) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex mu;
  for (unsigned w = 0; w < std::min<std::size_t>(threads, count); ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

inline unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

struct SurveyOptions {
  int n = 4;                 // S_n, paired with S_{n-1} when include_smaller
  std::size_t samples = 0;   // 0: every interval of S_n; otherwise a seeded sample
  std::uint64_t seed = 1;
  std::size_t max_vertices = 40;
  std::size_t budget = kDefaultBudget;
  unsigned threads = 1;
  bool include_smaller = true;
};

struct SurveyReport {
  std::string conjecture;
  std::size_t intervals = 0;
  std::size_t pairs_tested = 0;
  std::size_t hypothesis_met = 0;
  std::size_t equal = 0;
  std::size_t indeterminate = 0;
  std::vector<std::string> counterexamples;
};

inline nlohmann::ordered_json to_json(const SurveyReport& r) {
  return {{"conjecture", r.conjecture},       {"intervals", r.intervals}, {"pairs_tested", r.pairs_tested},
          {"hypothesis_met", r.hypothesis_met}, {"equal", r.equal},       {"indeterminate", r.indeterminate},
          {"counterexamples", r.counterexamples}};
}

struct SurveyResult {
  SurveyReport relative;  // relative invariance, marking J = {s_1..s_{n-2}}
  SurveyReport filtered;  // filtered invariance, full flag
};

/// Groups intervals of S_{n-1} and S_n by graph invariants and runs both checkers on every pair
/// inside a group. Type A only.
inline SurveyResult invariance_survey(const SurveyOptions& opt) {
  if (opt.n < 2 || opt.n > 6) throw ConfigError("survey degree must be in [2, 6]");
  struct Pool {
    std::unique_ptr<CoxeterSystem> sys;
    std::unique_ptr<KLContext> ctx;
  };
  std::vector<Pool> pools;
  if (opt.include_smaller && opt.n >= 3) pools.push_back({std::make_unique<CoxeterSystem>(CoxeterSystem::symmetric(opt.n - 1)), nullptr});
  pools.push_back({std::make_unique<CoxeterSystem>(CoxeterSystem::symmetric(opt.n)), nullptr});
  for (auto& p : pools) p.ctx = std::make_unique<KLContext>(*p.sys);

  struct Item {
    std::size_t pool;
    ColoredIntervalGraph graph;
    std::vector<int> signature;
  };
  std::vector<Item> items;
  std::mt19937_64 rng(opt.seed);
  for (std::size_t pi = 0; pi < pools.size(); ++pi) {
    const auto& sys = *pools[pi].sys;
    std::vector<std::pair<Element, Element>> all;
    for (std::size_t j = 0; j < sys.size(); ++j) {
      const Bitset& below = sys.below(sys.element(j));
      for (auto i = below.find_first(); i != Bitset::npos; i = below.find_next(i))
        if ((sys.above(sys.element(i)) & below).count() <= opt.max_vertices) all.emplace_back(sys.element(i), sys.element(j));
    }
    const bool sample = opt.samples > 0 && pi + 1 == pools.size() && opt.samples < all.size();
    if (sample) {
      std::shuffle(all.begin(), all.end(), rng);
      all.resize(opt.samples);
      std::sort(all.begin(), all.end());
    }
    const auto flag = Filtration::standard_flag(sys.rank());
    for (const auto& [x, y] : all) {
      auto cg = color_edges(build_interval_graph(sys, x, y), flag, default_relative_J(sys));
      std::vector<int> sig = cg.graph.level_profile();
      sig.push_back(-1);
      sig.push_back(static_cast<int>(cg.graph.edges.size()));
      std::vector<int> degs;
      for (std::size_t u = 0; u < cg.graph.size(); ++u)
        degs.push_back(cg.graph.level[u] * 10000 + static_cast<int>(cg.graph.in_edges[u].size()) * 100 +
                       static_cast<int>(cg.graph.out_edges[u].size()));
      std::sort(degs.begin(), degs.end());
      sig.insert(sig.end(), degs.begin(), degs.end());
      items.push_back({pi, std::move(cg), std::move(sig)});
    }
  }

  std::map<std::vector<int>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < items.size(); ++i) groups[items[i].signature].push_back(i);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& [sig, members] : groups)
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b) pairs.emplace_back(members[a], members[b]);

  // warm the shared tables before going parallel
  for (auto& p : pools) {
    (void)p.ctx->p_check_table();
    (void)p.ctx->jrel_check_table(default_relative_J(*p.sys));
  }

  struct Outcome {
    InvarianceReport rel, fil;
  };
  std::vector<Outcome> outcomes(pairs.size());
  parallel_for(pairs.size(), opt.threads, [&](std::size_t k) {
    const Item& a = items[pairs[k].first];
    const Item& b = items[pairs[k].second];
    const KLContext& ca = *pools[a.pool].ctx;
    const KLContext& cb = *pools[b.pool].ctx;
    const auto& ga = a.graph.graph;
    const auto& gb = b.graph.graph;
    Outcome& o = outcomes[k];
    o.rel.outcome = find_isomorphism(a.graph, b.graph, IsoMode::Relative, opt.budget).outcome;
    o.rel.hypothesis_met = o.rel.outcome == IsoOutcome::Found;
    if (o.rel.hypothesis_met) {
      o.rel.lhs = ca.jrel(ga.sigma, ga.omega, a.graph.marking);
      o.rel.rhs = cb.jrel(gb.sigma, gb.omega, b.graph.marking);
      o.rel.equal = o.rel.lhs == o.rel.rhs;
    }
    o.fil.outcome = find_isomorphism(a.graph, b.graph, IsoMode::Filtered, opt.budget).outcome;
    o.fil.hypothesis_met = o.fil.outcome == IsoOutcome::Found;
    if (o.fil.hypothesis_met) {
      o.fil.lhs = ca.p(ga.sigma, ga.omega);
      o.fil.rhs = cb.p(gb.sigma, gb.omega);
      o.fil.equal = o.fil.lhs == o.fil.rhs;
    }
  });

  SurveyResult out;
  out.relative.conjecture = "relative";
  out.filtered.conjecture = "filtered";
  out.relative.intervals = out.filtered.intervals = items.size();
  const auto describe = [&](std::size_t i) {
    const auto& g = items[i].graph.graph;
    return "S" + std::to_string(g.sys->degree()) + "[" + format_element(*g.sys, g.sigma) + "," +
           format_element(*g.sys, g.omega) + "]";
  };
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto tally = [&](SurveyReport& r, const InvarianceReport& c) {
      ++r.pairs_tested;
      if (c.outcome == IsoOutcome::Indeterminate) ++r.indeterminate;
      if (c.hypothesis_met) ++r.hypothesis_met;
      if (c.hypothesis_met && c.equal) ++r.equal;
      if (c.counterexample())
        r.counterexamples.push_back(describe(pairs[k].first) + " vs " + describe(pairs[k].second) + ": " +
                                    to_q_string(c.lhs) + " != " + to_q_string(c.rhs));
    };
    tally(out.relative, outcomes[k].rel);
    tally(out.filtered, outcomes[k].fil);
  }
  return out;
}

}  // namespace klp
