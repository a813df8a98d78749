#pragma once

// Command-line front end. run_cli is kept separate from main so the tests can drive it in-process.

#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "klp/invariance.hpp"
#include "klp/verify.hpp"

namespace klp::cli {

using Json = nlohmann::ordered_json;

struct RunConfig {
  std::string family = "A";
  int rank = 0;
  std::string sigma, omega, j = "";
  std::string format = "text";
  std::uint64_t seed = 1;
  std::size_t budget = 0;
  unsigned threads = 0;
  std::size_t samples = 0;
  std::size_t max_vertices = 40;
  std::string suite = "all";
  std::string filtration = "flag";
  int max_rank = 0;
  bool table = false;
  bool list = false;
  bool dot = false;
};

/// Verification failed (exit 1), as opposed to a usage error (exit 2).
struct VerificationFailure : Error {
  using Error::Error;
};

class Output {
 public:
  explicit Output(std::string format) : format_(std::move(format)) {}

  [[nodiscard]] bool json() const { return format_ == "json"; }
  [[nodiscard]] Json poly(const Laurent& p, bool q_form) const {
    if (json()) return to_json(p, q_form);
    return q_form ? to_q_string(p) : to_string(p);
  }

  void emit(std::ostream& out, const Json& doc) const {
    if (format_ == "json") {
      out << doc.dump(2) << "\n";
    } else if (format_ == "csv") {
      emit_csv(out, doc);
    } else {
      emit_text(out, doc, 0);
    }
  }

  /// Rows of a table; CSV writes them with a header, the other formats nest them under `key`.
  void emit_table(std::ostream& out, const std::vector<std::string>& columns, const std::vector<std::vector<std::string>>& rows,
                  Json doc, const std::string& key) const {
    if (format_ == "csv") {
      write_row(out, columns);
      for (const auto& r : rows) write_row(out, r);
      return;
    }
    Json arr = Json::array();
    for (const auto& r : rows) {
      Json o;
      for (std::size_t c = 0; c < columns.size(); ++c) o[columns[c]] = r[c];
      arr.push_back(std::move(o));
    }
    doc[key] = std::move(arr);
    emit(out, doc);
  }

 private:
  static std::string scalar(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "none";
    return v.dump();
  }

  static std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
  }

  static void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << csv_field(fields[i]);
    out << "\n";
  }

  static void emit_csv(std::ostream& out, const Json& doc) {
    std::vector<std::string> keys, values;
    for (const auto& [k, v] : doc.items()) {
      if (v.is_structured()) continue;
      keys.push_back(k);
      values.push_back(scalar(v));
    }
    write_row(out, keys);
    write_row(out, values);
  }

  static void emit_text(std::ostream& out, const Json& doc, int indent) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    for (const auto& [k, v] : doc.items()) {
      if (v.is_object()) {
        out << pad << k << ":\n";
        emit_text(out, v, indent + 2);
      } else if (v.is_array() && !v.empty() && v.front().is_object()) {
        out << pad << k << ":\n";
        for (const auto& row : v) {
          out << pad << "  -";
          for (const auto& [rk, rv] : row.items()) out << " " << rk << "=" << scalar(rv);
          out << "\n";
        }
      } else if (v.is_array()) {
        out << pad << k << " = [";
        for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << scalar(v[i]);
        out << "]\n";
      } else {
        out << pad << k << " = " << scalar(v) << "\n";
      }
    }
  }

  std::string format_;
};

/// For type A the rank flag is the degree n of S_n; otherwise it is the Coxeter rank (m for I2).
inline CoxeterSystem make_system(const RunConfig& cfg) {
  const Family fam = parse_family(cfg.family);
  if (cfg.rank <= 0) throw ConfigError("--rank must be positive");
  if (fam == Family::A) {
    if (cfg.rank < 2) throw ConfigError("type A needs --rank n >= 2 (S_n)");
    return CoxeterSystem::symmetric(cfg.rank);
  }
  return CoxeterSystem::build(fam, cfg.rank);
}

/// "flag" (J_k = first k generators), "trivial" ({} < S), or the intermediate sets separated by ';', e.g. "1;1,3".
inline Filtration parse_filtration(const CoxeterSystem& sys, const std::string& raw) {
  if (raw == "flag") return Filtration::standard_flag(sys.rank());
  if (raw == "trivial") return Filtration::trivial(sys.rank());
  Filtration f{{GeneratorSet{}}};
  std::size_t start = 0;
  while (start <= raw.size()) {
    const std::size_t end = std::min(raw.find(';', start), raw.size());
    f.chain.push_back(parse_generator_set(sys, raw.substr(start, end - start)));
    start = end + 1;
  }
  if (f.chain.back() != sys.all_generators()) f.chain.push_back(sys.all_generators());
  f.validate(sys.rank());
  return f;
}

inline Element require_element(const CoxeterSystem& sys, const std::string& raw, const char* flag) {
  if (raw.empty()) throw ConfigError(std::string("missing ") + flag);
  return parse_element(sys, raw);
}

inline void require_leq(const CoxeterSystem& sys, Element x, Element y) {
  if (!sys.bruhat_leq(x, y))
    throw PreconditionError("sigma=" + format_element(sys, x) + " is not below omega=" + format_element(sys, y) +
                            " in Bruhat order");
}

inline Json header(const CoxeterSystem& sys) {
  return Json{{"family", family_name(sys.family())}, {"rank", sys.rank()}, {"system", sys.name()}};
}

inline int cmd_group(const RunConfig& cfg, std::ostream& out) {
  const auto sys = make_system(cfg);
  const Output o(cfg.format);
  Json doc = header(sys);
  doc["order"] = sys.size();
  doc["longest"] = format_element(sys, sys.longest());
  doc["longest_length"] = sys.length(sys.longest());
  doc["reflections"] = sys.reflections().size();
  Json gens = Json::array();
  for (int g = 0; g < sys.rank(); ++g) gens.push_back(format_element(sys, sys.generator(g)));
  doc["generators"] = gens;
  if (!cfg.list) {
    o.emit(out, doc);
    return 0;
  }
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < sys.size(); ++i)
    rows.push_back({std::to_string(i), format_element(sys, sys.element(i)), std::to_string(sys.length(sys.element(i)))});
  o.emit_table(out, {"id", "element", "length"}, rows, doc, "elements");
  return 0;
}

/// `kl`, `r` and `jrel-r` share the single-pair / table structure.
template <class Row>
int pair_or_table(const RunConfig& cfg, const CoxeterSystem& sys, std::ostream& out, Json doc, bool only_intervals, Row row) {
  const Output o(cfg.format);
  if (!cfg.table) {
    const Element x = require_element(sys, cfg.sigma, "--sigma");
    const Element y = require_element(sys, cfg.omega, "--omega");
    doc["sigma"] = format_element(sys, x);
    doc["omega"] = format_element(sys, y);
    row(x, y, o, doc);
    o.emit(out, doc);
    return 0;
  }
  std::vector<std::vector<std::string>> rows;
  const Output text("text");
  for (std::size_t j = 0; j < sys.size(); ++j)
    for (std::size_t i = 0; i < sys.size(); ++i) {
      const Element x = sys.element(i), y = sys.element(j);
      if (only_intervals && !sys.bruhat_leq(x, y)) continue;
      Json cell;
      row(x, y, text, cell);
      rows.push_back({format_element(sys, x), format_element(sys, y), cell.begin().value().get<std::string>()});
    }
  o.emit_table(out, {"sigma", "omega", "poly_q"}, rows, doc, "table");
  return 0;
}

inline int cmd_kl(const RunConfig& cfg, std::ostream& out) {
  const auto sys = make_system(cfg);
  KLContext ctx(sys);
  return pair_or_table(cfg, sys, out, header(sys), true, [&](Element x, Element y, const Output& o, Json& d) {
    d["P"] = o.poly(ctx.p(x, y), true);
    if (cfg.table) return;
    d["P_check"] = o.poly(ctx.p_check(x, y), false);
    d["P_derived"] = sys.bruhat_leq(x, y) ? o.poly(p_derived(ctx, x, y).normalized, true) : Json(nullptr);
  });
}

inline int cmd_r(const RunConfig& cfg, std::ostream& out) {
  const auto sys = make_system(cfg);
  KLContext ctx(sys);
  return pair_or_table(cfg, sys, out, header(sys), true, [&](Element x, Element y, const Output& o, Json& d) {
    d["R"] = o.poly(ctx.r(x, y), true);
    if (!cfg.table) d["R_check"] = o.poly(ctx.r_check(x, y), false);
  });
}

inline int cmd_jrel(const RunConfig& cfg, std::ostream& out) {
  const auto sys = make_system(cfg);
  KLContext ctx(sys);
  const GeneratorSet J = parse_generator_set(sys, cfg.j);
  Json doc = header(sys);
  doc["J"] = format_generator_set(J);
  return pair_or_table(cfg, sys, out, doc, false, [&](Element x, Element y, const Output& o, Json& d) {
    const Laurent& table = ctx.jrel_check(x, y, J);
    d["R_J"] = o.poly(ctx.jrel(x, y, J), true);
    if (cfg.table) return;
    d["R_J_check"] = o.poly(table, false);
    const Laurent chains = jrel_check_via_chains(ctx, x, y, J);
    if (chains != table) throw ConsistencyError("J-relative R: product route and chain route disagree");
    std::string routes = "Hecke product and convex-tuple chain sum agree";
    if (sys.family() == Family::A && J == GeneratorSet::all(sys.rank() - 1)) {
      (void)hypercube_r(Hypercube(sys, x), y, &ctx);
      routes += "; hypercube formula agrees";
    }
    d["routes"] = routes;
  });
}

inline int cmd_decompose(const RunConfig& cfg, std::ostream& out) {
  const auto sys = make_system(cfg);
  KLContext ctx(sys);
  const Output o(cfg.format);
  const GeneratorSet J = parse_generator_set(sys, cfg.j);
  const Element x = require_element(sys, cfg.sigma, "--sigma");
  const Element y = require_element(sys, cfg.omega, "--omega");
  require_leq(sys, x, y);
  const auto pd = parabolic_decomposition(ctx, x, y, J);
  Json doc = header(sys);
  doc["sigma"] = format_element(sys, x);
  doc["omega"] = format_element(sys, y);
  doc["J"] = format_generator_set(J);
  doc["P"] = o.poly(ctx.p(x, y), true);
  doc["P_derived"] = o.poly(pd.p_derived, true);
  doc["I_J"] = o.poly(pd.i_j, true);
  doc["Q_J"] = o.poly(pd.q_j, true);
  Json gamma = Json::array();
  for (const auto& [kappa, g] : pd.gamma_prime) gamma.push_back(Json{{"kappa", format_element(sys, kappa)}, {"poly", o.poly(g, true)}});
  doc["gamma_prime"] = gamma;
  doc["routes"] = Json{{"I_pairing", o.poly(pd.i_pairing, true)},
                       {"I_gamma", o.poly(pd.i_gamma, true)},
                       {"Q_pairing", o.poly(pd.q_pairing, true)},
                       {"Q_relative_r", o.poly(pd.q_relative_r, true)},
                       {"agree", true}};
  o.emit(out, doc);
  return 0;
}

inline Json index_sets(const std::vector<IndexSet>& sets) {
  Json arr = Json::array();
  for (const auto& s : sets) arr.push_back(s);
  return arr;
}

inline int cmd_hypercube(const RunConfig& cfg, std::ostream& out) {
  const auto sys = make_system(cfg);
  require_type_a(sys, "hypercube");
  KLContext ctx(sys);
  const Output o(cfg.format);
  const Element x = require_element(sys, cfg.sigma, "--sigma");
  const Element y = require_element(sys, cfg.omega, "--omega");
  const Hypercube hc(sys, x);
  const auto hr = hypercube_r(hc, y, &ctx);
  if (join_formula_r(hc, y) != hr.r) throw ConsistencyError("join-based sets disagree with the hypercube formula");
  Json doc = header(sys);
  doc["sigma"] = format_element(sys, x);
  doc["omega"] = format_element(sys, y);
  doc["J"] = format_generator_set(hc.J());
  doc["D"] = hc.D();
  doc["admissible_A"] = hr.admissible ? Json(*hr.admissible) : Json(nullptr);
  doc["R_J"] = o.poly(hr.r, true);
  doc["R_J_check"] = o.poly(hr.r_check, false);
  doc["contributing_B"] = index_sets(hr.contributing_B);
  doc["Q_J"] = sys.bruhat_leq(x, y) ? o.poly(hypercube_Q(ctx, hc, y), true) : Json(nullptr);
  o.emit(out, doc);
  return 0;
}

/// Smallest rank flag accepted for the family (S_2, B_1, D_2, I2(2)).
inline int min_rank(Family fam) { return fam == Family::A || fam == Family::D || fam == Family::I2 ? 2 : 1; }

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  std::vector<std::string> suites;
  if (cfg.suite == "all") {
    suites = suite_names();
  } else {
    if (std::find(suite_names().begin(), suite_names().end(), cfg.suite) == suite_names().end())
      throw ConfigError("unknown suite '" + cfg.suite + "'");
    suites = {cfg.suite};
  }
  // --max-rank runs every system of the family up to that rank flag
  std::vector<int> ranks;
  if (cfg.max_rank > 0) {
    for (int r = min_rank(parse_family(cfg.family)); r <= cfg.max_rank; ++r) ranks.push_back(r);
  } else {
    ranks.push_back(cfg.rank);
  }
  const Output o(cfg.format);
  const VerifyOptions vo{cfg.samples, cfg.seed};
  Json doc{{"family", family_name(parse_family(cfg.family))}};
  Json arr = Json::array();
  std::vector<std::vector<std::string>> rows;
  bool ok = true;
  for (int rank : ranks) {
    RunConfig one = cfg;
    one.rank = rank;
    const auto sys = make_system(one);
    KLContext ctx(sys);
    (void)ctx.p_check_table();
    std::vector<SuiteResult> results(suites.size());
    parallel_for(suites.size(), cfg.threads ? cfg.threads : default_threads(),
                 [&](std::size_t i) { results[i] = run_suite(suites[i], ctx, vo); });
    for (const auto& r : results) {
      ok = ok && r.ok();
      Json s{{"system", sys.name()}, {"suite", r.name}, {"passed", r.passed}, {"failed", r.failed}};
      if (!r.note.empty()) s["note"] = r.note;
      if (!r.failures.empty()) s["first_failures"] = r.failures;
      arr.push_back(std::move(s));
      rows.push_back({sys.name(), r.name, std::to_string(r.passed), std::to_string(r.failed)});
    }
  }
  doc["suites"] = arr;
  doc["status"] = ok ? "pass" : "fail";
  if (cfg.format == "csv") {
    o.emit_table(out, {"system", "suite", "passed", "failed"}, rows, doc, "suites");
  } else {
    o.emit(out, doc);
  }
  return ok ? 0 : 1;
}

inline int cmd_invariance(const RunConfig& cfg, std::ostream& out) {
  const auto sys = make_system(cfg);
  require_type_a(sys, "invariance survey");
  if (cfg.dot) {
    const Element x = require_element(sys, cfg.sigma, "--sigma");
    const Element y = require_element(sys, cfg.omega, "--omega");
    require_leq(sys, x, y);
    out << to_dot(color_edges(build_interval_graph(sys, x, y), parse_filtration(sys, cfg.filtration)));
    return 0;
  }
  SurveyOptions opt;
  opt.n = sys.degree();
  opt.samples = cfg.samples;
  opt.seed = cfg.seed;
  opt.max_vertices = cfg.max_vertices;
  opt.budget = cfg.budget ? cfg.budget : default_budget();
  opt.threads = cfg.threads ? cfg.threads : default_threads();
  const auto res = invariance_survey(opt);
  const Output o(cfg.format);
  Json doc = header(sys);
  doc["seed"] = cfg.seed;
  doc["samples"] = cfg.samples;
  doc["relative"] = to_json(res.relative);
  doc["filtered"] = to_json(res.filtered);
  if (cfg.format == "csv") {
    std::vector<std::vector<std::string>> rows;
    for (const auto* r : {&res.relative, &res.filtered})
      rows.push_back({r->conjecture, std::to_string(r->pairs_tested), std::to_string(r->hypothesis_met),
                      std::to_string(r->equal), std::to_string(r->indeterminate), std::to_string(r->counterexamples.size())});
    o.emit_table(out, {"conjecture", "pairs_tested", "hypothesis_met", "equal", "indeterminate", "counterexamples"}, rows,
                 doc, "surveys");
  } else {
    o.emit(out, doc);
  }
  return res.relative.counterexamples.empty() && res.filtered.counterexamples.empty() ? 0 : 1;
}

inline const char* kCsvHelp =
    "CSV output: tables from `kl --table`, `r --table` and `jrel-r --table` have columns sigma,omega,poly_q "
    "(q-form polynomial); `group --list` has id,element,length; `verify` has system,suite,passed,failed; "
    "`invariance` has conjecture,pairs_tested,hypothesis_met,equal,indeterminate,counterexamples. "
    "Elsewhere CSV is a single header row and a single value row of the scalar fields.\n"
    "Polynomials named P, R, R_J, P_derived, I_J, Q_J, gamma are normalized and printed in q; names ending in "
    "_check are unnormalized and printed in v.\n"
    "Exit codes: 0 success, 1 verification failure, 2 usage error. KLP_BUDGET overrides the isomorphism search budget.";

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kazhdan-Lusztig, R- and J-relative R-polynomials with parabolic decompositions", "klp"};
  app.footer(kCsvHelp);
  app.require_subcommand(1);
  RunConfig cfg;

  const auto add_system = [&](CLI::App* sub, bool rank_required = true) {
    sub->add_option("--family", cfg.family, "A, B, D or I2")->capture_default_str();
    auto* rank = sub->add_option("--rank", cfg.rank, "n of S_n for type A; Coxeter rank for B and D; m for I2");
    if (rank_required) rank->required();
    sub->add_option("--format", cfg.format, "text, json or csv")
        ->check(CLI::IsMember({"text", "json", "csv"}))
        ->capture_default_str();
  };
  const auto add_pair = [&](CLI::App* sub) {
    sub->add_option("--sigma", cfg.sigma, "element: one-line, signed list, r^k[ f], e, or word:i,j,...");
    sub->add_option("--omega", cfg.omega, "element");
  };

  auto* group = app.add_subcommand("group", "orders, longest element, reflections");
  add_system(group);
  group->add_flag("--list", cfg.list, "list every element with its length");

  auto* kl = app.add_subcommand("kl", "KL polynomial P, its unnormalized form and P_derived");
  add_system(kl);
  add_pair(kl);
  kl->add_flag("--table", cfg.table, "export all pairs sigma <= omega");

  auto* r = app.add_subcommand("r", "R-polynomials");
  add_system(r);
  add_pair(r);
  r->add_flag("--table", cfg.table, "export all pairs sigma <= omega");

  auto* jrel = app.add_subcommand("jrel-r", "J-relative R-polynomials, cross-checked between routes");
  add_system(jrel);
  add_pair(jrel);
  jrel->add_option("--j", cfg.j, "generator subset, 1-based, e.g. 1,2 (empty for none, 'all' for S)");
  jrel->add_flag("--table", cfg.table, "export all pairs");

  auto* dec = app.add_subcommand("decompose", "I^J, Q^J and gamma' by three routes");
  add_system(dec);
  add_pair(dec);
  dec->add_option("--j", cfg.j, "generator subset, 1-based");

  auto* hyp = app.add_subcommand("hypercube", "S_n hypercube data for J = {s_1..s_{n-2}} (type A only)");
  add_system(hyp);
  add_pair(hyp);

  auto* ver = app.add_subcommand("verify", "run invariant suites and print pass/fail counts");
  add_system(ver, false);
  auto* max_rank = ver->add_option("--max-rank", cfg.max_rank, "run every system of the family up to this rank");
  ver->get_option("--rank")->excludes(max_rank);
  ver->add_option("--suite", cfg.suite, "kl, iq, parabolic, hypercube, factorization or all")->capture_default_str();
  ver->add_option("--samples", cfg.samples, "sample this many cases per suite (0: exhaustive)")->capture_default_str();
  ver->add_option("--seed", cfg.seed, "sampling seed")->capture_default_str();
  ver->add_option("--threads", cfg.threads, "worker threads (0: all cores)");

  auto* inv = app.add_subcommand("invariance", "relative and filtered invariance survey over S_{n-1} and S_n");
  add_system(inv);
  add_pair(inv);
  inv->add_option("--samples", cfg.samples, "sample this many intervals of S_n (0: all)")->capture_default_str();
  inv->add_option("--seed", cfg.seed, "sampling seed")->capture_default_str();
  inv->add_option("--budget", cfg.budget, "search node budget per pair (default 1000000 or KLP_BUDGET)");
  inv->add_option("--threads", cfg.threads, "worker threads (0: all cores)");
  inv->add_option("--max-vertices", cfg.max_vertices, "skip intervals larger than this")->capture_default_str();
  inv->add_flag("--dot", cfg.dot, "print the colored interval graph [sigma, omega] as DOT instead");
  inv->add_option("--filtration", cfg.filtration, "edge coloring for --dot: flag, trivial, or sets like 1;1,2")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (group->parsed()) return cmd_group(cfg, out);
    if (kl->parsed()) return cmd_kl(cfg, out);
    if (r->parsed()) return cmd_r(cfg, out);
    if (jrel->parsed()) return cmd_jrel(cfg, out);
    if (dec->parsed()) return cmd_decompose(cfg, out);
    if (hyp->parsed()) return cmd_hypercube(cfg, out);
    if (ver->parsed()) return cmd_verify(cfg, out);
    if (inv->parsed()) return cmd_invariance(cfg, out);
  } catch (const ConsistencyError& e) {
    err << "verification failure: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace klp::cli
