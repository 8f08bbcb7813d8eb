// Command-line front end: criticality analysis, quantization tables and
// operators, Casimir spectra, and runnable verification suites.  All I/O is
// JSON with rationals rendered as "p/q" strings; given the same flags and
// seed the output is byte-identical across runs.
//
// Exit codes: 0 success, 1 internal failure or failed verification suite,
// 2 configuration error, 3 critical weight configuration.

#include "CLI11.hpp"

#include <projquant/cartancurved.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace projquant;

namespace {

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("PROJQUANT_LOG");
  if (env == nullptr) return LogLevel::Info;
  const std::string v(env);
  if (v == "quiet") return LogLevel::Quiet;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Info;
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::Info) std::cerr << "[projquant] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::Debug) std::cerr << "[projquant] " << msg << "\n";
}

/// Configuration problems are user errors: reported on stderr, exit 2.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Options {
  int m = 2;
  int kmax = 2;
  std::string rep1, rep2, delta;
  std::string connection, symbol, suite, out;
  unsigned long long seed = 0;
  bool inject_fault = false;
};

/// Writes to --out atomically (temp file + rename), or to stdout.
void emit(const Json& j, const std::string& out) {
  const std::string text = j.dump(1) + "\n";
  if (out.empty()) {
    std::cout << text;
    return;
  }
  const std::string tmp = out + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open output file: " + tmp);
    f << text;
    if (!f.flush()) throw std::runtime_error("cannot write output file: " + tmp);
  }
  if (std::rename(tmp.c_str(), out.c_str()) != 0) throw std::runtime_error("cannot move output into place: " + out);
  log_debug("wrote " + out);
}

Json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad JSON in " + what + ": " + e.what());
  }
}

/// Accepts a file path or, when the argument itself looks like JSON, the
/// literal document.
Json load_json_arg(const std::string& arg, const std::string& what) {
  if (!arg.empty() && arg.front() != '{' && arg.front() != '[') {
    std::ifstream f(arg, std::ios::binary);
    if (!f) throw ConfigError("cannot read " + what + " file: " + arg);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_json_text(ss.str(), what + " file " + arg);
  }
  return parse_json_text(arg, "inline " + what);
}

Rational parse_rational_flag(const std::string& s, const std::string& flag) {
  try {
    return parse_rational(s);
  } catch (const std::exception& e) {
    throw ConfigError("bad value for " + flag + ": " + e.what());
  }
}

RepSpec parse_rep_flag(const std::string& s, const std::string& flag) {
  try {
    return RepSpec::parse(s);
  } catch (const std::exception& e) {
    throw ConfigError("bad value for " + flag + ": " + e.what());
  }
}

void check_geometry(const Options& opt) {
  if (opt.m < 2) throw ConfigError("--m must be at least 2");
  if (opt.kmax < 0) throw ConfigError("--kmax must be nonnegative");
}

/// Builds the symbol space from --rep1 plus either --rep2 or --delta.
SymbolSpace build_space(const Options& opt) {
  if (opt.rep1.empty()) throw ConfigError("missing --rep1");
  const RepSpec r1 = parse_rep_flag(opt.rep1, "--rep1");
  if (!opt.rep2.empty()) {
    if (!opt.delta.empty()) throw ConfigError("give --rep2 or --delta, not both");
    return SymbolSpace(opt.m, r1, parse_rep_flag(opt.rep2, "--rep2"));
  }
  if (!opt.delta.empty()) {
    if (r1.kind != RepSpec::Kind::Trivial)
      throw ConfigError("--delta shorthand is defined for density representations; give --rep2 instead");
    const Rational d = parse_rational_flag(opt.delta, "--delta");
    return SymbolSpace(opt.m, r1, RepSpec{RepSpec::Kind::Trivial, 0, r1.weight - d});
  }
  throw ConfigError("missing --rep2 or --delta");
}

// ---------------------------------------------------------------------------
// critical
// ---------------------------------------------------------------------------

int cmd_critical(const Options& opt) {
  check_geometry(opt);
  if (!opt.rep2.empty() || !opt.delta.empty()) {
    const SymbolSpace sp = build_space(opt);
    log_info("criticality: m=" + std::to_string(opt.m) + " kmax=" + std::to_string(opt.kmax) +
             " delta=" + format_rational(sp.delta()));
    const CriticalityReport rep = criticality(sp, opt.kmax);
    Json j = criticality_report_to_json(rep);
    j["rep1"] = sp.source_spec().str();
    j["rep2"] = sp.target_spec().str();
    emit(j, opt.out);
    return rep.any_critical ? 3 : 0;
  }

  // Shift-parameter scan: every candidate comes from an eigenvalue
  // coincidence; each is then settled by the exact reachability verdict.
  const RepSpec r1 = opt.rep1.empty() ? RepSpec{} : parse_rep_flag(opt.rep1, "--rep1");
  if (r1.kind != RepSpec::Kind::Trivial)
    throw ConfigError("the shift-parameter scan is defined for density representations");
  log_info("critical-shift scan: m=" + std::to_string(opt.m) + " kmax=" + std::to_string(opt.kmax));
  const SymbolSpace probe(opt.m, r1, r1);
  std::vector<Rational> candidates;
  for (int k = 1; k <= opt.kmax; ++k)
    for (const Rational& d : critical_deltas(probe, k)) candidates.push_back(d);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  Json items = Json::array();
  Json critical = Json::array();
  bool any = false;
  for (const Rational& d : candidates) {
    const SymbolSpace sp(opt.m, r1, RepSpec{RepSpec::Kind::Trivial, 0, r1.weight - d});
    const bool crit = criticality(sp, opt.kmax).any_critical;
    items.push_back(Json{{"delta", format_rational(d)}, {"critical", crit}});
    if (crit) {
      critical.push_back(format_rational(d));
      any = true;
    }
  }
  Json j;
  j["m"] = opt.m;
  j["kmax"] = opt.kmax;
  j["rep1"] = r1.str();
  j["candidates"] = std::move(items);
  j["critical_deltas"] = std::move(critical);
  emit(j, opt.out);
  return any ? 3 : 0;
}

// ---------------------------------------------------------------------------
// quantize
// ---------------------------------------------------------------------------

Json operator_report(const SymbolSpace& sp, int k, const PolyOperator& op) {
  Json j;
  j["m"] = sp.m();
  j["rep1"] = sp.source_spec().str();
  j["rep2"] = sp.target_spec().str();
  j["delta"] = format_rational(sp.delta());
  j["k"] = k;
  j["operator"] = poly_operator_to_json(op, static_cast<std::size_t>(sp.m()));
  return j;
}

int cmd_quantize(const Options& opt) {
  check_geometry(opt);
  const SymbolSpace sp = build_space(opt);
  try {
    if (!opt.symbol.empty()) {
      const PolySymbol t = symbol_from_json(sp, load_json_arg(opt.symbol, "symbol"));
      PolyOperator op;
      if (!opt.connection.empty()) {
        std::ifstream f(opt.connection, std::ios::binary);
        if (!f) throw ConfigError("cannot read connection file: " + opt.connection);
        std::ostringstream ss;
        ss << f.rdbuf();
        const ProjConnection conn = json_to_connection(parse_json_text(ss.str(), "connection file"));
        if (conn.m != sp.m()) throw ConfigError("connection dimension does not match --m");
        log_info("curved operator: m=" + std::to_string(opt.m) + " k=" + std::to_string(t.k));
        op = quantize_curved(conn, t);
      } else {
        log_info("flat operator: m=" + std::to_string(opt.m) + " k=" + std::to_string(t.k));
        op = quantize_flat(t);
      }
      emit(operator_report(sp, t.k, op), opt.out);
      return 0;
    }
    log_info("flat tables: m=" + std::to_string(opt.m) + " k=" + std::to_string(opt.kmax));
    const std::vector<Mat> tables = quantization_tables(sp, opt.kmax);
    emit(tables_to_json(sp, opt.kmax, tables), opt.out);
    return 0;
  } catch (const CriticalPairError& e) {
    Json j;
    j["critical"] = true;
    j["report"] = criticality_report_to_json(e.report);
    emit(j, opt.out);
    return 3;
  }
}

// ---------------------------------------------------------------------------
// casimir-spectrum
// ---------------------------------------------------------------------------

int cmd_casimir_spectrum(const Options& opt) {
  check_geometry(opt);
  const SymbolSpace sp = build_space(opt);
  log_info("spectrum: m=" + std::to_string(opt.m) + " kmax=" + std::to_string(opt.kmax));
  Json degrees = Json::array();
  for (int k = 0; k <= opt.kmax; ++k) {
    const DegreeSpectrum ds = degree_spectrum(sp, k);
    Json blocks = Json::array();
    for (std::size_t s = 0; s < ds.blocks.size(); ++s) {
      Rational dim(0);
      for (Index i = 0; i < ds.blocks[s].projector.rows(); ++i) dim += ds.blocks[s].projector(i, i);
      blocks.push_back(Json{{"cprime", format_rational(ds.blocks[s].eigenvalue)},
                            {"alpha", format_rational(ds.alphas[s])},
                            {"dim", format_rational(dim)}});
    }
    degrees.push_back(Json{{"k", k},
                           {"identity_scalar", format_rational(ds.identity_scalar)},
                           {"blocks", std::move(blocks)}});
  }
  Json j;
  j["m"] = sp.m();
  j["rep1"] = sp.source_spec().str();
  j["rep2"] = sp.target_spec().str();
  j["delta"] = format_rational(sp.delta());
  j["degrees"] = std::move(degrees);
  emit(j, opt.out);
  return 0;
}

// ---------------------------------------------------------------------------
// verify suites
// ---------------------------------------------------------------------------

struct SuiteReport {
  Json checks = Json::array();
  bool passed = true;

  void record(const std::string& name, bool ok, Json counterexample = {}) {
    Json c{{"name", name}, {"pass", ok}};
    if (!ok && !counterexample.is_null()) c["counterexample"] = std::move(counterexample);
    checks.push_back(std::move(c));
    if (!ok) passed = false;
  }
};

GradedElement random_element(Rng& rng, Index m) {
  GradedElement g = GradedElement::zero(m);
  for (Index r = 0; r < m; ++r) g.v(r) = random_rational(rng, 3, 2);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) g.A(i, j) = random_rational(rng, 3, 2);
  for (Index t = 0; t < m; ++t) g.xi(t) = random_rational(rng, 3, 2);
  return g;
}

Poly random_poly(Rng& rng, int m, int max_deg) {
  Poly p(0);
  for (int d = 0; d <= max_deg; ++d)
    for (const Mono& e : monomials_of_degree(m, static_cast<std::uint32_t>(d))) {
      const Rational c = random_rational(rng, 2, 2);
      if (!c.is_zero()) {
        Poly term(c);
        for (std::size_t v = 0; v < e.size(); ++v)
          if (e[v]) term *= Poly::monomial(v, e[v]);
        p += term;
      }
    }
  return p;
}

PolySymbol random_symbol(Rng& rng, const SymbolSpace& sp, int k, int max_deg) {
  PolySymbol t = PolySymbol::zero(sp, k);
  for (Index f = 0; f < t.coeffs.size(); ++f) t.coeffs(f) = random_poly(rng, sp.m(), max_deg);
  return t;
}

ProjConnection random_connection(Rng& rng, int m, int max_deg) {
  ProjConnection c = ProjConnection::zero(m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j)
      for (Index k = j; k < m; ++k) {
        const Poly e = random_poly(rng, m, max_deg);
        c.gamma[static_cast<std::size_t>(i)](j, k) = e;
        c.gamma[static_cast<std::size_t>(i)](k, j) = e;
      }
  return c;
}

bool operators_equal(const PolyOperator& a, const PolyOperator& b) {
  if (a.dim_in != b.dim_in || a.dim_out != b.dim_out || a.terms.size() != b.terms.size()) return false;
  for (const auto& [beta, mat] : a.terms) {
    auto it = b.terms.find(beta);
    if (it == b.terms.end()) return false;
    for (Index r = 0; r < mat.rows(); ++r)
      for (Index c = 0; c < mat.cols(); ++c)
        if (mat(r, c) != it->second(r, c)) return false;
  }
  return true;
}

/// Bracket, dual-pairing, and weighted-trace identities of the graded
/// algebra, for every dimension in the supported acceptance range.
SuiteReport suite_crochet(const Options& opt) {
  SuiteReport rep;
  Rng rng(opt.seed);
  for (Index m = 2; m <= 5; ++m) {
    bool jacobi = true;
    Json cx;
    for (int trial = 0; trial < 20 && jacobi; ++trial) {
      const GradedElement x = random_element(rng, m), y = random_element(rng, m), z = random_element(rng, m);
      const GradedElement defect =
          bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) + bracket(z, bracket(x, y));
      if (!defect.is_zero()) {
        jacobi = false;
        cx = Json{{"x", graded_to_json(x)}, {"y", graded_to_json(y)}, {"z", graded_to_json(z)}};
      }
    }
    rep.record("jacobi_m" + std::to_string(m), jacobi, cx);

    const DualBasisFamily f = build_dual_bases(m);
    const auto basis = f.basis();
    const auto dual = f.dual_basis();
    bool gram = basis.size() == dual.size();
    for (std::size_t i = 0; i < basis.size() && gram; ++i)
      for (std::size_t j = 0; j < dual.size() && gram; ++j)
        gram = killing(basis[i], dual[j]) == Rational(i == j ? 1 : 0);
    rep.record("dual_gram_m" + std::to_string(m), gram);

    GradedElement s = GradedElement::zero(m);
    for (Index r = 0; r < m; ++r) s = s + bracket(f.e[static_cast<std::size_t>(r)], f.eps[static_cast<std::size_t>(r)]);
    rep.record("pairing_sum_m" + std::to_string(m), s == f.E * Rational(-1, 2));
  }
  return rep;
}

/// Degree-drop map against the conjugation oracle, plus its structural
/// properties.  --inject-fault flips the sign of the closed form so the
/// harness demonstrably catches a wrong implementation.
SuiteReport suite_gamma(const Options& opt) {
  SuiteReport rep;
  Rng rng(opt.seed);
  const Rational fault = opt.inject_fault ? Rational(-1) : Rational(1);
  struct Setup {
    int m;
    const char *rep1, *rep2;
  };
  for (const Setup& su : {Setup{2, "trivial:2/3", "trivial:-1/5"}, Setup{2, "sym:1:1/3", "trivial:1/2"},
                          Setup{3, "trivial:1/3", "ext:1:1/6"}}) {
    SymbolSpace sp(su.m, RepSpec::parse(su.rep1), RepSpec::parse(su.rep2));
    const std::string tag = std::string(su.rep1) + "->" + su.rep2;
    for (int k = 1; k <= std::min(opt.kmax, 3); ++k) {
      bool closed_form = true, affine_clean = true;
      Json cx;
      for (int trial = 0; trial < 4 && closed_form; ++trial) {
        const GradedElement xi = GradedElement::from_xi(random_element(rng, su.m).xi);
        const PolySymbol t = random_symbol(rng, sp, k, 2);
        const SymbolSum s = curly_l(t, xi);
        const PolySymbol drop = fault * apply_fiber_map(sp, k - 1, gamma_matrix(sp, k, xi.xi), t);
        if (!(s.part(k) - lie_derivative(t, xi)).is_zero() || !(s.part(k - 1) - drop).is_zero()) {
          closed_form = false;
          cx = Json{{"h", graded_to_json(xi)},
                    {"symbol", symbol_to_json(t)},
                    {"conjugated_drop", symbol_to_json(s.part(k - 1))},
                    {"closed_form_drop", symbol_to_json(drop)}};
        }
        // affine elements act without any degree drop
        GradedElement aff = random_element(rng, su.m);
        aff.xi = RowVec::Zero(su.m);
        const SymbolSum sa = curly_l(t, aff);
        if (!(sa.part(k) - lie_derivative(t, aff)).is_zero() || !sa.part(k - 1).is_zero()) affine_clean = false;
      }
      rep.record("closed_form_" + tag + "_k" + std::to_string(k), closed_form, cx);
      rep.record("affine_no_drop_" + tag + "_k" + std::to_string(k), affine_clean);

      // drops along two covector directions commute
      RowVec h1 = RowVec::Zero(su.m), h2 = RowVec::Zero(su.m);
      h1(0) = 1;
      h2(su.m - 1) = 1;
      if (k >= 2) {
        const Mat ab = gamma_matrix(sp, k - 1, h1) * gamma_matrix(sp, k, h2);
        const Mat ba = gamma_matrix(sp, k - 1, h2) * gamma_matrix(sp, k, h1);
        rep.record("drops_commute_" + tag + "_k" + std::to_string(k), is_zero_matrix(Mat(ab - ba)));
      }
    }
  }
  return rep;
}

/// Spectral decomposition against the direct dual-basis sum.
SuiteReport suite_casimir(const Options& opt) {
  SuiteReport rep;
  Rng rng(opt.seed);
  struct Setup {
    int m;
    const char *rep1, *rep2;
  };
  for (const Setup& su : {Setup{2, "trivial:1/3", "trivial:-2/7"}, Setup{2, "sym:1:1/2", "trivial:1/7"},
                          Setup{3, "trivial:2/5", "trivial:1/9"}}) {
    SymbolSpace sp(su.m, RepSpec::parse(su.rep1), RepSpec::parse(su.rep2));
    const std::string tag = std::string(su.rep1) + "->" + su.rep2;
    for (int k = 0; k <= std::min(opt.kmax, 3); ++k) {
      const DegreeSpectrum ds = degree_spectrum(sp, k);
      bool ok = true;
      Json cx;
      const PolySymbol t = random_symbol(rng, sp, k, 2);
      for (std::size_t s = 0; s < ds.blocks.size() && ok; ++s) {
        const PolySymbol tb = apply_fiber_map(sp, k, ds.blocks[s].projector, t);
        const PolySymbol defect = casimir_direct(tb) - ds.alphas[s] * tb;
        for (Index c = 0; c < defect.coeffs.size() && ok; ++c)
          if (!defect.coeffs(c).is_zero()) {
            ok = false;
            cx = Json{{"block", s}, {"alpha", format_rational(ds.alphas[s])}, {"defect", symbol_to_json(defect)}};
          }
      }
      rep.record("spectral_" + tag + "_k" + std::to_string(k), ok, cx);
    }
  }
  return rep;
}

/// Fiber commutator identity tying the invariant to the degree drops.
SuiteReport suite_tech(const Options& opt) {
  SuiteReport rep;
  struct Setup {
    int m;
    const char *rep1, *rep2;
  };
  for (const Setup& su : {Setup{2, "trivial:1/3", "trivial:-2/7"}, Setup{3, "trivial:2/5", "ext:1:1/9"}}) {
    SymbolSpace sp(su.m, RepSpec::parse(su.rep1), RepSpec::parse(su.rep2));
    const std::string tag = std::string(su.rep1) + "->" + su.rep2;
    for (int k = 1; k <= std::min(opt.kmax, 3); ++k) {
      bool ok = true;
      for (Index t = 0; t < su.m && ok; ++t) {
        RowVec h = RowVec::Zero(su.m);
        h(t) = 1;
        ok = is_zero_matrix(gamma_commutator_defect(sp, k, h));
      }
      rep.record("commutator_" + tag + "_k" + std::to_string(k), ok);
    }
  }
  return rep;
}

/// Full equivariance of the flat quantization on monomial spanning sets.
SuiteReport suite_flat_equivariance(const Options& opt) {
  SuiteReport rep;
  Options o = opt;
  if (o.rep1.empty()) o.rep1 = "trivial:1/3";
  if (o.rep2.empty() && o.delta.empty()) o.delta = "4/7";
  const SymbolSpace sp = build_space(o);
  for (int k = 0; k <= std::min(opt.kmax, 3); ++k) {
    const SymbolQuantization q = [](const PolySymbol& t) { return lift(t).hat; };
    const EquivarianceReport er = verify_equivariance(sp, k, q, 2);
    rep.record("equivariance_k" + std::to_string(k), er.passed, er.counterexample);
  }
  return rep;
}

/// Shift invariance and flat reduction of the curved construction, plus the
/// vertical identities behind it.
SuiteReport suite_curved_invariance(const Options& opt) {
  SuiteReport rep;
  Rng rng(opt.seed);
  Options o = opt;
  if (o.rep1.empty()) o.rep1 = "trivial:3/7";
  if (o.rep2.empty() && o.delta.empty()) o.delta = "5/9";
  o.m = opt.m;
  const SymbolSpace sp = build_space(o);
  const int m = sp.m();

  const ProjConnection conn = random_connection(rng, m, 1);
  std::vector<Poly> alpha(static_cast<std::size_t>(m));
  for (auto& a : alpha) a = random_poly(rng, m, 2);
  const CartanData cd = normal_cartan(conn);

  rep.record("normalized_curvature", is_normal(cd));

  for (int k = 0; k <= std::min(opt.kmax, 2); ++k) {
    const PolySymbol t = random_symbol(rng, sp, k, 1);
    const PolyOperator flat_op = quantize_flat(t);
    rep.record("flat_reduction_k" + std::to_string(k),
               operators_equal(quantize_curved(ProjConnection::zero(m), t), flat_op));
    const PolyOperator base = quantize_curved(conn, t);
    rep.record("shift_invariance_k" + std::to_string(k),
               operators_equal(base, quantize_curved(weyl_shift(conn, alpha), t)));

    bool symbol_ok = base.order() <= k;
    const auto& deg = sp.degree(k);
    for (Index s = 0; s < static_cast<Index>(deg.monos.size()) && symbol_ok; ++s) {
      Mono beta = deg.monos[static_cast<std::size_t>(s)];
      trim_mono(beta);
      auto it = base.terms.find(beta);
      const Poly top = it == base.terms.end() ? Poly(0) : it->second(0, 0);
      symbol_ok = top == t.coeffs(s);
    }
    rep.record("symbol_preserved_k" + std::to_string(k), symbol_ok);

    if (k >= 1) {
      PolyVec fv(sp.source().dim);
      for (Index c = 0; c < fv.size(); ++c) fv(c) = random_poly(rng, m, 2);
      const LiftedFunction f = lift_section(sp, fv);
      const LiftedFunction tl = lift_symbol(t);
      bool defect_ok = true, commute_ok = true;
      for (Index hd = 0; hd < m; ++hd) {
        RowVec h = RowVec::Zero(m);
        h(hd) = 1;
        defect_ok = defect_ok && equivariance_defect(cd, h, tl, f).is_zero();
        LiftedSum s = LiftedSum::zero(sp);
        s.add_part(tl);
        commute_ok = commute_ok && commute_defect(cd, h, s).is_zero();
      }
      rep.record("equivariance_defect_k" + std::to_string(k), defect_ok);
      rep.record("invariant_commutes_k" + std::to_string(k), commute_ok);
    }
  }
  return rep;
}

int cmd_verify(const Options& opt) {
  check_geometry(opt);
  if (opt.suite.empty()) throw ConfigError("missing --suite");
  log_info("verify: suite=" + opt.suite + " seed=" + std::to_string(opt.seed));
  SuiteReport rep;
  if (opt.suite == "crochet")
    rep = suite_crochet(opt);
  else if (opt.suite == "gamma")
    rep = suite_gamma(opt);
  else if (opt.suite == "casimir")
    rep = suite_casimir(opt);
  else if (opt.suite == "tech")
    rep = suite_tech(opt);
  else if (opt.suite == "flat-equivariance")
    rep = suite_flat_equivariance(opt);
  else if (opt.suite == "curved-invariance")
    rep = suite_curved_invariance(opt);
  else
    throw ConfigError("unknown suite: " + opt.suite +
                      " (available: crochet, gamma, casimir, tech, flat-equivariance, curved-invariance)");
  Json j;
  j["suite"] = opt.suite;
  j["m"] = opt.m;
  j["kmax"] = opt.kmax;
  j["seed"] = opt.seed;
  j["checks"] = std::move(rep.checks);
  j["passed"] = rep.passed;
  emit(j, opt.out);
  return rep.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact equivariant quantization toolkit"};
  app.require_subcommand(1);
  Options opt;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--m", opt.m, "base dimension");
    sub->add_option("--kmax", opt.kmax, "maximum symbol degree");
    sub->add_option("--rep1", opt.rep1, "source fiber (trivial:w, sym:p:w, ext:p:w)");
    sub->add_option("--rep2", opt.rep2, "target fiber");
    sub->add_option("--delta", opt.delta, "shift parameter p/q (densities shorthand for --rep2)");
    sub->add_option("--seed", opt.seed, "PRNG seed for randomized checks");
    sub->add_option("--out", opt.out, "output file (default: stdout)");
  };

  CLI::App* critical = app.add_subcommand("critical", "criticality analysis, or a shift-parameter scan");
  add_common(critical);
  CLI::App* quantize = app.add_subcommand("quantize", "quantization tables, or the operator of a symbol");
  add_common(quantize);
  quantize->add_option("--symbol", opt.symbol, "symbol JSON (file or inline)");
  quantize->add_option("--connection", opt.connection, "connection JSON file (curved mode)");
  CLI::App* spectrum = app.add_subcommand("casimir-spectrum", "per-degree invariant spectra");
  add_common(spectrum);
  CLI::App* verify = app.add_subcommand("verify", "run a named identity suite");
  add_common(verify);
  verify->add_option("--suite", opt.suite, "crochet, gamma, casimir, tech, flat-equivariance, curved-invariance");
  verify->add_flag("--inject-fault", opt.inject_fault, "flip a sign in the gamma suite (harness self-test)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (critical->parsed()) return cmd_critical(opt);
    if (quantize->parsed()) return cmd_quantize(opt);
    if (spectrum->parsed()) return cmd_casimir_spectrum(opt);
    if (verify->parsed()) return cmd_verify(opt);
    throw ConfigError("no subcommand");
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
