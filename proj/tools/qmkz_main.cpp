// qmkz command-line front end.
//
// Subcommands: moments | abel | korovkin | rate | sequences.
// Output is a flat table, CSV (fixed column order) or JSON (schema
// "qmkz.table/1"), written to --out or stdout. Every measured number is
// emitted next to its tail bound / grid step so no bare values leave the
// tool. Identical configurations produce byte-identical output.
//
// Exit codes: 0 pass, 1 assertion failure (envelope violation or verdict),
// 2 configuration or domain error, 3 truncation budget deficit.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qmkz/qmkz.hpp"

namespace {

using nlohmann::ordered_json;
using namespace qmkz;

constexpr int kExitPass = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDeficit = 3;

std::string fmt_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct Cell : std::variant<std::monostate, double, long long, bool, std::string> {
  using variant::variant;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::vector<Cell>& add_row() {
    rows.emplace_back(columns.size());
    return rows.back();
  }
};

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

void write_csv(const Table& t, std::ostream& os) {
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ",";
      const Cell& cell = row[c];
      if (std::holds_alternative<double>(cell))
        os << fmt_double(std::get<double>(cell));
      else if (std::holds_alternative<long long>(cell))
        os << std::get<long long>(cell);
      else if (std::holds_alternative<bool>(cell))
        os << (std::get<bool>(cell) ? 1 : 0);
      else if (std::holds_alternative<std::string>(cell))
        os << csv_quote(std::get<std::string>(cell));
    }
    os << "\n";
  }
}

void write_json(const Table& t, const std::string& command, std::ostream& os) {
  ordered_json doc;
  doc["schema"] = "qmkz.table/1";
  doc["command"] = command;
  doc["columns"] = t.columns;
  ordered_json rows = ordered_json::array();
  for (const auto& row : t.rows) {
    ordered_json obj = ordered_json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      const Cell& cell = row[c];
      if (std::holds_alternative<double>(cell))
        obj[t.columns[c]] = std::get<double>(cell);
      else if (std::holds_alternative<long long>(cell))
        obj[t.columns[c]] = std::get<long long>(cell);
      else if (std::holds_alternative<bool>(cell))
        obj[t.columns[c]] = std::get<bool>(cell);
      else if (std::holds_alternative<std::string>(cell))
        obj[t.columns[c]] = std::get<std::string>(cell);
    }
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  os << doc.dump(2) << "\n";
}

struct GlobalOpts {
  double tail_tol = 1e-12;
  std::size_t max_terms = 1'000'000;
  std::string on_budget = "flag";
  std::string out;
  std::string format = "csv";
  std::size_t start_index = 3;

  TruncationPolicy policy() const {
    TruncationPolicy p;
    p.tail_tol = tail_tol;
    p.max_terms = max_terms;
    p.on_budget_exhausted = on_budget == "error" ? BudgetPolicy::kError : BudgetPolicy::kReturnWithDeficit;
    return p;
  }

  void emit(const Table& t, const std::string& command) const {
    if (out.empty()) {
      if (format == "json")
        write_json(t, command, std::cout);
      else
        write_csv(t, std::cout);
      return;
    }
    std::ofstream os(out, std::ios::binary | std::ios::trunc);
    if (!os) throw std::invalid_argument("cannot open output file '" + out + "'");
    if (format == "json")
      write_json(t, command, os);
    else
      write_csv(t, os);
  }
};

QSequence parse_sequence(const std::string& name) {
  if (name == "cube") return gen_cube_qseq();
  if (name == "prime") return gen_prime_qseq();
  if (name == "one-minus-inv-sq") return one_minus_inv_sq_qseq();
  if (name.rfind("const:", 0) == 0) {
    std::size_t pos = 0;
    const std::string body = name.substr(6);
    double v;
    try {
      v = std::stod(body, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad sequence constant in '" + name + "'");
    }
    if (pos != body.size()) throw std::invalid_argument("bad sequence constant in '" + name + "'");
    return const_qseq(v);
  }
  throw std::invalid_argument("unknown q-sequence '" + name +
                              "' (expected cube | prime | one-minus-inv-sq | const:<v>)");
}

FamilyKind parse_family(const std::string& name) {
  if (name == "classical" || name == "classical-mkz") return FamilyKind::kClassicalMkz;
  if (name == "q-mkz") return FamilyKind::kQMkz;
  if (name == "durrmeyer" || name == "durrmeyer-q-mkz") return FamilyKind::kDurrmeyerQMkz;
  throw std::invalid_argument("unknown family '" + name + "' (expected classical | q-mkz | durrmeyer)");
}

// Resolves --seq/--q into the family's index sequence. The Durrmeyer
// q-integral is undefined at q = 1, so a constant sequence pinned at 1 is a
// configuration error for that family.
OperatorFamily make_family(const std::string& family, const std::string& seq, std::optional<double> q,
                           const TruncationPolicy& policy) {
  const FamilyKind kind = parse_family(family);
  if (!seq.empty() && q) throw std::invalid_argument("give either --seq or --q, not both");
  std::optional<double> const_val = q;
  QSequence qs;
  if (q) {
    qs = const_qseq(*q);
  } else if (!seq.empty()) {
    qs = parse_sequence(seq);
    if (seq.rfind("const:", 0) == 0) const_val = qs(1);
  } else if (kind == FamilyKind::kClassicalMkz) {
    qs = const_qseq(1.0);
  } else {
    throw std::invalid_argument("family '" + family + "' needs --seq or --q");
  }
  if (kind == FamilyKind::kDurrmeyerQMkz && const_val && *const_val == 1.0)
    throw std::invalid_argument("q = 1 is invalid for the durrmeyer family (q-integral undefined)");
  return {kind, std::move(qs), policy};
}

std::function<double(std::size_t)> parse_target(const std::string& name, const QSequence& seq,
                                                std::size_t& min_start) {
  if (name == "inv-bracket") {
    min_start = 2;
    return inv_bracket_seq(seq);
  }
  if (name == "two-over-bracket") {
    min_start = 2;
    return two_over_bracket_seq(seq);
  }
  if (name == "inv-n") {
    min_start = 1;
    return [](std::size_t n) { return 1.0 / static_cast<double>(n); };
  }
  if (name.rfind("const:", 0) == 0) {
    min_start = 0;
    const double c = std::stod(name.substr(6));
    return [c](std::size_t) { return c; };
  }
  throw std::invalid_argument("unknown target '" + name +
                              "' (expected inv-bracket | two-over-bracket | inv-n | const:<c>)");
}

std::function<double(double)> parse_mu(const std::string& expr) {
  if (expr == "1-y") return [](double y) { return 1.0 - y; };
  if (expr == "sqrt(1-y)") return [](double y) { return std::sqrt(1.0 - y); };
  if (expr.rfind("(1-y)^", 0) == 0) {
    const double p = std::stod(expr.substr(6));
    return [p](double y) { return std::pow(1.0 - y, p); };
  }
  throw std::invalid_argument("unknown mu gauge '" + expr + "' (expected 1-y | sqrt(1-y) | (1-y)^<p>)");
}

void check_schedule(const std::vector<double>& ys) {
  if (ys.empty()) throw std::invalid_argument("empty y schedule");
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (!(ys[i] > 0.0) || !(ys[i] < 1.0)) throw std::invalid_argument("y values must lie in (0, 1)");
    if (i > 0 && !(ys[i] > ys[i - 1])) throw std::invalid_argument("y schedule must be strictly increasing");
  }
}

// ---------------------------------------------------------------------------

struct MomentsArgs {
  std::string family;
  std::string seq;
  std::optional<double> q;
  std::vector<std::size_t> ns;
  std::size_t grid_count = 101;
  double slack = 1e-8;
};

int run_moments(const GlobalOpts& g, const MomentsArgs& a) {
  const OperatorFamily fam = make_family(a.family, a.seq, a.q, g.policy());
  const auto grid = uniform_grid(a.grid_count, 0.0, 0.99);

  Table t;
  t.columns = {"family", "seq",     "n",       "q",       "x",          "e0",
               "e0_tail", "e1",     "e1_tail", "e2",      "e2_tail",    "env_lo",
               "env_hi",  "e0_err", "e1_err",  "e2_lo_viol", "e2_up_viol", "deficit"};
  bool any_violation = false;
  bool any_deficit = false;
  for (std::size_t n : a.ns) {
    const MomentReport rep = moment_report(fam, n, grid);
    any_deficit = any_deficit || rep.deficit;
    for (const auto& row : rep.rows) {
      auto& r = t.add_row();
      r[0] = std::string(family_name(fam.kind));
      r[1] = fam.qseq.name;
      r[2] = static_cast<long long>(n);
      r[3] = rep.q;
      r[4] = row.x;
      r[5] = row.e0;
      r[6] = row.e0_tail;
      r[7] = row.e1;
      r[8] = row.e1_tail;
      r[9] = row.e2;
      r[10] = row.e2_tail;
      r[11] = row.env_lo;
      r[12] = row.env_hi;
      const double e0_err = std::abs(row.e0 - 1.0);
      const double e1_err = std::abs(row.e1 - row.x);
      const double lo_viol = std::max(0.0, row.env_lo - row.e2);
      const double up_viol = std::max(0.0, row.e2 - row.env_hi);
      r[13] = e0_err;
      r[14] = e1_err;
      r[15] = lo_viol;
      r[16] = up_viol;
      r[17] = rep.deficit;
      any_violation = any_violation || e0_err > a.slack || e1_err > a.slack || lo_viol > a.slack ||
                      up_viol > a.slack;
    }
  }
  g.emit(t, "moments");
  if (any_deficit) return kExitDeficit;
  return any_violation ? kExitAssertion : kExitPass;
}

struct AbelArgs {
  std::string seq;
  std::string target;
  std::vector<double> ys;
  std::string check;
  bool density = false;
  std::size_t horizon = 1000;
};

int run_abel(const GlobalOpts& g, const AbelArgs& a) {
  const QSequence seq = parse_sequence(a.seq);
  Table t;
  t.columns = {"kind",   "seq",   "target",  "start_index",  "y",
               "value",  "tail_bound", "terms", "deficit",   "horizon",
               "count",  "density",    "max_qpow_gap", "max_inv_bracket",
               "qpow_tol", "inv_bracket_tol", "passes"};
  bool any_deficit = false;

  if (!a.target.empty()) {
    std::size_t min_start = 0;
    const auto xn = parse_target(a.target, seq, min_start);
    const std::size_t start = std::max(g.start_index, min_start);
    std::vector<double> ys = a.ys;
    if (ys.empty()) ys = default_y_schedule();
    check_schedule(ys);
    // every bundled target is bounded by 1 in absolute value off its head;
    // const targets carry their own bound
    double bound = 1.0;
    if (a.target.rfind("const:", 0) == 0) bound = std::abs(std::stod(a.target.substr(6)));
    const AbelProfile prof = abel_profile(xn, ys, start, bound, g.policy());
    for (std::size_t i = 0; i < prof.y_schedule.size(); ++i) {
      auto& r = t.add_row();
      r[0] = std::string("profile");
      r[1] = seq.name;
      r[2] = a.target;
      r[3] = static_cast<long long>(start);
      r[4] = prof.y_schedule[i];
      r[5] = prof.values[i].value;
      r[6] = prof.values[i].tail_bound;
      r[7] = static_cast<long long>(prof.values[i].terms_used);
      r[8] = prof.values[i].deficit;
      any_deficit = any_deficit || prof.values[i].deficit;
    }
  }

  if (a.density) {
    const DensityEstimate d =
        density_estimate([&seq](std::size_t n) { return seq(n) == 0.0; }, a.horizon);
    auto& r = t.add_row();
    r[0] = std::string("density");
    r[1] = seq.name;
    r[9] = static_cast<long long>(d.horizon);
    r[10] = static_cast<long long>(d.count);
    r[11] = d.density;
  }

  if (!a.check.empty()) {
    if (a.check != "classical")
      throw std::invalid_argument("unknown check '" + a.check + "' (expected classical)");
    const ClassicalConditionsReport rep = classical_conditions_check(seq, a.horizon);
    auto& r = t.add_row();
    r[0] = std::string("classical");
    r[1] = seq.name;
    r[9] = static_cast<long long>(rep.horizon);
    r[12] = rep.max_qpow_gap;
    r[13] = rep.max_inv_bracket;
    r[14] = rep.qpow_gap_tol;
    r[15] = rep.inv_bracket_tol;
    r[16] = rep.passes;
  }

  if (t.rows.empty())
    throw std::invalid_argument("abel: nothing to do (give --target, --density or --check)");
  g.emit(t, "abel");
  return any_deficit ? kExitDeficit : kExitPass;
}

struct KorovkinArgs {
  std::string family;
  std::string seq;
  std::optional<double> q;
  std::string f = "sinpi";
  std::vector<double> ys;
  std::size_t grid_count = 101;
  std::optional<double> threshold;
};

int run_korovkin(const GlobalOpts& g, const KorovkinArgs& a) {
  const OperatorFamily fam = make_family(a.family, a.seq, a.q, g.policy());
  std::vector<double> ys = a.ys.empty() ? std::vector<double>{0.9, 0.99} : a.ys;
  check_schedule(ys);
  auto grid = uniform_grid(a.grid_count, 0.0, 0.99);
  grid.push_back(1.0);  // definitional endpoint

  Table t;
  t.columns = {"family", "seq",  "f",          "start_index", "grid_points", "grid_step",
               "y",      "norm", "tail_bound", "terms",       "deficit",     "consistent"};
  bool any_deficit = false;
  bool all_consistent = true;
  std::vector<Func1D> fs = {parse_function(a.f), e0(), e1(), e2()};
  const std::vector<KorovkinRun> runs = korovkin_run_multi(fam, fs, ys, grid, g.start_index);
  for (std::size_t fi = 0; fi < fs.size(); ++fi) {
    const Func1D& f = fs[fi];
    const KorovkinRun& run = runs[fi];
    const bool ok = run.consistent(2.0 * fam.policy.tail_tol, a.threshold);
    all_consistent = all_consistent && ok;
    for (const auto& p : run.points) {
      auto& r = t.add_row();
      r[0] = run.family;
      r[1] = run.sequence;
      r[2] = f.name;
      r[3] = static_cast<long long>(run.start_index);
      r[4] = static_cast<long long>(run.x_grid.size());
      r[5] = run.grid_step;
      r[6] = p.y;
      r[7] = p.value;
      r[8] = p.tail_bound;
      r[9] = static_cast<long long>(p.terms);
      r[10] = p.deficit;
      r[11] = ok;
      any_deficit = any_deficit || p.deficit;
    }
  }
  g.emit(t, "korovkin");
  if (any_deficit) return kExitDeficit;
  return all_consistent ? kExitPass : kExitAssertion;
}

struct RateArgs {
  std::string family;
  std::string seq;
  std::optional<double> q;
  std::string f = "abshalf";
  std::vector<double> ys;
  std::size_t grid_count = 101;
  std::string mu;
  double slack = 1e-6;
};

int run_rate(const GlobalOpts& g, const RateArgs& a) {
  const OperatorFamily fam = make_family(a.family, a.seq, a.q, g.policy());
  std::vector<double> ys = a.ys.empty() ? std::vector<double>{0.5, 0.75, 0.9} : a.ys;
  check_schedule(ys);
  auto grid = uniform_grid(a.grid_count, 0.0, 0.99);
  grid.push_back(1.0);

  std::function<double(double)> mu;
  if (!a.mu.empty()) mu = parse_mu(a.mu);

  const RateReport rep = rate_report(fam, parse_function(a.f), ys, grid, mu, g.start_index);

  Table t;
  t.columns = {"family", "seq",      "f",        "start_index", "grid_step",        "y",
               "lhs",    "lhs_tail", "phi",      "phi_tail",    "omega",            "omega_resolution",
               "omega_at_floor", "margin", "slack", "mu",       "lhs_over_mu",      "deficit"};
  bool any_deficit = false;
  bool margins_ok = true;
  for (const auto& p : rep.points) {
    auto& r = t.add_row();
    r[0] = rep.family;
    r[1] = rep.sequence;
    r[2] = rep.function;
    r[3] = static_cast<long long>(rep.start_index);
    r[4] = rep.grid_step;
    r[5] = p.y;
    r[6] = p.lhs;
    r[7] = p.lhs_tail;
    r[8] = p.phi;
    r[9] = p.phi_tail;
    r[10] = p.omega;
    r[11] = p.omega_resolution;
    r[12] = p.omega_at_floor;
    r[13] = p.margin;
    r[14] = a.slack;
    if (p.mu) r[15] = *p.mu;
    if (p.lhs_over_mu) r[16] = *p.lhs_over_mu;
    r[17] = p.deficit;
    any_deficit = any_deficit || p.deficit;
    margins_ok = margins_ok && p.margin >= -a.slack;
  }
  g.emit(t, "rate");
  if (any_deficit) return kExitDeficit;
  return margins_ok ? kExitPass : kExitAssertion;
}

int run_sequences(const GlobalOpts& g) {
  Table t;
  t.columns = {"kind", "name", "description", "v1", "v2", "v3", "v4", "v5", "v6", "v7", "v8"};
  struct SeqEntry {
    QSequence seq;
    const char* desc;
  };
  const SeqEntry seqs[] = {
      {gen_cube_qseq(), "q_n = 0 at perfect cubes, 1 otherwise"},
      {gen_prime_qseq(), "q_n = 0 at primes, 1 otherwise"},
      {one_minus_inv_sq_qseq(), "q_n = 1 - 1/n^2"},
      {const_qseq(0.9), "constant example; any const:<v> with v in (0,1]"},
  };
  for (const auto& e : seqs) {
    auto& r = t.add_row();
    r[0] = std::string("sequence");
    r[1] = e.seq.name;
    r[2] = std::string(e.desc);
    for (std::size_t n = 1; n <= 8; ++n) r[2 + n] = e.seq(n);
  }
  struct FnEntry {
    Func1D f;
    const char* desc;
  };
  const FnEntry fns[] = {
      {e0(), "constant 1"},
      {e1(), "identity"},
      {e2(), "square"},
      {sinpi(), "sin(pi x)"},
      {abshalf(), "|x - 1/2|"},
      {constant(2.0), "constant example; any const:<c>"},
  };
  const double xs[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (const auto& e : fns) {
    auto& r = t.add_row();
    r[0] = std::string("function");
    r[1] = e.f.name;
    r[2] = std::string(e.desc);
    for (std::size_t i = 0; i < 5; ++i) r[3 + i] = e.f(xs[i]);
  }
  g.emit(t, "sequences");
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"q-MKZ operator laboratory: moment checks, Abel transforms, Korovkin runs, rate bounds"};
  app.fallthrough();
  app.set_config("--config", "", "read options from a flat key=value file");

  GlobalOpts g;
  app.add_option("--tail-tol", g.tail_tol, "series tail tolerance")->envname("QMKZ_TAIL_TOL");
  app.add_option("--max-terms", g.max_terms, "series term budget")->envname("QMKZ_MAX_TERMS");
  app.add_option("--on-budget", g.on_budget, "budget exhaustion: flag | error")
      ->check(CLI::IsMember({"flag", "error"}))
      ->envname("QMKZ_ON_BUDGET");
  app.add_option("--out", g.out, "output file (default stdout)")->envname("QMKZ_OUT");
  app.add_option("--format", g.format, "output format: csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->envname("QMKZ_FORMAT");
  app.add_option("--start-index", g.start_index, "first operator/sequence index in Abel sums")
      ->envname("QMKZ_START_INDEX");

  MomentsArgs ma;
  CLI::App* moments = app.add_subcommand("moments", "moment identities and second-moment envelopes");
  moments->add_option("--family", ma.family, "classical | q-mkz | durrmeyer")->required();
  moments->add_option("--seq", ma.seq, "q-sequence: cube | prime | one-minus-inv-sq | const:<v>");
  moments->add_option("--q", ma.q, "shorthand for --seq const:<v>");
  moments->add_option("--n", ma.ns, "operator indices (n >= 3)")->required()->delimiter(',');
  moments->add_option("--grid", ma.grid_count, "grid points on [0, 0.99]");
  moments->add_option("--slack", ma.slack, "violation slack for the exit code");

  AbelArgs aa;
  CLI::App* abel = app.add_subcommand("abel", "Abel transforms, density and classical-conditions checks");
  abel->add_option("--seq", aa.seq, "q-sequence")->required();
  abel->add_option("--target", aa.target, "induced sequence: inv-bracket | two-over-bracket | inv-n | const:<c>");
  abel->add_option("--ys", aa.ys, "y schedule (default 1 - 2^-m, m = 1..10)")->delimiter(',');
  abel->add_option("--check", aa.check, "extra check: classical");
  abel->add_flag("--density", aa.density, "natural density of the q_n = 0 index set");
  abel->add_option("--horizon", aa.horizon, "horizon for density / classical checks");

  KorovkinArgs ka;
  CLI::App* korovkin = app.add_subcommand("korovkin", "Abel error norms for f and the test functions");
  korovkin->add_option("--family", ka.family, "classical | q-mkz | durrmeyer")->required();
  korovkin->add_option("--seq", ka.seq, "q-sequence");
  korovkin->add_option("--q", ka.q, "shorthand for --seq const:<v>");
  korovkin->add_option("--f", ka.f, "function: e0 | e1 | e2 | sinpi | abshalf | const:<c>");
  korovkin->add_option("--ys", ka.ys, "y schedule (default 0.9,0.99)")->delimiter(',');
  korovkin->add_option("--grid", ka.grid_count, "grid points on [0, 0.99]; 1.0 is appended");
  korovkin->add_option("--threshold", ka.threshold, "require the final norm below this value");

  RateArgs ra;
  CLI::App* rate = app.add_subcommand("rate", "modulus-of-continuity rate bound 2 w(f, phi(y))");
  rate->add_option("--family", ra.family, "q-mkz | durrmeyer (classical allowed)")->required();
  rate->add_option("--seq", ra.seq, "q-sequence");
  rate->add_option("--q", ra.q, "shorthand for --seq const:<v>");
  rate->add_option("--f", ra.f, "function under test");
  rate->add_option("--ys", ra.ys, "y schedule (default 0.5,0.75,0.9)")->delimiter(',');
  rate->add_option("--grid", ra.grid_count, "grid points on [0, 0.99]; 1.0 is appended");
  rate->add_option("--mu", ra.mu, "gauge for lhs/mu ratios: 1-y | sqrt(1-y) | (1-y)^<p>");
  rate->add_option("--slack", ra.slack, "allowed negative margin for the exit code");

  CLI::App* sequences = app.add_subcommand("sequences", "list bundled q-sequences and functions");

  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*moments) return run_moments(g, ma);
    if (*abel) return run_abel(g, aa);
    if (*korovkin) return run_korovkin(g, ka);
    if (*rate) return run_rate(g, ra);
    if (*sequences) return run_sequences(g);
  } catch (const BudgetError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return kExitDeficit;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
