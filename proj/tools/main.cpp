// hoqtt command line: precompute prototype tables, evaluate oscillatory
// integrals against them, and emit rank/convergence reports as CSV.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "hoqtt/integrator.hpp"
#include "hoqtt/interpolation.hpp"
#include "hoqtt/prototype_table.hpp"
#include "hoqtt/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hoqtt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// run manifests: key = value lines next to each file output; `argv_tab`
// holds the tab-separated argument vector so `hoqtt rerun` can replay it.

struct Manifest {
  std::vector<std::pair<std::string, std::string>> kv;

  void add(const std::string& k, const std::string& v) { kv.emplace_back(k, v); }
  void add(const std::string& k, double v) { kv.emplace_back(k, fmt(v)); }

  void write(const fs::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
    if (!out) throw std::runtime_error("cannot write manifest " + path.string());
  }
};

std::string join_args_tab(const std::vector<std::string>& args) {
  std::string s;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += '\t';
    s += args[i];
  }
  return s;
}

fs::path resolve_table_path(const std::string& given) {
  fs::path p(given);
  if (fs::exists(p)) return p;
  if (p.is_relative()) {
    if (const char* dir = std::getenv("HOQTT_TABLE_DIR")) {
      fs::path alt = fs::path(dir) / p;
      if (fs::exists(alt)) return alt;
    }
  }
  throw std::invalid_argument("table file not found: " + given);
}

struct OscFlags {
  std::string expr;
  std::string kind = "phase";
  std::string basis = "cheb";
  int N = 8;
  int d = 1;

  OscillatorSpec spec() const {
    return OscillatorSpec(kind == "kernel" ? OscKind::Kernel : OscKind::Phase, expr);
  }
  BasisSpec basis_spec() const {
    BasisSpec b;
    if (basis == "cheb") b.kind = BasisKind::Chebyshev;
    else if (basis == "lagr") b.kind = BasisKind::Lagrange;
    else if (basis == "lagr-multi") b.kind = BasisKind::LagrangeMulti;
    else throw CLI::ValidationError("--basis must be cheb, lagr or lagr-multi");
    b.degree = N;
    b.dim = b.kind == BasisKind::LagrangeMulti ? d : 1;
    return b;
  }
};

void print_entry_table(const PrototypeTable& table) {
  std::printf("%-6s %-4s %-9s %-12s %-12s %-10s %-8s\n", "k", "part", "status",
              "eff_rank", "max_rank", "calls", "seconds");
  for (const auto& [key, e] : table.raw_entries()) {
    const char* part = key.second == 0 ? "R" : "I";
    const char* status = e.status == TableEntry::Status::Zero
                             ? "zero"
                             : (e.status == TableEntry::Status::Flagged ? "flagged"
                                                                        : "ok");
    if (e.tensor)
      std::printf("%-6u %-4s %-9s %-12.3f %-12d %-10llu %-8.2f\n", key.first, part,
                  status, e.report.effective_rank, e.tensor->max_rank(),
                  static_cast<unsigned long long>(e.report.oracle_calls),
                  e.build_seconds);
    else
      std::printf("%-6u %-4s %-9s %-12s %-12s %-10s %-8.2f\n", key.first, part,
                  status, "-", "-", "-", e.build_seconds);
  }
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::runtime_error("malformed number '" + s + "'");
  return v;
}

// f expression evaluator over x (1-D) or x1..xd (multi)
struct FunctionExpr {
  ExprPtr ast;
  CompiledExpr compiled;

  explicit FunctionExpr(const std::string& text) {
    ast = parse_expression(text);
    compiled = CompiledExpr(*ast);
  }
  double operator()(double x) const {
    Bindings b;
    b.x = x;
    b.x1 = x;
    return compiled(b);
  }
  double operator()(std::span<const double> y) const {
    Bindings b;
    if (y.size() > 0) b.x1 = y[0];
    if (y.size() > 1) b.x2 = y[1];
    if (y.size() > 2) b.x3 = y[2];
    return compiled(b);
  }
};

// ---------------------------------------------------------------------------

int cmd_precompute(const std::vector<std::string>& raw_args, const OscFlags& osc,
                   double wmin, double wmax, int L, double eps_cross,
                   std::optional<double> eps_r, const std::string& out, int jobs,
                   bool paper_quad, std::uint64_t seed, int max_rank) {
  auto t0 = std::chrono::steady_clock::now();
  FrequencyGrid grid(wmin, wmax, L, eps_r);
  OscillatorSpec spec = osc.spec();
  BasisSpec basis = osc.basis_spec();

  CrossConfig cross;
  cross.tolerance = eps_cross;
  cross.max_rank = max_rank;
  cross.seed = seed;

  QuadratureConfig quad = basis.dim > 1 ? QuadratureConfig::defaults_multi()
                                        : QuadratureConfig::defaults_1d();
  if (paper_quad) quad = QuadratureConfig::paper_preset(wmax);

  std::vector<std::string> failures;
  PrototypeTable table =
      precompute_table(spec, basis, grid, cross, quad, jobs, &failures);
  save_table(table, out);
  print_entry_table(table);
  double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("table: %s (%zu entries, %zu zero, %zu flagged, %.2f s)\n",
              out.c_str(), table.entry_count(), table.zero_count(),
              table.flagged_count(), wall);
  for (const std::string& f : failures)
    std::fprintf(stderr, "failure: %s\n", f.c_str());

  Manifest m;
  m.add("command", "precompute");
  m.add("tool_version", kVersion);
  m.add("osc", spec.text());
  m.add("kind", osc.kind);
  m.add("basis", osc.basis);
  m.add("N", static_cast<double>(osc.N));
  m.add("d", static_cast<double>(basis.dim));
  m.add("wmin", wmin);
  m.add("wmax", wmax);
  m.add("L", static_cast<double>(L));
  m.add("eps_cross", eps_cross);
  m.add("seed", std::to_string(seed));
  m.add("max_rank", static_cast<double>(max_rank));
  m.add("paper_quad", paper_quad ? "1" : "0");
  m.add("jobs", static_cast<double>(jobs));
  m.add("wall_clock_seconds", wall);
  m.add("output", out);
  m.add("argv_tab", join_args_tab(raw_args));
  m.write(out + ".manifest");
  return table.flagged_count() == 0 ? kExitOk : kExitNumerical;
}

int cmd_integrate(const std::vector<std::string>& raw_args,
                  const std::string& table_path, const std::string& f_text,
                  std::optional<double> omega, const std::string& omega_list,
                  const std::string& csv_out, std::optional<double> m0,
                  std::optional<double> rho) {
  PrototypeTable table = load_table(resolve_table_path(table_path));
  FunctionExpr f(f_text);

  std::vector<double> omegas;
  if (omega) omegas.push_back(*omega);
  if (!omega_list.empty()) {
    std::ifstream in(omega_list);
    if (!in) throw std::invalid_argument("cannot open omega list " + omega_list);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      omegas.push_back(parse_double(line));
    }
  }
  if (omegas.empty()) throw CLI::ValidationError("need --omega or --omega-list");

  std::ostream* out = &std::cout;
  std::ofstream csv;
  bool batch = omegas.size() > 1 || !csv_out.empty();
  if (!csv_out.empty()) {
    csv.open(csv_out, std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot write " + csv_out);
    out = &csv;
  }

  bool any_flagged = false;
  if (batch) *out << "omega,re,im,rounding_bound\n";
  for (double w : omegas) {
    IntegralResult r;
    if (table.oscillator().kind() == OscKind::Kernel)
      r = integrate_general(table, [&](double x) { return f(x); }, w);
    else if (table.basis().kind == BasisKind::LagrangeMulti)
      r = integrate_multi(table, [&](std::span<const double> y) { return f(y); }, w);
    else
      r = integrate_1d(table, [&](double x) { return f(x); }, w);
    any_flagged = any_flagged || r.flagged;
    if (batch) {
      *out << fmt(w) << ',' << fmt(r.value.real()) << ',' << fmt(r.value.imag())
           << ',' << fmt(r.rounding_bound) << "\n";
    } else {
      std::printf("value      = %s + %si\n", fmt(r.value.real()).c_str(),
                  fmt(r.value.imag()).c_str());
      std::printf("omega_used = %s\n", fmt(r.omega_rounded).c_str());
      std::printf("rounding_bound = %s\n", fmt(r.rounding_bound).c_str());
      if (m0 && rho) {
        double ib = 2.0 * bernstein_bound(*m0, *rho, table.basis().degree);
        std::printf("interpolation_bound = %s\n", fmt(ib).c_str());
      }
      if (r.flagged) std::printf("flagged = 1\n");
    }
  }

  if (!csv_out.empty()) {
    Manifest m;
    m.add("command", "integrate");
    m.add("tool_version", kVersion);
    m.add("table", table_path);
    m.add("f", f_text);
    m.add("count", static_cast<double>(omegas.size()));
    m.add("output", csv_out);
    m.add("argv_tab", join_args_tab(raw_args));
    m.write(csv_out + ".manifest");
  }
  return any_flagged ? kExitNumerical : kExitOk;
}

int cmd_convergence(const std::vector<std::string>& raw_args, const OscFlags& osc,
                    const std::string& f_text, const std::string& omegas_text,
                    int nmax, double wmin, double wmax, int L, double eps_cross,
                    const std::string& out_path, int jobs, std::uint64_t seed) {
  OscillatorSpec spec = osc.spec();
  if (spec.kind() != OscKind::Phase || spec.dimension() != 1)
    throw CLI::ValidationError("convergence: 1-D phase oscillators only");
  FunctionExpr f(f_text);

  std::vector<double> omegas;
  {
    std::stringstream ss(omegas_text);
    std::string item;
    while (std::getline(ss, item, ',')) omegas.push_back(parse_double(item));
  }
  if (omegas.empty()) throw CLI::ValidationError("--omegas must list frequencies");

  FrequencyGrid grid(wmin, wmax, L);
  BasisSpec basis{BasisKind::Chebyshev, nmax, 1};
  CrossConfig cross;
  cross.tolerance = eps_cross;
  cross.seed = seed;
  QuadratureConfig quad = QuadratureConfig::defaults_1d();
  PrototypeTable table = precompute_table(spec, basis, grid, cross, quad, jobs);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path, std::ios::trunc);
    if (!file) throw std::runtime_error("cannot write " + out_path);
    out = &file;
  }
  *out << "omega,omega_used,N,rel_error,abs_error,reference_below_1e-14\n";

  auto fx = [&](double x) { return f(x); };
  for (double w : omegas) {
    auto [idx, wr] = round_to_grid(w, grid);
    (void)idx;
    auto ref_r = oscillatory_entry(fx, spec, wr, Part::Real, quad);
    auto ref_i = oscillatory_entry(fx, spec, wr, Part::Imag, quad);
    std::complex<double> ref(ref_r.value, ref_i.value);
    for (int N = 0; N <= nmax; ++N) {
      IntegralResult r = integrate_1d_truncated(table, fx, wr, N);
      double abs_err = std::abs(r.value - ref);
      bool tiny = std::abs(ref) < 1e-14;
      double rel = tiny ? abs_err : abs_err / std::abs(ref);
      *out << fmt(w) << ',' << fmt(wr) << ',' << N << ',' << fmt(rel) << ','
           << fmt(abs_err) << ',' << (tiny ? 1 : 0) << "\n";
    }
  }

  if (!out_path.empty()) {
    Manifest m;
    m.add("command", "convergence");
    m.add("tool_version", kVersion);
    m.add("osc", spec.text());
    m.add("f", f_text);
    m.add("omegas", omegas_text);
    m.add("Nmax", static_cast<double>(nmax));
    m.add("wmin", wmin);
    m.add("wmax", wmax);
    m.add("L", static_cast<double>(L));
    m.add("eps_cross", eps_cross);
    m.add("seed", std::to_string(seed));
    m.add("output", out_path);
    m.add("argv_tab", join_args_tab(raw_args));
    m.write(out_path + ".manifest");
  }
  return kExitOk;
}

int cmd_ranks(const std::vector<std::string>& raw_args, const std::string& config,
              const std::string& out_path, std::uint64_t seed) {
  std::ifstream in(config);
  if (!in) throw std::invalid_argument("cannot open config " + config);
  json rows = json::parse(in);
  if (!rows.is_array()) throw std::runtime_error("ranks config must be a JSON array");

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path, std::ios::trunc);
    if (!file) throw std::runtime_error("cannot write " + out_path);
    out = &file;
  }
  *out << "osc,kind,basis,k,part,wmin,wmax,L,eps_cross,effective_rank,max_rank,"
          "oracle_calls,seconds,converged,error\n";

  for (const json& row : rows) {
    std::string osc_text = row.at("osc").get<std::string>();
    std::string kind = row.value("kind", std::string("phase"));
    std::string basis_name = row.value("basis", std::string("cheb"));
    int k = row.at("k").get<int>();
    std::string part_name = row.value("part", std::string("R"));
    double wmin = row.at("wmin").get<double>();
    double wmax = row.at("wmax").get<double>();
    int L = row.at("L").get<int>();
    double eps = row.value("eps_cross", 1e-11);
    int d = row.value("d", 1);
    int N = row.value("N", k);

    std::string err;
    double eff = 0.0, secs = 0.0;
    int max_rank = 0;
    std::uint64_t calls = 0;
    bool converged = false;
    try {
      OscFlags of;
      of.expr = osc_text;
      of.kind = kind;
      of.basis = basis_name;
      of.N = std::max(N, k);
      of.d = d;
      OscillatorSpec spec = of.spec();
      BasisSpec basis = of.basis_spec();
      FrequencyGrid grid(wmin, wmax, L);
      CrossConfig cross;
      cross.tolerance = eps;
      cross.seed = seed;
      QuadratureConfig quad = basis.dim > 1 ? QuadratureConfig::defaults_multi()
                                            : QuadratureConfig::defaults_1d();
      Part part = part_name == "I" ? Part::Imag : Part::Real;
      TableEntry e = precompute_prototype(spec, basis, static_cast<std::uint32_t>(k),
                                          part, grid, cross, quad);
      if (e.is_zero()) {
        err = "parity-zero";
      } else {
        eff = e.report.effective_rank;
        max_rank = e.tensor ? e.tensor->max_rank() : 0;
        calls = e.report.oracle_calls;
        converged = e.report.converged;
      }
      secs = e.build_seconds;
    } catch (const std::exception& ex) {
      err = ex.what();
    }
    *out << osc_text << ',' << kind << ',' << basis_name << ',' << k << ','
         << part_name << ',' << fmt(wmin) << ',' << fmt(wmax) << ',' << L << ','
         << fmt(eps) << ',' << fmt(eff) << ',' << max_rank << ',' << calls << ','
         << fmt(secs) << ',' << (converged ? 1 : 0) << ',' << err << "\n";
  }

  if (!out_path.empty()) {
    Manifest m;
    m.add("command", "ranks");
    m.add("tool_version", kVersion);
    m.add("config", config);
    m.add("seed", std::to_string(seed));
    m.add("output", out_path);
    m.add("argv_tab", join_args_tab(raw_args));
    m.write(out_path + ".manifest");
  }
  return kExitOk;
}


int cmd_diff(const std::string& path_a, const std::string& path_b, bool strict) {
  PrototypeTable a = load_table(resolve_table_path(path_a));
  PrototypeTable b = load_table(resolve_table_path(path_b));
  std::vector<std::string> diffs;
  if (!(a.grid() == b.grid())) diffs.push_back("grid");
  if (a.oscillator().text() != b.oscillator().text()) diffs.push_back("oscillator");
  if (a.basis().kind != b.basis().kind || a.basis().degree != b.basis().degree ||
      a.basis().dim != b.basis().dim)
    diffs.push_back("basis");
  if (a.eps_cross() != b.eps_cross()) diffs.push_back("eps_cross");
  if (strict && a.tool_version() != b.tool_version()) diffs.push_back("tool_version");
  if (a.entry_count() != b.entry_count()) {
    diffs.push_back("entry count");
  } else {
    for (const auto& [key, ea] : a.raw_entries()) {
      std::string tag = "entry k=" + std::to_string(key.first) +
                        (key.second == 0 ? "/R" : "/I");
      if (!b.has_entry(key.first, key.second == 0 ? Part::Real : Part::Imag)) {
        diffs.push_back(tag + " missing");
        continue;
      }
      const TableEntry& eb = b.entry(key.first, key.second == 0 ? Part::Real : Part::Imag);
      if (ea.status != eb.status || ea.tensor.has_value() != eb.tensor.has_value()) {
        diffs.push_back(tag + " status");
        continue;
      }
      if (ea.tensor) {
        if (ea.tensor->ranks() != eb.tensor->ranks()) {
          diffs.push_back(tag + " ranks");
          continue;
        }
        for (int nu = 0; nu < ea.tensor->length(); ++nu) {
          const auto& da = ea.tensor->cores()[nu].data;
          const auto& db = eb.tensor->cores()[nu].data;
          if (std::memcmp(da.data(), db.data(), da.size() * sizeof(double)) != 0) {
            diffs.push_back(tag + " cores");
            break;
          }
        }
        if (ea.report.oracle_calls != eb.report.oracle_calls ||
            ea.report.validation_error != eb.report.validation_error ||
            ea.report.sweeps != eb.report.sweeps)
          diffs.push_back(tag + " report");
      }
      if (strict && ea.build_seconds != eb.build_seconds)
        diffs.push_back(tag + " build_seconds");
    }
  }
  for (const std::string& d : diffs) std::printf("differs: %s\n", d.c_str());
  if (diffs.empty()) std::printf("tables identical%s\n", strict ? " (strict)" : "");
  return diffs.empty() ? kExitOk : kExitNumerical;
}

int dispatch(std::vector<std::string> args);

int cmd_rerun(const std::string& manifest_path, const std::string& out_override) {
  std::ifstream in(manifest_path);
  if (!in) throw std::invalid_argument("cannot open manifest " + manifest_path);
  std::string line, argv_tab;
  while (std::getline(in, line)) {
    auto pos = line.find(" = ");
    if (pos == std::string::npos) continue;
    if (line.substr(0, pos) == "argv_tab") argv_tab = line.substr(pos + 3);
  }
  if (argv_tab.empty()) throw std::runtime_error("manifest has no argv_tab entry");
  std::vector<std::string> args;
  std::stringstream ss(argv_tab);
  std::string item;
  while (std::getline(ss, item, '\t')) args.push_back(item);
  if (!out_override.empty()) {
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
      if (args[i] == "--out") args[i + 1] = out_override;
  }
  return dispatch(std::move(args));
}

int dispatch(std::vector<std::string> args) {
  CLI::App app{"precomputed QTT tables for highly oscillatory integrals"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  std::vector<std::string> raw_args = args;

  // precompute ---------------------------------------------------------------
  auto* pre = app.add_subcommand("precompute", "build and store a prototype table");
  OscFlags osc;
  double wmin = 0.0, wmax = 0.0, eps_cross = 1e-11;
  int L = 20, jobs = 1, max_rank = 64;
  std::optional<double> eps_r;
  std::string out;
  bool paper_quad = false;
  std::uint64_t seed = CrossConfig{}.seed;
  pre->add_option("--osc", osc.expr, "oscillator expression")->required();
  pre->add_option("--kind", osc.kind, "phase|kernel")
      ->check(CLI::IsMember({"phase", "kernel"}));
  pre->add_option("--basis", osc.basis, "cheb|lagr|lagr-multi")
      ->check(CLI::IsMember({"cheb", "lagr", "lagr-multi"}));
  pre->add_option("--N", osc.N, "basis degree")->required();
  pre->add_option("--d", osc.d, "dimension for lagr-multi");
  pre->add_option("--wmin", wmin)->required();
  pre->add_option("--wmax", wmax)->required();
  pre->add_option("--L", L, "grid level, 2^L points")->required();
  pre->add_option("--eps-cross", eps_cross, "cross tolerance");
  pre->add_option("--eps-r", eps_r, "target rounding error for the grid check");
  pre->add_option("--out", out, "output .qttp path")->required();
  pre->add_option("--jobs", jobs, "parallel entry builds");
  pre->add_option("--seed", seed, "cross seed");
  pre->add_option("--max-rank", max_rank);
  pre->add_flag("--paper-quad", paper_quad,
                "fixed omega_max subintervals (reproduction preset)");

  // integrate ------------------------------------------------------------------
  auto* integ = app.add_subcommand("integrate", "evaluate integrals from a table");
  std::string table_path, f_text = "1", omega_list, csv_out;
  std::optional<double> omega, m0, rho;
  integ->add_option("--table", table_path)->required();
  integ->add_option("--f", f_text, "smooth factor expression");
  integ->add_option("--omega", omega);
  integ->add_option("--omega-list", omega_list, "file with one omega per line");
  integ->add_option("--csv", csv_out, "write batch results to CSV");
  integ->add_option("--m0", m0, "Bernstein bound M0 (with --rho)");
  integ->add_option("--rho", rho, "Bernstein ellipse parameter");

  // convergence ----------------------------------------------------------------
  auto* conv = app.add_subcommand("convergence", "error vs interpolation degree");
  OscFlags cosc;
  std::string cf_text = "1", omegas_text, conv_out;
  int nmax = 20;
  double cwmin = 0.0, cwmax = 120.0, ceps = 1e-11;
  int cL = 20, cjobs = 1;
  std::uint64_t cseed = CrossConfig{}.seed;
  conv->add_option("--osc", cosc.expr)->required();
  conv->add_option("--f", cf_text)->required();
  conv->add_option("--omegas", omegas_text, "comma-separated list")->required();
  conv->add_option("--Nmax", nmax);
  conv->add_option("--wmin", cwmin);
  conv->add_option("--wmax", cwmax);
  conv->add_option("--L", cL);
  conv->add_option("--eps-cross", ceps);
  conv->add_option("--out", conv_out, "CSV output path");
  conv->add_option("--jobs", cjobs);
  conv->add_option("--seed", cseed);

  // ranks --------------------------------------------------------------------
  auto* ranks = app.add_subcommand("ranks", "effective ranks for configured cases");
  std::string ranks_config, ranks_out;
  std::uint64_t rseed = CrossConfig{}.seed;
  ranks->add_option("--config", ranks_config, "JSON array of cases")->required();
  ranks->add_option("--out", ranks_out, "CSV output path");
  ranks->add_option("--seed", rseed);

  // diff -----------------------------------------------------------------------
  auto* diff = app.add_subcommand("diff", "compare two tables (timings ignored)");
  std::string diff_a, diff_b;
  bool diff_strict = false;
  diff->add_option("--a", diff_a)->required();
  diff->add_option("--b", diff_b)->required();
  diff->add_flag("--strict", diff_strict, "also compare timings and tool version");

  // rerun ----------------------------------------------------------------------
  auto* rerun = app.add_subcommand("rerun", "replay a recorded manifest");
  std::string manifest_path, out_override;
  rerun->add_option("--manifest", manifest_path)->required();
  rerun->add_option("--out", out_override, "override the recorded output path");

  std::vector<std::string> cli_args(args.rbegin(), args.rend());
  app.parse(cli_args);

  if (pre->parsed())
    return cmd_precompute(raw_args, osc, wmin, wmax, L, eps_cross, eps_r, out,
                          jobs, paper_quad, seed, max_rank);
  if (integ->parsed())
    return cmd_integrate(raw_args, table_path, f_text, omega, omega_list, csv_out,
                         m0, rho);
  if (conv->parsed())
    return cmd_convergence(raw_args, cosc, cf_text, omegas_text, nmax, cwmin,
                           cwmax, cL, ceps, conv_out, cjobs, cseed);
  if (ranks->parsed()) return cmd_ranks(raw_args, ranks_config, ranks_out, rseed);
  if (diff->parsed()) return cmd_diff(diff_a, diff_b, diff_strict);
  if (rerun->parsed()) return cmd_rerun(manifest_path, out_override);
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return dispatch(std::move(args));
  } catch (const CLI::ParseError& e) {
    CLI::App dummy;
    int code = dummy.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const OutOfGridError&) {
    std::fprintf(stderr, "error: frequency outside precomputed grid\n");
    return kExitUsage;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
}
