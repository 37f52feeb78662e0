#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "geolab/automorphic.hpp"
#include "geolab/cache.hpp"
#include "geolab/enumeration.hpp"
#include "geolab/graph.hpp"
#include "geolab/harness.hpp"
#include "geolab/periods.hpp"
#include "geolab/quadratic_classes.hpp"
#include "geolab/report.hpp"
#include "geolab/verify.hpp"

namespace fs = std::filesystem;
using namespace geolab;

namespace {

constexpr std::int64_t kMaxN = 100000;

struct RunConfig {
  std::int64_t N = 1000;
  std::string form = "delta";
  std::string maass_file;
  double tol = 1e-9;
  unsigned threads = 1;
  std::string cache_dir = "geolab-cache";
  std::string out;
  std::uint64_t seed = 1;
  std::string format = "csv";
};

// Exit code 2: a dependent step found no cache.
struct MissingCache : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CheckFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

unsigned worker_count(const RunConfig& c) {
  if (c.threads > 0) return c.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

AutomorphicForm make_form(const RunConfig& c) {
  if (!c.maass_file.empty()) return ingest_maass_coefficients(c.maass_file);
  if (c.form == "delta") return AutomorphicForm::delta(verify::delta_terms(c.N));
  if (c.form == "eisenstein") return AutomorphicForm::eisenstein(1.0, verify::delta_terms(c.N));
  if (c.form == "maass-odd") return ingest_maass_coefficients(bundled_maass_path(Parity::Odd));
  if (c.form == "maass-even") return ingest_maass_coefficients(bundled_maass_path(Parity::Even));
  if (c.form == "constant") return AutomorphicForm::constant(1.0);
  return AutomorphicForm::zero();
}

std::string form_name(const RunConfig& c) { return c.maass_file.empty() ? c.form : "file:" + c.maass_file; }

template <class T>
std::vector<T> load(const RunConfig& c, CacheKind kind, const std::function<std::vector<T>()>& recompute) {
  const fs::path path = cache_path(c.cache_dir, kind, c.N);
  std::vector<T> out;
  switch (read_cache(path, kind, c.N, out)) {
    case CacheStatus::Ok:
      return out;
    case CacheStatus::Missing:
      throw MissingCache("no " + std::string(to_string(kind)) + " cache at " + path.string() + "; run `geolab enumerate --N " +
                         std::to_string(c.N) + " --cache-dir " + c.cache_dir + "` first");
    case CacheStatus::Corrupt:
      break;
  }
  std::cerr << "geolab: " << path.string() << " failed its integrity check; recomputing\n";
  out = recompute();
  write_cache(path, kind, c.N, out);
  return out;
}

std::vector<DoubleCoset> load_cosets(const RunConfig& c) {
  return load<DoubleCoset>(c, CacheKind::Cosets, [&] { return enumerate_cosets(c.N); });
}

ClassTable load_classes(const RunConfig& c) {
  auto recs = load<ClassRecord>(c, CacheKind::Classes, [&] { return enumerate_class_table(c.N, worker_count(c)).classes; });
  return ClassTable(c.N, std::move(recs));
}

EdgeList load_edges(const RunConfig& c, const ClassTable& table) {
  EdgeList E;
  E.N = c.N;
  E.cosets = load_cosets(c);
  E.edges = load<EdgeRecord>(c, CacheKind::Edges, [&] { return enumerate_edges(c.N, table, worker_count(c)).edges; });
  E.build_degrees(table.size());
  return E;
}

void emit(const RunConfig& c, const std::string& name, const std::vector<Table>& tables) {
  std::ostringstream os;
  if (c.format == "json") {
    write_json(os, tables,
               {{"command", name}, {"N", std::to_string(c.N)}, {"form", form_name(c)}, {"tol", format_double(c.tol)},
                {"seed", std::to_string(c.seed)}});
  } else {
    write_csv(os, tables);
  }
  if (c.out.empty()) {
    std::cout << os.str();
    return;
  }
  fs::create_directories(c.out);
  const fs::path path = fs::path(c.out) / (name + (c.format == "json" ? ".json" : ".csv"));
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << os.str();
  if (!f) throw FormatError("cannot write " + path.string());
}

// ---------------------------------------------------------------------------

void run_enumerate(const RunConfig& c) {
  const unsigned th = worker_count(c);
  const auto cosets = enumerate_cosets(c.N);
  const ClassTable table = enumerate_class_table(c.N, th);
  const EdgeList E = enumerate_edges(c.N, table, th);
  write_cache(cache_path(c.cache_dir, CacheKind::Cosets, c.N), CacheKind::Cosets, c.N, cosets);
  write_cache(cache_path(c.cache_dir, CacheKind::Classes, c.N), CacheKind::Classes, c.N, table.classes);
  write_cache(cache_path(c.cache_dir, CacheKind::Edges, c.N), CacheKind::Edges, c.N, E.edges);
  Table t{"enumerate", 1, {"kind", "N", "records", "file"}, {}};
  t.add({"cosets", c.N, static_cast<std::int64_t>(cosets.size()), cache_path("", CacheKind::Cosets, c.N).string()});
  t.add({"classes", c.N, static_cast<std::int64_t>(table.size()), cache_path("", CacheKind::Classes, c.N).string()});
  t.add({"primitive_classes", c.N, static_cast<std::int64_t>(table.primitive_count()), ""});
  t.add({"edges", c.N, static_cast<std::int64_t>(E.edges.size()), cache_path("", CacheKind::Edges, c.N).string()});
  emit(c, "enumerate", {t});
}

void run_periods(const RunConfig& c, const std::string& kind) {
  const AutomorphicForm f = make_form(c);
  const unsigned th = worker_count(c);
  if (kind == "geodesic") {
    const ClassTable table = load_classes(c);
    std::vector<cplx> P(table.size());
    parallel_for(table.size(), th, [&](std::size_t i) { P[i] = geodesic_period(f, to_class(table.classes[i]), c.tol).value; });
    Table t{"geodesic_periods", 1, {"trace", "u", "A", "B", "C", "primitive", "length", "P_re", "P_im"}, {}};
    for (std::size_t i = 0; i < table.size(); ++i) {
      const auto& r = table.classes[i];
      t.add({r.trace, r.u, r.A, r.B, r.C, static_cast<std::int64_t>(r.primitive), length_from_trace(r.trace), P[i].real(),
             P[i].imag()});
    }
    emit(c, "periods_geodesic", {t});
    return;
  }
  const auto cosets = load_cosets(c);
  const auto first = coset_offsets(cosets, c.N);
  std::vector<cplx> L(cosets.size());
  parallel_for(static_cast<std::size_t>(c.N), th, [&](std::size_t ci) {
    const auto row = vertical_periods_for_denominator(f, static_cast<std::int64_t>(ci) + 1, c.tol);
    std::copy(row.begin(), row.end(), L.begin() + first[ci + 1]);
  });
  Table t{"vertical_periods", 1, {"c", "a", "L_re", "L_im"}, {}};
  for (std::size_t i = 0; i < cosets.size(); ++i) t.add({cosets[i].c, cosets[i].a_mod_c, L[i].real(), L[i].imag()});
  emit(c, "periods_vertical", {t});
}

void run_bridge(const RunConfig& c, std::size_t sample) {
  const AutomorphicForm f = make_form(c);
  const ClassTable table = load_classes(c);
  const EdgeList E = load_edges(c, table);
  const auto s = verify::bridge_sample(f, E, sample, c.seed, worker_count(c), c.tol);
  Table fit{"bridge_fit", 1, {"sign", "slope", "K0", "envelope_K", "held_out_max", "exceedances"}, {}};
  auto env = [](double q) { return 1.0 + std::pow(q, verify::kBridgeExponent); };
  for (double sign : {bridge_sign(f.weight()), -bridge_sign(f.weight())}) {
    const auto p = verify::bridge_protocol(s.ratio, verify::residual_moduli(s, sign, true), env);
    fit.add({sign, p.fit.slope, p.fit.K, p.K, p.worst, static_cast<std::int64_t>(p.exceed)});
  }
  emit(c, "bridge", {verify::bridge_table("bridge", s), fit});
}

void run_graph_stats(const RunConfig& c, int trials) {
  const ClassTable table = load_classes(c);
  const EdgeList E = load_edges(c, table);
  Table deg{"degree_law", 1,
            {"c", "cosets", "min_deg", "max_deg", "max_abs_E", "stated_bound", "corrected_bound", "stated_violations",
             "corrected_violations", "edge_mismatch"},
            {}};
  std::size_t corrected = 0, mismatch = 0;
  for (std::size_t i = 0; i < E.cosets.size();) {
    const std::int64_t cc = E.cosets[i].c;
    std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = 0, pv = 0, cv = 0, mm = 0, n = 0;
    double emax = 0.0;
    DegreeCheck d;
    for (; i < E.cosets.size() && E.cosets[i].c == cc; ++i, ++n) {
      d = degree_formula_check(E.cosets[i], c.N);
      lo = std::min(lo, d.deg);
      hi = std::max(hi, d.deg);
      emax = std::max(emax, std::abs(d.error_term));
      pv += !d.within_stated_bound;
      cv += !d.within_corrected_bound;
      mm += d.deg != static_cast<std::int64_t>(E.deg_x[i]);
    }
    corrected += static_cast<std::size_t>(cv);
    mismatch += static_cast<std::size_t>(mm);
    deg.add({cc, n, lo, hi, emax, d.stated_bound, d.corrected_bound, pv, cv, mm});
  }
  const BipartiteGraph G = graph_from_edges(E, table.size());
  std::vector<double> w(G.size(Side::X));
  for (std::size_t x = 0; x < w.size(); ++x) w[x] = G.degree(Side::X, x) > 0 ? 1.0 : 0.0;
  const FiniteMeasure mu = FiniteMeasure::normalized(w);
  const FiniteMeasure nu = g_transform(G, mu, worker_count(c));
  Table sw{"sandwich", 1, {"trial", "density", "lower", "value", "upper", "holds"}, {}};
  std::mt19937_64 rng(c.seed);
  std::size_t bad = 0;
  for (int k = 0; k < trials; ++k) {
    const double p = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    std::bernoulli_distribution in(p);
    std::vector<char> B(table.size());
    for (auto& b : B) b = in(rng);
    const Sandwich s = sandwich_check(G, mu, B, &nu);
    const bool ok = s.holds(verify::kSandwichTol);
    bad += !ok;
    sw.add({static_cast<std::int64_t>(k), p, s.lower, s.value, s.upper, static_cast<std::int64_t>(ok)});
  }
  emit(c, "graph_stats", {deg, sw});
  if (corrected || mismatch || bad)
    throw CheckFailed("graph-stats: " + std::to_string(corrected) + " corrected-bound violations, " + std::to_string(mismatch) +
                      " degree mismatches, " + std::to_string(bad) + " sandwich failures");
}

void add_summary(Table& t, const std::string& measure, const DistributionReport& d) {
  t.add({measure, d.N, static_cast<std::int64_t>(d.samples), d.mean_re, d.mean_im, d.var_re, d.var_im, d.C_hat, d.delta_f,
         d.scale, d.ks_real, d.ks_band.lo, d.ks_band.hi, d.ks_imag, d.ks_modulus, static_cast<std::int64_t>(d.degenerate)});
}

Table summary_table() {
  return {"distribution_summary", 1,
          {"measure", "N", "samples", "mean_re", "mean_im", "var_re", "var_im", "C_hat", "delta_f", "scale", "ks_real",
           "ks_band_lo", "ks_band_hi", "ks_imag", "ks_modulus", "degenerate"},
          {}};
}

Table histogram_table(const std::vector<std::pair<std::string, const Histogram*>>& hs) {
  Table t{"histogram", 1, {"measure", "bin_lo", "bin_hi", "mass"}, {}};
  for (const auto& [name, h] : hs) {
    const double width = (h->hi - h->lo) / static_cast<double>(h->mass.size());
    for (std::size_t b = 0; b < h->mass.size(); ++b)
      t.add({name, h->lo + width * static_cast<double>(b), h->lo + width * static_cast<double>(b + 1), h->mass[b]});
  }
  return t;
}

double frozen_C_hat(const RunConfig& c, const AutomorphicForm& f, double given) {
  if (given > 0.0) return given;
  return vertical_clt_report(f, c.N, 0, c.seed, c.tol, worker_count(c)).C_hat;
}

void run_distribution(const RunConfig& c, const std::string& kind, std::size_t samples, double C_hat) {
  const AutomorphicForm f = make_form(c);
  Table s = summary_table();
  if (kind == "vertical") {
    load_cosets(c);
    const DistributionReport d = vertical_clt_report(f, c.N, samples, c.seed, c.tol, worker_count(c), C_hat);
    add_summary(s, "vertical", d);
    emit(c, "distribution", {s, histogram_table({{"vertical", &d.histogram}})});
    return;
  }
  const ClassTable table = load_classes(c);
  const EdgeList E = load_edges(c, table);
  C_hat = frozen_C_hat(c, f, C_hat);
  const LiftedReport L = lifted_distribution_report(f, c.N, C_hat, c.tol, worker_count(c), c.seed, &table, &E);
  add_summary(s, "lifted", L.lifted);
  add_summary(s, "uniform", L.uniform);
  Table th{"lifted_thresholds", 1, {"a", "lifted", "uniform", "gaussian", "lower", "upper"}, {}};
  for (const auto& r : L.table) th.add({r.a, r.lifted, r.uniform, r.gaussian, r.sandwich.lower, r.sandwich.upper});
  Table meta{"lifted_window", 1, {"window_classes", "isolated_mass", "sandwich_violations"}, {}};
  meta.add({static_cast<std::int64_t>(L.window_classes), L.isolated_mass, static_cast<std::int64_t>(L.sandwich_violations)});
  emit(c, "distribution",
       {s, histogram_table({{"lifted", &L.lifted.histogram}, {"uniform", &L.uniform.histogram}}), th, meta});
}

void run_census(const RunConfig& c, const std::vector<double>& deltas, double C_hat) {
  const AutomorphicForm f = make_form(c);
  const ClassTable table = load_classes(c);
  C_hat = frozen_C_hat(c, f, C_hat);
  const auto P = primitive_class_periods(f, table, c.tol, worker_count(c));
  const NonvanishingReport r = small_period_census(P, c.N, C_hat, deltas);
  Table t{"census", 1,
          {"N", "classes", "C_hat", "delta", "threshold", "below", "above", "below_noise", "bound_shape", "zero_like"},
          {}};
  for (std::size_t j = 0; j < r.deltas.size(); ++j)
    t.add({r.N, static_cast<std::int64_t>(r.classes), r.C_hat, r.deltas[j], r.thresholds[j],
           static_cast<std::int64_t>(r.below[j]), static_cast<std::int64_t>(r.above[j]),
           static_cast<std::int64_t>(r.below_noise[j]), r.bound_shape[j],
           static_cast<std::int64_t>(r.indistinguishable_from_zero)});
  emit(c, "census", {t});
}

void run_waldspurger(const RunConfig& c, double X) {
  const AutomorphicForm f = make_form(c);
  const unsigned th = worker_count(c);
  Table t{"waldspurger", 1, {"D", "h", "t", "u", "lhs", "rhs", "difference", "some_period_nonzero"}, {}};
  std::size_t bad = 0;
  for (const auto& d : fundamental_discriminants_by_unit(X, th)) {
    const auto r = waldspurger_moment(f, d, c.tol, th);
    if (r.difference > std::max(verify::kPlancherelTol, 100.0 * c.tol) * std::max(1.0, r.rhs)) ++bad;
    t.add({static_cast<std::int64_t>(d.D), static_cast<std::int64_t>(r.h), d.epsilon.t.str(), d.epsilon.u.str(), r.lhs,
           r.rhs, r.difference, static_cast<std::int64_t>(r.some_period_nonzero)});
  }
  emit(c, "waldspurger", {t});
  if (bad) throw CheckFailed("waldspurger: " + std::to_string(bad) + " discriminants exceed the identity tolerance");
}

void run_verify(const RunConfig& c, bool override_N) {
  VerifyOptions o;
  o.threads = worker_count(c);
  o.seed = c.seed;
  o.N = override_N ? c.N : 0;
  std::vector<Table> tables;
  o.tables = &tables;
  std::size_t unexpected = 0;
  const auto results = run_acceptance(o, [&](const CriterionResult& r) {
    std::cout << result_line(r) << "\n";
    for (const auto& line : r.info) std::cout << "    " << line << "\n";
    std::cout.flush();
    if (!r.pass && !r.expected_failure) ++unexpected;
  });
  Table summary{"verify", 1, {"criterion", "name", "status", "detail"}, {}};
  for (const auto& r : results)
    summary.add({static_cast<std::int64_t>(r.id), r.name,
                 r.pass ? "PASS" : (r.expected_failure ? "FAIL (known)" : "FAIL"), r.detail});
  // Timings are left out of the tables so reruns stay byte-identical.
  tables.insert(tables.begin(), summary);
  if (!c.out.empty()) emit(c, "verify", tables);
  if (unexpected) throw CheckFailed("verify: " + std::to_string(unexpected) + " criteria failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geolab: closed geodesics, periods and class groups on the modular surface"};
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.set_config("--config", "", "key=value configuration file; flags override it");

  RunConfig c;
  app.add_option("--N", c.N, "trace / denominator bound")->check(CLI::Range(std::int64_t{3}, kMaxN));
  app.add_option("--form", c.form, "built-in form")
      ->check(CLI::IsMember({"delta", "maass-odd", "maass-even", "eisenstein", "constant", "zero"}));
  app.add_option("--maass-file", c.maass_file, "Maass coefficient file (overrides --form)")->check(CLI::ExistingFile);
  app.add_option("--tol", c.tol, "absolute tolerance")->check(CLI::Range(1e-14, 1e-3));
  app.add_option("--threads", c.threads, "worker threads (0: all cores)");
  app.add_option("--cache-dir", c.cache_dir, "enumeration cache directory")->envname("GEOLAB_CACHE");
  app.add_option("--out", c.out, "output directory (default: stdout)");
  app.add_option("--seed", c.seed, "random seed");
  app.add_option("--format", c.format, "report format")->check(CLI::IsMember({"csv", "json"}));

  auto* enumerate = app.add_subcommand("enumerate", "enumerate cosets, classes and edges into the cache");

  std::string period_kind = "geodesic";
  auto* periods = app.add_subcommand("periods", "geodesic or vertical periods for every class or coset");
  periods->add_option("--kind", period_kind, "period type")->check(CLI::IsMember({"geodesic", "vertical"}));

  std::size_t sample = 500;
  auto* bridge = app.add_subcommand("bridge", "geodesic vs vertical residual table over sampled edges");
  bridge->add_option("--sample", sample, "number of edges")->check(CLI::PositiveNumber);

  int trials = 100;
  auto* graph = app.add_subcommand("graph-stats", "degree law and sandwich checks on G_N");
  graph->add_option("--trials", trials, "random subsets B")->check(CLI::PositiveNumber);

  std::string dist_kind = "vertical";
  std::size_t dist_samples = 0;
  double C_hat = 0.0;
  auto* dist = app.add_subcommand("distribution", "CLT report of standardized periods");
  dist->add_option("--kind", dist_kind, "vertical periods or mu'-weighted geodesic periods")
      ->check(CLI::IsMember({"vertical", "lifted"}));
  dist->add_option("--samples", dist_samples, "vertical sample size (0: every coset)");
  dist->add_option("--C-hat", C_hat, "frozen normalization constant (0: estimate from vertical periods)");

  std::vector<double> deltas = {0.1, 0.25, 0.5, 1.0};
  auto* census = app.add_subcommand("census", "counts of small geodesic periods");
  census->add_option("--delta", deltas, "exponents delta")->delimiter(',');
  census->add_option("--C-hat", C_hat, "frozen normalization constant (0: estimate from vertical periods)");

  double X = 50.0;
  auto* wald = app.add_subcommand("waldspurger", "per-discriminant Plancherel identity for eps_D <= X");
  wald->add_option("--X", X, "unit bound")->check(CLI::Range(1.7, 1e6));

  std::string suite = "primary";
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--suite", suite, "suite name")->check(CLI::IsMember({"primary"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*enumerate) run_enumerate(c);
    else if (*periods) run_periods(c, period_kind);
    else if (*bridge) run_bridge(c, sample);
    else if (*graph) run_graph_stats(c, trials);
    else if (*dist) run_distribution(c, dist_kind, dist_samples, C_hat);
    else if (*census) run_census(c, deltas, C_hat);
    else if (*wald) run_waldspurger(c, X);
    else if (*verify) run_verify(c, app.count("--N") > 0);
  } catch (const MissingCache& e) {
    std::cerr << "geolab: " << e.what() << "\n";
    return 2;
  } catch (const CheckFailed& e) {
    std::cerr << "geolab: " << e.what() << "\n";
    return 1;
  } catch (const PreconditionError& e) {
    std::cerr << "geolab: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "geolab: " << e.what() << "\n";
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "geolab: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
