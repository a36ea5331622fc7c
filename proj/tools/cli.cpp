#include "cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "config.hpp"
#include "freeprod/cone.hpp"
#include "freeprod/patterns.hpp"
#include "freeprod/rate.hpp"
#include "freeprod/walk.hpp"
#include "freeprod/word_io.hpp"

namespace freeprod::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::string out_dir = ".";
  bool emit_plot_data = false;
  std::size_t cap = kDefaultBallCap;
};

class Run {
 public:
  Run(const Flags& flags, Config cfg, std::ostream& out)
      : flags_(flags), cfg_(std::move(cfg)), hash_(config_hash(cfg_.raw)), out_(out) {}

  void execute();
  void write_manifest() const;

 private:
  const GroupContext& group() const {
    if (!cfg_.group) throw ConfigError("group: required by '" + flags_.command + "'");
    return *cfg_.group;
  }
  const DrivingMeasure& measure() const {
    if (!cfg_.measure) throw ConfigError("measure: required by '" + flags_.command + "'");
    return *cfg_.measure;
  }
  std::uint64_t seed() const {
    if (!flags_.seed) throw UsageError("--seed is required by '" + flags_.command + "'");
    return *flags_.seed;
  }

  // Writes `body` to out_dir/name behind a provenance comment line.
  void emit(const std::string& name, const std::string& body, const char* comment = "#");
  void emit_json(const std::string& name, Json body);
  void emit_plot(const std::string& name, const std::vector<std::pair<double, double>>& xy);

  void dist();
  void rate();
  void mgf();
  void legendre();
  void pattern();
  void extract();
  void automaton();
  void report();

  template <CayleyModel G>
  void automaton_for(const G& group, Params& p);

  const Flags& flags_;
  Config cfg_;
  std::string hash_;
  std::ostream& out_;
  std::vector<std::string> outputs_;
  Json results_ = Json::object();
};

std::string words_text(const std::vector<ReducedWord>& ws, const GroupContext& ctx) {
  std::string s;
  for (std::size_t i = 0; i < ws.size(); ++i) s += (i ? ", " : "") + format_word(ws[i], ctx);
  return s;
}

std::vector<ReducedWord> parse_words(const Json& list, const std::string& where, const GroupContext& ctx) {
  if (!list.is_array()) throw ConfigError(where + ": expected a list of words");
  std::vector<ReducedWord> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto here = where + "[" + std::to_string(i) + "]";
    if (!list[i].is_string()) throw ConfigError(here + ": expected a word string");
    try {
      out.push_back(parse_word(list[i].get<std::string>(), ctx));
    } catch (const MalformedInput& e) {
      throw ConfigError(here + ": " + e.what());
    }
  }
  return out;
}

Json real_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

void Run::emit(const std::string& name, const std::string& body, const char* comment) {
  const auto path = std::filesystem::path(flags_.out_dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << comment << " command=" << flags_.command << " config_hash=" << hash_ << '\n' << body;
  outputs_.push_back(name);
}

void Run::emit_json(const std::string& name, Json body) {
  Json j;
  j["provenance"] = {{"command", flags_.command}, {"config_hash", hash_}};
  for (auto& [k, v] : body.items()) j[k] = v;
  const auto path = std::filesystem::path(flags_.out_dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << j.dump(2) << '\n';
  outputs_.push_back(name);
}

void Run::emit_plot(const std::string& name, const std::vector<std::pair<double, double>>& xy) {
  if (!flags_.emit_plot_data) return;
  std::string body;
  for (const auto& [x, y] : xy) body += format_real(x) + ' ' + format_real(y) + '\n';
  emit(name, body);
}

void Run::execute() {
  static const std::map<std::string, void (Run::*)()> commands = {
      {"dist", &Run::dist},         {"rate", &Run::rate},         {"mgf", &Run::mgf},
      {"legendre", &Run::legendre}, {"pattern", &Run::pattern},   {"extract", &Run::extract},
      {"automaton", &Run::automaton}, {"report", &Run::report},
  };
  (this->*commands.at(flags_.command))();
  write_manifest();
}

void Run::dist() {
  Params p(cfg_.params, "dist");
  const auto n = p.integer("n");
  auto mode = p.text("mode", "auto");
  const auto samples = p.integer("samples", 100000);
  const double prune = p.real("prune", 0.0);
  p.finish();
  if (n < 0) throw ConfigError("params.n: expected n >= 0");
  const auto& mu = measure();
  const auto& ctx = group();
  if (mode == "auto") mode = detect_simple_random_walk(mu, ctx) ? "birth-death" : "bruteforce";

  std::ostringstream csv;
  std::vector<std::pair<double, double>> plot;
  if (mode == "monte-carlo") {
    if (samples < 1) throw ConfigError("params.samples: expected at least 1");
    const auto stats = monte_carlo_length_dist(mu, n, static_cast<std::uint64_t>(samples), seed(),
                                               flags_.workers, ctx);
    write_csv(csv, stats);
    for (std::size_t k = 0; k < stats.counts.size(); ++k)
      if (stats.counts[k]) plot.emplace_back(static_cast<double>(k), stats.frequency(static_cast<std::int64_t>(k)));
    results_["mean_length"] = stats.mean_rate() * static_cast<double>(n);
    results_["mean_rate"] = stats.mean_rate();
    results_["rate_standard_error"] = stats.rate_standard_error();
  } else {
    LengthDistribution d;
    if (mode == "birth-death") {
      const auto shape = detect_simple_random_walk(mu, ctx);
      if (!shape) throw Unsupported("birth-death mode needs a simple random walk on a free group");
      d = srw_birth_death_dist(shape->rank, n, shape->lazy);
    } else if (mode == "bruteforce") {
      d = exact_length_dist_bruteforce(mu, n, ctx, prune, flags_.cap);
    } else {
      throw ConfigError("params.mode: expected auto, bruteforce, birth-death or monte-carlo");
    }
    write_csv(csv, d);
    for (std::size_t k = 0; k < d.mass.size(); ++k)
      if (d.mass[k] > 0) plot.emplace_back(static_cast<double>(k), d.mass[k]);
    results_["mean_length"] = d.mean();
    results_["pruned_mass"] = d.pruned_mass;
  }
  results_["mode"] = mode;
  emit("dist.csv", csv.str());
  emit_plot("dist.dat", plot);
  out_ << "dist: n=" << n << " mode=" << mode << " mean length " << format_real(results_["mean_length"].get<double>())
       << '\n';
}

void Run::rate() {
  Params p(cfg_.params, "rate");
  const auto n = p.integer("n", 2000);
  const double eps = p.real("epsilon", 0.02);
  const auto& ctx = group();
  const auto& mu = measure();
  const double L = static_cast<double>(mu.max_length(ctx));
  const auto xs = p.grid("x", [&] {
    std::vector<double> g;
    for (int i = 0; 0.05 * i <= L + 1e-12; ++i) g.push_back(0.05 * i);
    return g;
  }());
  const auto schedule = p.integers("schedule", {n});
  const double prune = p.real("prune", 0.0);
  p.finish();
  std::int64_t n_max = 0;
  for (auto m : schedule) {
    if (m < 1) throw ConfigError("params.schedule: entries must be at least 1");
    n_max = std::max(n_max, m);
  }
  const auto law = make_length_law(mu, ctx, n_max, prune, flags_.cap);
  const auto curves = empirical_rate_curve([&](std::int64_t m) { return law->distribution(m); }, schedule, xs, eps);
  Json per_n = Json::array();
  for (std::size_t i = 0; i < curves.size(); ++i) {
    std::ostringstream csv;
    write_csv(csv, curves[i]);
    const auto name = "rate_n" + std::to_string(schedule[i]);
    emit(name + ".csv", csv.str());
    std::vector<std::pair<double, double>> plot;
    for (const auto& pt : curves[i].points)
      if (std::isfinite(pt.value)) plot.emplace_back(pt.x, pt.value);
    emit_plot(name + ".dat", plot);
    per_n.push_back({{"n", schedule[i]}, {"file", name + ".csv"}});
  }
  results_["curves"] = per_n;
  if (const auto shape = detect_simple_random_walk(mu, ctx); shape && shape->lazy == 0.0) {
    const auto closed = closed_form_curve(shape->rank, xs);
    std::ostringstream csv;
    write_csv(csv, closed);
    emit("rate_closed_form.csv", csv.str());
    std::vector<std::pair<double, double>> plot;
    for (const auto& pt : closed.points)
      if (std::isfinite(pt.value)) plot.emplace_back(pt.x, pt.value);
    emit_plot("rate_closed_form.dat", plot);
    double worst = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const auto& e = curves.back().points[i];
      const auto& c = closed.points[i];
      if (std::isfinite(e.value) && std::isfinite(c.value)) worst = std::max(worst, std::abs(e.value - c.value));
    }
    results_["max_deviation_from_closed_form"] = worst;
  }
  out_ << "rate: " << curves.size() << " curve(s), " << xs.size() << " points each\n";
}

void Run::mgf() {
  Params p(cfg_.params, "mgf");
  const auto n_max = p.integer("n_max", 2000);
  const auto zs = p.grid("z", [] {
    std::vector<double> g;
    for (int i = 0; i < 25; ++i) g.push_back(-3.0 + 0.25 * i);
    return g;
  }());
  const double prune = p.real("prune", 0.0);
  p.finish();
  const auto law = make_length_law(measure(), group(), n_max, prune, flags_.cap);
  std::vector<MgfBracket> brackets;
  std::vector<std::pair<double, double>> plot;
  double widest = 0;
  for (double z : zs) {
    brackets.push_back(log_mgf_bracket(*law, z, n_max));
    plot.emplace_back(z, brackets.back().midpoint());
    widest = std::max(widest, brackets.back().width());
  }
  std::ostringstream csv;
  write_csv(csv, brackets);
  emit("mgf.csv", csv.str());
  emit_plot("mgf.dat", plot);
  results_["max_bracket_width"] = widest;
  out_ << "mgf: " << zs.size() << " brackets, widest " << format_real(widest) << '\n';
}

void Run::legendre() {
  Params p(cfg_.params, "legendre");
  const auto n_max = p.integer("n_max", 2000);
  const auto& ctx = group();
  const auto& mu = measure();
  const double L = static_cast<double>(mu.max_length(ctx));
  const auto xs = p.grid("x", [&] {
    std::vector<double> g;
    for (int i = 0; 0.1 * i <= L + 1e-12; ++i) g.push_back(0.1 * i);
    return g;
  }());
  LegendreOptions opts;
  opts.z_min = p.real("z_min", opts.z_min);
  opts.z_max = p.real("z_max", opts.z_max);
  opts.grid_points = static_cast<int>(p.integer("grid_points", opts.grid_points));
  opts.refinement = static_cast<int>(p.integer("refinement", opts.refinement));
  const double prune = p.real("prune", 0.0);
  p.finish();
  const auto law = make_length_law(mu, ctx, n_max, prune, flags_.cap);
  BracketCache cache(*law, n_max);
  RateCurve curve;
  std::vector<std::pair<double, double>> plot;
  std::size_t boundary = 0;
  for (double x : xs) {
    const auto v = fenchel_legendre([&](double z) { return cache(z); }, x, opts);
    curve.points.push_back(v.as_point());
    if (v.boundary) ++boundary;
    if (std::isfinite(v.value)) plot.emplace_back(x, v.value);
  }
  std::ostringstream csv;
  write_csv(csv, curve);
  emit("legendre.csv", csv.str());
  emit_plot("legendre.dat", plot);
  results_["boundary_points"] = boundary;
  results_["brackets_evaluated"] = cache.size();
  out_ << "legendre: " << xs.size() << " points, " << boundary << " at the z-range boundary\n";
}

void Run::pattern() {
  Params p(cfg_.params, "pattern");
  const auto& ctx = group();
  Json report;
  Json sets = Json::array();
  if (p.has("sets")) {
    const auto& list = p.raw("sets");
    if (!list.is_array()) throw ConfigError("params.sets: expected a list");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto where = "params.sets[" + std::to_string(i) + "]";
      const auto& entry = list[i];
      if (!entry.is_object()) throw ConfigError(where + ": expected an object");
      for (const auto& [k, v] : entry.items())
        if (k != "words" && k != "D") throw ConfigError(where + ": unknown field '" + k + "'");
      if (!entry.contains("words")) throw ConfigError(where + ": missing field 'words'");
      const auto words = parse_words(entry.at("words"), where + ".words", ctx);
      const int D = entry.contains("D") && entry.at("D").is_number_integer() ? entry.at("D").get<int>() : -1;
      if (D < 1) throw ConfigError(where + ".D: expected an integer >= 1");
      const auto verdict = is_pattern_avoiding(words, D, ctx);
      Json s{{"words", entry.at("words")}, {"D", D}, {"avoiding", verdict.avoiding}};
      s["pattern"] = verdict.defeating_pattern ? Json(format_word(*verdict.defeating_pattern, ctx)) : Json(nullptr);
      if (words.size() <= 12) {
        const auto minimal = minimal_avoiding_subset(words, D, ctx);
        if (minimal.indices) {
          Json idx = Json::array();
          for (auto k : *minimal.indices) idx.push_back(format_word(words[k], ctx));
          s["minimal_subset"] = idx;
        } else {
          s["minimal_subset"] = nullptr;
        }
      }
      out_ << "pattern: {" << words_text(words, ctx) << "} D=" << D << ": "
           << (verdict.avoiding ? "avoiding" : "not avoiding");
      if (verdict.defeating_pattern) out_ << ", pattern " << format_word(*verdict.defeating_pattern, ctx);
      out_ << '\n';
      sets.push_back(s);
    }
  }
  report["sets"] = sets;
  if (p.has("probe")) {
    const auto& pr = p.raw("probe");
    if (!pr.is_object()) throw ConfigError("params.probe: expected an object");
    Params q(pr, "pattern probe");
    const int D = static_cast<int>(q.integer("D"));
    const int max_products = static_cast<int>(q.integer("max_products", 4));
    const auto element_cap = q.integer("element_cap", 200000);
    q.finish();
    const auto res = semigroup_pattern_probe(measure(), D, max_products, ctx, static_cast<std::size_t>(element_cap));
    Json probe{{"D", D}, {"max_products", max_products}, {"explored", res.explored},
               {"depth_reached", res.depth_reached}};
    if (res.avoiding_set) {
      Json elems = Json::array();
      for (const auto& e : *res.avoiding_set)
        elems.push_back({{"word", format_word(e.word, ctx)}, {"steps", e.steps}});
      probe["avoiding_set"] = elems;
    } else {
      probe["avoiding_set"] = nullptr;
    }
    out_ << "probe: " << (res.avoiding_set ? "found an avoiding set" : "no avoiding set found") << " after "
         << res.explored << " products\n";
    report["probe"] = probe;
  }
  p.finish();
  if (!report.contains("probe") && sets.empty()) throw ConfigError("params: 'pattern' needs 'sets' or 'probe'");
  results_ = report;
  emit_json("pattern.json", report);
}

void Run::extract() {
  Params p(cfg_.params, "extract");
  const auto& ctx = group();
  const auto& set = p.raw("set");
  if (!set.is_array()) throw ConfigError("params.set: expected a list of {word, weight}");
  WeightedSet F;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto where = "params.set[" + std::to_string(i) + "]";
    if (!set[i].is_object()) throw ConfigError(where + ": expected an object");
    Params e(set[i], "extract set entry");
    try {
      F.entries.push_back({parse_word(e.text("word"), ctx), e.real("weight", 1.0)});
    } catch (const ConfigError&) {
      throw;
    } catch (const MalformedInput& ex) {
      throw ConfigError(where + ".word: " + ex.what());
    }
    e.finish();
  }
  const auto avoiding = parse_words(p.raw("avoiding"), "params.avoiding", ctx);
  const int D = static_cast<int>(p.integer("D", 1));
  const int k_max = static_cast<int>(p.integer("k_max", 3));
  const auto samples = p.integer("samples", 1000);
  p.finish();
  const auto s = seed();
  const auto res = extract_weakly_additive(F, avoiding, D, ctx);
  const auto check = verify_weak_additivity(res, k_max, static_cast<std::size_t>(samples), ctx, s);
  Json subset = Json::array();
  for (const auto& e : res.subset.entries) subset.push_back({{"word", format_word(e.word, ctx)}, {"weight", e.weight}});
  results_ = {{"branch", to_string(res.branch)},
              {"level", res.level},
              {"shift", res.shift ? Json(format_word(*res.shift, ctx)) : Json(nullptr)},
              {"subset", subset},
              {"weight_ratio", res.weight_ratio},
              {"weight_bound", res.weight_bound()},
              {"order", res.order},
              {"defect_bound", res.defect_bound()},
              {"verification",
               {{"tuples_checked", check.tuples_checked},
                {"failures", check.failures},
                {"order_violations", check.order_violations},
                {"worst_defect_per_factor", check.worst_defect_per_factor},
                {"passed", check.passed()}}}};
  emit_json("extract.json", results_);
  out_ << "extract: branch " << to_string(res.branch) << ", kept " << res.subset.entries.size() << " of "
       << F.entries.size() << ", weight ratio " << format_real(res.weight_ratio) << " (bound "
       << format_real(res.weight_bound()) << "), verification " << (check.passed() ? "passed" : "FAILED") << '\n';
}

template <CayleyModel G>
void Run::automaton_for(const G& group, Params& p) {
  const double R = p.real("probe_radius", 3);
  const auto build = p.integer("build_radius", 6);
  const auto n_max = p.integer("n_max", 8);
  const auto c2_radius = p.integer("condition_two_radius", 4);
  p.finish();
  const auto A = build_automaton(group, R, build, flags_.cap);
  const auto scc = strongly_connected_components(A);
  const auto c2 = condition_two_check(A, c2_radius, flags_.cap);
  const auto spheres = sphere_sizes(A, n_max);
  const auto enumerated = enumerate_sphere_sizes(group, n_max, flags_.cap);

  std::ostringstream json, dot, csv;
  write_adjacency_json(json, view(A));
  write_dot(dot, view(A));
  csv << "n,geodesic_words,elements,enumerated\n";
  std::vector<std::pair<double, double>> plot;
  for (std::int64_t n = 0; n <= n_max; ++n) {
    const auto k = static_cast<std::size_t>(n);
    csv << n << ',' << spheres.geodesic_words[k] << ',' << spheres.elements[k] << ',' << enumerated[k] << '\n';
    plot.emplace_back(static_cast<double>(n), static_cast<double>(spheres.elements[k]));
  }
  auto adj = Json::parse(json.str());
  emit_json("automaton.json", adj);
  emit("automaton.dot", dot.str(), "//");
  emit("spheres.csv", csv.str());
  emit_plot("spheres.dat", plot);
  results_ = {{"states", A.size()},
              {"stabilized", A.stabilized},
              {"states_by_radius", A.states_by_radius},
              {"strongly_connected", scc.strongly_connected},
              {"non_initial_strongly_connected", scc.non_initial_strongly_connected},
              {"condition_two", c2.holds},
              {"spheres_match_enumeration", spheres.element_counts_exact && spheres.elements == enumerated}};
  out_ << "automaton: " << A.size() << " cone types" << (A.stabilized ? "" : " (not stabilized)")
       << ", SCC whole " << (scc.strongly_connected ? "yes" : "no") << ", SCC without C0 "
       << (scc.non_initial_strongly_connected ? "yes" : "no") << ", condition (2) " << (c2.holds ? "holds" : "fails")
       << '\n';
}

void Run::automaton() {
  Params p(cfg_.params, "automaton");
  if (cfg_.lattice_dimension) {
    automaton_for(LatticeGroup(*cfg_.lattice_dimension), p);
  } else {
    automaton_for(FreeProductCayley(group(), flags_.cap), p);
  }
}

void Run::report() {
  Params p(cfg_.params, "report");
  ConsistencyParams cp;
  cp.n = p.integer("n", cp.n);
  cp.epsilon = p.real("epsilon", cp.epsilon);
  cp.x_grid = p.grid("x", {});
  cp.trend_schedule = p.integers("schedule", {});
  cp.rho_n_max = p.integer("rho_n_max", 0);
  cp.tau = p.real("tau", cp.tau);
  cp.M = p.real("M", 0.0);
  p.finish();
  const auto r = consistency_report(measure(), group(), cp, flags_.cap);
  Json trend = Json::array();
  for (const auto& [n, v] : r.zero_trend) trend.push_back({{"n", n}, {"rate", real_json(v)}});
  Json convexity = Json::array();
  for (const auto& c : r.convexity) convexity.push_back({{"x1", c.x1}, {"x2", c.x2}, {"residual", real_json(c.residual)}});
  results_ = {
      {"n", r.n},
      {"epsilon", r.epsilon},
      {"escape_rate", {{"lambda_hat", r.lambda_hat}, {"zero_trend", trend}, {"decreasing", r.zero_trend_decreasing}}},
      {"spectral_radius",
       {{"rate_at_zero", real_json(r.rate_at_zero)},
        {"rho_hat", r.rho_hat},
        {"neg_log_rho", real_json(r.neg_log_rho)},
        {"inequality_holds", r.zero_inequality_holds}}},
      {"support",
       {{"min", r.support_min},
        {"max", r.support_max},
        {"is_point", r.support_is_point},
        {"step_length", r.step_length},
        {"within_bound", r.support_within_bound}}},
      {"convexity", {{"max_residual", real_json(r.max_convexity_residual)}, {"midpoints", convexity}}},
      {"tightness",
       {{"tau", r.tau},
        {"M", r.M},
        {"log_C", r.log_C},
        {"tail_log_rate", real_json(r.tail_log_rate)},
        {"markov_bound", real_json(r.markov_bound)},
        {"holds", r.markov_holds}}}};
  emit_json("report.json", results_);
  std::ostringstream csv;
  write_csv(csv, r.curve);
  emit("report_curve.csv", csv.str());
  out_ << "report: lambda " << format_real(r.lambda_hat) << ", I(0) " << format_real(r.rate_at_zero)
       << ", -log rho " << format_real(r.neg_log_rho) << '\n';
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void Run::write_manifest() const {
  Json m;
  m["command"] = flags_.command;
  m["config"] = flags_.config_path;
  m["config_hash"] = hash_;
  m["seed"] = flags_.seed ? Json(*flags_.seed) : Json(nullptr);
  m["workers"] = flags_.workers;
  m["cap"] = flags_.cap;
  m["version"] = kVersion;
#if defined(__clang__)
  m["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  m["compiler"] = std::string("gcc ") + __VERSION__;
#else
  m["compiler"] = "unknown";
#endif
  m["timestamp"] = utc_timestamp();
  m["outputs"] = outputs_;
  m["results"] = results_;
  std::ofstream f(std::filesystem::path(flags_.out_dir) / "manifest.json", std::ios::binary);
  if (!f) throw std::runtime_error("cannot write manifest.json");
  f << m.dump(2) << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Flags flags;
  CLI::App app{"Random walks on free products: length laws, rate functions, patterns and cone types", "freeprod"};
  app.add_option("command", flags.command, "dist | rate | mgf | legendre | pattern | extract | automaton | report")
      ->required()
      ->check(CLI::IsMember({"dist", "rate", "mgf", "legendre", "pattern", "extract", "automaton", "report"}));
  app.add_option("config", flags.config_path, "JSON experiment configuration")->required();
  app.add_option("--seed", flags.seed, "Master seed for randomized commands");
  app.add_option("--workers", flags.workers, "Monte Carlo worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("--out", flags.out_dir, "Output directory");
  app.add_flag("--emit-plot-data", flags.emit_plot_data, "Also write two-column .dat files");
  app.add_option("--cap", flags.cap, "Cap on live words and enumerated elements")->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return kUsage;
  }

  try {
    std::ifstream f(flags.config_path, std::ios::binary);
    if (!f) throw ConfigError("cannot read config '" + flags.config_path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    std::filesystem::create_directories(flags.out_dir);
    Run r(flags, parse_config(ss.str()), out);
    r.execute();
    return kOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ResourceLimit& e) {
    err << "resource limit: " << e.what() << '\n';
    return kResourceLimit;
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << '\n';
    return kPrecondition;
  } catch (const Unsupported& e) {
    err << "unsupported: " << e.what() << '\n';
    return kPrecondition;
  } catch (const MalformedInput& e) {
    err << "config error: " << e.what() << '\n';
    return kBadConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kBadConfig;
  }
}

}  // namespace freeprod::cli
