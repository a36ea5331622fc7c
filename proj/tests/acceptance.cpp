// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <thread>

#include "fixtures.hpp"
#include "freeprod/cone.hpp"
#include "freeprod/patterns.hpp"
#include "freeprod/rate.hpp"
#include "freeprod/walk.hpp"
#include "freeprod/word_io.hpp"

using namespace freeprod;
using freeprod::testing::w;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

unsigned workers() { return std::max(1u, std::min(8u, std::thread::hardware_concurrency())); }

Verdict pattern_verdicts() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const auto f3 = testing::free_group(3);
  auto words = [&](std::initializer_list<const char*> texts) {
    std::vector<ReducedWord> out;
    for (auto t : texts) out.push_back(w(f3, t));
    return out;
  };
  const std::vector<std::pair<std::string, std::vector<ReducedWord>>> avoiding = {
      {"T1", words({"a b", "b c"})},
      {"T2", words({"a c b", "a^3 b c a^-2"})},
      {"T3", words({"a b a^-1", "b a b^-1"})},
      {"{aba, a^2ba^2}", words({"a b a", "a^2 b a^2"})},
  };
  for (const auto& [name, set] : avoiding)
    v.require(is_pattern_avoiding(set, 1, f3).avoiding, name + " should avoid");
  const auto t4 = is_pattern_avoiding(words({"a b", "a c^2", "c a^-1"}), 1, f3);
  v.require(!t4.avoiding, "T4 should not avoid");
  v.require(t4.defeating_pattern && format_word(*t4.defeating_pattern, f3) == "a",
            "T4 defeating pattern should be a");
  const double dt = seconds_since(t0);
  v.require(dt < 1.0, "took " + fmt("%.3f s", dt));
  v.detail = "T1-T3 and {aba, a^2ba^2} avoiding, T4 defeated by " +
             (t4.defeating_pattern ? format_word(*t4.defeating_pattern, f3) : std::string("none")) + ", " +
             fmt("%.3f s", dt) + (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

Verdict oracle_equivalence() {
  Verdict v;
  double worst = 0;
  for (int r = 1; r <= 3; ++r) {
    const auto ctx = testing::free_group(r);
    for (double lazy : {0.0, 0.25}) {
      const auto mu = DrivingMeasure::simple_random_walk(ctx, lazy);
      for (std::int64_t n = 0; n <= 12; ++n) {
        const auto bd = srw_birth_death_dist(r, n, lazy);
        const auto bf = exact_length_dist_bruteforce(mu, n, ctx);
        const auto top = std::max(bd.max_length(), bf.max_length());
        for (std::int64_t k = 0; k <= top; ++k)
          worst = std::max(worst, std::abs(bd.probability(k) - bf.probability(k)));
      }
    }
  }
  v.require(worst <= 1e-12, "birth-death vs brute force " + fmt("%.3g", worst));

  const auto z23 = testing::cyclic_product(2, 3);
  const auto mu = DrivingMeasure::simple_random_walk(z23);
  const auto exact = exact_length_dist_bruteforce(mu, 30, z23);
  const auto mc = monte_carlo_length_dist(mu, 30, 100000, 1, workers(), z23);
  const double tv = total_variation(exact, mc);
  v.require(tv <= 0.01, "TV " + fmt("%.4g", tv));
  v.detail = "max |bd - bf| = " + fmt("%.3g", worst) + " over r=1..3, n<=12, lazy {0, 0.25}; Z/2*Z/3 TV(exact, MC) = " +
             fmt("%.4g", tv) + (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

Verdict rate_reproduction() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const auto dist = srw_birth_death_dist(2, 2000);
  double worst = 0;
  std::string values;
  for (double x : {0.2, 0.4, 0.5, 0.6, 0.8}) {
    const double rn = empirical_rate(dist, x, 0.02).value;
    const double I = closed_form_rate_srw_free(2, x);
    worst = std::max(worst, std::abs(rn - I));
    values += fmt(" r(%.1f)=", x) + fmt("%.5f", rn);
    if (x == 0.5) v.require(rn <= 0.01, "r_n(0.5) = " + fmt("%.4g", rn));
  }
  v.require(worst <= 0.02, "max deviation " + fmt("%.4g", worst));
  const double dt = seconds_since(t0);
  v.require(dt < 10.0, "took " + fmt("%.2f s", dt));
  v.detail = "max |r_n - I| = " + fmt("%.4g", worst) + values + ", " + fmt("%.2f s", dt) +
             (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

Verdict spectral_radius() {
  Verdict v;
  const auto f2 = testing::free_group(2);
  const auto mu = DrivingMeasure::simple_random_walk(f2);
  const auto rho = estimate_spectral_radius(mu, 2000, f2);
  const double I0 = empirical_rate(srw_birth_death_dist(2, 2000), 0.0, 0.02).value;
  v.require(std::abs(rho.estimate - 0.8660) <= 0.01, "rho_hat off by " + fmt("%.4g", rho.estimate - 0.8660));
  const double gap = std::abs(I0 - rho.neg_log_estimate());
  v.require(gap <= 0.02, "gap " + fmt("%.4g", gap));
  v.detail = "rho_hat = " + fmt("%.5f", rho.estimate) + ", I_hat(0) = " + fmt("%.5f", I0) +
             ", -log rho_hat = " + fmt("%.5f", rho.neg_log_estimate()) + ", gap " + fmt("%.4f", gap) +
             (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

Verdict legendre_pipeline() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const BirthDeathLaw law(2);
  BracketCache cache(law, 5000);
  const LegendreOptions opts;  // 25 grid points on [-3, 3]
  const auto zero = log_mgf_bracket(law, 0.0, 5000);
  v.require(zero.lower == 0.0 && zero.upper == 0.0, "Lambda(0) bracket not (0, 0)");
  double widest = 0;
  for (int i = 0; i < opts.grid_points; ++i) {
    const double z = opts.z_min + (opts.z_max - opts.z_min) * i / (opts.grid_points - 1);
    widest = std::max(widest, cache(z).width());
  }
  double worst = 0;
  for (double x : {0.2, 0.3, 0.5, 0.7, 0.8}) {
    const auto lv = fenchel_legendre([&](double z) { return cache(z); }, x, opts);
    const double I = closed_form_rate_srw_free(2, x);
    const double dev = std::abs(lv.value - I) + lv.error_bar;
    worst = std::max(worst, dev);
    if (lv.boundary) v.require(false, fmt("boundary hit at x=%.1f", x));
  }
  v.require(worst <= 0.02, "max deviation incl. error bar " + fmt("%.4g", worst));
  const double dt = seconds_since(t0);
  v.require(dt < 60.0, "took " + fmt("%.1f s", dt));
  v.detail = "max |I_hat - I| + error bar = " + fmt("%.3g", worst) + ", widest grid bracket " +
             fmt("%.3g", widest) + ", Lambda(0) = (" + fmt("%g", zero.lower) + ", " + fmt("%g", zero.upper) +
             "), " + fmt("%.1f s", dt) + (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

Verdict cone_automata() {
  Verdict v;
  const LatticeGroup Z2(2);
  const auto A = build_automaton(Z2, 3, 6);
  v.require(A.size() == 9, "Z^2 has " + std::to_string(A.size()) + " states");
  v.require(A.stabilized, "Z^2 build did not stabilize");
  const auto a_spheres = sphere_sizes(A, 8);
  v.require(a_spheres.elements == enumerate_sphere_sizes(Z2, 8), "Z^2 spheres differ from enumeration");

  const auto f2 = testing::free_group(2);
  const FreeProductCayley F(f2);
  const auto B = build_automaton(F, 3, 6);
  v.require(B.size() == 5, "F2 has " + std::to_string(B.size()) + " states");
  v.require(strongly_connected_components(B).non_initial_strongly_connected,
            "F2 non-initial states are not one SCC");
  const auto b_spheres = sphere_sizes(B, 8);
  v.require(b_spheres.elements == enumerate_sphere_sizes(F, 8), "F2 spheres differ from enumeration");
  for (std::size_t n = 1; n <= 8; ++n)
    v.require(b_spheres.elements[n] == 4 * static_cast<std::uint64_t>(std::pow(3, n - 1)),
              "F2 sphere " + std::to_string(n));
  v.detail = "Z^2: " + std::to_string(A.size()) + " states, F2: " + std::to_string(B.size()) +
             " states, spheres match enumeration for n <= 8" + (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

Verdict extraction_suite() {
  Verdict v;
  const auto f2 = testing::free_group(2);
  const std::vector<ReducedWord> T = {w(f2, "a b"), w(f2, "b a")};
  auto ball = f2.ball(8);
  ball.erase(std::remove_if(ball.begin(), ball.end(), [](const ReducedWord& g) { return g.is_identity(); }),
             ball.end());
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> size(1, 12), pick(0, ball.size() - 1);
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  std::size_t passed = 0, tuples = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::set<std::size_t> chosen;
    const auto k = size(rng);
    while (chosen.size() < k) chosen.insert(pick(rng));
    WeightedSet F;
    for (auto i : chosen) F.entries.push_back({ball[i], weight(rng)});
    const auto res = extract_weakly_additive(F, T, 1, f2);
    const auto m = res.subset.entries.size();
    // Pairs exhaustively; triples by 10^3 samples.
    const auto rep = verify_weak_additivity(res, 3, 1000, f2, rng(), m * m);
    tuples += rep.tuples_checked;
    if (res.weight_ratio >= res.weight_bound() && rep.passed()) ++passed;
  }
  v.require(passed == 200, std::to_string(200 - passed) + " sets failed");
  v.detail = std::to_string(passed) + "/200 sets within weight and defect bounds, " + std::to_string(tuples) +
             " tuples checked" + (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

Verdict degenerate_cases() {
  Verdict v;
  const auto f2 = testing::free_group(2);
  const auto point = DrivingMeasure::point_mass(w(f2, "a"));
  const double eps = 0.02;
  for (std::int64_t n : {1, 10, 100, 1000}) {
    const auto dist = exact_length_dist_bruteforce(point, n, f2);
    v.require(empirical_rate(dist, 1.0, eps).value == 0.0, "r_n(1) != 0 at n=" + std::to_string(n));
    for (int i = 0; i <= 100; ++i) {
      const double x = 0.02 * i;
      if (std::abs(x - 1.0) < eps) continue;  // the smoothing window still covers 1
      if (!std::isinf(empirical_rate(dist, x, eps).value))
        v.require(false, fmt("r_n(%.2f) finite", x) + " at n=" + std::to_string(n));
    }
  }
  ConsistencyParams cp;
  cp.n = 200;
  const auto rep = consistency_report(point, f2, cp);
  v.require(rep.support_is_point && rep.support_min == 1.0, "effective domain is not {1}");

  const auto mu = DrivingMeasure::simple_random_walk(f2);
  const auto est = estimate_escape_rate(mu, 500, 10000, 1, f2, workers());
  const double z = (est.rate - 0.5) / est.standard_error;
  const double exact_mean = srw_birth_death_dist(2, 500).mean() / 500.0;
  v.require(std::abs(z) <= 3.0, "escape rate " + fmt("%.3f SE", z) + " from 0.5");
  v.detail = "point mass domain {" + fmt("%g", rep.support_min) + "}, escape rate " + fmt("%.5f", est.rate) + " +- " +
             fmt("%.5f", est.standard_error) + " (" + fmt("%+.2f SE", z) + "); exact E[l(Y_500)]/500 = " +
             fmt("%.5f", exact_mean) + ", finite-n bias " + fmt("%.2f SE", (exact_mean - 0.5) / est.standard_error) +
             (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"pattern verdicts", pattern_verdicts},
      {"oracle equivalence", oracle_equivalence},
      {"rate function at n=2000", rate_reproduction},
      {"spectral radius vs I(0)", spectral_radius},
      {"Legendre pipeline", legendre_pipeline},
      {"cone automata", cone_automata},
      {"weak additivity extraction", extraction_suite},
      {"degenerate cases", degenerate_cases},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    if (!v.pass) ++failed;
    std::printf("%s %zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
