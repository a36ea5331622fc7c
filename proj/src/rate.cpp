#include "freeprod/rate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>

namespace freeprod {

namespace {

double xlogx(double t) { return t > 0.0 ? t * std::log(t) : 0.0; }

// log(e^a + e^b) without overflow.
double log_add(double a, double b) {
  if (a == -kInfinity) return b;
  if (b == -kInfinity) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

double closed_form_rate_srw_free(int r, double x) {
  if (r < 1) throw MalformedInput("rank must be at least 1");
  if (!(x >= 0.0)) throw MalformedInput("rate function argument must be non-negative");
  if (x > 1.0) return kInfinity;
  const double value = 0.5 * xlogx(1.0 + x) + 0.5 * xlogx(1.0 - x) + std::log(static_cast<double>(r)) -
                       0.5 * (1.0 + x) * std::log(2.0 * r - 1.0);
  return std::max(0.0, value);
}

std::string format_real(double v) {
  if (v == kInfinity) return "inf";
  if (v == -kInfinity) return "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string describe(const RatePoint& p) {
  switch (p.source) {
    case RateSource::ClosedForm:
      return "closed-form";
    case RateSource::Empirical:
      return "empirical(n=" + std::to_string(p.n) + " eps=" + format_real(p.epsilon) + ")";
    case RateSource::Legendre:
      return p.boundary ? "legendre(boundary)" : "legendre";
  }
  return "";
}

RateCurve closed_form_curve(int r, const std::vector<double>& xs) {
  RateCurve curve;
  for (double x : xs) curve.points.push_back({x, closed_form_rate_srw_free(r, x)});
  return curve;
}

RatePoint empirical_rate(const LengthDistribution& dist, double x, double epsilon) {
  if (!(epsilon > 0.0)) throw MalformedInput("epsilon must be positive");
  if (dist.n < 1) throw MalformedInput("empirical rate needs n >= 1");
  const double n = static_cast<double>(dist.n);
  const double tol = 1e-9 * n;
  const double lo = n * (x - epsilon) + tol;
  const double hi = n * (x + epsilon) - tol;
  double mass = 0.0;
  for (std::size_t k = 0; k < dist.mass.size(); ++k) {
    const double len = static_cast<double>(k);
    if (len > lo && len < hi) mass += dist.mass[k];
  }
  RatePoint p;
  p.x = x;
  p.source = RateSource::Empirical;
  p.n = dist.n;
  p.epsilon = epsilon;
  if (mass > 0.0) {
    p.value = std::max(0.0, -std::log(mass) / n);
    const double optimistic = std::max(0.0, -std::log(std::min(1.0, mass + dist.pruned_mass)) / n);
    p.error_bar = p.value - optimistic;
  } else {
    p.value = kInfinity;
    p.pruned_caveat = dist.pruned_mass > 0.0;
    p.error_bar = p.pruned_caveat ? kInfinity : 0.0;
  }
  return p;
}

RateCurve empirical_rate_curve(const LengthDistribution& dist, const std::vector<double>& xs,
                               double epsilon) {
  RateCurve curve;
  for (double x : xs) curve.points.push_back(empirical_rate(dist, x, epsilon));
  return curve;
}

std::vector<RateCurve> empirical_rate_curve(const DistributionProvider& provider,
                                            const std::vector<std::int64_t>& n_schedule,
                                            const std::vector<double>& xs, double epsilon) {
  std::vector<RateCurve> out;
  for (auto n : n_schedule) out.push_back(empirical_rate_curve(provider(n), xs, epsilon));
  return out;
}

std::vector<MgfTerm> LengthLaw::log_mgf_terms(double z, std::int64_t n_max) const {
  std::vector<MgfTerm> terms;
  const auto L = step_length();
  for (std::int64_t n = 1; n <= n_max; ++n) {
    const auto d = distribution(n);
    double a = -kInfinity;
    for (std::size_t k = 0; k < d.mass.size(); ++k)
      if (d.mass[k] > 0.0) a = log_add(a, z * static_cast<double>(k) + std::log(d.mass[k]));
    double upper = a;
    if (d.pruned_mass > 0.0) {
      const double worst = z > 0.0 ? z * static_cast<double>(n * L) : 0.0;
      upper = log_add(a, std::log(d.pruned_mass) + worst);
    }
    terms.push_back({n, a, upper});
  }
  return terms;
}

BirthDeathLaw::BirthDeathLaw(int r, double lazy) : r_(r), lazy_(lazy) {
  BirthDeathChain check(r, lazy);  // validates the parameters
}

LengthDistribution BirthDeathLaw::distribution(std::int64_t n) const {
  return srw_birth_death_dist(r_, n, lazy_);
}

std::vector<MgfTerm> BirthDeathLaw::log_mgf_terms(double z, std::int64_t n_max) const {
  // Weights carry the factor e^{z·k} of the current length k. They are kept
  // summing to one; each step's normalizer is folded into the next step.
  const double move = 1.0 - lazy_;
  const double up = move * (2.0 * r_ - 1.0) / (2.0 * r_) * std::exp(z);
  const double down = move / (2.0 * r_) * std::exp(-z);
  const double leave = move * std::exp(z);
  const auto size = static_cast<std::size_t>(n_max) + 2;
  std::vector<double> w(size, 0.0), next(size, 0.0);
  w[0] = 1.0;
  double log_scale = 0.0;
  double inv = 1.0;
  std::vector<MgfTerm> terms;
  terms.reserve(static_cast<std::size_t>(n_max));
  for (std::int64_t n = 1; n <= n_max; ++n) {
    const auto top = static_cast<std::size_t>(n);  // w is supported on 0..n−1
    const double s_up = up * inv, s_down = down * inv, s_stay = lazy_ * inv;
    // Entries of w beyond its support are zero, so no bounds cases are needed.
    // Weights below kTiny (relative to a unit total) are flushed to zero to
    // keep subnormals out of the loop; the effect on a_n is below n·kTiny.
    constexpr double kTiny = 1e-290;
    next[0] = s_stay * w[0] + s_down * w[1];
    next[1] = leave * inv * w[0] + s_stay * w[1] + s_down * w[2];
    double sum = next[0] + next[1];
    for (std::size_t k = 2; k <= top; ++k) {
      const double v = s_up * w[k - 1] + s_stay * w[k] + s_down * w[k + 1];
      next[k] = v < kTiny ? 0.0 : v;
      sum += next[k];
    }
    w.swap(next);
    log_scale += std::log(sum);
    inv = 1.0 / sum;
    terms.push_back({n, log_scale, log_scale});
  }
  return terms;
}

WordMapLaw::WordMapLaw(const DrivingMeasure& mu, std::int64_t n_max, const GroupContext& ctx,
                       double prune_threshold, std::size_t cap)
    : dists_(exact_length_dist_sequence(mu, n_max, ctx, prune_threshold, cap)),
      step_length_(mu.max_length(ctx)) {}

LengthDistribution WordMapLaw::distribution(std::int64_t n) const {
  if (n < 0 || n > n_max())
    throw MalformedInput("length law was evolved to n = " + std::to_string(n_max()) +
                         ", asked for n = " + std::to_string(n));
  return dists_[static_cast<std::size_t>(n)];
}

std::unique_ptr<LengthLaw> make_length_law(const DrivingMeasure& mu, const GroupContext& ctx,
                                           std::int64_t n_max, double prune_threshold,
                                           std::size_t cap) {
  if (const auto shape = detect_simple_random_walk(mu, ctx))
    return std::make_unique<BirthDeathLaw>(shape->rank, shape->lazy);
  return std::make_unique<WordMapLaw>(mu, n_max, ctx, prune_threshold, cap);
}

MgfBracket log_mgf_bracket(const LengthLaw& law, double z, std::int64_t n_max) {
  if (n_max < 1) throw MalformedInput("n_max must be at least 1");
  if (!std::isfinite(z)) throw MalformedInput("z must be finite");
  MgfBracket b;
  b.z = z;
  b.n_used = n_max;
  if (z == 0.0) return b;

  const auto terms = law.log_mgf_terms(z, n_max);
  const std::int64_t m = n_max / 2;
  const double a_m = m == 0 ? 0.0 : terms[static_cast<std::size_t>(m - 1)].a;
  const double a_n = terms.back().a;
  b.slope = (a_n - a_m) / static_cast<double>(n_max - m);

  if (z > 0.0) {
    b.fekete = kInfinity;
    for (const auto& t : terms) b.fekete = std::min(b.fekete, t.upper / static_cast<double>(t.n));
    b.upper = b.fekete;
    b.lower = std::isfinite(b.slope) ? 2.0 * b.slope - b.upper : 0.0;
    b.lower = std::clamp(b.lower, 0.0, b.upper);
  } else {
    b.fekete = -kInfinity;
    for (const auto& t : terms) b.fekete = std::max(b.fekete, t.a / static_cast<double>(t.n));
    b.lower = b.fekete;
    b.upper = std::isfinite(b.slope) ? 2.0 * b.slope - b.lower : 0.0;
    b.upper = std::clamp(b.upper, b.lower, 0.0);
  }
  return b;
}

const MgfBracket& BracketCache::operator()(double z) {
  auto it = cache_.find(z);
  if (it == cache_.end()) it = cache_.emplace(z, log_mgf_bracket(law_, z, n_max_)).first;
  return it->second;
}

RatePoint LegendreValue::as_point() const {
  RatePoint p;
  p.x = x;
  p.value = value;
  p.source = RateSource::Legendre;
  p.error_bar = error_bar;
  p.boundary = boundary;
  return p;
}

LegendreValue fenchel_legendre(const std::function<MgfBracket(double)>& bracket, double x,
                               const LegendreOptions& options) {
  if (!(x >= 0.0)) throw MalformedInput("Legendre transform is evaluated at x >= 0");
  if (!(options.z_min < options.z_max) || options.grid_points < 3)
    throw MalformedInput("z range needs z_min < z_max and at least 3 grid points");

  LegendreValue out;
  out.x = x;
  out.value = out.lower = out.upper = -kInfinity;
  auto evaluate = [&](double z) {
    const auto b = bracket(z);
    const double mid = z * x - b.midpoint();
    if (mid > out.value) {
      out.value = mid;
      out.z_star = z;
    }
    out.lower = std::max(out.lower, z * x - b.upper);
    out.upper = std::max(out.upper, z * x - b.lower);
    return mid;
  };

  const int g = options.grid_points;
  const double step = (options.z_max - options.z_min) / (g - 1);
  int best = 0;
  double best_value = -kInfinity;
  for (int i = 0; i < g; ++i) {
    const double v = evaluate(options.z_min + step * i);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  out.boundary = best == 0 || best == g - 1;

  // zx − Λ(z) is concave, so its maximum lies between the grid neighbours.
  double lo = options.z_min + step * std::max(0, best - 1);
  double hi = options.z_min + step * std::min(g - 1, best + 1);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - phi * (hi - lo), d = lo + phi * (hi - lo);
  double fc = evaluate(c), fd = evaluate(d);
  for (int it = 0; it < options.refinement; ++it) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - phi * (hi - lo);
      fc = evaluate(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + phi * (hi - lo);
      fd = evaluate(d);
    }
  }
  out.value = std::max(0.0, out.value);
  out.lower = std::max(0.0, out.lower);
  out.upper = std::max(out.value, out.upper);
  out.error_bar = std::max(out.value - out.lower, out.upper - out.value);
  return out;
}

ConsistencyReport consistency_report(const DrivingMeasure& mu, const GroupContext& ctx,
                                     const ConsistencyParams& params, std::size_t cap) {
  if (params.n < 2) throw MalformedInput("consistency report needs n >= 2");
  ConsistencyReport rep;
  rep.n = params.n;
  rep.epsilon = params.epsilon;
  rep.step_length = mu.max_length(ctx);
  const double L = static_cast<double>(rep.step_length);

  const auto law = make_length_law(mu, ctx, params.n, 0.0, cap);
  const auto dist = law->distribution(params.n);
  const double n = static_cast<double>(params.n);

  std::vector<double> xs = params.x_grid;
  if (xs.empty())
    for (int i = 0; 0.05 * i <= L + 1e-12; ++i) xs.push_back(0.05 * i);
  rep.curve = empirical_rate_curve(dist, xs, params.epsilon);

  rep.lambda_hat = dist.mean() / n;
  std::vector<std::int64_t> schedule = params.trend_schedule;
  if (schedule.empty()) schedule = {params.n / 8, params.n / 4, params.n / 2, params.n};
  std::set<std::int64_t> unique;
  for (auto m : schedule)
    if (m >= 1) unique.insert(m);
  rep.zero_trend_decreasing = true;
  for (auto m : unique) {
    const double v = empirical_rate(law->distribution(m), rep.lambda_hat, params.epsilon).value;
    if (!rep.zero_trend.empty() && v > rep.zero_trend.back().second + 1e-12)
      rep.zero_trend_decreasing = false;
    rep.zero_trend.emplace_back(m, v);
  }

  rep.rate_at_zero = empirical_rate(dist, 0.0, params.epsilon).value;
  const auto rho = estimate_spectral_radius(mu, params.rho_n_max > 0 ? params.rho_n_max : params.n,
                                            ctx, cap);
  rep.rho_hat = rho.estimate;
  rep.neg_log_rho = rho.neg_log_estimate();
  rep.zero_inequality_holds = rep.rate_at_zero <= rep.neg_log_rho + 1e-12;

  bool any = false;
  for (std::size_t k = 0; k < dist.mass.size(); ++k) {
    if (dist.mass[k] <= 0.0) continue;
    const double x = static_cast<double>(k) / n;
    if (!any) rep.support_min = x;
    rep.support_max = x;
    any = true;
  }
  rep.support_is_point = any && rep.support_min == rep.support_max;
  rep.support_within_bound = rep.support_min >= 0.0 && rep.support_max <= L + 1e-12;

  for (std::size_t i = 0; i < rep.curve.points.size(); ++i) {
    for (std::size_t j = i + 1; j < rep.curve.points.size(); ++j) {
      const auto& p1 = rep.curve.points[i];
      const auto& p2 = rep.curve.points[j];
      if (!std::isfinite(p1.value) || !std::isfinite(p2.value)) continue;
      const double mid = empirical_rate(dist, 0.5 * (p1.x + p2.x), params.epsilon).value;
      const double residual = std::max(0.0, mid - 0.5 * (p1.value + p2.value));
      if (residual > params.convexity_tolerance) rep.convexity.push_back({p1.x, p2.x, residual});
      rep.max_convexity_residual = std::max(rep.max_convexity_residual, residual);
    }
  }

  rep.tau = params.tau;
  rep.M = params.M > 0.0 ? params.M : 0.9 * L;
  double C = 0.0;
  for (const auto& atom : mu.support())
    C += atom.probability * std::exp(params.tau * static_cast<double>(ctx.length(atom.word)));
  rep.log_C = std::log(C);
  double tail = dist.pruned_mass;
  for (std::size_t k = 0; k < dist.mass.size(); ++k)
    if (static_cast<double>(k) > n * rep.M) tail += dist.mass[k];
  rep.tail_log_rate = tail > 0.0 ? std::log(tail) / n : -kInfinity;
  rep.markov_bound = rep.log_C - rep.tau * rep.M;
  rep.markov_holds = rep.tail_log_rate <= rep.markov_bound + 1e-12;
  return rep;
}

void write_csv(std::ostream& os, const RateCurve& curve) {
  os << "x,I,provenance,error_bar\n";
  for (const auto& p : curve.points)
    os << format_real(p.x) << ',' << format_real(p.value) << ',' << describe(p) << ','
       << format_real(p.error_bar) << '\n';
}

void write_csv(std::ostream& os, const std::vector<MgfBracket>& brackets) {
  os << "z,lower,upper,n_used\n";
  for (const auto& b : brackets)
    os << format_real(b.z) << ',' << format_real(b.lower) << ',' << format_real(b.upper) << ','
       << b.n_used << '\n';
}

}  // namespace freeprod
