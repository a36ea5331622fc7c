#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "freeprod/group.hpp"
#include "freeprod/measure.hpp"
#include "freeprod/walk.hpp"

namespace freeprod {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// I(x) for the simple random walk on the free group of rank r: finite on
/// [0, 1] with 0·log 0 = 0, +inf elsewhere.
double closed_form_rate_srw_free(int r, double x);

enum class RateSource { ClosedForm, Empirical, Legendre };

struct RatePoint {
  double x = 0.0;
  double value = 0.0;  // may be +inf
  RateSource source = RateSource::ClosedForm;
  /// Half-width of the uncertainty from pruning or bracket width.
  double error_bar = 0.0;
  std::int64_t n = 0;      // empirical only
  double epsilon = 0.0;    // empirical only
  bool pruned_caveat = false;  // +inf reported while pruned mass > 0
  bool boundary = false;       // Legendre sup hit the edge of the z range
};

struct RateCurve {
  std::vector<RatePoint> points;
};

std::string describe(const RatePoint& p);

RateCurve closed_form_curve(int r, const std::vector<double>& xs);

/// r_n(x) = −(1/n) log μ_n((n(x−ε), n(x+ε))) with the interval open.
RatePoint empirical_rate(const LengthDistribution& dist, double x, double epsilon);
RateCurve empirical_rate_curve(const LengthDistribution& dist, const std::vector<double>& xs,
                               double epsilon);

using DistributionProvider = std::function<LengthDistribution(std::int64_t n)>;

/// One curve per n in the schedule.
std::vector<RateCurve> empirical_rate_curve(const DistributionProvider& provider,
                                            const std::vector<std::int64_t>& n_schedule,
                                            const std::vector<double>& xs, double epsilon);

/// a_n(z) = log E[e^{z ℓ(Y_n)}] from the retained mass, and `upper` widened
/// by the worst placement of the pruned mass.
struct MgfTerm {
  std::int64_t n = 0;
  double a = 0.0;
  double upper = 0.0;
};

/// Source of the laws of ℓ(Y_n) for the MGF and rate computations.
class LengthLaw {
 public:
  virtual ~LengthLaw() = default;
  virtual LengthDistribution distribution(std::int64_t n) const = 0;
  /// L = max step length.
  virtual std::int64_t step_length() const = 0;
  /// Terms for n = 1..n_max. The default evaluates distribution(n) with a
  /// stable log-sum-exp.
  virtual std::vector<MgfTerm> log_mgf_terms(double z, std::int64_t n_max) const;
};

/// (Lazy) simple random walk on a free group; the MGF terms come from a tilted
/// birth–death recursion in O(n_max²) per z.
class BirthDeathLaw : public LengthLaw {
 public:
  BirthDeathLaw(int r, double lazy = 0.0);
  LengthDistribution distribution(std::int64_t n) const override;
  std::int64_t step_length() const override { return 1; }
  std::vector<MgfTerm> log_mgf_terms(double z, std::int64_t n_max) const override;

 private:
  int r_;
  double lazy_;
};

/// Any finitely supported μ, via one word-map evolution to n_max.
class WordMapLaw : public LengthLaw {
 public:
  WordMapLaw(const DrivingMeasure& mu, std::int64_t n_max, const GroupContext& ctx,
             double prune_threshold = 0.0, std::size_t cap = kDefaultBallCap);
  LengthDistribution distribution(std::int64_t n) const override;
  std::int64_t step_length() const override { return step_length_; }
  std::int64_t n_max() const { return static_cast<std::int64_t>(dists_.size()) - 1; }

 private:
  std::vector<LengthDistribution> dists_;
  std::int64_t step_length_ = 0;
};

/// Birth–death law when μ is a (lazy) SRW on a free group, else a word map
/// evolved to n_max.
std::unique_ptr<LengthLaw> make_length_law(const DrivingMeasure& mu, const GroupContext& ctx,
                                           std::int64_t n_max, double prune_threshold = 0.0,
                                           std::size_t cap = kDefaultBallCap);

struct MgfBracket {
  double z = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::int64_t n_used = 0;
  /// The rigorous side: inf a_n/n for z > 0 (an upper bound), sup a_n/n for
  /// z < 0 (a lower bound).
  double fekete = 0.0;
  /// (a_N − a_m)/(N − m) with m = ⌊N/2⌋.
  double slope = 0.0;
  double midpoint() const { return 0.5 * (lower + upper); }
  double width() const { return upper - lower; }
};

/// Fekete bound on one side; the facing side mirrors it through the slope
/// estimate, clipped so lower ≤ upper and to the sign of z.
MgfBracket log_mgf_bracket(const LengthLaw& law, double z, std::int64_t n_max);

/// Memoized z ↦ bracket.
class BracketCache {
 public:
  BracketCache(const LengthLaw& law, std::int64_t n_max) : law_(law), n_max_(n_max) {}
  const MgfBracket& operator()(double z);
  std::size_t size() const { return cache_.size(); }

 private:
  const LengthLaw& law_;
  std::int64_t n_max_;
  std::map<double, MgfBracket> cache_;
};

struct LegendreOptions {
  double z_min = -3.0;
  double z_max = 3.0;
  int grid_points = 25;
  int refinement = 24;  // golden-section iterations
};

struct LegendreValue {
  double x = 0.0;
  double value = 0.0;      // sup_z (zx − midpoint Λ(z))
  double lower = 0.0;      // sup_z (zx − upper Λ(z))
  double upper = 0.0;      // sup_z (zx − lower Λ(z))
  double error_bar = 0.0;  // max distance from value to lower/upper
  double z_star = 0.0;
  bool boundary = false;
  RatePoint as_point() const;
};

LegendreValue fenchel_legendre(const std::function<MgfBracket(double)>& bracket, double x,
                               const LegendreOptions& options = {});

struct ConsistencyParams {
  std::int64_t n = 2000;
  double epsilon = 0.02;
  std::vector<double> x_grid;            // empty: 0, 0.05, …, L_max
  std::vector<std::int64_t> trend_schedule;  // empty: n/8, n/4, n/2, n
  std::int64_t rho_n_max = 0;            // 0: same as n
  double tau = 1.0;
  double M = 0.0;                        // 0: L_max·0.9
  double convexity_tolerance = 1e-9;
};

struct ConvexityResidual {
  double x1 = 0.0, x2 = 0.0, residual = 0.0;
};

struct ConsistencyReport {
  std::int64_t n = 0;
  double epsilon = 0.0;
  // (i) rate at the empirical escape rate
  double lambda_hat = 0.0;
  std::vector<std::pair<std::int64_t, double>> zero_trend;
  bool zero_trend_decreasing = false;
  // (ii) I(0) against the spectral radius
  double rate_at_zero = 0.0;
  double rho_hat = 0.0;
  double neg_log_rho = 0.0;
  bool zero_inequality_holds = false;  // Î(0) ≤ −log ρ̂
  // (iii) empirical support
  double support_min = 0.0, support_max = 0.0;
  bool support_is_point = false;
  std::int64_t step_length = 0;
  bool support_within_bound = false;
  // (iv) midpoint convexity at the largest n
  std::vector<ConvexityResidual> convexity;
  double max_convexity_residual = 0.0;
  // (v) exponential tightness
  double tau = 0.0, M = 0.0, log_C = 0.0;
  double tail_log_rate = 0.0;  // (1/n) log P(ℓ(Y_n) > nM), -inf if zero
  double markov_bound = 0.0;   // log C − τM
  bool markov_holds = false;
  RateCurve curve;
};

ConsistencyReport consistency_report(const DrivingMeasure& mu, const GroupContext& ctx,
                                     const ConsistencyParams& params,
                                     std::size_t cap = kDefaultBallCap);

/// Formats a double as %.12g, with +inf as "inf".
std::string format_real(double v);

/// Columns x,I,provenance,error_bar.
void write_csv(std::ostream& os, const RateCurve& curve);
/// Columns z,lower,upper,n_used.
void write_csv(std::ostream& os, const std::vector<MgfBracket>& brackets);

}  // namespace freeprod
