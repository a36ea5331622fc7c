#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "freeprod/group.hpp"
#include "freeprod/measure.hpp"

namespace freeprod {

/// Law of ℓ(Y_n), stored densely over lengths 0..max.
struct LengthDistribution {
  std::int64_t n = 0;
  std::vector<double> mass;
  /// Upper bound on probability discarded by pruning.
  double pruned_mass = 0.0;

  double probability(std::int64_t length) const;
  double total() const;
  std::int64_t max_length() const;
  double mean() const;
};

struct TrajectoryStats {
  std::int64_t n = 0;
  std::uint64_t sample_count = 0;
  std::vector<std::uint64_t> counts;  // indexed by ℓ(Y_n)
  std::uint64_t seed = 0;

  double frequency(std::int64_t length) const;
  /// Mean of ℓ(Y_n)/n and its standard error.
  double mean_rate() const;
  double rate_standard_error() const;
};

/// Trajectories are grouped in blocks of this many indices; block b is driven
/// by an mt19937_64 seeded with block_seed(master, b). Workers take contiguous
/// runs of blocks, so the counts do not depend on the worker count.
inline constexpr std::uint64_t kTrajectoryBlock = 4096;

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t block_seed(std::uint64_t master_seed, std::uint64_t block);

/// Draws support indices of μ from raw 64-bit outputs.
class StepSampler {
 public:
  explicit StepSampler(const DrivingMeasure& mu);
  std::size_t operator()(std::mt19937_64& rng) const;

 private:
  std::vector<double> cumulative_;
};

/// ℓ(Y_0), …, ℓ(Y_n).
std::vector<std::int64_t> sample_trajectory(const DrivingMeasure& mu, std::int64_t n,
                                            std::mt19937_64& rng, const GroupContext& ctx);

TrajectoryStats monte_carlo_length_dist(const DrivingMeasure& mu, std::int64_t n,
                                        std::uint64_t samples, std::uint64_t master_seed,
                                        unsigned workers, const GroupContext& ctx);

/// Exact law by evolving the word map of Y_t. Entries below prune_threshold
/// are dropped (never the identity) and their mass is added to pruned_mass.
/// The map is evolved to ⌈n/2⌉ steps and Y_n is formed as a product of two
/// independent halves, so the live map stays near the square root of the
/// full support. Exceeding `cap` live words throws ResourceLimit.
LengthDistribution exact_length_dist_bruteforce(const DrivingMeasure& mu, std::int64_t n,
                                                const GroupContext& ctx,
                                                double prune_threshold = 0.0,
                                                std::size_t cap = kDefaultBallCap);

/// Laws of ℓ(Y_0), …, ℓ(Y_{n_max}) from a single step-by-step evolution of
/// the word map (no halving), with the same pruning and cap contract.
std::vector<LengthDistribution> exact_length_dist_sequence(const DrivingMeasure& mu,
                                                           std::int64_t n_max,
                                                           const GroupContext& ctx,
                                                           double prune_threshold = 0.0,
                                                           std::size_t cap = kDefaultBallCap);

/// Length chain of the simple random walk on the free group of rank r with
/// extra mass `lazy` at e. Exact law by the one-dimensional recursion.
LengthDistribution srw_birth_death_dist(int r, std::int64_t n, double lazy = 0.0);

/// Streaming form of the same recursion. Weights are rescaled every step and
/// the scale is tracked in log space, so tail masses never underflow.
class BirthDeathChain {
 public:
  BirthDeathChain(int r, double lazy);
  void step();
  std::int64_t steps() const { return steps_; }
  /// log P(ℓ(Y_t) = k); -inf when k is unreachable.
  double log_probability(std::int64_t k) const;

 private:
  double up_ = 0.0, down_ = 0.0, stay_ = 0.0, leave_zero_ = 0.0;
  std::vector<double> weight_;
  double log_scale_ = 0.0;
  std::int64_t steps_ = 0;
};

double return_probability(const DrivingMeasure& mu, std::int64_t n, const GroupContext& ctx,
                          std::size_t cap = kDefaultBallCap);

struct SpectralRadiusEstimate {
  std::vector<std::int64_t> steps;  // even n
  std::vector<double> values;       // P(Y_n = e)^(1/n)
  double estimate = 0.0;            // last value
  /// −log ρ̂, to be compared with I(0).
  double neg_log_estimate() const;
  bool birth_death = false;
};

/// Uses the birth–death chain when μ is a (lazy) simple random walk on a free
/// group, otherwise the word map, which limits n_max to what fits under cap.
SpectralRadiusEstimate estimate_spectral_radius(const DrivingMeasure& mu, std::int64_t n_max,
                                                const GroupContext& ctx,
                                                std::size_t cap = kDefaultBallCap);

struct EscapeRateEstimate {
  double rate = 0.0;
  double standard_error = 0.0;
  std::int64_t n = 0;
  std::uint64_t samples = 0;
};

EscapeRateEstimate estimate_escape_rate(const DrivingMeasure& mu, std::int64_t n,
                                        std::uint64_t samples, std::uint64_t seed,
                                        const GroupContext& ctx, unsigned workers = 1);

/// Total variation distance between an exact law and empirical frequencies.
double total_variation(const LengthDistribution& exact, const TrajectoryStats& empirical);
double total_variation(const LengthDistribution& a, const LengthDistribution& b);

/// CSV rows: length,probability,pruned_mass_bound (with header row).
void write_csv(std::ostream& os, const LengthDistribution& dist);
/// CSV rows: length,count (with header row).
void write_csv(std::ostream& os, const TrajectoryStats& stats);

}  // namespace freeprod
