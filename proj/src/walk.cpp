#include "freeprod/walk.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <thread>
#include <unordered_map>

namespace freeprod {

namespace {

using WordMap = std::unordered_map<ReducedWord, double, ReducedWordHash>;

// Neumaier summation; merges in the word map add many terms of mixed size.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      carry += (sum - t) + x;
    else
      carry += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

std::int64_t word_length(const ReducedWord& u, const GroupContext& ctx) { return ctx.length(u); }

// Prefix trie over the words of one half, each node holding length
// histograms of its subtree split by the factor of the next letter. Right
// multiplying a word u by the whole half then costs one walk down the trie
// along the inverse of u's tail instead of one product per pair.
class PrefixTrie {
 public:
  PrefixTrie(std::size_t rank, std::size_t bins) : rank_(rank), bins_(bins) { add_node(); }

  void insert(const ReducedWord& v, std::int64_t length, double p) {
    const auto k = static_cast<std::size_t>(length);
    std::uint32_t node = 0;
    for (const auto& x : v.letters()) {
      nodes_[node].subtree[k] += p;
      nodes_[node].by_factor[x.factor * bins_ + k] += p;
      auto [it, fresh] = nodes_[node].children.try_emplace(x, 0);
      if (fresh) it->second = add_node();
      node = it->second;
    }
    nodes_[node].subtree[k] += p;
    nodes_[node].terminal[k] += p;
  }

  /// Adds p·P(ℓ(uv) = k) over v in the trie into acc[k].
  void right_convolve(const ReducedWord& u, std::int64_t length, double p,
                      std::vector<CompensatedSum>& acc, const GroupContext& ctx) const {
    std::uint32_t node = 0;
    std::int64_t loss = 0;
    const std::size_t m = u.type_size();
    for (std::size_t j = 0;; ++j) {
      const auto& nd = nodes_[node];
      const std::int64_t shift = length - loss;
      add(nd.terminal.data(), shift, p, acc);
      if (j == m) {
        for (std::size_t f = 0; f < rank_; ++f) add(nd.by_factor.data() + f * bins_, shift, p, acc);
        return;
      }
      const auto& ul = u[m - 1 - j];
      for (std::size_t f = 0; f < rank_; ++f)
        if (f != ul.factor) add(nd.by_factor.data() + f * bins_, shift, p, acc);
      const auto& fac = ctx.factor(ul.factor);
      std::optional<std::pair<std::uint32_t, std::int64_t>> next;
      for (auto it = nd.children.lower_bound({ul.factor, std::numeric_limits<std::int64_t>::min()});
           it != nd.children.end() && it->first.factor == ul.factor; ++it) {
        const auto merged = fac.multiply(ul.code, it->first.code);
        const auto cut = fac.length(ul.code) + fac.length(it->first.code);
        if (fac.is_identity(merged))
          next = {it->second, cut};
        else
          add(nodes_[it->second].subtree.data(), shift - cut + fac.length(merged), p, acc);
      }
      if (!next) return;
      node = next->first;
      loss += next->second;
    }
  }

 private:
  struct Node {
    std::map<FactorElement, std::uint32_t> children;
    std::vector<double> subtree, terminal, by_factor;
  };

  std::uint32_t add_node() {
    Node nd;
    nd.subtree.assign(bins_, 0.0);
    nd.terminal.assign(bins_, 0.0);
    nd.by_factor.assign(rank_ * bins_, 0.0);
    nodes_.push_back(std::move(nd));
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  }

  void add(const double* hist, std::int64_t shift, double p, std::vector<CompensatedSum>& acc) const {
    for (std::size_t k = 0; k < bins_; ++k)
      if (hist[k] != 0.0) acc[static_cast<std::size_t>(shift + static_cast<std::int64_t>(k))].add(p * hist[k]);
  }

  std::size_t rank_, bins_;
  std::vector<Node> nodes_;
};

void right_multiply(std::vector<FactorElement>& y, std::int64_t& len, const ReducedWord& w,
                    const GroupContext& ctx) {
  for (const auto& x : w.letters()) {
    if (!y.empty() && y.back().factor == x.factor) {
      const auto& f = ctx.factor(x.factor);
      const auto merged = f.multiply(y.back().code, x.code);
      len -= f.length(y.back().code);
      y.pop_back();
      if (!f.is_identity(merged)) {
        y.push_back({x.factor, merged});
        len += f.length(merged);
      }
    } else {
      y.push_back(x);
      len += ctx.length(x);
    }
  }
}

// Evolves the word map one step at a time, handing each intermediate map to
// `visit(t, map)` for t = 0..steps.
template <typename Visit>
double evolve_word_map(const DrivingMeasure& mu, std::int64_t steps, const GroupContext& ctx,
                       double prune_threshold, std::size_t cap, Visit&& visit) {
  WordMap current{{ReducedWord{}, 1.0}};
  double pruned = 0.0;
  visit(std::int64_t{0}, current, pruned);
  for (std::int64_t t = 1; t <= steps; ++t) {
    std::unordered_map<ReducedWord, CompensatedSum, ReducedWordHash> next;
    next.reserve(current.size() * mu.support().size());
    for (const auto& [word, p] : current) {
      for (const auto& atom : mu.support()) {
        next[ctx.multiply(word, atom.word)].add(p * atom.probability);
        if (next.size() > cap)
          throw ResourceLimit("word map exceeded " + std::to_string(cap) + " live words at step " +
                                  std::to_string(t) + "; set a prune threshold or reduce n",
                              cap);
      }
    }
    current.clear();
    current.reserve(next.size());
    for (const auto& [word, acc] : next) {
      const double p = acc.value();
      if (prune_threshold > 0.0 && p < prune_threshold && !word.is_identity())
        pruned += p;
      else
        current.emplace(word, p);
    }
    visit(t, current, pruned);
  }
  return pruned;
}

void check_n(std::int64_t n) {
  if (n < 0) throw MalformedInput("step count must be non-negative");
}

}  // namespace

double LengthDistribution::probability(std::int64_t length) const {
  if (length < 0 || length >= static_cast<std::int64_t>(mass.size())) return 0.0;
  return mass[static_cast<std::size_t>(length)];
}

double LengthDistribution::total() const {
  CompensatedSum s;
  for (double p : mass) s.add(p);
  return s.value();
}

std::int64_t LengthDistribution::max_length() const {
  for (std::size_t k = mass.size(); k > 0; --k)
    if (mass[k - 1] > 0.0) return static_cast<std::int64_t>(k - 1);
  return 0;
}

double LengthDistribution::mean() const {
  CompensatedSum s;
  for (std::size_t k = 0; k < mass.size(); ++k) s.add(static_cast<double>(k) * mass[k]);
  return s.value();
}

double TrajectoryStats::frequency(std::int64_t length) const {
  if (sample_count == 0 || length < 0 || length >= static_cast<std::int64_t>(counts.size()))
    return 0.0;
  return static_cast<double>(counts[static_cast<std::size_t>(length)]) /
         static_cast<double>(sample_count);
}

double TrajectoryStats::mean_rate() const {
  if (sample_count == 0 || n == 0) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k)
    s += static_cast<double>(k) * static_cast<double>(counts[k]);
  return s / static_cast<double>(sample_count) / static_cast<double>(n);
}

double TrajectoryStats::rate_standard_error() const {
  if (sample_count < 2 || n == 0) return 0.0;
  const double m = mean_rate();
  double ss = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double d = static_cast<double>(k) / static_cast<double>(n) - m;
    ss += d * d * static_cast<double>(counts[k]);
  }
  const double var = ss / static_cast<double>(sample_count - 1);
  return std::sqrt(var / static_cast<double>(sample_count));
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t block_seed(std::uint64_t master_seed, std::uint64_t block) {
  return mix64(mix64(master_seed) ^ block);
}

StepSampler::StepSampler(const DrivingMeasure& mu) {
  double acc = 0.0;
  for (const auto& atom : mu.support()) {
    acc += atom.probability;
    cumulative_.push_back(acc);
  }
}

std::size_t StepSampler::operator()(std::mt19937_64& rng) const {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) return cumulative_.size() - 1;
  return static_cast<std::size_t>(it - cumulative_.begin());
}

std::vector<std::int64_t> sample_trajectory(const DrivingMeasure& mu, std::int64_t n,
                                            std::mt19937_64& rng, const GroupContext& ctx) {
  check_n(n);
  const StepSampler draw(mu);
  std::vector<FactorElement> y;
  std::int64_t len = 0;
  std::vector<std::int64_t> out{0};
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (std::int64_t t = 0; t < n; ++t) {
    right_multiply(y, len, mu.support()[draw(rng)].word, ctx);
    out.push_back(len);
  }
  return out;
}

TrajectoryStats monte_carlo_length_dist(const DrivingMeasure& mu, std::int64_t n,
                                        std::uint64_t samples, std::uint64_t master_seed,
                                        unsigned workers, const GroupContext& ctx) {
  check_n(n);
  if (samples == 0) throw MalformedInput("sample count must be at least 1");
  workers = std::max(1u, workers);
  const StepSampler draw(mu);
  const auto bins = static_cast<std::size_t>(n * mu.max_length(ctx)) + 1;
  const std::uint64_t blocks = (samples + kTrajectoryBlock - 1) / kTrajectoryBlock;
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, blocks));

  std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(bins, 0));
  auto run = [&](unsigned w) {
    const std::uint64_t first = blocks * w / workers;
    const std::uint64_t last = blocks * (w + 1) / workers;
    std::vector<FactorElement> y;
    for (std::uint64_t b = first; b < last; ++b) {
      std::mt19937_64 rng(block_seed(master_seed, b));
      const std::uint64_t begin = b * kTrajectoryBlock;
      const std::uint64_t end = std::min(samples, begin + kTrajectoryBlock);
      for (std::uint64_t i = begin; i < end; ++i) {
        y.clear();
        std::int64_t len = 0;
        for (std::int64_t t = 0; t < n; ++t) right_multiply(y, len, mu.support()[draw(rng)].word, ctx);
        ++partial[w][static_cast<std::size_t>(len)];
      }
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }

  TrajectoryStats stats;
  stats.n = n;
  stats.sample_count = samples;
  stats.seed = master_seed;
  stats.counts.assign(bins, 0);
  for (const auto& part : partial)
    for (std::size_t k = 0; k < bins; ++k) stats.counts[k] += part[k];
  return stats;
}

LengthDistribution exact_length_dist_bruteforce(const DrivingMeasure& mu, std::int64_t n,
                                                const GroupContext& ctx, double prune_threshold,
                                                std::size_t cap) {
  check_n(n);
  if (prune_threshold < 0.0) throw MalformedInput("prune threshold must be non-negative");
  const std::int64_t hi = (n + 1) / 2;
  const std::int64_t lo = n / 2;

  struct Entry {
    ReducedWord word;
    std::int64_t length;
    double p;
  };
  std::vector<Entry> upper, lower;
  double pruned_upper = 0.0, pruned_lower = 0.0;
  auto snapshot = [&](const WordMap& map, std::vector<Entry>& out) {
    out.clear();
    out.reserve(map.size());
    for (const auto& [word, p] : map) out.push_back({word, word_length(word, ctx), p});
    // Fixed order keeps the final sums reproducible.
    std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return a.word < b.word; });
  };
  evolve_word_map(mu, hi, ctx, prune_threshold, cap,
                  [&](std::int64_t t, const WordMap& map, double pruned) {
                    if (t == lo) {
                      snapshot(map, lower);
                      pruned_lower = pruned;
                    }
                    if (t == hi) {
                      snapshot(map, upper);
                      pruned_upper = pruned;
                    }
                  });

  LengthDistribution dist;
  dist.n = n;
  const auto bins = static_cast<std::size_t>(n * mu.max_length(ctx)) + 1;
  std::vector<CompensatedSum> acc(bins);
  PrefixTrie trie(ctx.rank(), static_cast<std::size_t>(lo * mu.max_length(ctx)) + 1);
  for (const auto& v : lower) trie.insert(v.word, v.length, v.p);
  for (const auto& u : upper) trie.right_convolve(u.word, u.length, u.p, acc, ctx);
  dist.mass.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) dist.mass[k] = acc[k].value();
  // Exactly the product mass of pairs with at least one pruned half.
  dist.pruned_mass = pruned_upper + pruned_lower - pruned_upper * pruned_lower;
  return dist;
}

std::vector<LengthDistribution> exact_length_dist_sequence(const DrivingMeasure& mu,
                                                           std::int64_t n_max,
                                                           const GroupContext& ctx,
                                                           double prune_threshold,
                                                           std::size_t cap) {
  check_n(n_max);
  if (prune_threshold < 0.0) throw MalformedInput("prune threshold must be non-negative");
  const auto step_max = mu.max_length(ctx);
  std::vector<LengthDistribution> out;
  evolve_word_map(mu, n_max, ctx, prune_threshold, cap,
                  [&](std::int64_t t, const WordMap& map, double pruned) {
                    std::vector<CompensatedSum> acc(static_cast<std::size_t>(t * step_max) + 1);
                    std::vector<std::pair<ReducedWord, double>> sorted(map.begin(), map.end());
                    std::sort(sorted.begin(), sorted.end());
                    for (const auto& [word, p] : sorted)
                      acc[static_cast<std::size_t>(ctx.length(word))].add(p);
                    LengthDistribution d;
                    d.n = t;
                    d.pruned_mass = pruned;
                    for (const auto& a : acc) d.mass.push_back(a.value());
                    out.push_back(std::move(d));
                  });
  return out;
}

LengthDistribution srw_birth_death_dist(int r, std::int64_t n, double lazy) {
  check_n(n);
  if (r < 1) throw MalformedInput("rank must be at least 1");
  if (!(lazy >= 0.0 && lazy < 1.0)) throw MalformedInput("lazy probability must lie in [0, 1)");
  const double move = 1.0 - lazy;
  const double up = move * (2.0 * r - 1.0) / (2.0 * r);
  const double down = move / (2.0 * r);
  std::vector<double> w(static_cast<std::size_t>(n) + 2, 0.0), next(w.size(), 0.0);
  w[0] = 1.0;
  for (std::int64_t t = 0; t < n; ++t) {
    std::fill(next.begin(), next.end(), 0.0);
    next[0] += lazy * w[0];
    next[1] += move * w[0];
    for (std::int64_t k = 1; k <= t; ++k) {
      const auto i = static_cast<std::size_t>(k);
      next[i + 1] += up * w[i];
      next[i - 1] += down * w[i];
      next[i] += lazy * w[i];
    }
    std::swap(w, next);
  }
  LengthDistribution dist;
  dist.n = n;
  dist.mass.assign(w.begin(), w.begin() + n + 1);
  return dist;
}

BirthDeathChain::BirthDeathChain(int r, double lazy) {
  if (r < 1) throw MalformedInput("rank must be at least 1");
  if (!(lazy >= 0.0 && lazy < 1.0)) throw MalformedInput("lazy probability must lie in [0, 1)");
  const double move = 1.0 - lazy;
  up_ = move * (2.0 * r - 1.0) / (2.0 * r);
  down_ = move / (2.0 * r);
  stay_ = lazy;
  leave_zero_ = move;
  weight_ = {1.0};
}

void BirthDeathChain::step() {
  std::vector<double> next(weight_.size() + 1, 0.0);
  next[0] += stay_ * weight_[0];
  next[1] += leave_zero_ * weight_[0];
  for (std::size_t k = 1; k < weight_.size(); ++k) {
    next[k + 1] += up_ * weight_[k];
    next[k - 1] += down_ * weight_[k];
    next[k] += stay_ * weight_[k];
  }
  const double peak = *std::max_element(next.begin(), next.end());
  for (auto& x : next) x /= peak;
  log_scale_ += std::log(peak);
  weight_ = std::move(next);
  ++steps_;
}

double BirthDeathChain::log_probability(std::int64_t k) const {
  if (k < 0 || k >= static_cast<std::int64_t>(weight_.size()) ||
      weight_[static_cast<std::size_t>(k)] <= 0.0)
    return -std::numeric_limits<double>::infinity();
  return std::log(weight_[static_cast<std::size_t>(k)]) + log_scale_;
}

double return_probability(const DrivingMeasure& mu, std::int64_t n, const GroupContext& ctx,
                          std::size_t cap) {
  return exact_length_dist_bruteforce(mu, n, ctx, 0.0, cap).probability(0);
}

double SpectralRadiusEstimate::neg_log_estimate() const {
  return estimate > 0.0 ? -std::log(estimate) : std::numeric_limits<double>::infinity();
}

SpectralRadiusEstimate estimate_spectral_radius(const DrivingMeasure& mu, std::int64_t n_max,
                                                const GroupContext& ctx, std::size_t cap) {
  if (n_max < 2) throw MalformedInput("n_max must be at least 2");
  SpectralRadiusEstimate est;
  auto record = [&](std::int64_t t, double log_p) {
    if (t == 0 || t % 2 != 0) return;
    est.steps.push_back(t);
    est.values.push_back(std::exp(log_p / static_cast<double>(t)));
  };
  if (const auto shape = detect_simple_random_walk(mu, ctx)) {
    est.birth_death = true;
    BirthDeathChain chain(shape->rank, shape->lazy);
    while (chain.steps() < n_max) {
      chain.step();
      record(chain.steps(), chain.log_probability(0));
    }
  } else {
    evolve_word_map(mu, n_max, ctx, 0.0, cap, [&](std::int64_t t, const WordMap& map, double) {
      const auto it = map.find(ReducedWord{});
      record(t, it == map.end() ? -std::numeric_limits<double>::infinity() : std::log(it->second));
    });
  }
  est.estimate = est.values.empty() ? 0.0 : est.values.back();
  return est;
}

EscapeRateEstimate estimate_escape_rate(const DrivingMeasure& mu, std::int64_t n,
                                        std::uint64_t samples, std::uint64_t seed,
                                        const GroupContext& ctx, unsigned workers) {
  if (n < 1) throw MalformedInput("escape rate needs n >= 1");
  const auto stats = monte_carlo_length_dist(mu, n, samples, seed, workers, ctx);
  return {stats.mean_rate(), stats.rate_standard_error(), n, samples};
}

double total_variation(const LengthDistribution& exact, const TrajectoryStats& empirical) {
  const auto bins = std::max(exact.mass.size(), empirical.counts.size());
  double s = 0.0;
  for (std::size_t k = 0; k < bins; ++k) {
    const auto len = static_cast<std::int64_t>(k);
    s += std::abs(exact.probability(len) - empirical.frequency(len));
  }
  return 0.5 * s;
}

double total_variation(const LengthDistribution& a, const LengthDistribution& b) {
  const auto bins = std::max(a.mass.size(), b.mass.size());
  double s = 0.0;
  for (std::size_t k = 0; k < bins; ++k) {
    const auto len = static_cast<std::int64_t>(k);
    s += std::abs(a.probability(len) - b.probability(len));
  }
  return 0.5 * s;
}

void write_csv(std::ostream& os, const LengthDistribution& dist) {
  char buf[96];
  os << "length,probability,pruned_mass_bound\n";
  for (std::size_t k = 0; k < dist.mass.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g\n", k, dist.mass[k], dist.pruned_mass);
    os << buf;
  }
}

void write_csv(std::ostream& os, const TrajectoryStats& stats) {
  os << "length,count\n";
  for (std::size_t k = 0; k < stats.counts.size(); ++k) os << k << ',' << stats.counts[k] << '\n';
}

}  // namespace freeprod
