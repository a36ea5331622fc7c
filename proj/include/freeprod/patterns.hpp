#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "freeprod/group.hpp"
#include "freeprod/measure.hpp"

namespace freeprod {

/// Raised when an input violates an operation's precondition (e.g. an
/// extraction is asked for with a set that does not avoid patterns).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PatternVerdict {
  bool avoiding = false;
  /// Reduced word of type size D that every member of type size >= 2 starts
  /// with, or ends with the inverse of. Present iff !avoiding.
  std::optional<ReducedWord> defeating_pattern;
  int type_size = 0;
};

/// Decides whether `set` avoids patterns of type size D.
///
/// Only members of type size >= 2 can witness avoidance. Each such member g,
/// with k = min(D, ⌊m/2⌋), is defeated by ω exactly when ω's first k letters
/// equal g's first k letters, or ω's last k letters equal the inverse of g's
/// last k letters. The search branches over that binary choice per member
/// (2^|set| leaves, so callers keep |set| small) and tests each consistent
/// assignment for completion to a reduced word.
PatternVerdict is_pattern_avoiding(std::span<const ReducedWord> set, int D, const GroupContext& ctx);

struct MinimalSubset {
  /// Indices into the input set of the smallest avoiding subset of size <= 3.
  std::optional<std::vector<std::size_t>> indices;
  bool whole_set_avoids = false;
};

MinimalSubset minimal_avoiding_subset(std::span<const ReducedWord> set, int D,
                                      const GroupContext& ctx);

struct ProbeElement {
  ReducedWord word;
  /// Number of support elements multiplied to reach `word` (so P(Y_t = g) > 0).
  int steps = 0;
  /// Indices into μ's support realizing the product.
  std::vector<std::size_t> factors;
};

struct ProbeResult {
  std::optional<std::vector<ProbeElement>> avoiding_set;
  std::size_t explored = 0;
  int depth_reached = 0;
};

/// Breadth-first search over products of at most `max_products` support
/// elements for an avoiding set of at most three elements. A failed probe is
/// evidence, not proof, of non-avoidance.
ProbeResult semigroup_pattern_probe(const DrivingMeasure& mu, int D, int max_products,
                                    const GroupContext& ctx, std::size_t element_cap = 200000);

struct WeightedEntry {
  ReducedWord word;
  double weight = 0.0;
};

struct WeightedSet {
  std::vector<WeightedEntry> entries;
  double total() const;
};

enum class ExtractionBranch {
  Empty,            // F was empty
  DistinctFactors,  // first/last letters in different factors at some level
  LongLetters,      // both edge letters longer than L: shift outside a conjugate
  ShortLetters,     // edge letters do not cancel: no shift needed
  InverseLetters,   // edge letters cancel down to depth D: pattern-avoiding shift
  Exhausted,        // palindromic-inverse class ran out of letters: shift
};

std::string to_string(ExtractionBranch branch);

struct ExtractionResult {
  WeightedSet subset;
  std::optional<ReducedWord> shift;
  /// Guaranteed length defect per multiplied element.
  std::int64_t order = 0;
  double weight_ratio = 1.0;
  ExtractionBranch branch = ExtractionBranch::Empty;
  int level = 0;
  std::int64_t max_pattern_length = 0;  // L
  int pattern_type_size = 0;            // D
  std::int64_t theta = 1;               // θ_T with T = max length in F
  std::size_t rank = 0;

  /// (r·θ_T)^(−2D).
  double weight_bound() const;
  /// 2·L·D.
  std::int64_t defect_bound() const { return 2 * max_pattern_length * pattern_type_size; }
};

/// Selects A ⊂ F on which length is additive up to a bounded defect per
/// element, possibly after right-multiplying every element by a shift g ∈ T.
/// Each refinement keeps the heaviest class, so the retained weight fraction
/// is at least (r·θ_T)^(−2D).
ExtractionResult extract_weakly_additive(const WeightedSet& F, std::span<const ReducedWord> avoiding,
                                         int D, const GroupContext& ctx);

struct AdditivityReport {
  std::int64_t defect_bound = 0;  // 2LD per element
  std::int64_t order = 0;
  double worst_defect_per_factor = 0.0;
  std::size_t tuples_checked = 0;
  std::size_t failures = 0;
  std::size_t order_violations = 0;
  std::vector<bool> exhaustive;  // per k = 1..k_max
  bool passed() const { return failures == 0; }
};

/// Checks ℓ(g₁[g]⋯g_k[g]) >= Σℓ(g_i) − k·2LD for k = 1..k_max: exhaustively
/// when |A|^k <= exhaustive_cap, otherwise on `samples` random tuples.
AdditivityReport verify_weak_additivity(const ExtractionResult& result, int k_max,
                                        std::size_t samples, const GroupContext& ctx,
                                        std::uint64_t seed = 0x5eedULL,
                                        std::size_t exhaustive_cap = 1'000'000);

}  // namespace freeprod
