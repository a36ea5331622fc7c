#include "freeprod/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <unordered_set>

namespace freeprod {

namespace {

void check_setting(int D, const GroupContext& ctx) {
  if (ctx.rank() < 2) throw Unsupported("pattern avoidance needs at least two factors");
  if (D <= 0) throw MalformedInput("pattern type size D must be positive");
}

/// Completes a partial assignment of letters to a reduced word of type size
/// slots.size(), or returns nullopt when no completion exists.
std::optional<ReducedWord> complete_pattern(const std::vector<std::optional<FactorElement>>& slots,
                                            const GroupContext& ctx) {
  const std::size_t n = slots.size();
  const std::size_t r = ctx.rank();
  // reachable[p][f]: positions p.. can be completed with position p in factor f.
  std::vector<std::vector<char>> ok(n + 1, std::vector<char>(r, 0));
  auto allowed = [&](std::size_t p, std::size_t f) { return !slots[p] || slots[p]->factor == f; };
  for (std::size_t f = 0; f < r; ++f) ok[n - 1][f] = allowed(n - 1, f);
  for (std::size_t p = n - 1; p-- > 0;) {
    for (std::size_t f = 0; f < r; ++f) {
      if (!allowed(p, f)) continue;
      for (std::size_t g = 0; g < r && !ok[p][f]; ++g) ok[p][f] = g != f && ok[p + 1][g];
    }
  }
  std::vector<FactorElement> letters;
  std::optional<std::size_t> prev;
  for (std::size_t p = 0; p < n; ++p) {
    std::optional<std::size_t> chosen;
    for (std::size_t f = 0; f < r && !chosen; ++f)
      if (ok[p][f] && f != prev) chosen = f;
    if (!chosen) return std::nullopt;
    letters.push_back(slots[p] ? *slots[p] : FactorElement{*chosen, ctx.factor(*chosen).generators().front()});
    prev = chosen;
  }
  return ctx.from_reduced(std::move(letters));
}

struct Constraint {
  std::vector<FactorElement> prefix;  // fixes ω[0..k)
  std::vector<FactorElement> suffix;  // fixes ω[D−k..D)
};

Constraint constraint_for(const ReducedWord& g, int D, const GroupContext& ctx) {
  const std::size_t m = g.type_size();
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(D), m / 2);
  Constraint c;
  for (std::size_t i = 0; i < k; ++i) c.prefix.push_back(g[i]);
  // ends_with(g, ω⁻¹): g[m−k+j] = ω⁻¹[j] = ω[D−1−j]⁻¹.
  c.suffix.resize(k);
  for (std::size_t j = 0; j < k; ++j) c.suffix[k - 1 - j] = ctx.inverse(g[m - k + j]);
  return c;
}

bool assign(std::vector<std::optional<FactorElement>>& slots, std::size_t offset,
            const std::vector<FactorElement>& letters, std::vector<std::size_t>& touched) {
  for (std::size_t i = 0; i < letters.size(); ++i) {
    auto& slot = slots[offset + i];
    if (slot) {
      if (*slot != letters[i]) return false;
    } else {
      slot = letters[i];
      touched.push_back(offset + i);
    }
  }
  return true;
}

bool is_witness(const ReducedWord& g) { return g.type_size() >= 2; }

}  // namespace

PatternVerdict is_pattern_avoiding(std::span<const ReducedWord> set, int D, const GroupContext& ctx) {
  check_setting(D, ctx);
  std::vector<Constraint> constraints;
  for (const auto& g : set) {
    if (g.is_identity()) throw MalformedInput("pattern sets must not contain the identity");
    if (is_witness(g)) constraints.push_back(constraint_for(g, D, ctx));
  }

  const auto n = static_cast<std::size_t>(D);
  std::vector<std::optional<FactorElement>> slots(n);
  std::optional<ReducedWord> found;

  std::function<void(std::size_t)> search = [&](std::size_t j) {
    if (found) return;
    if (j == constraints.size()) {
      found = complete_pattern(slots, ctx);
      return;
    }
    const auto& c = constraints[j];
    for (int side = 0; side < 2 && !found; ++side) {
      std::vector<std::size_t> touched;
      const bool consistent = side == 0 ? assign(slots, 0, c.prefix, touched)
                                        : assign(slots, n - c.suffix.size(), c.suffix, touched);
      if (consistent) search(j + 1);
      for (auto p : touched) slots[p].reset();
    }
  };
  search(0);

  PatternVerdict verdict;
  verdict.type_size = D;
  verdict.avoiding = !found.has_value();
  verdict.defeating_pattern = std::move(found);
  return verdict;
}

MinimalSubset minimal_avoiding_subset(std::span<const ReducedWord> set, int D,
                                      const GroupContext& ctx) {
  check_setting(D, ctx);
  MinimalSubset result;
  const std::size_t n = set.size();
  std::vector<ReducedWord> pick;
  auto test = [&](std::vector<std::size_t> idx) {
    pick.clear();
    for (auto i : idx) pick.push_back(set[i]);
    if (is_pattern_avoiding(pick, D, ctx).avoiding) {
      result.indices = std::move(idx);
      return true;
    }
    return false;
  };
  bool done = false;
  for (std::size_t i = 0; i < n && !done; ++i) done = test({i});
  for (std::size_t i = 0; i < n && !done; ++i)
    for (std::size_t j = i + 1; j < n && !done; ++j) done = test({i, j});
  for (std::size_t i = 0; i < n && !done; ++i)
    for (std::size_t j = i + 1; j < n && !done; ++j)
      for (std::size_t k = j + 1; k < n && !done; ++k) done = test({i, j, k});
  result.whole_set_avoids = done || is_pattern_avoiding(set, D, ctx).avoiding;
  return result;
}

ProbeResult semigroup_pattern_probe(const DrivingMeasure& mu, int D, int max_products,
                                    const GroupContext& ctx, std::size_t element_cap) {
  check_setting(D, ctx);
  // Candidate subsets are drawn from the first kCandidates witnesses found.
  constexpr std::size_t kCandidates = 64;

  ProbeResult result;
  std::vector<ProbeElement> elements;
  std::unordered_set<ReducedWord, ReducedWordHash> seen;
  std::vector<std::size_t> frontier;  // indices into elements
  std::vector<std::size_t> candidates;

  auto try_subsets = [&](std::size_t first_new) -> bool {
    const std::size_t n = candidates.size();
    std::vector<ReducedWord> pick;
    auto test = [&](std::initializer_list<std::size_t> idx) {
      // Only subsets touching a candidate added in this round are new.
      if (std::none_of(idx.begin(), idx.end(), [&](auto i) { return i >= first_new; })) return false;
      pick.clear();
      for (auto i : idx) pick.push_back(elements[candidates[i]].word);
      if (!is_pattern_avoiding(pick, D, ctx).avoiding) return false;
      std::vector<ProbeElement> out;
      for (auto i : idx) out.push_back(elements[candidates[i]]);
      result.avoiding_set = std::move(out);
      return true;
    };
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (test({i, j})) return true;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k)
          if (test({i, j, k})) return true;
    return false;
  };

  // Depth 1: the support itself.
  for (std::size_t s = 0; s < mu.support().size(); ++s) {
    const auto& g = mu.support()[s].word;
    if (g.is_identity() || !seen.insert(g).second) continue;
    elements.push_back({g, 1, {s}});
    frontier.push_back(elements.size() - 1);
  }
  for (int depth = 1; depth <= max_products; ++depth) {
    if (depth > 1) {
      std::vector<std::size_t> next;
      for (auto idx : frontier) {
        for (std::size_t s = 0; s < mu.support().size(); ++s) {
          auto product = ctx.multiply(elements[idx].word, mu.support()[s].word);
          if (product.is_identity() || !seen.insert(product).second) continue;
          if (elements.size() >= element_cap) {
            result.explored = elements.size();
            return result;
          }
          auto factors = elements[idx].factors;
          factors.push_back(s);
          elements.push_back({std::move(product), depth, std::move(factors)});
          next.push_back(elements.size() - 1);
        }
      }
      frontier = std::move(next);
    }
    result.depth_reached = depth;
    result.explored = elements.size();
    const std::size_t first_new = candidates.size();
    for (auto idx : frontier)
      if (is_witness(elements[idx].word) && candidates.size() < kCandidates) candidates.push_back(idx);
    if (candidates.size() > first_new && try_subsets(first_new)) return result;
    if (frontier.empty()) break;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Weak length additivity

double WeightedSet::total() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.weight;
  return s;
}

std::string to_string(ExtractionBranch branch) {
  switch (branch) {
    case ExtractionBranch::Empty: return "empty";
    case ExtractionBranch::DistinctFactors: return "distinct-factors";
    case ExtractionBranch::LongLetters: return "long-letters";
    case ExtractionBranch::ShortLetters: return "short-letters";
    case ExtractionBranch::InverseLetters: return "inverse-letters";
    case ExtractionBranch::Exhausted: return "exhausted";
  }
  return "unknown";
}

double ExtractionResult::weight_bound() const {
  return std::pow(static_cast<double>(rank) * static_cast<double>(theta),
                  -2.0 * pattern_type_size);
}

namespace {

/// Keeps the entries of the heaviest class; ties go to the smallest key.
template <typename Key>
std::vector<std::size_t> heaviest_class(const std::vector<std::size_t>& members,
                                        const std::vector<WeightedEntry>& entries,
                                        const std::function<Key(const ReducedWord&)>& key_of) {
  std::map<Key, std::pair<double, std::vector<std::size_t>>> classes;
  for (auto i : members) {
    auto& c = classes[key_of(entries[i].word)];
    c.first += entries[i].weight;
    c.second.push_back(i);
  }
  auto best = classes.begin();
  for (auto it = classes.begin(); it != classes.end(); ++it)
    if (it->second.first > best->second.first) best = it;
  return std::move(best->second.second);
}

std::optional<ReducedWord> first_qualifying(std::span<const ReducedWord> set,
                                            const std::function<bool(const ReducedWord&)>& pred) {
  for (const auto& g : set)
    if (pred(g)) return g;
  return std::nullopt;
}

}  // namespace

ExtractionResult extract_weakly_additive(const WeightedSet& F, std::span<const ReducedWord> avoiding,
                                         int D, const GroupContext& ctx) {
  check_setting(D, ctx);
  if (avoiding.empty() || !is_pattern_avoiding(avoiding, D, ctx).avoiding)
    throw PreconditionError("extraction needs a set avoiding patterns of type size " +
                            std::to_string(D));

  ExtractionResult res;
  res.rank = ctx.rank();
  res.pattern_type_size = D;
  for (const auto& g : avoiding) res.max_pattern_length = std::max(res.max_pattern_length, ctx.length(g));
  const auto L = res.max_pattern_length;

  std::set<ReducedWord> distinct;
  std::int64_t radius = 0;
  for (const auto& e : F.entries) {
    if (e.word.is_identity()) throw MalformedInput("weighted set must exclude the identity");
    if (!(e.weight >= 0.0)) throw MalformedInput("weights must be non-negative");
    if (!distinct.insert(e.word).second) throw MalformedInput("weighted set lists a word twice");
    radius = std::max(radius, ctx.length(e.word));
  }
  res.theta = ctx.theta(static_cast<double>(radius));
  if (F.entries.empty()) {
    res.branch = ExtractionBranch::Empty;
    res.weight_ratio = 1.0;
    return res;
  }

  const auto& entries = F.entries;
  std::vector<std::size_t> current(entries.size());
  std::iota(current.begin(), current.end(), 0);
  std::vector<FactorElement> prefix;  // y₁ ⋯ y_{d−1}

  auto finish = [&](ExtractionBranch branch, int level, std::optional<ReducedWord> shift) {
    res.branch = branch;
    res.level = level;
    res.shift = std::move(shift);
    // Cancellation inside a torsion factor can run through several elements, so
    // the per-level constant only holds for free groups.
    if (branch == ExtractionBranch::DistinctFactors && level == 1)
      res.order = 0;
    else
      res.order = ctx.is_free_group() ? 2 * L * level : 2 * L * D;
    for (auto i : current) res.subset.entries.push_back(entries[i]);
    const double total = F.total();
    res.weight_ratio = total > 0.0 ? res.subset.total() / total : 1.0;
    return res;
  };

  // Position d−1 from the front and d−1 from the back; crossing positions
  // mean the element has no d-th letter pair left.
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  for (int d = 1; d <= D; ++d) {
    const auto p = static_cast<std::size_t>(d - 1);
    using FactorKey = std::pair<std::size_t, std::size_t>;
    current = heaviest_class<FactorKey>(current, entries, [p, kNone](const ReducedWord& g) {
      const std::size_t m = g.type_size();
      if (m < 2 * p + 1) return FactorKey{kNone, kNone};
      return FactorKey{g[p].factor, g[m - 1 - p].factor};
    });
    const auto& sample = entries[current.front()].word;
    const std::size_t m0 = sample.type_size();

    if (m0 < 2 * p + 1) {
      // Only a conjugate of an involution reaches here; shift by a member
      // avoiding a type-size-D pattern extending the known prefix.
      std::vector<std::optional<FactorElement>> slots(static_cast<std::size_t>(D));
      for (std::size_t i = 0; i < prefix.size(); ++i) slots[i] = prefix[i];
      const auto omega = complete_pattern(slots, ctx);
      const auto omega_inv = ctx.inverse(*omega);
      auto g = first_qualifying(avoiding, [&](const ReducedWord& t) {
        return is_witness(t) && !starts_with(t, *omega) && !ends_with(t, omega_inv);
      });
      if (!g) throw PreconditionError("no member of the avoiding set escapes the pattern");
      auto out = finish(ExtractionBranch::Exhausted, d, std::move(g));
      out.order = 2 * L * D;
      return out;
    }
    if (sample[p].factor != sample[m0 - 1 - p].factor)
      return finish(ExtractionBranch::DistinctFactors, d, std::nullopt);

    using LetterKey = std::pair<FactorElement, FactorElement>;
    current = heaviest_class<LetterKey>(current, entries, [p](const ReducedWord& g) {
      return LetterKey{g[p], g[g.type_size() - 1 - p]};
    });
    const auto& rep = entries[current.front()].word;
    const FactorElement y = rep[p];
    const FactorElement z = rep[rep.type_size() - 1 - p];
    const bool y_long = ctx.length(y) > L;
    const bool z_long = ctx.length(z) > L;

    if (y_long && z_long) {
      const auto omega = ctx.from_reduced(prefix);
      const auto factor = y.factor;
      auto g = first_qualifying(avoiding, [&](const ReducedWord& t) {
        const auto c = ctx.conjugate(t, omega);
        return !(c.type_size() <= 1 && (c.is_identity() || c[0].factor == factor));
      });
      if (!g) throw PreconditionError("avoiding set lies in a conjugate of a factor");
      return finish(ExtractionBranch::LongLetters, d, std::move(g));
    }
    if (y_long || z_long || z != ctx.inverse(y))
      return finish(ExtractionBranch::ShortLetters, d, std::nullopt);

    prefix.push_back(y);
    if (d == D) {
      const auto pattern = ctx.from_reduced(prefix);
      const auto pattern_inv = ctx.inverse(pattern);
      auto g = first_qualifying(avoiding, [&](const ReducedWord& t) {
        return is_witness(t) && !starts_with(t, pattern) && !ends_with(t, pattern_inv);
      });
      if (!g) throw PreconditionError("no member of the avoiding set escapes the pattern");
      return finish(ExtractionBranch::InverseLetters, d, std::move(g));
    }
  }
  // Unreachable: the loop returns at d == D at the latest.
  return finish(ExtractionBranch::InverseLetters, D, std::nullopt);
}

AdditivityReport verify_weak_additivity(const ExtractionResult& result, int k_max,
                                        std::size_t samples, const GroupContext& ctx,
                                        std::uint64_t seed, std::size_t exhaustive_cap) {
  AdditivityReport report;
  report.defect_bound = result.defect_bound();
  report.order = result.order;
  const auto& entries = result.subset.entries;
  if (entries.empty() || k_max < 1) return report;

  std::vector<std::int64_t> lengths;
  for (const auto& e : entries) lengths.push_back(ctx.length(e.word));

  auto check = [&](const std::vector<std::size_t>& tuple) {
    ReducedWord product;
    std::int64_t sum = 0;
    for (auto i : tuple) {
      product = ctx.multiply(product, entries[i].word);
      if (result.shift) product = ctx.multiply(product, *result.shift);
      sum += lengths[i];
    }
    const auto k = static_cast<std::int64_t>(tuple.size());
    const auto defect = sum - ctx.length(product);
    report.worst_defect_per_factor =
        std::max(report.worst_defect_per_factor, static_cast<double>(defect) / static_cast<double>(k));
    ++report.tuples_checked;
    if (defect > k * report.defect_bound) ++report.failures;
    if (defect > k * report.order) ++report.order_violations;
  };

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, entries.size() - 1);
  for (int k = 1; k <= k_max; ++k) {
    const double combos = std::pow(static_cast<double>(entries.size()), k);
    const bool exhaustive = combos <= static_cast<double>(exhaustive_cap);
    report.exhaustive.push_back(exhaustive);
    std::vector<std::size_t> tuple(static_cast<std::size_t>(k), 0);
    if (exhaustive) {
      while (true) {
        check(tuple);
        std::size_t pos = 0;
        while (pos < tuple.size() && ++tuple[pos] == entries.size()) tuple[pos++] = 0;
        if (pos == tuple.size()) break;
      }
    } else {
      for (std::size_t s = 0; s < samples; ++s) {
        for (auto& t : tuple) t = pick(rng);
        check(tuple);
      }
    }
  }
  return report;
}

}  // namespace freeprod
