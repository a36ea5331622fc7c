#include "freeprod/measure.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace freeprod {

DrivingMeasure::DrivingMeasure(std::string name, std::vector<MeasureAtom> support)
    : name_(std::move(name)), support_(std::move(support)) {
  if (support_.empty()) throw MalformedInput("driving measure '" + name_ + "' has empty support");
  double total = 0.0;
  std::set<ReducedWord> seen;
  for (const auto& atom : support_) {
    if (!(atom.probability > 0.0))
      throw MalformedInput("driving measure '" + name_ + "' has a non-positive probability");
    if (!seen.insert(atom.word).second)
      throw MalformedInput("driving measure '" + name_ + "' lists an atom twice");
    total += atom.probability;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw MalformedInput("driving measure '" + name_ + "' sums to " + std::to_string(total));
}

std::vector<ReducedWord> generator_letters(const GroupContext& ctx) {
  std::vector<ReducedWord> out;
  for (std::size_t i = 0; i < ctx.rank(); ++i) {
    const auto& f = ctx.factor(i);
    std::set<std::int64_t> codes;
    for (auto g : f.generators()) {
      codes.insert(g);
      codes.insert(f.inverse(g));
    }
    // Integer factor: a before a⁻¹.
    std::vector<std::int64_t> ordered(codes.begin(), codes.end());
    if (f.kind() == FactorKind::Integer) std::reverse(ordered.begin(), ordered.end());
    for (auto c : ordered) out.push_back(ctx.letter(i, c));
  }
  return out;
}

DrivingMeasure DrivingMeasure::simple_random_walk(const GroupContext& ctx, double lazy) {
  if (!(lazy >= 0.0 && lazy < 1.0)) throw MalformedInput("lazy probability must lie in [0, 1)");
  const auto letters = generator_letters(ctx);
  std::vector<MeasureAtom> atoms;
  if (lazy > 0.0) atoms.push_back({ReducedWord{}, lazy});
  const double p = (1.0 - lazy) / static_cast<double>(letters.size());
  for (const auto& s : letters) atoms.push_back({s, p});
  return DrivingMeasure(lazy > 0.0 ? "lazy-srw" : "srw", std::move(atoms));
}

DrivingMeasure DrivingMeasure::point_mass(ReducedWord word, std::string name) {
  return DrivingMeasure(std::move(name), {{std::move(word), 1.0}});
}

std::int64_t DrivingMeasure::max_length(const GroupContext& ctx) const {
  std::int64_t best = 0;
  for (const auto& atom : support_) best = std::max(best, ctx.length(atom.word));
  return best;
}

double DrivingMeasure::identity_mass() const {
  for (const auto& atom : support_)
    if (atom.word.is_identity()) return atom.probability;
  return 0.0;
}

std::optional<SimpleWalkShape> detect_simple_random_walk(const DrivingMeasure& mu,
                                                         const GroupContext& ctx) {
  if (!ctx.is_free_group()) return std::nullopt;
  const double lazy = mu.identity_mass();
  const auto letters = generator_letters(ctx);
  const double p = (1.0 - lazy) / static_cast<double>(letters.size());
  const std::size_t expected = letters.size() + (lazy > 0.0 ? 1 : 0);
  if (mu.support().size() != expected) return std::nullopt;
  for (const auto& s : letters) {
    const auto it = std::find_if(mu.support().begin(), mu.support().end(),
                                 [&](const auto& atom) { return atom.word == s; });
    if (it == mu.support().end() || std::abs(it->probability - p) > 1e-12) return std::nullopt;
  }
  return SimpleWalkShape{static_cast<int>(ctx.rank()), lazy};
}

}  // namespace freeprod
