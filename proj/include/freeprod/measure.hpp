#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "freeprod/group.hpp"

namespace freeprod {

struct MeasureAtom {
  ReducedWord word;
  double probability = 0.0;
};

/// Finitely supported probability measure μ driving the right random walk.
/// Probabilities are positive and sum to 1 within 1e-12; atoms are distinct.
class DrivingMeasure {
 public:
  DrivingMeasure(std::string name, std::vector<MeasureAtom> support);

  /// Uniform on S ∪ S⁻¹ with extra mass `lazy` at the identity.
  static DrivingMeasure simple_random_walk(const GroupContext& ctx, double lazy = 0.0);
  static DrivingMeasure point_mass(ReducedWord word, std::string name = "point-mass");

  const std::string& name() const { return name_; }
  const std::vector<MeasureAtom>& support() const { return support_; }
  /// L = max{ℓ(g) : g ∈ supp μ}.
  std::int64_t max_length(const GroupContext& ctx) const;
  double identity_mass() const;

 private:
  std::string name_;
  std::vector<MeasureAtom> support_;
};

/// Parameters of a simple random walk on a free group, when μ is one.
struct SimpleWalkShape {
  int rank = 0;
  double lazy = 0.0;
};

/// Recognizes μ = lazy·δ_e + (1−lazy)·uniform(S ∪ S⁻¹) on a free group, the
/// setting in which the length process is itself a birth–death chain.
std::optional<SimpleWalkShape> detect_simple_random_walk(const DrivingMeasure& mu,
                                                         const GroupContext& ctx);

/// Letters s with ℓ(s) = 1 in S ∪ S⁻¹, deduplicated, in factor order.
std::vector<ReducedWord> generator_letters(const GroupContext& ctx);

}  // namespace freeprod
