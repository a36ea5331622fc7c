#pragma once

#include <string>
#include <vector>

#include "freeprod/group.hpp"
#include "freeprod/word_io.hpp"

namespace freeprod::testing {

/// Free group on r generators named a, b, c, ...
inline GroupContext free_group(int r) {
  std::vector<FactorDescriptor> factors;
  for (int i = 0; i < r; ++i) factors.push_back(FactorDescriptor::integer(std::string(1, 'a' + i)));
  return GroupContext(std::move(factors));
}

/// ℤ/m₁ ∗ ℤ/m₂ with generators x, y.
inline GroupContext cyclic_product(int m1, int m2) {
  return GroupContext({FactorDescriptor::cyclic("x", m1), FactorDescriptor::cyclic("y", m2)});
}

/// Symmetric group S₃ as a table factor generated by two transpositions.
/// Elements: 0=id, 1=(12), 2=(23), 3=(13), 4=(123), 5=(132).
inline FactorDescriptor s3_factor() {
  // Composition (i*j)(k) = i(j(k)) on permutations of {0,1,2}.
  const std::vector<std::vector<int>> perms = {{0, 1, 2}, {1, 0, 2}, {0, 2, 1},
                                               {2, 1, 0}, {1, 2, 0}, {2, 0, 1}};
  std::vector<std::vector<int>> table(6, std::vector<int>(6));
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      std::vector<int> c(3);
      for (int k = 0; k < 3; ++k) c[k] = perms[i][perms[j][k]];
      for (int t = 0; t < 6; ++t)
        if (perms[t] == c) table[i][j] = t;
    }
  return FactorDescriptor::table("S3", table, {1, 2}, {"s", "t"});
}

inline ReducedWord w(const GroupContext& ctx, const std::string& text) {
  return parse_word(text, ctx);
}

}  // namespace freeprod::testing
