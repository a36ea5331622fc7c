#include "freeprod/group.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>
#include <utility>

namespace freeprod {

namespace {

std::int64_t floor_radius(double radius) {
  if (!(radius >= 0.0)) return -1;
  if (radius > 1e15) return std::numeric_limits<std::int64_t>::max() / 4;
  return static_cast<std::int64_t>(std::floor(radius));
}

}  // namespace

// ---------------------------------------------------------------------------
// FactorDescriptor

FactorDescriptor FactorDescriptor::integer(std::string name) {
  if (name.empty()) throw MalformedInput("factor name must be non-empty");
  FactorDescriptor f;
  f.name_ = name;
  f.kind_ = FactorKind::Integer;
  f.order_ = 0;
  f.identity_ = 0;
  f.generators_ = {1};
  f.symbols_ = {std::move(name)};
  return f;
}

FactorDescriptor FactorDescriptor::cyclic(std::string name, std::int64_t order) {
  if (name.empty()) throw MalformedInput("factor name must be non-empty");
  if (order < 2) throw MalformedInput("cyclic factor '" + name + "' needs order >= 2");
  FactorDescriptor f;
  f.name_ = name;
  f.kind_ = FactorKind::FiniteCyclic;
  f.order_ = order;
  f.identity_ = 0;
  f.generators_ = {1};
  f.symbols_ = {std::move(name)};
  return f;
}

FactorDescriptor FactorDescriptor::table(std::string name, std::vector<std::vector<int>> table,
                                         std::vector<int> generators,
                                         std::vector<std::string> generator_names) {
  if (name.empty()) throw MalformedInput("factor name must be non-empty");
  const auto n = static_cast<int>(table.size());
  if (n < 2) throw MalformedInput("table factor '" + name + "' must be non-trivial");
  for (const auto& row : table) {
    if (static_cast<int>(row.size()) != n)
      throw MalformedInput("table factor '" + name + "' is not square");
    for (int v : row)
      if (v < 0 || v >= n) throw MalformedInput("table factor '" + name + "' entry out of range");
  }
  int identity = -1;
  for (int i = 0; i < n && identity < 0; ++i) {
    bool ok = true;
    for (int j = 0; j < n && ok; ++j) ok = table[i][j] == j && table[j][i] == j;
    if (ok) identity = i;
  }
  if (identity < 0) throw MalformedInput("table factor '" + name + "' has no identity");
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (table[table[a][b]][c] != table[a][table[b][c]])
          throw MalformedInput("table factor '" + name + "' is not associative");
  std::vector<int> inverse(n, -1);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b)
      if (table[a][b] == identity && table[b][a] == identity) inverse[a] = b;
    if (inverse[a] < 0) throw MalformedInput("table factor '" + name + "' lacks inverses");
  }
  if (generators.empty()) throw MalformedInput("table factor '" + name + "' has no generators");
  if (generator_names.size() != generators.size())
    throw MalformedInput("table factor '" + name + "': generator names do not match generators");
  for (int g : generators)
    if (g < 0 || g >= n || g == identity)
      throw MalformedInput("table factor '" + name + "' has an invalid generator");

  // BFS over the Cayley graph with respect to S_i ∪ S_i⁻¹.
  std::vector<std::int64_t> dist(n, -1);
  dist[identity] = 0;
  std::deque<int> queue{identity};
  while (!queue.empty()) {
    const int x = queue.front();
    queue.pop_front();
    for (int g : generators) {
      for (int s : {g, inverse[g]}) {
        const int y = table[x][s];
        if (dist[y] < 0) {
          dist[y] = dist[x] + 1;
          queue.push_back(y);
        }
      }
    }
  }
  if (std::any_of(dist.begin(), dist.end(), [](auto d) { return d < 0; }))
    throw MalformedInput("generators of table factor '" + name + "' do not generate it");

  FactorDescriptor f;
  f.name_ = std::move(name);
  f.kind_ = FactorKind::FiniteTable;
  f.order_ = n;
  f.identity_ = identity;
  f.table_ = std::move(table);
  f.inverse_ = std::move(inverse);
  f.distance_ = std::move(dist);
  f.generators_.assign(generators.begin(), generators.end());
  f.symbols_ = std::move(generator_names);
  return f;
}

bool FactorDescriptor::is_valid(std::int64_t code) const {
  switch (kind_) {
    case FactorKind::Integer:
      return true;
    case FactorKind::FiniteCyclic:
    case FactorKind::FiniteTable:
      return code >= 0 && code < order_;
  }
  return false;
}

std::int64_t FactorDescriptor::multiply(std::int64_t x, std::int64_t y) const {
  switch (kind_) {
    case FactorKind::Integer:
      return x + y;
    case FactorKind::FiniteCyclic:
      return (x + y) % order_;
    case FactorKind::FiniteTable:
      return table_[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
  }
  return 0;
}

std::int64_t FactorDescriptor::inverse(std::int64_t x) const {
  switch (kind_) {
    case FactorKind::Integer:
      return -x;
    case FactorKind::FiniteCyclic:
      return (order_ - x) % order_;
    case FactorKind::FiniteTable:
      return inverse_[static_cast<std::size_t>(x)];
  }
  return 0;
}

std::int64_t FactorDescriptor::length(std::int64_t x) const {
  switch (kind_) {
    case FactorKind::Integer:
      return x < 0 ? -x : x;
    case FactorKind::FiniteCyclic:
      return std::min(x, order_ - x);
    case FactorKind::FiniteTable:
      return distance_[static_cast<std::size_t>(x)];
  }
  return 0;
}

std::vector<std::int64_t> FactorDescriptor::sphere(std::int64_t k) const {
  std::vector<std::int64_t> out;
  if (k <= 0) return out;
  switch (kind_) {
    case FactorKind::Integer:
      out = {-k, k};
      break;
    case FactorKind::FiniteCyclic:
      if (k <= order_ / 2) {
        out.push_back(k);
        if (order_ - k != k) out.push_back(order_ - k);
      }
      break;
    case FactorKind::FiniteTable:
      for (std::int64_t x = 0; x < order_; ++x)
        if (distance_[static_cast<std::size_t>(x)] == k) out.push_back(x);
      break;
  }
  return out;
}

std::int64_t FactorDescriptor::ball_size(double radius) const {
  const auto t = floor_radius(radius);
  if (t < 0) return 0;
  switch (kind_) {
    case FactorKind::Integer:
      return 2 * t + 1;
    case FactorKind::FiniteCyclic:
      return std::min(order_, 2 * t + 1);
    case FactorKind::FiniteTable:
      return std::count_if(distance_.begin(), distance_.end(), [t](auto d) { return d <= t; });
  }
  return 0;
}

std::int64_t FactorDescriptor::diameter() const {
  switch (kind_) {
    case FactorKind::Integer:
      return -1;
    case FactorKind::FiniteCyclic:
      return order_ / 2;
    case FactorKind::FiniteTable:
      return *std::max_element(distance_.begin(), distance_.end());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Words and predicates

std::size_t ReducedWordHash::operator()(const ReducedWord& w) const noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  for (const auto& x : w.letters()) {
    mix(x.factor);
    mix(static_cast<std::uint64_t>(x.code));
  }
  return static_cast<std::size_t>(h);
}

namespace {

PrefixMatch compare_edge(const ReducedWord& g, const ReducedWord& pattern, bool at_end) {
  if (pattern.is_identity()) throw MalformedInput("pattern must have type size at least 1");
  const std::size_t m = g.type_size();
  if (m < 2) return {false, true};
  const std::size_t k = std::min(pattern.type_size(), m / 2);
  const std::size_t offset = at_end ? m - k : 0;
  for (std::size_t i = 0; i < k; ++i)
    if (g[offset + i] != pattern[i]) return {false, false};
  return {true, false};
}

}  // namespace

PrefixMatch starts_with(const ReducedWord& g, const ReducedWord& pattern) {
  return compare_edge(g, pattern, false);
}

PrefixMatch ends_with(const ReducedWord& g, const ReducedWord& pattern) {
  return compare_edge(g, pattern, true);
}

// ---------------------------------------------------------------------------
// GroupContext

GroupContext::GroupContext(std::vector<FactorDescriptor> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw MalformedInput("a free product needs at least one factor");
}

bool GroupContext::is_free_group() const {
  return std::all_of(factors_.begin(), factors_.end(),
                     [](const auto& f) { return f.kind() == FactorKind::Integer; });
}

void GroupContext::validate(const FactorElement& x) const {
  if (x.factor >= factors_.size())
    throw MalformedInput("factor index " + std::to_string(x.factor) + " out of range");
  if (!factors_[x.factor].is_valid(x.code))
    throw MalformedInput("invalid element code " + std::to_string(x.code) + " for factor '" +
                         factors_[x.factor].name() + "'");
}

ReducedWord GroupContext::normalize(std::span<const FactorElement> raw) const {
  std::vector<FactorElement> stack;
  stack.reserve(raw.size());
  for (const auto& x : raw) {
    validate(x);
    const auto& f = factors_[x.factor];
    if (f.is_identity(x.code)) continue;
    if (!stack.empty() && stack.back().factor == x.factor) {
      const auto merged = f.multiply(stack.back().code, x.code);
      stack.pop_back();
      if (!f.is_identity(merged)) stack.push_back({x.factor, merged});
    } else {
      stack.push_back(x);
    }
  }
  return ReducedWord(std::move(stack));
}

ReducedWord GroupContext::from_reduced(std::vector<FactorElement> letters) const {
  for (std::size_t i = 0; i < letters.size(); ++i) {
    validate(letters[i]);
    if (factors_[letters[i].factor].is_identity(letters[i].code))
      throw MalformedInput("identity letter in reduced word");
    if (i > 0 && letters[i - 1].factor == letters[i].factor)
      throw MalformedInput("adjacent letters from the same factor");
  }
  return ReducedWord(std::move(letters));
}

ReducedWord GroupContext::letter(std::size_t factor, std::int64_t code) const {
  const FactorElement x{factor, code};
  return normalize(std::span(&x, 1));
}

ReducedWord GroupContext::multiply(const ReducedWord& u, const ReducedWord& v) const {
  std::vector<FactorElement> out(u.letters_.begin(), u.letters_.end());
  std::size_t j = 0;
  while (j < v.type_size() && !out.empty() && out.back().factor == v[j].factor) {
    const auto& f = factors_[v[j].factor];
    const auto merged = f.multiply(out.back().code, v[j].code);
    out.pop_back();
    ++j;
    if (!f.is_identity(merged)) {
      out.push_back({v[j - 1].factor, merged});
      break;
    }
  }
  out.insert(out.end(), v.letters_.begin() + static_cast<std::ptrdiff_t>(j), v.letters_.end());
  return ReducedWord(std::move(out));
}

FactorElement GroupContext::inverse(const FactorElement& x) const {
  return {x.factor, factors_[x.factor].inverse(x.code)};
}

ReducedWord GroupContext::inverse(const ReducedWord& u) const {
  std::vector<FactorElement> out;
  out.reserve(u.type_size());
  for (auto it = u.letters_.rbegin(); it != u.letters_.rend(); ++it) out.push_back(inverse(*it));
  return ReducedWord(std::move(out));
}

std::int64_t GroupContext::length(const FactorElement& x) const {
  return factors_[x.factor].length(x.code);
}

std::int64_t GroupContext::length(const ReducedWord& u) const {
  std::int64_t total = 0;
  for (const auto& x : u.letters()) total += length(x);
  return total;
}

std::int64_t GroupContext::product_length(const ReducedWord& u, const ReducedWord& v) const {
  std::int64_t total = length(u) + length(v);
  std::size_t i = u.type_size();
  std::size_t j = 0;
  while (i > 0 && j < v.type_size() && u[i - 1].factor == v[j].factor) {
    const auto& f = factors_[v[j].factor];
    const auto merged = f.multiply(u[i - 1].code, v[j].code);
    total -= f.length(u[i - 1].code) + f.length(v[j].code);
    if (!f.is_identity(merged)) {
      total += f.length(merged);
      break;
    }
    --i;
    ++j;
  }
  return total;
}

ReducedWord GroupContext::conjugate(const ReducedWord& g, const ReducedWord& u) const {
  return multiply(multiply(inverse(u), g), u);
}

std::vector<ReducedWord> GroupContext::ball(double radius, std::size_t cap) const {
  const auto t = floor_radius(radius);
  if (t < 0) return {};

  // Non-identity factor elements grouped by length, per factor.
  std::vector<std::vector<std::vector<std::int64_t>>> spheres(factors_.size());
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const auto& f = factors_[i];
    const auto top = f.diameter() < 0 ? t : std::min(t, f.diameter());
    spheres[i].resize(static_cast<std::size_t>(top) + 1);
    for (std::int64_t k = 1; k <= top; ++k) spheres[i][static_cast<std::size_t>(k)] = f.sphere(k);
  }

  std::vector<ReducedWord> out;
  std::vector<FactorElement> current;
  out.emplace_back();

  std::function<void(std::int64_t)> extend = [&](std::int64_t remaining) {
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (!current.empty() && current.back().factor == i) continue;
      const auto top = std::min<std::int64_t>(remaining,
                                              static_cast<std::int64_t>(spheres[i].size()) - 1);
      for (std::int64_t k = 1; k <= top; ++k) {
        for (auto code : spheres[i][static_cast<std::size_t>(k)]) {
          current.push_back({i, code});
          if (out.size() >= cap) throw ResourceLimit("ball enumeration exceeded its cap", cap);
          out.push_back(ReducedWord(current));
          extend(remaining - k);
          current.pop_back();
        }
      }
    }
  };
  extend(t);

  std::vector<std::pair<std::int64_t, std::size_t>> order(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) order[i] = {length(out[i]), i};
  std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return out[a.second] < out[b.second];
  });
  std::vector<ReducedWord> sorted;
  sorted.reserve(out.size());
  for (const auto& [len, idx] : order) sorted.push_back(std::move(out[idx]));
  return sorted;
}

std::vector<double> GroupContext::sphere_counts(std::int64_t n) const {
  const auto r = factors_.size();
  const auto len = static_cast<std::size_t>(std::max<std::int64_t>(n, 0)) + 1;
  // ending[l][i]: reduced words of length l whose last letter lies in factor i.
  std::vector<std::vector<double>> ending(len, std::vector<double>(r, 0.0));
  std::vector<double> total(len, 0.0);
  total[0] = 1.0;
  for (std::size_t l = 1; l < len; ++l) {
    for (std::size_t i = 0; i < r; ++i) {
      double acc = 0.0;
      for (std::size_t k = 1; k <= l; ++k) {
        const auto c = static_cast<double>(factors_[i].sphere(static_cast<std::int64_t>(k)).size());
        if (c == 0.0) continue;
        acc += c * (total[l - k] - ending[l - k][i]);
      }
      ending[l][i] = acc;
      total[l] += acc;
    }
  }
  return total;
}

std::int64_t GroupContext::theta(double radius) const {
  std::int64_t best = 0;
  for (const auto& f : factors_) best = std::max(best, f.ball_size(radius));
  return best;
}

std::vector<double> growth_estimate(const GroupContext& ctx, std::int64_t n_max, std::size_t cap) {
  const auto spheres = ctx.sphere_counts(n_max);
  std::vector<double> out;
  double ball = 1.0;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    ball += spheres[static_cast<std::size_t>(n)];
    if (ball > static_cast<double>(cap))
      throw ResourceLimit("ball of radius " + std::to_string(n) + " exceeds the cap", cap);
    out.push_back(std::pow(ball, 1.0 / static_cast<double>(n)));
  }
  return out;
}

std::vector<double> growth_estimate(const FactorDescriptor& factor, std::int64_t n_max,
                                    std::size_t cap) {
  std::vector<double> out;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    const auto ball = static_cast<double>(factor.ball_size(static_cast<double>(n)));
    if (ball > static_cast<double>(cap))
      throw ResourceLimit("factor ball of radius " + std::to_string(n) + " exceeds the cap", cap);
    out.push_back(std::pow(ball, 1.0 / static_cast<double>(n)));
  }
  return out;
}

}  // namespace freeprod
