#include "freeprod/word_io.hpp"

#include <charconv>
#include <deque>
#include <map>
#include <sstream>

namespace freeprod {

namespace {

struct SymbolRef {
  std::size_t factor;
  std::int64_t generator;
};

std::map<std::string, SymbolRef, std::less<>> symbol_table(const GroupContext& ctx) {
  std::map<std::string, SymbolRef, std::less<>> table;
  for (std::size_t i = 0; i < ctx.rank(); ++i) {
    const auto& f = ctx.factor(i);
    for (std::size_t g = 0; g < f.symbols().size(); ++g) {
      if (!table.emplace(f.symbols()[g], SymbolRef{i, f.generators()[g]}).second)
        throw MalformedInput("symbol '" + f.symbols()[g] + "' is used by two generators");
    }
  }
  return table;
}

std::int64_t power(const FactorDescriptor& f, std::int64_t generator, std::int64_t exp) {
  if (f.kind() == FactorKind::Integer) return generator * exp;
  std::int64_t base = exp < 0 ? f.inverse(generator) : generator;
  std::uint64_t e = exp < 0 ? static_cast<std::uint64_t>(-(exp + 1)) + 1 : static_cast<std::uint64_t>(exp);
  if (f.order() > 0) e %= static_cast<std::uint64_t>(f.order());
  std::int64_t acc = f.identity();
  while (e > 0) {
    if (e & 1U) acc = f.multiply(acc, base);
    base = f.multiply(base, base);
    e >>= 1U;
  }
  return acc;
}

// Shortest generator expression for a table-factor element.
std::vector<std::pair<std::size_t, int>> table_expression(const FactorDescriptor& f,
                                                          std::int64_t target) {
  const auto n = static_cast<std::size_t>(f.order());
  std::vector<std::int64_t> parent(n, -2);
  std::vector<std::pair<std::size_t, int>> step(n);
  parent[static_cast<std::size_t>(f.identity())] = -1;
  std::deque<std::int64_t> queue{f.identity()};
  while (!queue.empty()) {
    const auto x = queue.front();
    queue.pop_front();
    if (x == target) break;
    for (std::size_t g = 0; g < f.generators().size(); ++g) {
      for (int sign : {1, -1}) {
        const auto s = sign > 0 ? f.generators()[g] : f.inverse(f.generators()[g]);
        const auto y = f.multiply(x, s);
        if (parent[static_cast<std::size_t>(y)] == -2) {
          parent[static_cast<std::size_t>(y)] = x;
          step[static_cast<std::size_t>(y)] = {g, sign};
          queue.push_back(y);
        }
      }
    }
  }
  std::vector<std::pair<std::size_t, int>> path;
  for (auto x = target; parent[static_cast<std::size_t>(x)] >= 0;
       x = parent[static_cast<std::size_t>(x)])
    path.push_back(step[static_cast<std::size_t>(x)]);
  return {path.rbegin(), path.rend()};
}

}  // namespace

ReducedWord parse_word(std::string_view text, const GroupContext& ctx) {
  const auto symbols = symbol_table(ctx);
  std::vector<FactorElement> raw;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) {
    const auto caret = token.find('^');
    const std::string_view name = std::string_view(token).substr(0, caret);
    std::int64_t exp = 1;
    if (caret != std::string::npos) {
      const char* first = token.data() + caret + 1;
      const char* last = token.data() + token.size();
      if (first != last && *first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, last, exp);
      if (ec != std::errc() || ptr != last || first == last)
        throw MalformedInput("bad exponent in token '" + token + "'");
    }
    if (name == "e" && symbols.find(name) == symbols.end()) continue;
    const auto it = symbols.find(name);
    if (it == symbols.end()) throw MalformedInput("unknown symbol '" + std::string(name) + "'");
    const auto& f = ctx.factor(it->second.factor);
    raw.push_back({it->second.factor, power(f, it->second.generator, exp)});
  }
  return ctx.normalize(raw);
}

std::string format_word(const ReducedWord& w, const GroupContext& ctx) {
  if (w.is_identity()) return "e";
  std::string out;
  auto emit = [&out](const std::string& symbol, std::int64_t exp) {
    if (!out.empty()) out += ' ';
    out += symbol;
    if (exp != 1) out += '^' + std::to_string(exp);
  };
  for (const auto& x : w.letters()) {
    const auto& f = ctx.factor(x.factor);
    switch (f.kind()) {
      case FactorKind::Integer:
      case FactorKind::FiniteCyclic:
        emit(f.symbols().front(), x.code);
        break;
      case FactorKind::FiniteTable:
        for (const auto& [g, sign] : table_expression(f, x.code)) emit(f.symbols()[g], sign);
        break;
    }
  }
  return out;
}

std::vector<std::pair<std::size_t, std::int64_t>> serialize_word(const ReducedWord& w) {
  std::vector<std::pair<std::size_t, std::int64_t>> out;
  out.reserve(w.type_size());
  for (const auto& x : w.letters()) out.emplace_back(x.factor, x.code);
  return out;
}

ReducedWord deserialize_word(const std::vector<std::pair<std::size_t, std::int64_t>>& pairs,
                             const GroupContext& ctx) {
  std::vector<FactorElement> letters;
  letters.reserve(pairs.size());
  for (const auto& [factor, code] : pairs) letters.push_back({factor, code});
  return ctx.from_reduced(std::move(letters));
}

}  // namespace freeprod
