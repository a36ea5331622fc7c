#include "freeprod/cone.hpp"

#include <cstdlib>
#include <functional>
#include <ostream>

#include "json.hpp"

namespace freeprod {

LatticeGroup::LatticeGroup(int d) : d_(d) {
  if (d < 1) throw MalformedInput("lattice dimension must be at least 1");
}

LatticeGroup::Element LatticeGroup::multiply(const Element& a, const Element& b) const {
  Element out(a);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

std::int64_t LatticeGroup::length(const Element& a) const {
  std::int64_t s = 0;
  for (auto v : a) s += v < 0 ? -v : v;
  return s;
}

std::vector<LatticeGroup::Element> LatticeGroup::letters() const {
  std::vector<Element> out;
  for (int i = 0; i < d_; ++i) {
    for (int sign : {1, -1}) {
      Element e(static_cast<std::size_t>(d_), 0);
      e[static_cast<std::size_t>(i)] = sign;
      out.push_back(e);
    }
  }
  return out;
}

std::vector<LatticeGroup::Element> LatticeGroup::ball(double radius) const {
  const auto R = static_cast<std::int64_t>(radius);
  std::vector<Element> out;
  Element cur(static_cast<std::size_t>(d_), 0);
  std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t i, std::int64_t budget) {
    if (i == cur.size()) {
      out.push_back(cur);
      return;
    }
    for (std::int64_t v = -budget; v <= budget; ++v) {
      cur[i] = v;
      rec(i + 1, budget - std::abs(v));
    }
    cur[i] = 0;
  };
  if (R >= 0) rec(0, R);
  std::sort(out.begin(), out.end(), [this](const Element& a, const Element& b) {
    const auto la = length(a), lb = length(b);
    return la != lb ? la < lb : a < b;
  });
  return out;
}

std::string LatticeGroup::format(const Element& a) const {
  std::string s = "(";
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(a[i]);
  }
  return s + ")";
}

SccReport strongly_connected_components(const std::vector<std::vector<std::size_t>>& adjacency,
                                        std::size_t initial) {
  const std::size_t n = adjacency.size();
  SccReport rep;
  rep.component.assign(n, 0);

  auto tarjan = [&](const std::vector<bool>& keep, std::vector<std::size_t>& comp) {
    constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> order(n, kUnvisited), low(n, 0), stack;
    std::vector<bool> on_stack(n, false);
    std::size_t counter = 0, count = 0;
    std::function<void(std::size_t)> connect = [&](std::size_t v) {
      order[v] = low[v] = counter++;
      stack.push_back(v);
      on_stack[v] = true;
      for (auto w : adjacency[v]) {
        if (!keep[w]) continue;
        if (order[w] == kUnvisited) {
          connect(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], order[w]);
        }
      }
      if (low[v] == order[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = count;
        } while (w != v);
        ++count;
      }
    };
    for (std::size_t v = 0; v < n; ++v)
      if (keep[v] && order[v] == kUnvisited) connect(v);
    return count;
  };

  rep.component_count = tarjan(std::vector<bool>(n, true), rep.component);
  rep.strongly_connected = rep.component_count <= 1;

  std::vector<bool> keep(n, true);
  if (initial < n) keep[initial] = false;
  std::vector<std::size_t> sub(n, 0);
  rep.non_initial_strongly_connected = tarjan(keep, sub) <= 1;
  return rep;
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

void write_dot(std::ostream& os, const AutomatonView& A) {
  os << "digraph cones {\n  rankdir=LR;\n";
  for (std::size_t s = 0; s < A.representatives.size(); ++s) {
    os << "  s" << s << " [label=\"C(" << dot_escape(A.representatives[s]) << ")\"";
    if (s == A.initial) os << ", shape=doublecircle";
    os << "];\n";
  }
  for (const auto& e : A.edges)
    os << "  s" << e.from << " -> s" << e.to << " [label=\"" << dot_escape(A.labels[e.label])
       << "\"];\n";
  os << "}\n";
}

void write_adjacency_json(std::ostream& os, const AutomatonView& A) {
  nlohmann::ordered_json j;
  j["probe_radius"] = A.probe_radius;
  j["build_radius"] = A.build_radius;
  j["stabilized"] = A.stabilized;
  j["initial"] = A.initial;
  auto& states = j["states"] = nlohmann::ordered_json::array();
  for (std::size_t s = 0; s < A.representatives.size(); ++s)
    states.push_back({{"id", s},
                      {"representative", A.representatives[s]},
                      {"depth", A.depth[s]},
                      {"in_degree", A.in_degree[s]}});
  auto& edges = j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : A.edges)
    edges.push_back({{"from", e.from}, {"label", A.labels[e.label]}, {"to", e.to}});
  os << j.dump(2) << '\n';
}

}  // namespace freeprod
