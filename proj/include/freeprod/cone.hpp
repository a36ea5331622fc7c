#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "freeprod/group.hpp"
#include "freeprod/measure.hpp"
#include "freeprod/word_io.hpp"

namespace freeprod {

/// A group presented by a finite symmetric set of length-one letters, with
/// exact multiplication and word length.
template <class G>
concept CayleyModel = requires(const G& g, const typename G::Element& x, double radius) {
  typename G::Element;
  { g.identity() } -> std::same_as<typename G::Element>;
  { g.multiply(x, x) } -> std::same_as<typename G::Element>;
  { g.length(x) } -> std::convertible_to<std::int64_t>;
  { g.letters() } -> std::same_as<std::vector<typename G::Element>>;
  /// B(radius) in a fixed canonical order.
  { g.ball(radius) } -> std::same_as<std::vector<typename G::Element>>;
  { g.format(x) } -> std::same_as<std::string>;
  { x < x } -> std::convertible_to<bool>;
};

/// Cayley graph of a free product with respect to S ∪ S⁻¹.
class FreeProductCayley {
 public:
  using Element = ReducedWord;
  explicit FreeProductCayley(const GroupContext& ctx, std::size_t cap = kDefaultBallCap)
      : ctx_(ctx), cap_(cap) {}
  Element identity() const { return {}; }
  Element multiply(const Element& a, const Element& b) const { return ctx_.multiply(a, b); }
  std::int64_t length(const Element& a) const { return ctx_.length(a); }
  std::vector<Element> letters() const { return generator_letters(ctx_); }
  std::vector<Element> ball(double radius) const { return ctx_.ball(radius, cap_); }
  std::string format(const Element& a) const { return format_word(a, ctx_); }

 private:
  const GroupContext& ctx_;
  std::size_t cap_;
};

/// ℤ^d with the ℓ¹ length of the standard generators ±e_i.
class LatticeGroup {
 public:
  using Element = std::vector<std::int64_t>;
  explicit LatticeGroup(int d);
  int dimension() const { return d_; }
  Element identity() const { return Element(static_cast<std::size_t>(d_), 0); }
  Element multiply(const Element& a, const Element& b) const;
  std::int64_t length(const Element& a) const;
  std::vector<Element> letters() const;
  std::vector<Element> ball(double radius) const;
  std::string format(const Element& a) const;

 private:
  int d_;
};

/// Membership bits of {h ∈ B(R) : ℓ(gh) = ℓ(g) + ℓ(h)} over the canonical
/// order of B(R).
using ConeSignature = std::vector<bool>;

template <CayleyModel G>
ConeSignature cone_profile(const G& group, const typename G::Element& g,
                           const std::vector<typename G::Element>& probe_ball) {
  ConeSignature bits(probe_ball.size());
  const auto lg = group.length(g);
  for (std::size_t i = 0; i < probe_ball.size(); ++i)
    bits[i] = group.length(group.multiply(g, probe_ball[i])) == lg + group.length(probe_ball[i]);
  return bits;
}

template <CayleyModel G>
ConeSignature cone_profile(const G& group, const typename G::Element& g, double R) {
  return cone_profile(group, g, group.ball(R));
}

struct ConeEdge {
  std::size_t from = 0;
  std::size_t label = 0;
  std::size_t to = 0;
};

template <class E>
struct ConeAutomaton {
  std::vector<ConeSignature> signatures;
  std::vector<E> representatives;  // shortest, first in BFS order
  std::vector<std::string> representative_text;
  std::vector<std::int64_t> depth;  // ℓ(representative)
  /// Number of letters s with ℓ(gs⁻¹) = ℓ(g) − 1, measured on every element
  /// of the state seen during the build.
  std::vector<std::int64_t> in_degree;
  bool in_degree_consistent = true;
  std::size_t initial = 0;
  std::vector<std::string> labels;
  /// next[state][label]: target of the geodesic edge, if any.
  std::vector<std::vector<std::optional<std::size_t>>> next;
  double probe_radius = 0;
  std::int64_t build_radius = 0;
  /// Distinct signatures among elements of length ≤ k, k = 0..build_radius.
  std::vector<std::size_t> states_by_radius;
  bool stabilized = false;
  /// Every edge out of a representative landed on a known state.
  bool closed = true;

  std::size_t size() const { return signatures.size(); }
  std::vector<ConeEdge> edges() const {
    std::vector<ConeEdge> out;
    for (std::size_t s = 0; s < next.size(); ++s)
      for (std::size_t l = 0; l < next[s].size(); ++l)
        if (next[s][l]) out.push_back({s, l, *next[s][l]});
    return out;
  }
};

namespace detail {

// Runs f(i) for i in [0, count) on up to hardware_concurrency threads.
template <class F>
void parallel_for(std::size_t count, F&& f) {
  const std::size_t threads =
      count < 256 ? 1 : std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), 8));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += threads) f(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

/// BFS over elements up to build_radius along geodesic extensions, grouping
/// elements by R-truncated cone profile. Stabilized when the state count at
/// build_radius equals that at build_radius − 1.
template <CayleyModel G>
ConeAutomaton<typename G::Element> build_automaton(const G& group, double R, std::int64_t build_radius,
                                                   std::size_t cap = kDefaultBallCap) {
  using E = typename G::Element;
  if (build_radius < 1) throw MalformedInput("build radius must be at least 1");
  if (!(R >= 1)) throw MalformedInput("probe radius must be at least 1");
  const auto probe = group.ball(R);
  const auto letters = group.letters();
  std::vector<E> inverse_letters;
  for (const auto& s : letters) {
    const auto it = std::find_if(letters.begin(), letters.end(), [&](const E& t) {
      return group.multiply(s, t) == group.identity();
    });
    if (it == letters.end()) throw MalformedInput("letter set is not symmetric");
    inverse_letters.push_back(*it);
  }

  ConeAutomaton<E> A;
  A.probe_radius = R;
  A.build_radius = build_radius;
  for (const auto& s : letters) A.labels.push_back(group.format(s));

  std::map<ConeSignature, std::size_t> index;
  auto predecessors = [&](const E& g) {
    std::int64_t count = 0;
    const auto lg = group.length(g);
    for (const auto& t : inverse_letters)
      if (group.length(group.multiply(g, t)) == lg - 1) ++count;
    return count;
  };
  auto visit_sphere = [&](const std::vector<E>& sphere, std::int64_t k) {
    std::vector<ConeSignature> profiles(sphere.size());
    std::vector<std::int64_t> preds(sphere.size());
    detail::parallel_for(sphere.size(), [&](std::size_t i) {
      profiles[i] = cone_profile(group, sphere[i], probe);
      preds[i] = predecessors(sphere[i]);
    });
    for (std::size_t i = 0; i < sphere.size(); ++i) {
      auto [it, fresh] = index.try_emplace(profiles[i], A.signatures.size());
      if (fresh) {
        A.signatures.push_back(profiles[i]);
        A.representatives.push_back(sphere[i]);
        A.representative_text.push_back(group.format(sphere[i]));
        A.depth.push_back(k);
        A.in_degree.push_back(preds[i]);
      } else if (A.in_degree[it->second] != preds[i]) {
        A.in_degree_consistent = false;
      }
    }
    A.states_by_radius.push_back(A.signatures.size());
  };

  std::vector<E> sphere{group.identity()};
  std::size_t seen = 1;
  visit_sphere(sphere, 0);
  for (std::int64_t k = 1; k <= build_radius; ++k) {
    std::set<E> next_sphere;
    for (const auto& g : sphere)
      for (const auto& s : letters) {
        auto gs = group.multiply(g, s);
        if (group.length(gs) == k) next_sphere.insert(std::move(gs));
      }
    seen += next_sphere.size();
    if (seen > cap)
      throw ResourceLimit("cone automaton build exceeded " + std::to_string(cap) + " elements", cap);
    sphere.assign(next_sphere.begin(), next_sphere.end());
    visit_sphere(sphere, k);
  }
  A.stabilized = A.states_by_radius[static_cast<std::size_t>(build_radius)] ==
                 A.states_by_radius[static_cast<std::size_t>(build_radius - 1)];

  A.next.assign(A.size(), std::vector<std::optional<std::size_t>>(letters.size()));
  for (std::size_t st = 0; st < A.size(); ++st) {
    const auto& g = A.representatives[st];
    const auto lg = group.length(g);
    for (std::size_t l = 0; l < letters.size(); ++l) {
      const auto gs = group.multiply(g, letters[l]);
      if (group.length(gs) != lg + 1) continue;
      const auto it = index.find(cone_profile(group, gs, probe));
      if (it == index.end()) {
        A.closed = false;
        A.stabilized = false;
        continue;
      }
      A.next[st][l] = it->second;
    }
  }
  return A;
}

struct SccReport {
  std::vector<std::size_t> component;  // per state
  std::size_t component_count = 0;
  bool strongly_connected = false;
  /// The subgraph on states other than the initial one is one SCC.
  bool non_initial_strongly_connected = false;
};

/// Tarjan's algorithm on a graph given by adjacency lists.
SccReport strongly_connected_components(const std::vector<std::vector<std::size_t>>& adjacency,
                                        std::size_t initial);

template <class E>
std::vector<std::vector<std::size_t>> adjacency(const ConeAutomaton<E>& A) {
  std::vector<std::vector<std::size_t>> adj(A.size());
  for (const auto& e : A.edges()) adj[e.from].push_back(e.to);
  return adj;
}

template <class E>
SccReport strongly_connected_components(const ConeAutomaton<E>& A) {
  return strongly_connected_components(adjacency(A), A.initial);
}

struct ConditionTwoResult {
  bool holds = true;
  std::size_t words_checked = 0;
  /// Label sequences readable from C₀ but from no other state.
  std::vector<std::vector<std::size_t>> witnesses;
};

/// Every geodesic word of length ≤ radius readable from C₀ must be readable
/// from some non-initial state.
template <class E>
ConditionTwoResult condition_two_check(const ConeAutomaton<E>& A, std::int64_t radius,
                                       std::size_t cap = kDefaultBallCap) {
  ConditionTwoResult res;
  std::vector<std::size_t> others;
  for (std::size_t s = 0; s < A.size(); ++s)
    if (s != A.initial) others.push_back(s);
  std::vector<std::size_t> word;
  // Follows the word from C₀ and, in parallel, from every non-initial start.
  auto rec = [&](auto&& self, std::size_t from_initial, const std::vector<std::size_t>& alive) -> void {
    ++res.words_checked;
    if (res.words_checked > cap)
      throw ResourceLimit("condition (2) check exceeded " + std::to_string(cap) + " words", cap);
    if (alive.empty()) {
      res.holds = false;
      if (res.witnesses.size() < 16) res.witnesses.push_back(word);
      return;
    }
    if (static_cast<std::int64_t>(word.size()) == radius) return;
    for (std::size_t l = 0; l < A.labels.size(); ++l) {
      const auto target = A.next[from_initial][l];
      if (!target) continue;
      std::vector<std::size_t> moved;
      for (auto s : alive)
        if (const auto t = A.next[s][l]) moved.push_back(*t);
      std::sort(moved.begin(), moved.end());
      moved.erase(std::unique(moved.begin(), moved.end()), moved.end());
      word.push_back(l);
      self(self, *target, moved);
      word.pop_back();
    }
  };
  rec(rec, A.initial, others);
  return res;
}

struct SphereCounts {
  std::vector<std::uint64_t> geodesic_words;  // edge paths of length n from C₀
  std::vector<std::uint64_t> elements;        // via per-state in-degree
  /// Element recursion divided exactly at every step.
  bool element_counts_exact = true;
};

/// Path counting from C₀. Elements of length n+1 in state C′ are reached by
/// exactly in_degree(C′) geodesic edges, which turns path counts into
/// element counts.
template <class E>
SphereCounts sphere_sizes(const ConeAutomaton<E>& A, std::int64_t n_max) {
  if (n_max < 0) throw MalformedInput("n_max must be non-negative");
  SphereCounts out;
  std::vector<std::uint64_t> paths(A.size(), 0), elems(A.size(), 0);
  paths[A.initial] = elems[A.initial] = 1;
  const auto edges = A.edges();
  for (std::int64_t n = 0;; ++n) {
    std::uint64_t pw = 0, pe = 0;
    for (std::size_t s = 0; s < A.size(); ++s) {
      pw += paths[s];
      pe += elems[s];
    }
    out.geodesic_words.push_back(pw);
    out.elements.push_back(pe);
    if (n == n_max) break;
    std::vector<std::uint64_t> np(A.size(), 0), ne(A.size(), 0);
    for (const auto& e : edges) {
      np[e.to] += paths[e.from];
      ne[e.to] += elems[e.from];
    }
    for (std::size_t s = 0; s < A.size(); ++s) {
      if (ne[s] == 0) continue;
      const auto d = static_cast<std::uint64_t>(std::max<std::int64_t>(1, A.in_degree[s]));
      if (ne[s] % d != 0) out.element_counts_exact = false;
      ne[s] /= d;
    }
    paths = std::move(np);
    elems = std::move(ne);
  }
  return out;
}

/// Exact sphere sizes |{g : ℓ(g) = n}| by BFS over elements (independent of
/// any automaton).
template <CayleyModel G>
std::vector<std::uint64_t> enumerate_sphere_sizes(const G& group, std::int64_t n_max,
                                                  std::size_t cap = kDefaultBallCap) {
  using E = typename G::Element;
  std::set<E> seen{group.identity()};
  std::vector<E> frontier{group.identity()};
  std::vector<std::uint64_t> out{1};
  const auto letters = group.letters();
  for (std::int64_t n = 1; n <= n_max; ++n) {
    std::vector<E> next;
    for (const auto& g : frontier)
      for (const auto& s : letters) {
        auto gs = group.multiply(g, s);
        if (seen.insert(gs).second) next.push_back(std::move(gs));
      }
    if (seen.size() > cap) throw ResourceLimit("sphere enumeration exceeded the cap", cap);
    out.push_back(next.size());
    frontier = std::move(next);
  }
  return out;
}

/// Exports: Graphviz DOT, and adjacency JSON of the form
/// {"probe_radius", "build_radius", "stabilized", "initial",
///  "states": [{"id", "representative", "depth", "in_degree"}],
///  "edges": [{"from", "label", "to"}]}.
struct AutomatonView {
  std::vector<std::string> representatives;
  std::vector<std::int64_t> depth;
  std::vector<std::int64_t> in_degree;
  std::vector<std::string> labels;
  std::vector<ConeEdge> edges;
  std::size_t initial = 0;
  double probe_radius = 0;
  std::int64_t build_radius = 0;
  bool stabilized = false;
};

template <class E>
AutomatonView view(const ConeAutomaton<E>& A) {
  return {A.representative_text, A.depth, A.in_degree, A.labels, A.edges(),
          A.initial, A.probe_radius, A.build_radius, A.stabilized};
}

void write_dot(std::ostream& os, const AutomatonView& A);
void write_adjacency_json(std::ostream& os, const AutomatonView& A);

}  // namespace freeprod
