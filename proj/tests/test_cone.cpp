#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "freeprod/cone.hpp"
#include "json.hpp"

using namespace freeprod;
using freeprod::testing::w;

namespace {

template <CayleyModel G>
void check_spheres_against_enumeration(const G& group, const ConeAutomaton<typename G::Element>& A,
                                       std::int64_t n_max) {
  const auto counted = sphere_sizes(A, n_max);
  const auto enumerated = enumerate_sphere_sizes(group, n_max);
  CHECK(counted.element_counts_exact);
  CHECK(counted.elements == enumerated);
}

template <CayleyModel G>
void check_representatives(const G& group, const ConeAutomaton<typename G::Element>& A) {
  const auto letters = group.letters();
  for (std::size_t s = 0; s < A.size(); ++s)
    for (std::size_t l = 0; l < letters.size(); ++l) {
      const auto gs = group.multiply(A.representatives[s], letters[l]);
      const bool geodesic = group.length(gs) == group.length(A.representatives[s]) + 1;
      CHECK(A.next[s][l].has_value() == geodesic);
      if (A.next[s][l])
        CHECK(cone_profile(group, gs, A.probe_radius) == A.signatures[*A.next[s][l]]);
    }
}

}  // namespace

TEST_CASE("cone profiles") {
  const auto f2 = testing::free_group(2);
  const FreeProductCayley F(f2);
  const auto ball = F.ball(3);
  const auto at_e = cone_profile(F, F.identity(), 3.0);
  CHECK(std::all_of(at_e.begin(), at_e.end(), [](bool b) { return b; }));

  const auto at_a = cone_profile(F, w(f2, "a"), ball);
  const auto a_inv = w(f2, "a^-1");
  for (std::size_t i = 0; i < ball.size(); ++i) {
    const auto& h = ball[i];
    const bool starts_with_inverse = !h.is_identity() && h.front() == a_inv.front();
    const bool starts_with_inverse_power = !h.is_identity() && h.front().factor == 0 && h.front().code < 0;
    CAPTURE(format_word(h, f2));
    CHECK(at_a[i] == !starts_with_inverse_power);
    if (starts_with_inverse) CHECK_FALSE(at_a[i]);
  }

  const LatticeGroup Z2(2);
  const auto lattice_ball = Z2.ball(3);
  CHECK(lattice_ball.size() == 25);
  const auto quadrant = cone_profile(Z2, {1, 1}, lattice_ball);
  for (std::size_t i = 0; i < lattice_ball.size(); ++i)
    CHECK(quadrant[i] == (lattice_ball[i][0] >= 0 && lattice_ball[i][1] >= 0));
}

TEST_CASE("free group automaton") {
  const auto f2 = testing::free_group(2);
  const FreeProductCayley F(f2);
  const auto A = build_automaton(F, 3, 6);
  CHECK(A.size() == 5);
  CHECK(A.stabilized);
  CHECK(A.closed);
  CHECK(A.in_degree_consistent);
  CHECK(A.states_by_radius == std::vector<std::size_t>{1, 5, 5, 5, 5, 5, 5});
  CHECK(A.representative_text[A.initial] == "e");

  const auto scc = strongly_connected_components(A);
  CHECK_FALSE(scc.strongly_connected);
  CHECK(scc.non_initial_strongly_connected);
  CHECK(scc.component_count == 2);

  const auto c2 = condition_two_check(A, 4);
  CHECK(c2.holds);
  CHECK(c2.witnesses.empty());

  const auto spheres = sphere_sizes(A, 8);
  CHECK(spheres.geodesic_words[0] == 1);
  CHECK(spheres.geodesic_words[3] == 36);
  for (std::int64_t n = 1; n <= 8; ++n) {
    std::uint64_t expected = 4;
    for (int i = 1; i < n; ++i) expected *= 3;
    CHECK(spheres.geodesic_words[static_cast<std::size_t>(n)] == expected);
    CHECK(spheres.elements[static_cast<std::size_t>(n)] == expected);
  }
  check_spheres_against_enumeration(F, A, 8);
  const auto counts = f2.sphere_counts(8);
  for (std::size_t n = 0; n <= 8; ++n) CHECK(static_cast<double>(spheres.elements[n]) == counts[n]);
  check_representatives(F, A);
}

TEST_CASE("lattice automata") {
  const LatticeGroup Z2(2);
  const auto A = build_automaton(Z2, 3, 6);
  CHECK(A.size() == 9);  // 2^d + 2d + 1
  CHECK(A.stabilized);
  CHECK(A.in_degree_consistent);
  const auto scc = strongly_connected_components(A);
  CHECK_FALSE(scc.strongly_connected);
  CHECK_FALSE(scc.non_initial_strongly_connected);
  CHECK(scc.component_count > 2);
  CHECK(condition_two_check(A, 4).holds);

  const auto spheres = sphere_sizes(A, 8);
  CHECK(spheres.elements[0] == 1);
  for (std::size_t n = 1; n <= 8; ++n) CHECK(spheres.elements[n] == 4 * n);
  // Geodesic words overcount elements: (1,1) has two geodesics.
  CHECK(spheres.geodesic_words[2] == 12);
  check_spheres_against_enumeration(Z2, A, 8);
  check_representatives(Z2, A);

  const LatticeGroup Z1(1);
  const auto B = build_automaton(Z1, 3, 6);
  CHECK(B.size() == 3);
  CHECK(B.stabilized);
  check_spheres_against_enumeration(Z1, B, 8);

  const LatticeGroup Z3(3);
  const auto C = build_automaton(Z3, 3, 5);
  CHECK(C.size() == 27);  // sign patterns in {−, 0, +}^3
  CHECK(C.stabilized);
  check_spheres_against_enumeration(Z3, C, 6);
}

TEST_CASE("free products with torsion") {
  const auto z22 = testing::cyclic_product(2, 2);
  const FreeProductCayley D(z22);
  const auto A = build_automaton(D, 3, 6);
  CHECK(A.size() == 3);
  CHECK(A.stabilized);
  CHECK(condition_two_check(A, 6).holds);
  const auto spheres = sphere_sizes(A, 8);
  for (std::size_t n = 1; n <= 8; ++n) CHECK(spheres.elements[n] == 2);
  check_representatives(D, A);

  const auto z23 = testing::cyclic_product(2, 3);
  const FreeProductCayley M(z23);
  const auto B = build_automaton(M, 3, 8);
  CHECK(B.stabilized);
  check_spheres_against_enumeration(M, B, 10);
  check_representatives(M, B);

  const auto mixed = GroupContext({FactorDescriptor::cyclic("x", 2), testing::s3_factor()});
  const FreeProductCayley S(mixed);
  const auto C = build_automaton(S, 3, 8);
  CHECK(C.stabilized);
  CHECK(C.in_degree_consistent);
  check_spheres_against_enumeration(S, C, 10);
  check_representatives(S, C);
}

TEST_CASE("larger probe radius only refines profiles") {
  const auto z23 = testing::cyclic_product(2, 3);
  const FreeProductCayley M(z23);
  const auto elements = M.ball(6);
  const auto small = M.ball(3);
  const auto large = M.ball(4);
  for (std::size_t i = 0; i < elements.size(); ++i)
    for (std::size_t j = i + 1; j < elements.size(); ++j)
      if (cone_profile(M, elements[i], large) == cone_profile(M, elements[j], large))
        CHECK(cone_profile(M, elements[i], small) == cone_profile(M, elements[j], small));
  CHECK(build_automaton(M, 4, 7).size() >= build_automaton(M, 3, 7).size());
}

TEST_CASE("automaton build is deterministic") {
  const auto f3 = testing::free_group(3);
  const FreeProductCayley F(f3);
  const auto A = build_automaton(F, 3, 5);
  const auto B = build_automaton(F, 3, 5);
  CHECK(A.signatures == B.signatures);
  CHECK(A.representative_text == B.representative_text);
  CHECK(A.next == B.next);
  CHECK(A.size() == 7);
}

TEST_CASE("non-stabilized builds are flagged") {
  const auto f2 = testing::free_group(2);
  const FreeProductCayley F(f2);
  // Radius 0 has one state and radius 1 has five.
  const auto A = build_automaton(F, 3, 1);
  CHECK_FALSE(A.stabilized);
  CHECK_THROWS_AS(build_automaton(F, 3, 0), MalformedInput);
  CHECK_THROWS_AS(build_automaton(F, 3, 12, 1000), ResourceLimit);
}

TEST_CASE("SCC edge cases") {
  const auto single = strongly_connected_components({{}}, 0);
  CHECK(single.strongly_connected);
  CHECK(single.component_count == 1);
  const auto cycle = strongly_connected_components({{1}, {2}, {0}}, 0);
  CHECK(cycle.strongly_connected);
  CHECK(cycle.non_initial_strongly_connected == false);
  const auto split = strongly_connected_components({{1, 2}, {2}, {1}}, 0);
  CHECK_FALSE(split.strongly_connected);
  CHECK(split.non_initial_strongly_connected);
}

TEST_CASE("automaton export") {
  const auto f2 = testing::free_group(2);
  const FreeProductCayley F(f2);
  const auto A = build_automaton(F, 3, 4);
  std::ostringstream json_out;
  write_adjacency_json(json_out, view(A));
  const auto j = nlohmann::json::parse(json_out.str());
  CHECK(j["states"].size() == 5);
  CHECK(j["edges"].size() == 4 + 4 * 3);
  CHECK(j["states"][0]["representative"] == "e");
  CHECK(j["stabilized"] == true);

  std::ostringstream dot;
  write_dot(dot, view(A));
  const auto text = dot.str();
  CHECK(text.rfind("digraph cones {", 0) == 0);
  CHECK(text.find("s0 [label=\"C(e)\", shape=doublecircle]") != std::string::npos);
  CHECK(text.find("->") != std::string::npos);
}
