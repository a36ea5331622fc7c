#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace freeprod {

/// Raised for words, factor indices or element codes that do not describe a
/// valid element of the group at hand.
class MalformedInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an enumeration or exact engine would exceed a configured cap.
class ResourceLimit : public std::runtime_error {
 public:
  ResourceLimit(const std::string& what, std::size_t cap)
      : std::runtime_error(what + " (cap " + std::to_string(cap) + ")"), cap_(cap) {}
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t cap_;
};

/// Raised when an operation is called outside its supported setting.
class Unsupported : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline constexpr std::size_t kDefaultBallCap = 10'000'000;

enum class FactorKind { Integer, FiniteCyclic, FiniteTable };

/// One free factor G_i together with its generating set S_i.
///
/// Element codes:
///   Integer       signed exponent of the single generator (0 = identity)
///   FiniteCyclic  residue in [0, order) (0 = identity)
///   FiniteTable   row index in the multiplication table
class FactorDescriptor {
 public:
  static FactorDescriptor integer(std::string name);
  static FactorDescriptor cyclic(std::string name, std::int64_t order);
  /// `table[i][j]` is the index of element i*j. `generator_names` label the
  /// generators for the word text syntax and must match `generators` in size.
  static FactorDescriptor table(std::string name, std::vector<std::vector<int>> table,
                                std::vector<int> generators,
                                std::vector<std::string> generator_names);

  const std::string& name() const { return name_; }
  FactorKind kind() const { return kind_; }
  /// Element count; 0 for the infinite cyclic factor.
  std::int64_t order() const { return order_; }
  std::int64_t identity() const { return identity_; }

  bool is_valid(std::int64_t code) const;
  bool is_identity(std::int64_t code) const { return code == identity_; }
  std::int64_t multiply(std::int64_t x, std::int64_t y) const;
  std::int64_t inverse(std::int64_t x) const;
  /// Word length of x with respect to S_i ∪ S_i⁻¹.
  std::int64_t length(std::int64_t x) const;

  /// Generator codes; the symbols in `symbols()` name them in word text.
  const std::vector<std::int64_t>& generators() const { return generators_; }
  const std::vector<std::string>& symbols() const { return symbols_; }

  /// Non-identity elements of length exactly k (k >= 1), in code order.
  std::vector<std::int64_t> sphere(std::int64_t k) const;
  /// |B^{G_i}(T)|, identity included.
  std::int64_t ball_size(double radius) const;
  /// Largest element length; -1 for the infinite cyclic factor.
  std::int64_t diameter() const;

 private:
  FactorDescriptor() = default;

  std::string name_;
  FactorKind kind_ = FactorKind::Integer;
  std::int64_t order_ = 0;
  std::int64_t identity_ = 0;
  std::vector<std::vector<int>> table_;
  std::vector<int> inverse_;
  std::vector<std::int64_t> distance_;
  std::vector<std::int64_t> generators_;
  std::vector<std::string> symbols_;
};

struct FactorElement {
  std::size_t factor = 0;
  std::int64_t code = 0;

  auto operator<=>(const FactorElement&) const = default;
};

/// Alternating product x₁⋯x_m of non-identity factor elements. Instances are
/// only produced by GroupContext, which enforces the reduced-word invariants.
class ReducedWord {
 public:
  ReducedWord() = default;

  std::span<const FactorElement> letters() const { return letters_; }
  std::size_t type_size() const { return letters_.size(); }
  bool is_identity() const { return letters_.empty(); }
  const FactorElement& operator[](std::size_t i) const { return letters_[i]; }
  const FactorElement& front() const { return letters_.front(); }
  const FactorElement& back() const { return letters_.back(); }

  auto operator<=>(const ReducedWord&) const = default;

 private:
  friend class GroupContext;
  explicit ReducedWord(std::vector<FactorElement> letters) : letters_(std::move(letters)) {}

  std::vector<FactorElement> letters_;
};

struct ReducedWordHash {
  std::size_t operator()(const ReducedWord& w) const noexcept;
};

inline std::size_t type_size(const ReducedWord& w) { return w.type_size(); }

/// Result of a starts-with / ends-with test. `short_word` marks a tested
/// element of type size below 2, for which the predicate is not defined and
/// the answer is false.
struct PrefixMatch {
  bool matches = false;
  bool short_word = false;
  explicit operator bool() const { return matches; }
};

PrefixMatch starts_with(const ReducedWord& g, const ReducedWord& pattern);
/// Compares the last k letters of g with the FIRST k letters of `pattern`.
PrefixMatch ends_with(const ReducedWord& g, const ReducedWord& pattern);

/// The free product G₁ ∗ ⋯ ∗ G_r. Immutable once built.
class GroupContext {
 public:
  explicit GroupContext(std::vector<FactorDescriptor> factors);

  std::size_t rank() const { return factors_.size(); }
  const FactorDescriptor& factor(std::size_t i) const { return factors_.at(i); }
  const std::vector<FactorDescriptor>& factors() const { return factors_; }
  /// True when every factor is infinite cyclic, i.e. G is free of rank r.
  bool is_free_group() const;

  void validate(const FactorElement& x) const;
  ReducedWord normalize(std::span<const FactorElement> raw) const;
  /// Checks that `letters` already form a reduced word and wraps them.
  ReducedWord from_reduced(std::vector<FactorElement> letters) const;
  ReducedWord letter(std::size_t factor, std::int64_t code) const;

  ReducedWord multiply(const ReducedWord& u, const ReducedWord& v) const;
  ReducedWord inverse(const ReducedWord& u) const;
  FactorElement inverse(const FactorElement& x) const;
  std::int64_t length(const ReducedWord& u) const;
  std::int64_t length(const FactorElement& x) const;
  /// ℓ(uv) without materializing the product.
  std::int64_t product_length(const ReducedWord& u, const ReducedWord& v) const;
  /// Conjugate u⁻¹ g u.
  ReducedWord conjugate(const ReducedWord& g, const ReducedWord& u) const;

  /// All elements of B(T) = {g : ℓ(g) <= T}, ordered by length then letters.
  std::vector<ReducedWord> ball(double radius, std::size_t cap = kDefaultBallCap) const;
  /// |S(k)| for k = 0..n, counted by syllable recursion without enumeration.
  std::vector<double> sphere_counts(std::int64_t n) const;
  /// θ_T = max_i |B^{G_i}(T)|.
  std::int64_t theta(double radius) const;

 private:
  std::vector<FactorDescriptor> factors_;
};

/// |B(n)|^{1/n} for n = 1..n_max.
std::vector<double> growth_estimate(const GroupContext& ctx, std::int64_t n_max,
                                    std::size_t cap = kDefaultBallCap);
std::vector<double> growth_estimate(const FactorDescriptor& factor, std::int64_t n_max,
                                    std::size_t cap = kDefaultBallCap);

}  // namespace freeprod
