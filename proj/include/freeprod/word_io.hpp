#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "freeprod/group.hpp"

namespace freeprod {

/// Parses whitespace-separated `symbol^exp` tokens (exponent optional,
/// default 1) and returns the normalized product. The empty string and the
/// token `e` denote the identity.
ReducedWord parse_word(std::string_view text, const GroupContext& ctx);

/// Renders a word in the same token syntax; `e` for the identity.
/// parse_word(format_word(w)) == w.
std::string format_word(const ReducedWord& w, const GroupContext& ctx);

/// Serialized form: (factor_index, code) pairs.
std::vector<std::pair<std::size_t, std::int64_t>> serialize_word(const ReducedWord& w);
ReducedWord deserialize_word(const std::vector<std::pair<std::size_t, std::int64_t>>& pairs,
                             const GroupContext& ctx);

}  // namespace freeprod
