#ifndef PESTPULSE_TEXT_HPP
#define PESTPULSE_TEXT_HPP

#include <string>
#include <string_view>
#include <vector>

namespace pestpulse {

// Default text normalizer: ASCII lowercase, punctuation replaced by spaces,
// whitespace collapsed to single spaces, trimmed. Idempotent.
std::string normalize_text(std::string_view text);

std::vector<std::string> split_tokens(std::string_view text);

// Region-name canonicalization: trim + ASCII uppercase.
std::string canonical_region(std::string_view name);

std::string trim(std::string_view text);

}  // namespace pestpulse

#endif  // PESTPULSE_TEXT_HPP
