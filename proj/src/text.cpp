#include "pestpulse/text.hpp"

#include <cctype>

namespace pestpulse {

namespace {

bool is_space_like(unsigned char c) { return std::isspace(c) != 0; }

}  // namespace

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char ch : text) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else {
      // Punctuation and whitespace both act as token separators.
      pending_space = true;
    }
  }
  return out;
}

std::vector<std::string> split_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(' ', pos);
    if (next == std::string_view::npos) next = text.size();
    if (next > pos) tokens.emplace_back(text.substr(pos, next - pos));
    pos = next + 1;
  }
  return tokens;
}

std::string trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && is_space_like(static_cast<unsigned char>(text[begin])))
    ++begin;
  while (end > begin && is_space_like(static_cast<unsigned char>(text[end - 1])))
    --end;
  return std::string(text.substr(begin, end - begin));
}

std::string canonical_region(std::string_view name) {
  std::string out = trim(name);
  for (char& ch : out)
    ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

}  // namespace pestpulse
