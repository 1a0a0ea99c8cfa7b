#include "gtt/protocol/answer.hpp"

#include "gtt/common/util.hpp"

namespace gtt {
namespace {

constexpr std::string_view kOpen = "<answer>";
constexpr std::string_view kClose = "</answer>";

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// Parses a tag starting at `pos`; returns the bit or -1.
int tag_at(std::string_view s, std::size_t pos) {
  std::size_t i = pos + kOpen.size();
  while (i < s.size() && is_space(s[i])) ++i;
  if (i >= s.size() || (s[i] != '0' && s[i] != '1')) return -1;
  const int bit = s[i] - '0';
  ++i;
  while (i < s.size() && is_space(s[i])) ++i;
  if (s.substr(i, kClose.size()) != kClose) return -1;
  return bit;
}

}  // namespace

ParsedAnswer parse_answer(std::string_view message, bool is_opening) {
  int last = -1;
  for (auto pos = message.find(kOpen); pos != std::string_view::npos; pos = message.find(kOpen, pos + 1)) {
    const int bit = tag_at(message, pos);
    if (bit >= 0) last = bit;
  }
  if (last < 0) return ParsedAnswer::unparseable();
  if (is_opening) return ParsedAnswer::opening(last);
  return last == 1 ? ParsedAnswer::same() : ParsedAnswer::different();
}

bool is_stop_message(std::string_view message) { return trim(message) == "STOP"; }

}  // namespace gtt
