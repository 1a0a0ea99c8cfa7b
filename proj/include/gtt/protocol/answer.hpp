#pragma once

#include <string_view>

#include "gtt/protocol/types.hpp"

namespace gtt {

/// Extracts the verdict from a distinguisher message. The last well-formed
/// `<answer>0</answer>` / `<answer>1</answer>` tag wins (whitespace inside
/// the tag is tolerated). A tag in the opening message yields kOpening.
ParsedAnswer parse_answer(std::string_view message, bool is_opening);

/// STOP detection for query stages: the whole message, trimmed, is "STOP".
bool is_stop_message(std::string_view message);

}  // namespace gtt
