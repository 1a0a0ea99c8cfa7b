#pragma once

#include <map>
#include <string>
#include <string_view>

namespace gtt::assets {

/// Files shipped under assets/, embedded at build time. Keys are paths
/// relative to the assets directory, e.g. "prompts/gtt_actor.txt".
const std::map<std::string_view, std::string_view>& all();

/// Throws ConfigError when the asset does not exist.
std::string_view get(std::string_view relative_path);

}  // namespace gtt::assets
