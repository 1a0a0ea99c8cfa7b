#pragma once

#include <map>
#include <optional>
#include <string>

namespace gtt {

using EnvBlock = std::map<std::string, std::optional<std::string>>;

/// runtime, platform, commit, host and container, null when unknown.
/// GTT_COMMIT and GTT_CONTAINER_HASH override the detected values.
EnvBlock capture_env();

}  // namespace gtt
