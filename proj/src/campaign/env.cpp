#include "gtt/campaign/env.hpp"

#include <sys/utsname.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>

namespace gtt {

namespace {

std::optional<std::string> from_env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

std::optional<std::string> container_id() {
  if (auto v = from_env("GTT_CONTAINER_HASH")) return v;
  std::ifstream in("/proc/self/cgroup");
  std::string line;
  while (std::getline(in, line)) {
    const auto pos = line.find_last_of('/');
    if (pos == std::string::npos) continue;
    std::string tail = line.substr(pos + 1);
    if (tail.size() >= 64 && tail.find_first_not_of("0123456789abcdef") == 64) return tail.substr(0, 64);
  }
  return std::nullopt;
}

}  // namespace

EnvBlock capture_env() {
  EnvBlock env;
  env["runtime"] = std::string(__VERSION__) + ", C++" + std::to_string(__cplusplus);

  utsname u{};
  if (uname(&u) == 0) {
    env["platform"] = std::string(u.sysname) + " " + u.release + " " + u.machine;
  } else {
    env["platform"] = std::nullopt;
  }

#ifdef GTT_GIT_COMMIT
  env["commit"] = from_env("GTT_COMMIT").value_or(GTT_GIT_COMMIT);
#else
  env["commit"] = from_env("GTT_COMMIT");
#endif

  char host[256] = {};
  if (gethostname(host, sizeof host - 1) == 0 && host[0]) {
    env["host"] = std::string(host);
  } else {
    env["host"] = std::nullopt;
  }
  env["container"] = container_id();
  return env;
}

}  // namespace gtt
