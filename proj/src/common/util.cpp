#include "gtt/common/util.hpp"

#include <ctime>
#include <cstdio>

#include "gtt/common/assets.hpp"
#include "gtt/common/errors.hpp"

namespace gtt {
namespace {

std::tm to_utc_tm(Timestamp t) {
  const std::time_t secs = Clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  return tm;
}

int millis_part(Timestamp t) {
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count();
  return static_cast<int>(((ms % 1000) + 1000) % 1000);
}

}  // namespace

std::string format_utc(Timestamp t) {
  const std::tm tm = to_utc_tm(t);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, millis_part(t));
  return buf;
}

std::string format_utc_compact(Timestamp t) {
  const std::tm tm = to_utc_tm(t);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%04d%02d%02dT%02d%02d%02d%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, millis_part(t));
  return buf;
}

Timestamp parse_utc(std::string_view s) {
  const std::string text(s);
  std::tm tm{};
  int millis = 0;
  int consumed = 0;
  if (std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%3dZ%n", &tm.tm_year, &tm.tm_mon, &tm.tm_mday, &tm.tm_hour,
                  &tm.tm_min, &tm.tm_sec, &millis, &consumed) != 7 ||
      static_cast<std::size_t>(consumed) != text.size()) {
    throw DomainError("not a UTC timestamp: " + text);
  }
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  return Clock::from_time_t(timegm(&tm)) + std::chrono::milliseconds(millis);
}

std::string_view trim(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n\f\v";
  const auto begin = s.find_first_not_of(kSpace);
  if (begin == std::string_view::npos) {
    return {};
  }
  const auto end = s.find_last_not_of(kSpace);
  return s.substr(begin, end - begin + 1);
}

namespace assets {

std::string_view get(std::string_view relative_path) {
  const auto& table = all();
  const auto it = table.find(relative_path);
  if (it == table.end()) {
    throw ConfigError("missing embedded asset: " + std::string(relative_path));
  }
  return it->second;
}

}  // namespace assets
}  // namespace gtt
