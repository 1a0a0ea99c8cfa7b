#include "gtt/tabular/policy.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "gtt/common/errors.hpp"
#include "gtt/common/util.hpp"

namespace gtt {
namespace {

constexpr char kSeparator = '\x1f';
constexpr std::uint64_t kLatentSalt = 0x6c6174656e74ULL;

}  // namespace

void check_row(const Row& row) {
  if (row.empty()) throw DomainError("empty distribution row");
  double total = 0.0;
  for (const auto& o : row) {
    if (!(o.probability >= 0.0)) throw DomainError("negative probability for symbol '" + o.symbol + "'");
    total += o.probability;
  }
  if (std::abs(total - 1.0) > kRowTolerance) {
    throw DomainError("distribution row sums to " + std::to_string(total));
  }
}

std::string TabularPolicy::join(const Dialogue& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(kSeparator);
    out += parts[i];
  }
  return out;
}

Dialogue TabularPolicy::split(std::string_view key) {
  Dialogue out;
  if (key.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = key.find(kSeparator, start);
    out.emplace_back(key.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string TabularPolicy::key(const Dialogue& dialogue) const {
  const std::size_t n = dialogue.size();
  const std::size_t first = depth_ == 0 || depth_ >= n ? 0 : n - depth_;
  std::string out;
  for (std::size_t i = first; i < n; ++i) {
    if (i > first) out.push_back(kSeparator);
    out += dialogue[i];
  }
  return out;
}

void TabularPolicy::set_row(const Dialogue& context, Row row) { set_row_key(join(context), std::move(row)); }

void TabularPolicy::set_row_key(std::string key, Row row) {
  check_row(row);
  rows_[std::move(key)] = std::move(row);
}

const Row* TabularPolicy::find(const Dialogue& dialogue) const {
  const auto it = rows_.find(key(dialogue));
  return it == rows_.end() ? nullptr : &it->second;
}

const Row& TabularPolicy::row(const Dialogue& dialogue) const {
  if (const Row* r = find(dialogue)) return *r;
  std::string shown = key(dialogue);
  for (auto& c : shown) {
    if (c == kSeparator) c = '|';
  }
  throw DomainError("no table row for context '" + shown + "'");
}

MixedPolicy::MixedPolicy(TabularPolicy single) { components_.emplace_back(1.0, std::move(single)); }

MixedPolicy::MixedPolicy(std::vector<std::pair<double, TabularPolicy>> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw DomainError("mixture needs at least one component");
  double total = 0.0;
  for (const auto& [w, p] : components_) {
    if (!(w >= 0.0)) throw DomainError("negative mixture weight");
    total += w;
  }
  if (std::abs(total - 1.0) > kRowTolerance) {
    throw DomainError("mixture weights sum to " + std::to_string(total));
  }
}

std::size_t MixedPolicy::choose(std::uint64_t instance_seed) const {
  if (components_.empty()) throw DomainError("empty mixture");
  if (components_.size() == 1) return 0;
  std::mt19937_64 rng(combine_seed(instance_seed, kLatentSalt));
  const double u = unit_uniform(rng);
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (components_[i].first <= 0.0) continue;
    last = i;
    acc += components_[i].first;
    if (u < acc) return i;
  }
  return last;
}

MixedPolicy MixedPolicy::blend(double w, const MixedPolicy& other) const {
  if (w < 0.0 || w > 1.0) throw DomainError("blend weight outside [0,1]");
  std::vector<std::pair<double, TabularPolicy>> out;
  for (const auto& [cw, p] : components_) out.emplace_back(w * cw, p);
  for (const auto& [cw, p] : other.components_) out.emplace_back((1.0 - w) * cw, p);
  return MixedPolicy(std::move(out));
}

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

const std::string& sample_row(const Row& row, std::mt19937_64& rng) {
  const double u = unit_uniform(rng);
  double acc = 0.0;
  const std::string* last = nullptr;
  for (const auto& o : row) {
    if (o.probability <= 0.0) continue;
    last = &o.symbol;
    acc += o.probability;
    if (u < acc) return o.symbol;
  }
  if (!last) throw DomainError("row has no positive entry");
  return *last;
}

std::string sample_tabular(const TabularPolicy& policy, const Dialogue& dialogue, std::mt19937_64& rng) {
  return sample_row(policy.row(dialogue), rng);
}

std::mt19937_64 call_rng(std::uint64_t instance_seed, std::size_t call_index) {
  return std::mt19937_64(combine_seed(instance_seed, call_index + 1));
}

void to_json(nlohmann::json& j, const TabularPolicy& p) {
  j = nlohmann::json::object();
  j["depth"] = p.depth();
  auto rows = nlohmann::json::array();
  for (const auto& [key, row] : p.rows()) {
    nlohmann::json dist = nlohmann::json::object();
    for (const auto& o : row) dist[o.symbol] = o.probability;
    rows.push_back({{"context", TabularPolicy::split(key)}, {"dist", dist}});
  }
  j["rows"] = std::move(rows);
}

void from_json(const nlohmann::json& j, TabularPolicy& p) {
  p = TabularPolicy(j.value("depth", std::size_t{0}));
  for (const auto& r : j.at("rows")) {
    Row row;
    for (const auto& [symbol, prob] : r.at("dist").items()) row.push_back({symbol, prob.get<double>()});
    p.set_row(r.at("context").get<Dialogue>(), std::move(row));
  }
}

void to_json(nlohmann::json& j, const MixedPolicy& p) {
  if (p.components().size() == 1) {
    to_json(j, p.components().front().second);
    return;
  }
  auto comps = nlohmann::json::array();
  for (const auto& [w, policy] : p.components()) {
    nlohmann::json c;
    to_json(c, policy);
    c["weight"] = w;
    comps.push_back(std::move(c));
  }
  j = {{"mixture", std::move(comps)}};
}

void from_json(const nlohmann::json& j, MixedPolicy& p) {
  if (!j.contains("mixture")) {
    p = MixedPolicy(j.get<TabularPolicy>());
    return;
  }
  std::vector<std::pair<double, TabularPolicy>> comps;
  for (const auto& c : j.at("mixture")) comps.emplace_back(c.at("weight").get<double>(), c.get<TabularPolicy>());
  p = MixedPolicy(std::move(comps));
}

}  // namespace gtt
