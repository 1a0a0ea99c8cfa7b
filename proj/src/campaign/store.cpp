#include "gtt/campaign/store.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "gtt/common/csv.hpp"
#include "gtt/common/errors.hpp"
#include "gtt/protocol/serialize.hpp"

namespace gtt {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr std::string_view kTempMarker = ".tmp-";

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DomainError("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool is_temp(const fs::path& p) { return p.filename().string().find(kTempMarker) != std::string::npos; }

LoadResult load_dir(const fs::path& dir) {
  LoadResult out;
  if (!fs::exists(dir)) return out;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json" && !is_temp(e.path())) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    try {
      const json j = json::parse(read_file(f));
      StoredRecord s;
      s.record = j.get<TrialRecord>();
      s.attempt_index = j.value("attempt_index", std::size_t{1});
      s.reason = j.value("reason", std::string{});
      s.file = f;
      out.records.push_back(std::move(s));
    } catch (const std::exception& e) {
      out.corrupt.emplace_back(f, e.what());
    }
  }
  return out;
}

std::string pair_label(const ProtocolVariant& v) {
  std::string out = v.actor + "->" + v.target;
  if (v.fixed_distinguisher) out += "@" + *v.fixed_distinguisher;
  return out;
}

}  // namespace

void write_atomic(const fs::path& path, std::string_view content) {
  static std::atomic<std::uint64_t> counter{0};
  thread_local std::mt19937_64 rng(std::random_device{}());
  const fs::path tmp = path.string() + std::string(kTempMarker) + std::to_string(rng()) + "-" +
                       std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

fs::path RunDirectory::trial_path(std::string_view trial_id) const {
  return trials_dir() / (std::string(trial_id) + ".json");
}

void RunDirectory::create() const {
  fs::create_directories(trials_dir());
  fs::create_directories(failed_dir());
}

bool RunDirectory::has_manifest() const { return fs::exists(manifest_path()); }

json RunDirectory::read_manifest() const {
  try {
    return json::parse(read_file(manifest_path()));
  } catch (const json::exception& e) {
    throw ConfigError("corrupt manifest " + manifest_path().string() + ": " + e.what());
  }
}

void RunDirectory::write_manifest(const json& manifest) const { write_atomic(manifest_path(), manifest.dump(2)); }

bool RunDirectory::has_trial(std::string_view trial_id) const { return fs::exists(trial_path(trial_id)); }

void RunDirectory::write_trial(const TrialRecord& record, std::size_t attempt_index) const {
  json j = record;
  j["attempt_index"] = attempt_index;
  write_atomic(trial_path(record.config.trial_id), j.dump(2));
}

fs::path RunDirectory::write_failed(const TrialRecord& record, std::size_t attempt_index,
                                    std::string_view reason) const {
  json j = record;
  j["attempt_index"] = attempt_index;
  j["reason"] = reason;
  const std::string stamp = format_utc_compact(Clock::now());
  const fs::path p =
      failed_dir() / (record.config.trial_id + "__a" + std::to_string(attempt_index) + "__" + stamp + ".json");
  write_atomic(p, j.dump(2));
  return p;
}

std::map<std::string, std::size_t> RunDirectory::failed_attempt_counts() const {
  std::map<std::string, std::size_t> out;
  if (!fs::exists(failed_dir())) return out;
  for (const auto& e : fs::directory_iterator(failed_dir())) {
    if (!e.is_regular_file() || is_temp(e.path()) || e.path().extension() != ".json") continue;
    const std::string stem = e.path().stem().string();
    const auto stamp = stem.rfind("__");
    if (stamp == std::string::npos || stamp == 0) continue;
    const auto attempt = stem.rfind("__a", stamp - 1);
    if (attempt == std::string::npos) continue;
    ++out[stem.substr(0, attempt)];
  }
  return out;
}

LoadResult RunDirectory::load_trials() const { return load_dir(trials_dir()); }
LoadResult RunDirectory::load_failed() const { return load_dir(failed_dir()); }

std::size_t RunDirectory::remove_temp_files() const {
  std::size_t removed = 0;
  for (const auto& dir : {root_, trials_dir(), failed_dir()}) {
    if (!fs::exists(dir)) continue;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file() && is_temp(e.path())) {
        fs::remove(e.path());
        ++removed;
      }
    }
  }
  return removed;
}

void RunDirectory::write_results_csv(const std::vector<StoredRecord>& trials) const {
  std::vector<const StoredRecord*> sorted;
  for (const auto& t : trials) sorted.push_back(&t);
  std::sort(sorted.begin(), sorted.end(), [](const StoredRecord* a, const StoredRecord* b) {
    return a->record.config.trial_id < b->record.config.trial_id;
  });

  std::ostringstream os;
  os << kResultsHeader << '\n';
  for (const StoredRecord* s : sorted) {
    const TrialRecord& r = s->record;
    std::size_t main = 0;
    std::size_t specimen = 0;
    for (const auto& m : r.transcript) {
      if (m.channel == Channel::kMain) ++main;
      if (m.channel == Channel::kSpecimen) ++specimen;
    }
    write_csv_row(os, {r.config.trial_id, pair_label(r.config.variant), std::string(to_string(r.secret)),
                       r.parsed.bit ? std::to_string(*r.parsed.bit) : "",
                       r.success ? (*r.success ? "1" : "0") : "", std::to_string(main), std::to_string(specimen),
                       r.parsed.kind == ParsedAnswer::Kind::kOpening ? "1" : "0", std::to_string(s->attempt_index)});
  }
  write_atomic(results_path(), os.str());
}

AggregateReport aggregate_run(const RunDirectory& dir) {
  AggregateReport report;
  std::optional<std::size_t> planned;
  if (dir.has_manifest()) {
    const json m = dir.read_manifest();
    if (m.contains("plan")) {
      for (const auto& model : m.at("plan").at("models")) report.table.models.push_back(model.at("id"));
      planned = m.at("plan").value("trials_per_ordered_pair", std::size_t{10});
    }
  }

  LoadResult trials = dir.load_trials();
  LoadResult failed = dir.load_failed();
  report.corrupt = trials.corrupt;
  report.corrupt.insert(report.corrupt.end(), failed.corrupt.begin(), failed.corrupt.end());

  for (const auto& s : trials.records) report.table.add(s.record);
  for (const auto& s : failed.records) {
    if (!s.record.failed() && !s.record.parsed.analyzable()) report.table.add(s.record);
  }

  if (report.table.models.empty()) {
    std::set<std::string> seen;
    for (const auto& [key, c] : report.table.cells) {
      seen.insert(key.actor);
      seen.insert(key.target);
    }
    report.table.models.assign(seen.begin(), seen.end());
  }

  for (const auto& [key, c] : report.table.cells) {
    std::string label = key.actor + "->" + key.target;
    if (key.fixed()) label += "@" + key.distinguisher;
    if (c.unparseable > 0) {
      report.warnings.push_back(label + ": " + std::to_string(c.unparseable) + " unparseable attempt(s) excluded");
    }
    if (planned && c.analyzable() < *planned) {
      report.warnings.push_back(label + ": " + std::to_string(c.analyzable()) + " of " + std::to_string(*planned) +
                                " analyzable trials");
    }
  }
  return report;
}

}  // namespace gtt
