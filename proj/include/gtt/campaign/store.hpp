#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gtt/analytics/estimate.hpp"
#include "gtt/protocol/types.hpp"

namespace gtt {

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

struct StoredRecord {
  TrialRecord record;
  std::size_t attempt_index = 1;
  /// Set for failed attempts: "backend" or "unparseable".
  std::string reason;
  std::filesystem::path file;
};

struct LoadResult {
  std::vector<StoredRecord> records;
  /// Files that could not be parsed, with the error.
  std::vector<std::pair<std::filesystem::path, std::string>> corrupt;
};

/// On-disk layout of one campaign:
///   manifest.json, results.csv, trials/<trial_id>.json,
///   failed/<trial_id>__a<attempt>__<utc>.json
class RunDirectory {
 public:
  explicit RunDirectory(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path manifest_path() const { return root_ / "manifest.json"; }
  std::filesystem::path results_path() const { return root_ / "results.csv"; }
  std::filesystem::path trials_dir() const { return root_ / "trials"; }
  std::filesystem::path failed_dir() const { return root_ / "failed"; }
  std::filesystem::path trial_path(std::string_view trial_id) const;

  void create() const;
  bool has_manifest() const;
  nlohmann::json read_manifest() const;
  void write_manifest(const nlohmann::json& manifest) const;

  bool has_trial(std::string_view trial_id) const;
  void write_trial(const TrialRecord& record, std::size_t attempt_index) const;
  std::filesystem::path write_failed(const TrialRecord& record, std::size_t attempt_index,
                                     std::string_view reason) const;

  /// Failed attempts per trial id, from file names.
  std::map<std::string, std::size_t> failed_attempt_counts() const;

  LoadResult load_trials() const;
  LoadResult load_failed() const;
  /// Leftovers of interrupted atomic writes.
  std::size_t remove_temp_files() const;

  /// Rebuilds results.csv from the trial files.
  void write_results_csv(const std::vector<StoredRecord>& trials) const;

 private:
  std::filesystem::path root_;
};

inline constexpr std::string_view kResultsHeader =
    "trial_id,pair,secret,verdict,success,turns_main,turns_specimen,opening_answer_flag,attempt_index";

struct AggregateReport {
  CountTable table;
  std::vector<std::pair<std::filesystem::path, std::string>> corrupt;
  /// Cells with unparseable attempts or fewer analyzable records than planned.
  std::vector<std::string> warnings;

  bool ok() const { return corrupt.empty(); }
};

AggregateReport aggregate_run(const RunDirectory& dir);

}  // namespace gtt
