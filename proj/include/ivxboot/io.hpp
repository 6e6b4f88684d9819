#pragma once

#include <string>

#include "ivxboot/harness.hpp"

namespace ivxboot::io {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Run provenance. Timestamps are tracked for logging only and never enter
// the hashed payload or the emitted data files, so equal (digest, seed)
// reruns are byte-identical.
struct RunManifest {
  std::uint64_t config_digest = 0;
  std::uint64_t seed = 0;
  std::string generator = rng::kGeneratorName;
  std::string version = kArtifactVersion;
  bool deterministic = true;
};

enum class ReportFormat { csv, json };

// Canonical JSON echo of a configuration (defaults applied); its dump is the
// hashed payload for the config digest.
std::string config_canonical_json(const mc::ExperimentConfig& cfg);
std::uint64_t config_digest(const mc::ExperimentConfig& cfg);

// Parses and validates a configuration file; unknown and duplicate keys are
// rejected, defaults are applied, and the digest is filled in.
mc::ExperimentConfig parse_config(const std::string& path);
mc::ExperimentConfig parse_config_text(const std::string& text);

// Fixed-order CSV row and aggregate files.
void write_report_csv(const mc::ExperimentReport& report, const std::string& rows_path,
                      const std::string& aggregates_path);
// JSON mirror with the manifest embedded.
void write_report_json(const mc::ExperimentReport& report, const std::string& path);
mc::ExperimentReport read_report_json(const std::string& path);

// Prefix dispatcher: csv emits <prefix>_rows.csv and <prefix>_cells.csv,
// json emits <prefix>.json.
void write_report(const mc::ExperimentReport& report, const std::string& path_prefix,
                  ReportFormat format);

// Structural equality over everything serialized (wall time is not).
bool reports_equal(const mc::ExperimentReport& a, const mc::ExperimentReport& b);

void write_pair_csv(const dgp::TimeSeriesPair& pair, const std::string& path);
dgp::TimeSeriesPair read_pair_csv(const std::string& path);

void write_quantile_table(const EmpiricalDistribution& dist, const std::string& path);

}  // namespace ivxboot::io
