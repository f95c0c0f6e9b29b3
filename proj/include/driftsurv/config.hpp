#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "driftsurv/experiment.hpp"
#include "driftsurv/synthetic.hpp"

namespace driftsurv::config {

enum class SourceKind { Synthetic, Files, Panel };

struct DataSource {
  SourceKind kind = SourceKind::Synthetic;
  data::SyntheticConfig synthetic;
  std::uint64_t seed = 42;  // synthetic generator
  std::filesystem::path origination;
  std::filesystem::path performance;
  nlohmann::json schema;  // null: Freddie Mac layout
  std::filesystem::path panel;
};

/// One run of the evaluation grid. Every seed left unset in the document
/// defaults to the top-level "seed".
struct ExperimentConfig {
  std::uint64_t seed = 42;
  DataSource data;
  std::vector<eval::Scenario> scenarios;
  std::vector<hazard::Variant> variants;
  int k = 5;
  std::uint64_t cv_seed = 42;
  eval::ExperimentOptions options;
  std::string output_dir = "driftsurv-out";

  /// Unknown keys anywhere raise ConfigError. `seed_override` replaces the
  /// top-level seed before defaults are filled.
  static ExperimentConfig from_json(const nlohmann::json& j, std::optional<std::uint64_t> seed_override = {});
  /// Fully resolved document; from_json(to_json()) reproduces the config.
  nlohmann::json to_json() const;
};

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override = {});

struct IngestResult {
  data::LoanPanel panel;
  data::JoinReport join;
  data::ParseStats origination;
  data::ParseStats performance;
};

IngestResult ingest_files(const std::filesystem::path& origination, const std::filesystem::path& performance,
                          const data::IngestSchema& schema);
nlohmann::json to_json(const data::ParseStats& s);

/// Loads or generates the panel named by the data source.
data::LoanPanel load_data(const DataSource& src);

}  // namespace driftsurv::config
