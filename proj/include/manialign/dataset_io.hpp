#pragma once

// Tabular dataset format, run configuration and report serialization.
//
//   <dir>/manifest.json      {"version": "manialign-dataset/1",
//                             "domains": [{"file", "dim", "band_tags"?, "validation_labels"?}]}
//   <dir>/domain<m>.csv      header f1..fd,label,tie_object; label -1 = unlabeled,
//                            tie_object -1 = none
//   <dir>/domain<m>_truth.csv  single "label" column for domains whose labels are hidden

#include "manialign/alignment.hpp"
#include "manialign/classify.hpp"
#include "manialign/dataset.hpp"
#include "manialign/protocol.hpp"
#include "manialign/synth.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace manialign::io {

/// Shortest round-trip decimal form.
std::string format_double(double v);

void write_domain_csv(const std::filesystem::path& path, const DomainDataset& d);
DomainDataset read_domain_csv(const std::filesystem::path& path, int domain_id);

struct LoadedDataset {
  MultiDomainCollection data;
  std::vector<std::optional<std::vector<int>>> validation_labels;  // per domain
};

/// Writes domain CSVs, hidden-label files and manifest.json into `dir`.
void write_dataset(const std::filesystem::path& dir, const synth::SynthOutput& out);
LoadedDataset read_dataset(const std::filesystem::path& manifest);

void write_latent_csv(const std::filesystem::path& path, const Matrix& z);
Matrix read_matrix_csv(const std::filesystem::path& path);

struct RunConfig {
  alignment::FitConfig fit;
  protocol::ExperimentConfig experiment;
};

/// Parses a JSON run configuration. Unknown keys and ill-typed values raise
/// BadConfig; missing keys keep their defaults.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);

std::string report_to_json(const classify::EvalReport& r, int indent = 2);
std::string experiment_to_json(const protocol::ExperimentResult& r, std::size_t reps, int indent = 2);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace manialign::io
