#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tempheno/loss.hpp"
#include "tempheno/metrics.hpp"
#include "tempheno/optimizer.hpp"
#include "tempheno/tensor.hpp"

namespace tempheno::io {

enum class EventFormat { Csv, Jsonl };

/// ".jsonl" selects Jsonl, anything else Csv.
EventFormat format_from_path(const std::filesystem::path& path);

struct LoadOptions {
  /// CSV only: individual_id,duration file. Defaults to <stem>.durations.csv
  /// next to the events file when that file exists.
  std::optional<std::filesystem::path> durations_path;
  /// When set, the feature universe is exactly this list and any other
  /// feature is rejected with UnknownFeature.
  std::optional<std::vector<std::string>> feature_whitelist;
};

/// Loads an event list into a binary tensor.
///
/// CSV: header `individual_id,feature,time[,duration]`. Durations come from the
/// optional `duration` column or from the sidecar file; an individual listed in
/// the sidecar without events becomes an all-zero matrix.
///
/// JSONL: the first line declares the dataset,
///   {"type":"dataset","features":[...],"individuals":[{"id":..,"duration":..},..]}
/// and every following line is {"individual_id":..,"feature":..,"time":..}.
///
/// Feature rows are sorted lexicographically. Individuals keep declaration order.
IrregularTensor load_events(const std::filesystem::path& path, EventFormat format,
                            const LoadOptions& options = {});

IrregularTensor load_events(const std::filesystem::path& path, const LoadOptions& options = {});

/// Sidecar path used for a CSV events file: <dir>/<stem>.durations.csv.
std::filesystem::path durations_path_for(const std::filesystem::path& events_path);

/// Writes the tensor as events; CSV also writes the durations sidecar.
void save_events(const std::filesystem::path& path, const IrregularTensor& x, EventFormat format);

/// Content hash (FNV-1a 64, hex) over feature names, ids, shapes and cells.
std::string dataset_digest(const IrregularTensor& x);

inline constexpr int kModelFormatVersion = 1;

struct Provenance {
  std::uint64_t seed = 0;
  std::size_t epochs = 0;
  std::string dataset_digest;
  std::string train_digest;
};

struct ModelFile {
  int format_version = kModelFormatVersion;
  PhenotypeTensor phenotypes;
  HyperParams hyperparameters;
  Provenance provenance;
};

ModelFile make_model_file(const TrainedModel& model, const IrregularTensor& dataset,
                          const IrregularTensor& train_set);

/// JSON with 17-significant-digit round-trip doubles and a payload checksum.
void save_model(const std::filesystem::path& path, const ModelFile& model);

/// Throws VersionMismatch for another format_version and CorruptFile for
/// truncated files, checksum mismatches or inconsistent shapes.
ModelFile load_model(const std::filesystem::path& path);

struct PathwayFile {
  std::vector<std::string> individual_ids;
  std::size_t window = 0;
  PathwayCollection pathways;
};

void save_pathways(const std::filesystem::path& path, const PathwayFile& file);
PathwayFile load_pathways(const std::filesystem::path& path);

struct RunReport {
  std::string command;
  std::optional<double> fit_x_train;
  std::optional<double> fit_x_test;
  std::optional<double> fit_p;
  std::optional<double> fit_w;
  std::vector<LossRecord> loss_history;
  double wall_seconds = 0.0;
  HyperParams hyperparameters;
  double test_fraction = 0.0;
  std::size_t train_individuals = 0;
  std::size_t test_individuals = 0;
  std::string dataset_digest;
};

/// Machine-readable report; numeric fields depend only on inputs and seed,
/// except wall_seconds.
std::string to_json(const RunReport& report, int indent = 2);

/// Appends one CSV row (writing the header first when the file is new).
void append_report_csv(const std::filesystem::path& path, const RunReport& report);

void write_text(const std::filesystem::path& path, const std::string& content);

struct HeatmapOptions {
  double cell_size = 28.0;
  /// Cell values are printed when the phenotype has at most this many features.
  std::size_t annotate_max_features = 12;
};

/// Phenotype as an SVG grayscale heatmap, white (0) to black (1).
std::string render_svg(const Matrix& phenotype, const std::vector<std::string>& feature_names,
                       const std::string& title, const HeatmapOptions& options = {});

/// Phenotype as a text grid: one row per feature, one column per offset.
/// Shows values when annotated, otherwise a ten-step shade ramp.
std::string render_text(const Matrix& phenotype, const std::vector<std::string>& feature_names,
                        const std::string& title, const HeatmapOptions& options = {});

}  // namespace tempheno::io
