#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "bihd/dataset.hpp"
#include "bihd/distortion.hpp"
#include "bihd/model.hpp"
#include "bihd/trainer.hpp"

namespace bihd {

/// Trained binary parameters only: four binding-vector types of D bits in
/// total, plus K prototypes. One kB is 1000 bytes.
double model_size_kb(std::size_t dim, std::size_t heads, std::size_t classes);

struct MetricsReport {
    double accuracy = 0.0;
    std::vector<double> per_class_accuracy;  // NaN for classes absent from the split
    std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
    std::vector<int> predictions;
    double model_size_kb = 0.0;
    double wall_seconds = 0.0;

    std::size_t total() const;
};

/// Pure binary inference over a split, parallel across samples.
/// Throws ShapeError on N / L / K disagreement and DataError on an empty split.
MetricsReport evaluate(const Model& model, const DatasetFile& data);

struct TrainRequest {
    std::filesystem::path train_set;
    /// Evaluated after training; the training split when unset.
    std::optional<std::filesystem::path> eval_set;
    TrainConfig config;
    std::optional<std::filesystem::path> model_out;
    /// Per-epoch log as TSV.
    std::optional<std::filesystem::path> log_out;
    bool verbose = false;
};

struct TrainOutcome {
    Model model;
    std::vector<EpochLog> log;
    MetricsReport metrics;
};

TrainOutcome run_train(const TrainRequest& request);

MetricsReport run_eval(const std::filesystem::path& model_path,
                       const std::filesystem::path& dataset_path);

struct SweepRow {
    std::size_t dim = 0;
    double accuracy = 0.0;
    double size_kb = 0.0;
};

/// Trains and evaluates once per dimension. Every dim is checked against
/// the head count before any training starts.
std::vector<SweepRow> run_sweep(const TrainRequest& base, std::span<const std::size_t> dims);

enum class DistortionMode { Binarization, Weighting };

/// "binarization" and "weighting"; "theorem1" and "theorem2" are accepted aliases.
DistortionMode parse_distortion_mode(const std::string& name);

struct DistortionRequest {
    DistortionMode mode = DistortionMode::Binarization;
    std::size_t trials = 500;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    std::optional<std::filesystem::path> out;
};

DistortionReport run_distortion(const DistortionRequest& request);

// Tab-separated reports, one header line each.
void write_metrics(std::ostream& out, const MetricsReport& report);
void write_confusion(std::ostream& out, const MetricsReport& report);
void write_epoch_log(std::ostream& out, std::span<const EpochLog> log);
void write_sweep(std::ostream& out, std::span<const SweepRow> rows);
void write_distortion(std::ostream& out, const DistortionReport& report);
void write_distortion_trials(std::ostream& out, const DistortionReport& report);
/// Structured summary: experiment, trials, seed, config and per-metric
/// mean / stddev / max.
void write_distortion_json(std::ostream& out, const DistortionReport& report);

} // namespace bihd
