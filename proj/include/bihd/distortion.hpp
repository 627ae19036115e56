#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bihd/hypervector.hpp"
#include "bihd/item_memory.hpp"

namespace bihd {

/// Mean squared error of x against eps * sign(x), eps = mean |x|.
double direct_binarize_distortion(std::span<const double> xs);

/// Mean squared error of x against the midpoint of its quantization bin.
double quantization_distortion(std::span<const double> xs, const QuantRange& range);

/// Granular part of the above: samples outside [min, max] are skipped, so
/// only in-range rounding error counts. Throws if no sample is in range.
double granular_quantization_distortion(std::span<const double> xs, const QuantRange& range);

/// Per-channel decode of a hash-table bundle: bind with P_i and take the
/// midpoint of the nearest level hypervector.
std::vector<double> hd_decode(const Hypervector& bundle, const PositionMemory& pos,
                              const LevelMemory& lvl, std::span<const QuantRange> ranges);

/// Encode xs as sign(sum_i P_i (*) V_level(x_i)) and decode it again.
std::vector<double> hd_roundtrip(std::span<const double> xs, const PositionMemory& pos,
                                 const LevelMemory& lvl, std::span<const QuantRange> ranges);

double mean_squared_error(std::span<const double> a, std::span<const double> b);

struct MetricSummary {
    std::string name;
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation
    double max = 0.0;
    std::vector<double> per_trial;
};

struct DistortionReport {
    std::string experiment;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::vector<MetricSummary> metrics;
    /// Echo of the configuration as (key, value) pairs.
    std::vector<std::pair<std::string, std::string>> config;

    const MetricSummary& metric(const std::string& name) const;
};

/// Real variables vs. hyperspace: D_B, D_Q and D_HB over random draws.
/// The first half of the trials is Gaussian, the rest uniform.
struct BinarizationConfig {
    std::size_t trials = 500;
    double sigma_min = 1.0;
    double sigma_max = 3.0;
    double a_min = 1.0;
    double a_max = 5.0;
    std::size_t levels_min = 16;
    std::size_t levels_max = 256;
    std::size_t channels_min = 2;
    std::size_t channels_max = 100;
    std::size_t dim = 10000;
    /// Gaussian quantizer support is [-k sigma, k sigma].
    double gaussian_support = 3.0;
};

enum class WeightDistribution { StandardNormal, UniformSymmetric };

const char* to_string(WeightDistribution w);

/// Real-valued vs. 0/1 weights in a weighted mean, in the real domain (D_L)
/// and after hyperspace bundling (D_H). First half Gaussian N(0, 1), rest
/// uniform(-3, 3); both quantized over [-3, 3].
struct WeightingConfig {
    std::size_t trials = 500;
    std::size_t levels = 256;
    std::size_t channels_min = 10;
    std::size_t channels_max = 100;
    std::size_t length = 100;
    std::size_t dim = 10000;
    double value_bound = 3.0;
    WeightDistribution weights = WeightDistribution::StandardNormal;
};

/// Each trial draws from its own stream, so results do not depend on
/// thread scheduling. `threads` = 0 uses all hardware threads.
DistortionReport binarization_experiment(const BinarizationConfig& cfg, std::uint64_t seed,
                                     std::size_t threads = 0);
DistortionReport weighting_experiment(const WeightingConfig& cfg, std::uint64_t seed,
                                     std::size_t threads = 0);

/// Summary over per-trial values.
MetricSummary summarize(std::string name, std::vector<double> values);

} // namespace bihd
