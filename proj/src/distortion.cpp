#include "bihd/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bihd/encoder.hpp"
#include "bihd/errors.hpp"
#include "bihd/parallel.hpp"

namespace bihd {

namespace {

constexpr std::uint64_t kBinarizationStream = 101;
constexpr std::uint64_t kWeightingStream = 102;

template <typename T>
std::string str(const T& v)
{
    std::ostringstream os;
    os << v;
    return os.str();
}

std::vector<QuantRange> symmetric_ranges(std::size_t n, double bound, std::size_t q)
{
    return std::vector<QuantRange>(n, QuantRange{-bound, bound, q});
}

} // namespace

double direct_binarize_distortion(std::span<const double> xs)
{
    if (xs.empty()) {
        throw InvalidArgument("direct_binarize_distortion: empty input");
    }
    double eps = 0.0;
    for (const double x : xs) {
        eps += std::abs(x);
    }
    eps /= static_cast<double>(xs.size());
    double sum = 0.0;
    for (const double x : xs) {
        const double b = x >= 0.0 ? eps : -eps;
        sum += (x - b) * (x - b);
    }
    return sum / static_cast<double>(xs.size());
}

double quantization_distortion(std::span<const double> xs, const QuantRange& range)
{
    if (xs.empty()) {
        throw InvalidArgument("quantization_distortion: empty input");
    }
    double sum = 0.0;
    for (const double x : xs) {
        const double r = range.midpoint(quantize(x, range));
        sum += (x - r) * (x - r);
    }
    return sum / static_cast<double>(xs.size());
}

double granular_quantization_distortion(std::span<const double> xs, const QuantRange& range)
{
    double sum = 0.0;
    std::size_t n = 0;
    for (const double x : xs) {
        if (x < range.min || x > range.max) {
            continue;
        }
        const double r = range.midpoint(quantize(x, range));
        sum += (x - r) * (x - r);
        ++n;
    }
    if (n == 0) {
        throw InvalidArgument("granular_quantization_distortion: no samples inside the range");
    }
    return sum / static_cast<double>(n);
}

std::vector<double> hd_decode(const Hypervector& bundle, const PositionMemory& pos,
                              const LevelMemory& lvl, std::span<const QuantRange> ranges)
{
    if (ranges.size() != pos.size()) {
        throw InvalidArgument("hd_decode: ranges and position memory differ in size");
    }
    std::vector<double> out(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) {
        out[i] = ranges[i].midpoint(lvl.nearest(bind(bundle, pos[i])));
    }
    return out;
}

std::vector<double> hd_roundtrip(std::span<const double> xs, const PositionMemory& pos,
                                 const LevelMemory& lvl, std::span<const QuantRange> ranges)
{
    return hd_decode(encode_spatial(xs, pos, lvl, ranges), pos, lvl, ranges);
}

double mean_squared_error(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size() || a.empty()) {
        throw InvalidArgument("mean_squared_error: sizes differ or are zero");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return sum / static_cast<double>(a.size());
}

const MetricSummary& DistortionReport::metric(const std::string& name) const
{
    for (const auto& m : metrics) {
        if (m.name == name) {
            return m;
        }
    }
    throw InvalidArgument("no metric named " + name);
}

const char* to_string(WeightDistribution w)
{
    switch (w) {
    case WeightDistribution::StandardNormal:
        return "normal(0,1)";
    case WeightDistribution::UniformSymmetric:
        return "uniform(-1,1)";
    }
    return "?";
}

MetricSummary summarize(std::string name, std::vector<double> values)
{
    MetricSummary m;
    m.name = std::move(name);
    if (!values.empty()) {
        const double n = static_cast<double>(values.size());
        m.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
        double ss = 0.0;
        for (const double v : values) {
            ss += (v - m.mean) * (v - m.mean);
        }
        m.stddev = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        m.max = *std::max_element(values.begin(), values.end());
    }
    m.per_trial = std::move(values);
    return m;
}

DistortionReport binarization_experiment(const BinarizationConfig& cfg, std::uint64_t seed,
                                     std::size_t threads)
{
    if (cfg.trials == 0) {
        throw InvalidArgument("binarization_experiment: trials must be positive");
    }
    std::vector<double> db(cfg.trials), dq(cfg.trials), dhb(cfg.trials);
    const RngStream root(seed, kBinarizationStream);
    parallel_for(
        cfg.trials,
        [&](std::size_t trial) {
            RngStream rng = root.split(trial);
            const bool gaussian = trial < (cfg.trials + 1) / 2;
            const auto q = static_cast<std::size_t>(rng.uniform_int(
                static_cast<std::int64_t>(cfg.levels_min), static_cast<std::int64_t>(cfg.levels_max)));
            const auto n = static_cast<std::size_t>(rng.uniform_int(
                static_cast<std::int64_t>(cfg.channels_min), static_cast<std::int64_t>(cfg.channels_max)));
            double bound = 0.0;
            std::vector<double> xs(n);
            if (gaussian) {
                const double sigma = rng.uniform(cfg.sigma_min, cfg.sigma_max);
                bound = cfg.gaussian_support * sigma;
                for (auto& x : xs) {
                    x = rng.normal(0.0, sigma);
                }
            } else {
                const double a = rng.uniform(cfg.a_min, cfg.a_max);
                bound = a;
                for (auto& x : xs) {
                    x = rng.uniform(-a, a);
                }
            }
            const auto ranges = symmetric_ranges(n, bound, q);
            const auto pos = build_position_memory(n, cfg.dim, rng.split(1));
            const auto lvl = build_level_memory(q, cfg.dim, rng.split(2));

            db[trial] = direct_binarize_distortion(xs);
            dq[trial] = quantization_distortion(xs, ranges.front());
            dhb[trial] = mean_squared_error(xs, hd_roundtrip(xs, pos, lvl, ranges));
        },
        threads);

    DistortionReport rep;
    rep.experiment = "binarization";
    rep.trials = cfg.trials;
    rep.seed = seed;
    rep.metrics.push_back(summarize("D_B", std::move(db)));
    rep.metrics.push_back(summarize("D_HB", std::move(dhb)));
    rep.metrics.push_back(summarize("D_Q", std::move(dq)));
    rep.config = {
        {"trials", str(cfg.trials)},
        {"distribution", "first half normal(0,sigma), rest uniform(-a,a)"},
        {"sigma", "uniform(" + str(cfg.sigma_min) + "," + str(cfg.sigma_max) + ")"},
        {"a", "uniform(" + str(cfg.a_min) + "," + str(cfg.a_max) + ")"},
        {"quant_levels", "uniform{" + str(cfg.levels_min) + ".." + str(cfg.levels_max) + "}"},
        {"channels", "uniform{" + str(cfg.channels_min) + ".." + str(cfg.channels_max) + "}"},
        {"gaussian_support_sigmas", str(cfg.gaussian_support)},
        {"dim", str(cfg.dim)},
    };
    return rep;
}

DistortionReport weighting_experiment(const WeightingConfig& cfg, std::uint64_t seed,
                                     std::size_t threads)
{
    if (cfg.trials == 0) {
        throw InvalidArgument("weighting_experiment: trials must be positive");
    }
    std::vector<double> dh(cfg.trials), dl(cfg.trials);
    const RngStream root(seed, kWeightingStream);
    parallel_for(
        cfg.trials,
        [&](std::size_t trial) {
            RngStream rng = root.split(trial);
            const bool gaussian = trial < (cfg.trials + 1) / 2;
            const auto n = static_cast<std::size_t>(rng.uniform_int(
                static_cast<std::int64_t>(cfg.channels_min), static_cast<std::int64_t>(cfg.channels_max)));
            const std::size_t L = cfg.length;

            // xs[l * n + i]: channel i of variable set l.
            std::vector<double> xs(L * n);
            for (auto& x : xs) {
                x = gaussian ? rng.normal(0.0, 1.0) : rng.uniform(-cfg.value_bound, cfg.value_bound);
            }
            std::vector<double> w(L);
            std::vector<std::uint8_t> wq(L);
            std::size_t positives = 0;
            while (positives == 0) {
                positives = 0;
                for (std::size_t l = 0; l < L; ++l) {
                    w[l] = cfg.weights == WeightDistribution::StandardNormal ? rng.normal()
                                                                             : rng.uniform(-1.0, 1.0);
                    wq[l] = w[l] > 0.0 ? 1 : 0;
                    positives += wq[l];
                }
            }

            // Real domain: weighted mean vs. masked mean.
            const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
            std::vector<double> weighted(n, 0.0), masked(n, 0.0);
            for (std::size_t l = 0; l < L; ++l) {
                for (std::size_t i = 0; i < n; ++i) {
                    weighted[i] += xs[l * n + i] * w[l];
                    masked[i] += xs[l * n + i] * wq[l];
                }
            }
            for (std::size_t i = 0; i < n; ++i) {
                weighted[i] /= wsum;
                masked[i] /= static_cast<double>(positives);
            }
            dl[trial] = mean_squared_error(weighted, masked);

            // Hyperspace: sign of the real- and 0/1-weighted bundles.
            const auto ranges = symmetric_ranges(n, cfg.value_bound, cfg.levels);
            const auto pos = build_position_memory(n, cfg.dim, rng.split(1));
            const auto lvl = build_level_memory(cfg.levels, cfg.dim, rng.split(2));
            // Weighted mean: the 1 / sum(w) factor only matters through its sign.
            const double mean_sign = wsum >= 0.0 ? 1.0 : -1.0;
            std::vector<double> real_sum(cfg.dim, 0.0);
            AccumVector mask_sum(cfg.dim);
            for (std::size_t l = 0; l < L; ++l) {
                const auto enc = encode_spatial(std::span<const double>(xs).subspan(l * n, n), pos, lvl,
                                                ranges);
                for (std::size_t d = 0; d < cfg.dim; ++d) {
                    real_sum[d] += mean_sign * w[l] * enc.bipolar(d);
                }
                if (wq[l] != 0) {
                    mask_sum.add(enc);
                }
            }
            Hypervector y(cfg.dim);
            for (std::size_t d = 0; d < cfg.dim; ++d) {
                y.set(d, real_sum[d] >= 0.0);
            }
            const auto y_masked = binarize(mask_sum);
            dh[trial] = mean_squared_error(hd_decode(y, pos, lvl, ranges),
                                           hd_decode(y_masked, pos, lvl, ranges));
        },
        threads);

    DistortionReport rep;
    rep.experiment = "weighting";
    rep.trials = cfg.trials;
    rep.seed = seed;
    rep.metrics.push_back(summarize("D_H", std::move(dh)));
    rep.metrics.push_back(summarize("D_L", std::move(dl)));
    rep.config = {
        {"trials", str(cfg.trials)},
        {"distribution", "first half normal(0,1), rest uniform(-" + str(cfg.value_bound) + "," +
                             str(cfg.value_bound) + ")"},
        {"quant_levels", str(cfg.levels)},
        {"channels", "uniform{" + str(cfg.channels_min) + ".." + str(cfg.channels_max) + "}"},
        {"length", str(cfg.length)},
        {"dim", str(cfg.dim)},
        {"value_range", "[-" + str(cfg.value_bound) + "," + str(cfg.value_bound) + "]"},
        {"weights", to_string(cfg.weights)},
    };
    return rep;
}

} // namespace bihd
