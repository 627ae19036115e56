#include "bihd/item_memory.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <string>
#include <utility>

#include "bihd/errors.hpp"

namespace bihd {

PositionMemory::PositionMemory(std::vector<Hypervector> entries, std::uint64_t seed,
                               std::uint64_t stream_id)
    : entries_(std::move(entries)), seed_(seed), stream_id_(stream_id)
{
}

LevelMemory::LevelMemory(std::vector<Hypervector> entries, std::size_t flips_per_level,
                         std::uint64_t seed, std::uint64_t stream_id)
    : entries_(std::move(entries)), flips_(flips_per_level), seed_(seed), stream_id_(stream_id)
{
}

std::size_t LevelMemory::nearest(const Hypervector& probe) const
{
    std::size_t best = 0;
    std::size_t best_dist = static_cast<std::size_t>(-1);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const std::size_t d = hamming_count(probe, entries_[i]);
        if (d < best_dist) {
            best_dist = d;
            best = i;
        }
    }
    return best + 1;
}

double QuantRange::midpoint(std::size_t level) const noexcept
{
    if (degenerate()) {
        return min;
    }
    return min + (static_cast<double>(level) - 0.5) * step();
}

QuantRange make_range(double min, double max, std::size_t q)
{
    if (q < 2) {
        throw InvalidArgument("quantization needs at least 2 levels");
    }
    if (!std::isfinite(min) || !std::isfinite(max) || max < min) {
        throw InvalidArgument("quantization range must be finite with min <= max");
    }
    if (min == max) {
        std::cerr << "warning: constant feature range [" << min << ", " << max
                  << "]; every value maps to level 1\n";
    }
    return QuantRange{min, max, q};
}

PositionMemory build_position_memory(std::size_t n, std::size_t dim, RngStream rng)
{
    if (n == 0) {
        throw InvalidArgument("position memory needs at least one entry");
    }
    const auto seed = rng.seed();
    const auto stream = rng.stream_id();
    std::vector<Hypervector> entries;
    entries.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        entries.push_back(random_hv(rng, dim));
    }
    return PositionMemory(std::move(entries), seed, stream);
}

LevelMemory build_level_memory(std::size_t q, std::size_t dim, RngStream rng)
{
    if (q < 2) {
        throw InvalidArgument("level memory needs q >= 2");
    }
    const std::size_t flips = dim / (2 * (q - 1));
    if (flips == 0) {
        throw InvalidArgument("level memory: dim " + std::to_string(dim) +
                              " is too small for q = " + std::to_string(q) +
                              " distinct levels");
    }
    const auto seed = rng.seed();
    const auto stream = rng.stream_id();

    Hypervector current = random_hv(rng, dim);

    // Fisher-Yates over positions; consecutive batches of the shuffled order
    // are the bits flipped between neighbouring levels.
    std::vector<std::size_t> order(dim);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = dim - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)));
        std::swap(order[i], order[j]);
    }

    std::vector<Hypervector> entries;
    entries.reserve(q);
    entries.push_back(current);
    for (std::size_t level = 1; level < q; ++level) {
        for (std::size_t f = 0; f < flips; ++f) {
            current.flip(order[(level - 1) * flips + f]);
        }
        entries.push_back(current);
    }
    return LevelMemory(std::move(entries), flips, seed, stream);
}

std::size_t quantize(double x, const QuantRange& range)
{
    if (!std::isfinite(x)) {
        throw InvalidArgument("quantize: non-finite input");
    }
    if (range.degenerate()) {
        return 1;
    }
    if (x <= range.min) {
        return 1;
    }
    if (x >= range.max) {
        return range.q;
    }
    const auto bin = static_cast<std::size_t>(std::floor((x - range.min) / range.step()));
    return std::min(bin + 1, range.q);
}

} // namespace bihd
