#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bihd/hypervector.hpp"
#include "bihd/rng.hpp"

namespace bihd {

/// Random, pairwise quasi-orthogonal hypervectors, one per feature index.
class PositionMemory {
public:
    PositionMemory() = default;
    PositionMemory(std::vector<Hypervector> entries, std::uint64_t seed, std::uint64_t stream_id);

    std::size_t size() const noexcept { return entries_.size(); }
    std::size_t dim() const noexcept { return entries_.empty() ? 0 : entries_.front().dim(); }
    const Hypervector& operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<Hypervector>& entries() const noexcept { return entries_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

private:
    std::vector<Hypervector> entries_;
    std::uint64_t seed_ = 0;
    std::uint64_t stream_id_ = 0;
};

/// Chain of q value hypervectors. Neighbouring levels differ in a fresh,
/// disjoint batch of floor(D / (2(q-1))) bits, so the Hamming distance
/// between levels i and j is |i - j| * flips_per_level / D exactly.
/// Levels are 1-based in the public API.
class LevelMemory {
public:
    LevelMemory() = default;
    LevelMemory(std::vector<Hypervector> entries, std::size_t flips_per_level,
                std::uint64_t seed, std::uint64_t stream_id);

    std::size_t levels() const noexcept { return entries_.size(); }
    std::size_t dim() const noexcept { return entries_.empty() ? 0 : entries_.front().dim(); }
    std::size_t flips_per_level() const noexcept { return flips_; }
    /// Level in [1, levels()].
    const Hypervector& level(std::size_t level) const { return entries_.at(level - 1); }
    const std::vector<Hypervector>& entries() const noexcept { return entries_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    /// 1-based level whose hypervector is nearest (Hamming) to probe;
    /// ties resolve to the lowest level.
    std::size_t nearest(const Hypervector& probe) const;

private:
    std::vector<Hypervector> entries_;
    std::size_t flips_ = 0;
    std::uint64_t seed_ = 0;
    std::uint64_t stream_id_ = 0;
};

/// Uniform quantizer over [min, max] with q levels.
struct QuantRange {
    double min = 0.0;
    double max = 1.0;
    std::size_t q = 2;

    bool degenerate() const noexcept { return !(min < max); }
    double step() const noexcept { return (max - min) / static_cast<double>(q); }
    /// Representative value of a 1-based level (bin midpoint).
    double midpoint(std::size_t level) const noexcept;
};

/// Validates q and the bounds. An empty range (min == max) is accepted with
/// a warning on stderr; such a feature always quantizes to level 1.
QuantRange make_range(double min, double max, std::size_t q);

PositionMemory build_position_memory(std::size_t n, std::size_t dim, RngStream rng);
LevelMemory build_level_memory(std::size_t q, std::size_t dim, RngStream rng);

/// 1-based level of x; values outside the range are clamped.
std::size_t quantize(double x, const QuantRange& range);

} // namespace bihd
