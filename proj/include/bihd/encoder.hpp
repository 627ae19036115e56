#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bihd/hypervector.hpp"
#include "bihd/item_memory.hpp"

namespace bihd {

/// One multivariate time series: N features x L time steps, row-major
/// (values[i * length + t] is feature i at step t), plus its class label.
struct Sample {
    std::size_t features = 0;
    std::size_t length = 0;
    std::vector<double> values;
    int label = 0;

    double at(std::size_t feature, std::size_t step) const { return values[feature * length + step]; }
    /// All N feature values at 0-based step t.
    std::vector<double> column(std::size_t step) const;
};

/// Encoded tokens H_e^1..H_e^L, all of the same dimension.
struct TokenSequence {
    std::vector<Hypervector> tokens;

    std::size_t length() const noexcept { return tokens.size(); }
    std::size_t dim() const noexcept { return tokens.empty() ? 0 : tokens.front().dim(); }
};

/// Item memories and per-feature quantizers shared by every sample.
struct Codebook {
    PositionMemory positions;
    LevelMemory levels;
    std::vector<QuantRange> ranges;

    std::size_t features() const noexcept { return positions.size(); }
    std::size_t dim() const noexcept { return positions.dim(); }
};

/// Hash-table encoding sign(sum_i F_i (*) V_level(x_i)), no rotation.
Hypervector encode_spatial(std::span<const double> column, const PositionMemory& pos,
                           const LevelMemory& lvl, std::span<const QuantRange> ranges);

/// Spatial encoding rotated by the 1-based time index t. The rotation is
/// applied after sign(), which is equivalent because a cyclic permutation
/// commutes with an elementwise function.
Hypervector encode_timestep(std::span<const double> column, std::size_t t,
                            const PositionMemory& pos, const LevelMemory& lvl,
                            std::span<const QuantRange> ranges);

TokenSequence encode_sequence(const Sample& sample, const PositionMemory& pos,
                              const LevelMemory& lvl, std::span<const QuantRange> ranges);
TokenSequence encode_sequence(const Sample& sample, const Codebook& codebook);

/// Vanilla HDC temporal encoding: bind over t of rho^t(S_t), t = 1..L.
Hypervector vanilla_temporal_encode(std::span<const Hypervector> spatial);

} // namespace bihd
