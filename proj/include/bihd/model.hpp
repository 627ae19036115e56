#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bihd/attention.hpp"
#include "bihd/classifier.hpp"
#include "bihd/encoder.hpp"

namespace bihd {

// Stream ids derived from the master seed.
inline constexpr std::uint64_t kPositionStream = 1;
inline constexpr std::uint64_t kLevelStream = 2;
inline constexpr std::uint64_t kInitStream = 3;
inline constexpr std::uint64_t kShuffleStream = 4;
inline constexpr std::uint64_t kDropoutStream = 5;

/// Per-feature [min, max] over every value of every sample.
std::vector<QuantRange> feature_ranges(std::span<const Sample> samples, std::size_t q);

/// Regenerates the item memories from the master seed.
Codebook make_codebook(std::size_t dim, std::size_t q, std::uint64_t seed,
                       std::vector<QuantRange> ranges);

/// A trained, fully binary model: encoder codebook, attention heads and
/// associative memory.
struct Model {
    std::size_t dim = 0;
    std::size_t max_length = 0;
    std::uint64_t seed = 0;
    Codebook codebook;
    std::vector<HeadParams> heads;
    AssociativeMemory am;

    std::size_t features() const noexcept { return codebook.features(); }
    std::size_t classes() const noexcept { return am.classes(); }
    std::size_t quant_levels() const noexcept { return codebook.levels.levels(); }

    /// Encoder, last-token attention and associative search, all binary.
    Prediction predict(const Sample& sample) const;
    Hypervector represent(const Sample& sample) const;
};

} // namespace bihd
