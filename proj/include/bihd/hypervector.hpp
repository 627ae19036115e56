#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bihd/rng.hpp"

namespace bihd {

/// Bit-packed bipolar hypervector. Bit i of word i/64 (little-endian bit
/// order) encodes component i: 1 means +1, 0 means -1. Bits at and above
/// dim() in the last word are always zero.
class Hypervector {
public:
    Hypervector() = default;
    /// All components -1.
    explicit Hypervector(std::size_t dim);

    static Hypervector ones(std::size_t dim);
    /// Takes ownership of packed words; padding bits are cleared.
    static Hypervector from_words(std::size_t dim, std::vector<std::uint64_t> words);
    /// From a +1/-1 array. Any value > 0 maps to +1, everything else to -1.
    static Hypervector from_bipolar(std::span<const std::int8_t> values);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t word_count() const noexcept { return words_.size(); }
    std::span<const std::uint64_t> words() const noexcept { return words_; }

    bool bit(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1U; }
    int bipolar(std::size_t i) const noexcept { return bit(i) ? 1 : -1; }
    void set(std::size_t i, bool value) noexcept;
    void flip(std::size_t i) noexcept { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    std::vector<std::int8_t> to_bipolar() const;

    friend bool operator==(const Hypervector&, const Hypervector&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<std::uint64_t> words_;
};

inline constexpr std::size_t words_for(std::size_t dim) noexcept { return (dim + 63) / 64; }

/// Signed per-component counts used to bundle hypervectors before sign().
class AccumVector {
public:
    AccumVector() = default;
    explicit AccumVector(std::size_t dim) : counts_(dim, 0) {}

    std::size_t dim() const noexcept { return counts_.size(); }
    std::size_t accumulated() const noexcept { return accumulated_; }
    std::span<const std::int32_t> counts() const noexcept { return counts_; }
    std::int32_t operator[](std::size_t i) const noexcept { return counts_[i]; }

    /// counts += bipolar(v).
    void add(const Hypervector& v);

    static AccumVector from_counts(std::vector<std::int32_t> counts, std::size_t accumulated);

private:
    std::vector<std::int32_t> counts_;
    std::size_t accumulated_ = 0;
};

/// Bit-sliced population counter: plane p holds bit p of the number of
/// +1 components seen so far at each position. Adding a hypervector costs a
/// few word operations per 64 components instead of 64 integer adds.
class BitCounter {
public:
    explicit BitCounter(std::size_t dim) : dim_(dim) {}

    std::size_t dim() const noexcept { return dim_; }
    std::size_t added() const noexcept { return added_; }
    void add(const Hypervector& v);
    /// Number of added vectors with +1 at component i.
    std::uint32_t ones(std::size_t i) const noexcept;
    /// counts[i] = 2 * ones(i) - added().
    AccumVector to_accum() const;

private:
    std::size_t dim_;
    std::size_t added_ = 0;
    std::vector<std::vector<std::uint64_t>> planes_;
};

Hypervector random_hv(RngStream& rng, std::size_t dim);

/// XNOR, i.e. the elementwise bipolar product.
Hypervector bind(const Hypervector& a, const Hypervector& b);
Hypervector complement(const Hypervector& a);

/// Cyclic rotation over all dim bits: result[i] = a[(i - k) mod dim].
Hypervector permute(const Hypervector& a, std::int64_t k);

std::size_t hamming_count(const Hypervector& a, const Hypervector& b);
/// Fraction of differing components, in [0, 1].
double hamming(const Hypervector& a, const Hypervector& b);
/// 1 - 2 * hamming(a, b).
double cosine(const Hypervector& a, const Hypervector& b);
/// Integer dot product of the bipolar vectors: dim - 2 * differing bits.
std::int64_t dot_bipolar(const Hypervector& a, const Hypervector& b);

/// counts[i] = sum_j weights[j] * bipolar(vs[j])_i. Weights must be 0 or 1.
AccumVector accumulate(std::span<const Hypervector> vs,
                       std::optional<std::span<const std::uint8_t>> weights = std::nullopt);

/// sign() with the deterministic tie rule sign(0) = +1.
Hypervector binarize(const AccumVector& acc);

/// Components [offset, offset + len) as a new hypervector.
Hypervector slice(const Hypervector& a, std::size_t offset, std::size_t len);
Hypervector concat(std::span<const Hypervector> parts);

} // namespace bihd
