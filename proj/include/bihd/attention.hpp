#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bihd/encoder.hpp"
#include "bihd/hypervector.hpp"

namespace bihd {

/// Binding hypervectors of one attention head. Each has dimension
/// D / N_h and acts on the head's contiguous slice of every token.
struct HeadParams {
    Hypervector bv_q;
    Hypervector bv_k;
    Hypervector bv_v;
    Hypervector bv_a;

    std::size_t dim() const noexcept { return bv_q.dim(); }
    static HeadParams identity(std::size_t head_dim);

    friend bool operator==(const HeadParams&, const HeadParams&) = default;
};

/// Binary attention mask; rows() x cols() entries in {0, 1}.
class AttentionMask {
public:
    AttentionMask() = default;
    AttentionMask(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), bits_(rows * cols, 0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::uint8_t operator()(std::size_t r, std::size_t c) const { return bits_[r * cols_ + c]; }
    void set(std::size_t r, std::size_t c, bool v) { bits_[r * cols_ + c] = v ? 1 : 0; }
    std::span<const std::uint8_t> row(std::size_t r) const { return {bits_.data() + r * cols_, cols_}; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Per-head query/key/value token slices.
struct QkvSlices {
    std::vector<Hypervector> q;
    std::vector<Hypervector> k;
    std::vector<Hypervector> v;
};

enum class AttentionMode { AllTokens, LastToken };

/// Throws ConfigError unless dim splits evenly into heads.
std::size_t head_dim_for(std::size_t dim, std::size_t heads);

QkvSlices project_qkv(const TokenSequence& tokens, const HeadParams& head, std::size_t head_index);

/// mask[t][i] = 1 iff q_t . k_i > 0 (integer bipolar dot product).
AttentionMask attention_scores(std::span<const Hypervector> q, std::span<const Hypervector> k);
/// Single mask row for one query.
std::vector<std::uint8_t> attention_row(const Hypervector& q, std::span<const Hypervector> k);

/// sign(sum_i mask_row[i] * v_i). An all-zero row passes v[t] through
/// unchanged (t is the 0-based index of the query token).
Hypervector selective_bundle(std::span<const std::uint8_t> mask_row, std::span<const Hypervector> v,
                             std::size_t t);

Hypervector head_output(const Hypervector& bundled, const HeadParams& head);

/// Single encoder block over all heads; outputs are the per-head results
/// concatenated back to dimension D. LastToken mode yields one token
/// (row L of the mask only).
TokenSequence attention_forward(const TokenSequence& tokens, std::span<const HeadParams> heads,
                                AttentionMode mode);
/// Convenience for LastToken mode.
Hypervector attention_last_token(const TokenSequence& tokens, std::span<const HeadParams> heads);

} // namespace bihd
