#include "bihd/encoder.hpp"

#include <string>

#include "bihd/errors.hpp"

namespace bihd {

std::vector<double> Sample::column(std::size_t step) const
{
    std::vector<double> col(features);
    for (std::size_t i = 0; i < features; ++i) {
        col[i] = at(i, step);
    }
    return col;
}

Hypervector encode_spatial(std::span<const double> column, const PositionMemory& pos,
                           const LevelMemory& lvl, std::span<const QuantRange> ranges)
{
    if (column.size() != pos.size() || column.size() != ranges.size()) {
        throw InvalidArgument("encode: expected " + std::to_string(pos.size()) +
                              " features and ranges, got " + std::to_string(column.size()) +
                              " values and " + std::to_string(ranges.size()) + " ranges");
    }
    if (column.empty()) {
        throw InvalidArgument("encode: no features");
    }
    if (pos.dim() != lvl.dim()) {
        throw InvalidArgument("encode: position and level memories differ in dimension");
    }
    BitCounter counter(pos.dim());
    for (std::size_t i = 0; i < column.size(); ++i) {
        counter.add(bind(pos[i], lvl.level(quantize(column[i], ranges[i]))));
    }
    return binarize(counter.to_accum());
}

Hypervector encode_timestep(std::span<const double> column, std::size_t t,
                            const PositionMemory& pos, const LevelMemory& lvl,
                            std::span<const QuantRange> ranges)
{
    return permute(encode_spatial(column, pos, lvl, ranges), static_cast<std::int64_t>(t));
}

TokenSequence encode_sequence(const Sample& sample, const PositionMemory& pos,
                              const LevelMemory& lvl, std::span<const QuantRange> ranges)
{
    if (sample.features != pos.size()) {
        throw InvalidArgument("encode_sequence: sample has " + std::to_string(sample.features) +
                              " features, memory has " + std::to_string(pos.size()));
    }
    if (sample.length == 0) {
        throw InvalidArgument("encode_sequence: empty sequence");
    }
    TokenSequence seq;
    seq.tokens.reserve(sample.length);
    for (std::size_t t = 0; t < sample.length; ++t) {
        seq.tokens.push_back(encode_timestep(sample.column(t), t + 1, pos, lvl, ranges));
    }
    return seq;
}

TokenSequence encode_sequence(const Sample& sample, const Codebook& codebook)
{
    return encode_sequence(sample, codebook.positions, codebook.levels, codebook.ranges);
}

Hypervector vanilla_temporal_encode(std::span<const Hypervector> spatial)
{
    if (spatial.empty()) {
        throw InvalidArgument("vanilla_temporal_encode: empty sequence");
    }
    Hypervector out = permute(spatial[0], 1);
    for (std::size_t t = 1; t < spatial.size(); ++t) {
        out = bind(out, permute(spatial[t], static_cast<std::int64_t>(t + 1)));
    }
    return out;
}

} // namespace bihd
