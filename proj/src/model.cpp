#include "bihd/model.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "bihd/errors.hpp"
#include "bihd/item_memory.hpp"

namespace bihd {

std::vector<QuantRange> feature_ranges(std::span<const Sample> samples, std::size_t q)
{
    if (samples.empty()) {
        throw DataError("cannot estimate feature ranges from an empty dataset");
    }
    const std::size_t n = samples.front().features;
    std::vector<double> lo(n, std::numeric_limits<double>::infinity());
    std::vector<double> hi(n, -std::numeric_limits<double>::infinity());
    for (const auto& s : samples) {
        if (s.features != n) {
            throw ShapeError("samples disagree on feature count");
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t t = 0; t < s.length; ++t) {
                lo[i] = std::min(lo[i], s.at(i, t));
                hi[i] = std::max(hi[i], s.at(i, t));
            }
        }
    }
    std::vector<QuantRange> ranges;
    ranges.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ranges.push_back(make_range(lo[i], hi[i], q));
    }
    return ranges;
}

Codebook make_codebook(std::size_t dim, std::size_t q, std::uint64_t seed,
                       std::vector<QuantRange> ranges)
{
    Codebook cb;
    cb.positions = build_position_memory(ranges.size(), dim, RngStream(seed, kPositionStream));
    cb.levels = build_level_memory(q, dim, RngStream(seed, kLevelStream));
    cb.ranges = std::move(ranges);
    return cb;
}

Hypervector Model::represent(const Sample& sample) const
{
    if (sample.features != features()) {
        throw ShapeError("sample has " + std::to_string(sample.features) +
                         " features, model expects " + std::to_string(features()));
    }
    if (sample.length > max_length || sample.length > dim) {
        throw ShapeError("sample length " + std::to_string(sample.length) +
                         " exceeds model maximum " + std::to_string(max_length));
    }
    return attention_last_token(encode_sequence(sample, codebook), heads);
}

Prediction Model::predict(const Sample& sample) const
{
    return infer(represent(sample), am);
}

} // namespace bihd
