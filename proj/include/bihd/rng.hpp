#pragma once

#include <cstdint>
#include <limits>

namespace bihd {

/// Counter-based random stream. The pair (seed, stream_id) fully determines
/// the produced sequence on every platform: the n-th draw is a pure function
/// of (seed, stream_id, n). Distributions are implemented here rather than
/// taken from <random> because the standard distributions are not
/// bit-reproducible across library implementations.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }
    std::uint64_t position() const noexcept { return counter_; }

    /// Independent child stream; does not advance this stream.
    RngStream split(std::uint64_t child) const;

    std::uint64_t next_u64() noexcept;
    result_type operator()() noexcept { return next_u64(); }
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    /// Uniform in [0, 1).
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [lo, hi], inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    double normal(double mean = 0.0, double stddev = 1.0) noexcept;

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x) noexcept;

} // namespace bihd
