#include "bihd/rng.hpp"

#include <cmath>
#include <numbers>

#include "bihd/errors.hpp"

namespace bihd {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ULL;
} // namespace

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept
{
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id),
      key_(mix64(seed ^ mix64(stream_id + kStreamSalt)) | 1ULL)
{
}

RngStream RngStream::split(std::uint64_t child) const
{
    return RngStream(seed_, mix64(stream_id_ * kGolden + child + 1));
}

std::uint64_t RngStream::next_u64() noexcept
{
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

double RngStream::uniform() noexcept
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi)
{
    if (hi < lo) {
        throw InvalidArgument("uniform_int: empty range");
    }
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) {
        return static_cast<std::int64_t>(next_u64());
    }
    // Rejection sampling keeps the draw exactly uniform.
    const std::uint64_t limit = max() - max() % span;
    std::uint64_t x = next_u64();
    while (x >= limit) {
        x = next_u64();
    }
    return lo + static_cast<std::int64_t>(x % span);
}

double RngStream::normal(double mean, double stddev) noexcept
{
    // Box-Muller; u1 is kept away from zero.
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace bihd
