#include "bihd/hypervector.hpp"

#include <algorithm>
#include <bit>
#include <string>
#include <utility>

#include "bihd/errors.hpp"

namespace bihd {

namespace {

std::uint64_t tail_mask(std::size_t dim) noexcept
{
    const std::size_t rem = dim & 63;
    return rem == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << rem) - 1;
}

void clear_padding(std::vector<std::uint64_t>& words, std::size_t dim) noexcept
{
    if (!words.empty()) {
        words.back() &= tail_mask(dim);
    }
}

void require_same_dim(const Hypervector& a, const Hypervector& b, const char* op)
{
    if (a.dim() != b.dim()) {
        throw InvalidArgument(std::string(op) + ": dimension mismatch (" +
                              std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
    }
}

void require_dim(std::size_t dim)
{
    if (dim == 0) {
        throw InvalidArgument("hypervector dimension must be positive");
    }
}

// Bit j of the result is bit (j + shift) of src, reading zero beyond the end.
std::uint64_t shifted_word(std::span<const std::uint64_t> src, std::size_t j, std::size_t shift)
{
    const std::size_t bit = j * 64 + shift;
    const std::size_t w = bit >> 6;
    const std::size_t off = bit & 63;
    const std::uint64_t lo = w < src.size() ? src[w] : 0;
    if (off == 0) {
        return lo;
    }
    const std::uint64_t hi = w + 1 < src.size() ? src[w + 1] : 0;
    return (lo >> off) | (hi << (64 - off));
}

} // namespace

Hypervector::Hypervector(std::size_t dim) : dim_(dim), words_(words_for(dim), 0) {}

Hypervector Hypervector::ones(std::size_t dim)
{
    Hypervector hv(dim);
    for (auto& w : hv.words_) {
        w = ~std::uint64_t{0};
    }
    clear_padding(hv.words_, dim);
    return hv;
}

Hypervector Hypervector::from_words(std::size_t dim, std::vector<std::uint64_t> words)
{
    if (words.size() != words_for(dim)) {
        throw InvalidArgument("from_words: expected " + std::to_string(words_for(dim)) +
                              " words for dim " + std::to_string(dim));
    }
    Hypervector hv;
    hv.dim_ = dim;
    hv.words_ = std::move(words);
    clear_padding(hv.words_, dim);
    return hv;
}

Hypervector Hypervector::from_bipolar(std::span<const std::int8_t> values)
{
    Hypervector hv(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] > 0) {
            hv.words_[i >> 6] |= std::uint64_t{1} << (i & 63);
        }
    }
    return hv;
}

void Hypervector::set(std::size_t i, bool value) noexcept
{
    const std::uint64_t m = std::uint64_t{1} << (i & 63);
    if (value) {
        words_[i >> 6] |= m;
    } else {
        words_[i >> 6] &= ~m;
    }
}

std::vector<std::int8_t> Hypervector::to_bipolar() const
{
    std::vector<std::int8_t> out(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        out[i] = bit(i) ? 1 : -1;
    }
    return out;
}

void AccumVector::add(const Hypervector& v)
{
    if (v.dim() != counts_.size()) {
        throw InvalidArgument("accumulate: dimension mismatch");
    }
    const auto words = v.words();
    for (std::size_t w = 0; w < words.size(); ++w) {
        std::uint64_t bits = words[w];
        const std::size_t base = w * 64;
        const std::size_t end = std::min<std::size_t>(64, counts_.size() - base);
        for (std::size_t b = 0; b < end; ++b) {
            counts_[base + b] += static_cast<std::int32_t>((bits & 1U) * 2) - 1;
            bits >>= 1;
        }
    }
    ++accumulated_;
}

AccumVector AccumVector::from_counts(std::vector<std::int32_t> counts, std::size_t accumulated)
{
    AccumVector acc;
    acc.counts_ = std::move(counts);
    acc.accumulated_ = accumulated;
    return acc;
}

void BitCounter::add(const Hypervector& v)
{
    if (v.dim() != dim_) {
        throw InvalidArgument("accumulate: dimension mismatch");
    }
    const auto words = v.words();
    for (std::size_t w = 0; w < words.size(); ++w) {
        std::uint64_t carry = words[w];
        for (std::size_t p = 0; carry != 0; ++p) {
            if (p == planes_.size()) {
                planes_.emplace_back(words.size(), 0);
            }
            std::uint64_t& plane = planes_[p][w];
            const std::uint64_t next = plane & carry;
            plane ^= carry;
            carry = next;
        }
    }
    ++added_;
}

std::uint32_t BitCounter::ones(std::size_t i) const noexcept
{
    std::uint32_t c = 0;
    for (std::size_t p = 0; p < planes_.size(); ++p) {
        c |= static_cast<std::uint32_t>((planes_[p][i >> 6] >> (i & 63)) & 1U) << p;
    }
    return c;
}

AccumVector BitCounter::to_accum() const
{
    std::vector<std::int32_t> counts(dim_, -static_cast<std::int32_t>(added_));
    for (std::size_t p = 0; p < planes_.size(); ++p) {
        const std::int32_t weight = 2 << p;
        const auto& plane = planes_[p];
        for (std::size_t w = 0; w < plane.size(); ++w) {
            std::uint64_t bits = plane[w];
            while (bits != 0) {
                const auto b = static_cast<std::size_t>(std::countr_zero(bits));
                counts[w * 64 + b] += weight;
                bits &= bits - 1;
            }
        }
    }
    return AccumVector::from_counts(std::move(counts), added_);
}

Hypervector random_hv(RngStream& rng, std::size_t dim)
{
    require_dim(dim);
    std::vector<std::uint64_t> words(words_for(dim));
    for (auto& w : words) {
        w = rng.next_u64();
    }
    return Hypervector::from_words(dim, std::move(words));
}

Hypervector bind(const Hypervector& a, const Hypervector& b)
{
    require_same_dim(a, b, "bind");
    std::vector<std::uint64_t> out(a.word_count());
    const auto wa = a.words();
    const auto wb = b.words();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = ~(wa[i] ^ wb[i]);
    }
    return Hypervector::from_words(a.dim(), std::move(out));
}

Hypervector complement(const Hypervector& a)
{
    std::vector<std::uint64_t> out(a.words().begin(), a.words().end());
    for (auto& w : out) {
        w = ~w;
    }
    return Hypervector::from_words(a.dim(), std::move(out));
}

Hypervector permute(const Hypervector& a, std::int64_t k)
{
    const auto dim = static_cast<std::int64_t>(a.dim());
    if (dim == 0) {
        return a;
    }
    const auto shift = static_cast<std::size_t>(((k % dim) + dim) % dim);
    if (shift == 0) {
        return a;
    }
    // result = (a << shift) | (a >> (dim - shift)) as a dim-bit integer.
    const auto src = a.words();
    const std::size_t n = src.size();
    std::vector<std::uint64_t> out(n, 0);
    const std::size_t word_shift = shift >> 6;
    const std::size_t bit_shift = shift & 63;
    for (std::size_t j = word_shift; j < n; ++j) {
        const std::size_t s = j - word_shift;
        std::uint64_t v = src[s] << bit_shift;
        if (bit_shift != 0 && s > 0) {
            v |= src[s - 1] >> (64 - bit_shift);
        }
        out[j] = v;
    }
    clear_padding(out, a.dim());
    const std::size_t back = a.dim() - shift;
    for (std::size_t j = 0; j < n; ++j) {
        out[j] |= shifted_word(src, j, back);
    }
    return Hypervector::from_words(a.dim(), std::move(out));
}

std::size_t hamming_count(const Hypervector& a, const Hypervector& b)
{
    require_same_dim(a, b, "hamming");
    const auto wa = a.words();
    const auto wb = b.words();
    std::size_t n = 0;
    for (std::size_t i = 0; i < wa.size(); ++i) {
        n += static_cast<std::size_t>(std::popcount(wa[i] ^ wb[i]));
    }
    return n;
}

double hamming(const Hypervector& a, const Hypervector& b)
{
    const std::size_t n = hamming_count(a, b);
    return a.dim() == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(a.dim());
}

// Written through the normalized distance so cos = 1 - 2 Ham holds to the bit.
double cosine(const Hypervector& a, const Hypervector& b)
{
    return 1.0 - 2.0 * hamming(a, b);
}

std::int64_t dot_bipolar(const Hypervector& a, const Hypervector& b)
{
    const auto diff = static_cast<std::int64_t>(hamming_count(a, b));
    return static_cast<std::int64_t>(a.dim()) - 2 * diff;
}

AccumVector accumulate(std::span<const Hypervector> vs,
                       std::optional<std::span<const std::uint8_t>> weights)
{
    if (weights && weights->size() != vs.size()) {
        throw InvalidArgument("accumulate: weights and vectors differ in length");
    }
    if (vs.empty()) {
        return AccumVector(0);
    }
    BitCounter counter(vs.front().dim());
    for (std::size_t j = 0; j < vs.size(); ++j) {
        if (weights) {
            const auto w = (*weights)[j];
            if (w > 1) {
                throw InvalidArgument("accumulate: weights must be 0 or 1");
            }
            if (w == 0) {
                continue;
            }
        }
        counter.add(vs[j]);
    }
    return counter.to_accum();
}

Hypervector binarize(const AccumVector& acc)
{
    Hypervector hv(acc.dim());
    const auto counts = acc.counts();
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] >= 0) {
            hv.set(i, true);
        }
    }
    return hv;
}

Hypervector slice(const Hypervector& a, std::size_t offset, std::size_t len)
{
    if (offset + len > a.dim()) {
        throw InvalidArgument("slice: range exceeds hypervector dimension");
    }
    const auto src = a.words();
    std::vector<std::uint64_t> out(words_for(len));
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] = shifted_word(src, j, offset);
    }
    return Hypervector::from_words(len, std::move(out));
}

Hypervector concat(std::span<const Hypervector> parts)
{
    std::size_t dim = 0;
    for (const auto& p : parts) {
        dim += p.dim();
    }
    std::vector<std::uint64_t> out(words_for(dim), 0);
    std::size_t pos = 0;
    for (const auto& p : parts) {
        const auto src = p.words();
        for (std::size_t j = 0; j < src.size(); ++j) {
            const std::size_t bit = pos + j * 64;
            const std::size_t w = bit >> 6;
            const std::size_t off = bit & 63;
            out[w] |= src[j] << off;
            if (off != 0 && w + 1 < out.size()) {
                out[w + 1] |= src[j] >> (64 - off);
            }
        }
        pos += p.dim();
    }
    return Hypervector::from_words(dim, std::move(out));
}

} // namespace bihd
