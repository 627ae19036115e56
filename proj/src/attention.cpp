#include "bihd/attention.hpp"

#include <string>

#include "bihd/errors.hpp"

namespace bihd {

HeadParams HeadParams::identity(std::size_t head_dim)
{
    const auto ones = Hypervector::ones(head_dim);
    return HeadParams{ones, ones, ones, ones};
}

std::size_t head_dim_for(std::size_t dim, std::size_t heads)
{
    if (heads == 0 || dim == 0 || dim % heads != 0) {
        throw ConfigError("hypervector dimension " + std::to_string(dim) +
                          " is not divisible into " + std::to_string(heads) + " heads");
    }
    return dim / heads;
}

QkvSlices project_qkv(const TokenSequence& tokens, const HeadParams& head, std::size_t head_index)
{
    const std::size_t hd = head.dim();
    if ((head_index + 1) * hd > tokens.dim()) {
        throw ConfigError("head " + std::to_string(head_index) + " exceeds token dimension");
    }
    QkvSlices out;
    out.q.reserve(tokens.length());
    out.k.reserve(tokens.length());
    out.v.reserve(tokens.length());
    for (const auto& tok : tokens.tokens) {
        const auto s = slice(tok, head_index * hd, hd);
        out.q.push_back(bind(s, head.bv_q));
        out.k.push_back(bind(s, head.bv_k));
        out.v.push_back(bind(s, head.bv_v));
    }
    return out;
}

std::vector<std::uint8_t> attention_row(const Hypervector& q, std::span<const Hypervector> k)
{
    std::vector<std::uint8_t> row(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) {
        row[i] = dot_bipolar(q, k[i]) > 0 ? 1 : 0;
    }
    return row;
}

AttentionMask attention_scores(std::span<const Hypervector> q, std::span<const Hypervector> k)
{
    if (q.size() != k.size()) {
        throw InvalidArgument("attention_scores: query and key counts differ");
    }
    AttentionMask mask(q.size(), k.size());
    for (std::size_t t = 0; t < q.size(); ++t) {
        const auto row = attention_row(q[t], k);
        for (std::size_t i = 0; i < row.size(); ++i) {
            mask.set(t, i, row[i] != 0);
        }
    }
    return mask;
}

Hypervector selective_bundle(std::span<const std::uint8_t> mask_row, std::span<const Hypervector> v,
                             std::size_t t)
{
    if (mask_row.size() != v.size()) {
        throw InvalidArgument("selective_bundle: mask row and value count differ");
    }
    if (t >= v.size()) {
        throw InvalidArgument("selective_bundle: query index out of range");
    }
    const auto acc = accumulate(v, mask_row);
    if (acc.accumulated() == 0) {
        return v[t];
    }
    return binarize(acc);
}

Hypervector head_output(const Hypervector& bundled, const HeadParams& head)
{
    return bind(bundled, head.bv_a);
}

namespace {

void check_heads(const TokenSequence& tokens, std::span<const HeadParams> heads)
{
    if (tokens.length() == 0) {
        throw InvalidArgument("attention: empty token sequence");
    }
    const std::size_t hd = head_dim_for(tokens.dim(), heads.size());
    for (const auto& h : heads) {
        if (h.bv_q.dim() != hd || h.bv_k.dim() != hd || h.bv_v.dim() != hd || h.bv_a.dim() != hd) {
            throw ConfigError("attention: head binding vectors must have dimension " +
                              std::to_string(hd));
        }
    }
}

} // namespace

TokenSequence attention_forward(const TokenSequence& tokens, std::span<const HeadParams> heads,
                                AttentionMode mode)
{
    check_heads(tokens, heads);
    const std::size_t L = tokens.length();
    const std::size_t first = mode == AttentionMode::LastToken ? L - 1 : 0;

    // per_token[t - first][h]
    std::vector<std::vector<Hypervector>> per_token(L - first);
    for (std::size_t h = 0; h < heads.size(); ++h) {
        const auto qkv = project_qkv(tokens, heads[h], h);
        for (std::size_t t = first; t < L; ++t) {
            const auto row = attention_row(qkv.q[t], qkv.k);
            per_token[t - first].push_back(head_output(selective_bundle(row, qkv.v, t), heads[h]));
        }
    }
    TokenSequence out;
    out.tokens.reserve(per_token.size());
    for (const auto& parts : per_token) {
        out.tokens.push_back(concat(parts));
    }
    return out;
}

Hypervector attention_last_token(const TokenSequence& tokens, std::span<const HeadParams> heads)
{
    return attention_forward(tokens, heads, AttentionMode::LastToken).tokens.front();
}

} // namespace bihd
