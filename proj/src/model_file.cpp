#include "bihd/model_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "bihd/errors.hpp"

namespace bihd {

namespace {

constexpr char kMagic[4] = {'B', 'H', 'D', 'T'};

class Writer {
public:
    void bytes(const void* p, std::size_t n)
    {
        const auto* b = static_cast<const std::uint8_t*>(p);
        out_.insert(out_.end(), b, b + n);
    }
    void u32(std::uint32_t v)
    {
        for (int i = 0; i < 4; ++i) {
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    void u64(std::uint64_t v)
    {
        for (int i = 0; i < 8; ++i) {
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void hv(const Hypervector& h)
    {
        for (const auto w : h.words()) {
            u64(w);
        }
    }
    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    void need(std::size_t n) const
    {
        if (pos_ + n > in_.size()) {
            throw DataError("model file truncated at byte " + std::to_string(pos_));
        }
    }
    std::uint32_t u32()
    {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
        }
        return v;
    }
    std::uint64_t u64()
    {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
        }
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    Hypervector hv(std::size_t dim)
    {
        std::vector<std::uint64_t> words(words_for(dim));
        for (auto& w : words) {
            w = u64();
        }
        return Hypervector::from_words(dim, std::move(words));
    }
    std::span<const std::uint8_t> raw(std::size_t n)
    {
        need(n);
        auto s = in_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    bool done() const { return pos_ == in_.size(); }

private:
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

ModelHeader parse_header(Reader& r)
{
    const auto magic = r.raw(4);
    if (std::memcmp(magic.data(), kMagic, 4) != 0) {
        throw DataError("not a model file (bad magic)");
    }
    ModelHeader h;
    h.version = r.u32();
    if (h.version != kModelFormatVersion) {
        throw DataError("unsupported model format version " + std::to_string(h.version));
    }
    h.dim = r.u32();
    h.heads = r.u32();
    h.max_length = r.u32();
    h.features = r.u32();
    h.quant_levels = r.u32();
    h.classes = r.u32();
    h.seed = r.u64();
    return h;
}

} // namespace

std::vector<std::uint8_t> serialize_model(const Model& model)
{
    Writer w;
    w.bytes(kMagic, 4);
    w.u32(kModelFormatVersion);
    w.u32(static_cast<std::uint32_t>(model.dim));
    w.u32(static_cast<std::uint32_t>(model.heads.size()));
    w.u32(static_cast<std::uint32_t>(model.max_length));
    w.u32(static_cast<std::uint32_t>(model.features()));
    w.u32(static_cast<std::uint32_t>(model.quant_levels()));
    w.u32(static_cast<std::uint32_t>(model.classes()));
    w.u64(model.seed);
    for (const auto& r : model.codebook.ranges) {
        w.f64(r.min);
        w.f64(r.max);
    }
    for (const auto& h : model.heads) {
        w.hv(h.bv_q);
    }
    for (const auto& h : model.heads) {
        w.hv(h.bv_k);
    }
    for (const auto& h : model.heads) {
        w.hv(h.bv_v);
    }
    for (const auto& h : model.heads) {
        w.hv(h.bv_a);
    }
    for (const auto& p : model.am.prototypes()) {
        w.hv(p);
    }
    return w.take();
}

ModelHeader read_model_header(std::span<const std::uint8_t> bytes)
{
    Reader r(bytes);
    return parse_header(r);
}

Model deserialize_model(std::span<const std::uint8_t> bytes)
{
    Reader r(bytes);
    const ModelHeader h = parse_header(r);
    const std::size_t hd = head_dim_for(h.dim, h.heads);
    if (h.classes < 2 || h.features == 0 || h.quant_levels < 2 || h.max_length == 0) {
        throw DataError("model header has invalid shape fields");
    }
    std::vector<QuantRange> ranges;
    ranges.reserve(h.features);
    for (std::uint32_t i = 0; i < h.features; ++i) {
        const double lo = r.f64();
        const double hi = r.f64();
        ranges.push_back(QuantRange{lo, hi, h.quant_levels});
    }
    Model m;
    m.dim = h.dim;
    m.max_length = h.max_length;
    m.seed = h.seed;
    m.heads.resize(h.heads);
    for (auto& head : m.heads) {
        head.bv_q = r.hv(hd);
    }
    for (auto& head : m.heads) {
        head.bv_k = r.hv(hd);
    }
    for (auto& head : m.heads) {
        head.bv_v = r.hv(hd);
    }
    for (auto& head : m.heads) {
        head.bv_a = r.hv(hd);
    }
    std::vector<Hypervector> protos;
    protos.reserve(h.classes);
    for (std::uint32_t k = 0; k < h.classes; ++k) {
        protos.push_back(r.hv(h.dim));
    }
    if (!r.done()) {
        throw DataError("model file has trailing bytes");
    }
    m.am = AssociativeMemory(std::move(protos));
    m.codebook = make_codebook(h.dim, h.quant_levels, h.seed, std::move(ranges));
    return m;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void save_model(const std::filesystem::path& path, const Model& model)
{
    const auto bytes = serialize_model(model);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot write model " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Model load_model(const std::filesystem::path& path)
{
    return deserialize_model(read_file_bytes(path));
}

} // namespace bihd
