#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "bihd/model.hpp"

namespace bihd {

/// Binary model layout, all integers little-endian:
///
///   "BHDT" | u32 version | u32 D | u32 N_h | u32 L_max | u32 N | u32 q | u32 K
///   | u64 master seed | N x (f64 min, f64 max)
///   | bv_q, bv_k, bv_v, bv_a: per head ceil(D/N_h / 64) u64 words each
///   | K prototypes: ceil(D / 64) u64 words each
///
/// Item memories are not stored; they are regenerated from the seed.
inline constexpr std::uint32_t kModelFormatVersion = 1;

struct ModelHeader {
    std::uint32_t version = kModelFormatVersion;
    std::uint32_t dim = 0;
    std::uint32_t heads = 0;
    std::uint32_t max_length = 0;
    std::uint32_t features = 0;
    std::uint32_t quant_levels = 0;
    std::uint32_t classes = 0;
    std::uint64_t seed = 0;
};

std::vector<std::uint8_t> serialize_model(const Model& model);
Model deserialize_model(std::span<const std::uint8_t> bytes);
ModelHeader read_model_header(std::span<const std::uint8_t> bytes);

void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(const std::filesystem::path& path);
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

} // namespace bihd
