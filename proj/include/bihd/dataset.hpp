#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bihd/encoder.hpp"

namespace bihd {

/// A parsed split. Every sample shares `features` (N) and `length` (L).
struct DatasetFile {
    std::filesystem::path path;
    std::string split;
    std::vector<Sample> samples;
    std::size_t features = 0;
    std::size_t length = 0;
    std::size_t classes = 0;  // max label + 1

    bool empty() const noexcept { return samples.empty(); }
};

/// Reads the line-oriented format: one JSON object per line with an integer
/// "label" and "values", an array of N arrays of L reals. Blank lines are
/// skipped. Errors carry "<path>:<line>".
///
/// When `classes` is given, labels must lie in [0, classes). A "train"
/// split must also contain every label in [0, K).
DatasetFile load_dataset(const std::filesystem::path& path, std::string split = "train",
                         std::optional<std::size_t> classes = std::nullopt);

void write_dataset(const std::filesystem::path& path, std::span<const Sample> samples);

} // namespace bihd
