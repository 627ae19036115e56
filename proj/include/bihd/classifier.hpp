#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "bihd/hypervector.hpp"

namespace bihd {

/// Class prototypes C_1..C_K, all of dimension D.
class AssociativeMemory {
public:
    AssociativeMemory() = default;
    explicit AssociativeMemory(std::vector<Hypervector> prototypes);

    std::size_t classes() const noexcept { return prototypes_.size(); }
    std::size_t dim() const noexcept { return prototypes_.empty() ? 0 : prototypes_.front().dim(); }
    const Hypervector& operator[](std::size_t k) const { return prototypes_[k]; }
    const std::vector<Hypervector>& prototypes() const noexcept { return prototypes_; }

    friend bool operator==(const AssociativeMemory&, const AssociativeMemory&) = default;

private:
    std::vector<Hypervector> prototypes_;
};

struct Prediction {
    int label = 0;
    std::vector<double> distances;  // normalized Hamming to each prototype
};

struct LabeledHypervector {
    Hypervector hv;
    int label = 0;
};

/// Superposition training: C_k = sign(sum of class-k hypervectors).
/// Throws DataError naming the first class without samples.
AssociativeMemory vanilla_train(std::span<const LabeledHypervector> encoded, std::size_t classes);

/// Nearest prototype by Hamming distance (equivalently highest cosine).
/// Ties go to the smallest class index.
Prediction infer(const Hypervector& query, const AssociativeMemory& am);

} // namespace bihd
