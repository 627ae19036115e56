#pragma once

#include <cstddef>
#include <vector>

#include "bihd/encoder.hpp"
#include "bihd/rng.hpp"

namespace synthetic {

// Class c draws every value from its own band [c, c + 0.8) of the feature
// range, so a nearest-level rule separates the classes perfectly.
inline std::vector<bihd::Sample> banded(std::size_t classes, std::size_t per_class, std::size_t features,
                                        std::size_t length, std::uint64_t seed)
{
    bihd::RngStream rng(seed, 900);
    std::vector<bihd::Sample> out;
    for (std::size_t i = 0; i < per_class; ++i) {
        for (std::size_t c = 0; c < classes; ++c) {
            bihd::Sample s;
            s.features = features;
            s.length = length;
            s.label = static_cast<int>(c);
            s.values.resize(features * length);
            for (auto& v : s.values) {
                v = static_cast<double>(c) + rng.uniform(0.0, 0.8);
            }
            out.push_back(std::move(s));
        }
    }
    return out;
}

} // namespace synthetic
