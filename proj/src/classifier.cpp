#include "bihd/classifier.hpp"

#include <string>

#include "bihd/errors.hpp"

namespace bihd {

AssociativeMemory::AssociativeMemory(std::vector<Hypervector> prototypes)
    : prototypes_(std::move(prototypes))
{
    if (prototypes_.size() < 2) {
        throw InvalidArgument("associative memory needs at least two classes");
    }
    for (const auto& p : prototypes_) {
        if (p.dim() != prototypes_.front().dim()) {
            throw InvalidArgument("associative memory prototypes differ in dimension");
        }
    }
}

AssociativeMemory vanilla_train(std::span<const LabeledHypervector> encoded, std::size_t classes)
{
    if (encoded.empty()) {
        throw DataError("vanilla_train: no training samples");
    }
    const std::size_t dim = encoded.front().hv.dim();
    std::vector<AccumVector> acc(classes, AccumVector(dim));
    for (const auto& s : encoded) {
        if (s.label < 0 || static_cast<std::size_t>(s.label) >= classes) {
            throw DataError("vanilla_train: label " + std::to_string(s.label) + " outside [0, " +
                            std::to_string(classes) + ")");
        }
        acc[static_cast<std::size_t>(s.label)].add(s.hv);
    }
    std::vector<Hypervector> protos;
    protos.reserve(classes);
    for (std::size_t k = 0; k < classes; ++k) {
        if (acc[k].accumulated() == 0) {
            throw DataError("vanilla_train: class " + std::to_string(k) + " has no samples");
        }
        protos.push_back(binarize(acc[k]));
    }
    return AssociativeMemory(std::move(protos));
}

Prediction infer(const Hypervector& query, const AssociativeMemory& am)
{
    Prediction pred;
    pred.distances.reserve(am.classes());
    std::size_t best = 0;
    for (std::size_t k = 0; k < am.classes(); ++k) {
        pred.distances.push_back(hamming(query, am[k]));
        if (pred.distances[k] < pred.distances[best]) {
            best = k;
        }
    }
    pred.label = static_cast<int>(best);
    return pred;
}

} // namespace bihd
