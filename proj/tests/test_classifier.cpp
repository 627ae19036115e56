#include <gtest/gtest.h>

#include "bihd/classifier.hpp"
#include "bihd/errors.hpp"
#include "naive.hpp"

using bihd::Hypervector;
using bihd::LabeledHypervector;
using bihd::RngStream;

namespace {

Hypervector noisy(const Hypervector& h, double rate, RngStream& rng)
{
    auto out = h;
    for (std::size_t i = 0; i < h.dim(); ++i) {
        if (rng.uniform() < rate) {
            out.flip(i);
        }
    }
    return out;
}

} // namespace

TEST(Classifier, OneSamplePerClassGivesSamples)
{
    RngStream rng(1, 0);
    std::vector<LabeledHypervector> data;
    for (int k = 0; k < 3; ++k) {
        data.push_back({bihd::random_hv(rng, 500), k});
    }
    const auto am = bihd::vanilla_train(data, 3);
    for (int k = 0; k < 3; ++k) {
        EXPECT_EQ(am[static_cast<std::size_t>(k)], data[static_cast<std::size_t>(k)].hv);
    }
    auto doubled = data;
    doubled.insert(doubled.end(), data.begin(), data.end());
    EXPECT_EQ(bihd::vanilla_train(doubled, 3), am);
}

TEST(Classifier, PrototypesDenoiseMatchingOracle)
{
    RngStream rng(2, 0);
    std::vector<Hypervector> seeds;
    std::vector<LabeledHypervector> data;
    std::vector<std::vector<naive::Vec>> per_class(3);
    for (int k = 0; k < 3; ++k) {
        seeds.push_back(bihd::random_hv(rng, 10000));
        for (int c = 0; c < 20; ++c) {
            data.push_back({noisy(seeds.back(), 0.10, rng), k});
            per_class[static_cast<std::size_t>(k)].push_back(naive::unpack(data.back().hv));
        }
    }
    const auto am = bihd::vanilla_train(data, 3);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_EQ(naive::unpack(am[k]), naive::majority(per_class[k]));
        EXPECT_LE(bihd::hamming(am[k], seeds[k]), 0.05);
    }
}

TEST(Classifier, InferExamples)
{
    RngStream rng(3, 0);
    std::vector<Hypervector> protos;
    for (int k = 0; k < 4; ++k) {
        protos.push_back(bihd::random_hv(rng, 10000));
    }
    const bihd::AssociativeMemory am(protos);
    const auto exact = bihd::infer(protos[2], am);
    EXPECT_EQ(exact.label, 2);
    EXPECT_EQ(exact.distances[2], 0.0);
    EXPECT_EQ(bihd::infer(noisy(protos[1], 0.10, rng), am).label, 1);
}

TEST(Classifier, TiesGoToLowestIndex)
{
    // c0 = 1111, c1 = 0011: the query 1011 is at distance 1 from both.
    const auto c0 = Hypervector::ones(4);
    Hypervector c1(4);
    c1.set(2, true);
    c1.set(3, true);
    Hypervector q = Hypervector::ones(4);
    q.set(1, false);
    const bihd::AssociativeMemory am({c0, c1});
    const auto p = bihd::infer(q, am);
    EXPECT_EQ(p.distances[0], p.distances[1]);
    EXPECT_EQ(p.label, 0);
}

TEST(Classifier, Errors)
{
    RngStream rng(4, 0);
    const auto a = bihd::random_hv(rng, 64);
    EXPECT_THROW(bihd::AssociativeMemory({a}), bihd::InvalidArgument);
    const std::vector<LabeledHypervector> data{{a, 0}};
    EXPECT_THROW(bihd::vanilla_train(data, 2), bihd::DataError);
    const std::vector<LabeledHypervector> bad{{a, 0}, {a, 5}};
    EXPECT_THROW(bihd::vanilla_train(bad, 2), bihd::DataError);
}
