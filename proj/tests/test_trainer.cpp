#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "bihd/errors.hpp"
#include "bihd/model.hpp"
#include "bihd/trainer.hpp"
#include "synthetic.hpp"

using bihd::ShadowParams;
using bihd::TrainConfig;
using bihd::UnpackedTokens;

namespace {

TrainConfig small_config(std::size_t dim, std::size_t heads)
{
    TrainConfig cfg;
    cfg.dim = dim;
    cfg.heads = heads;
    cfg.quant_levels = 16;
    cfg.dropout = 0.0;
    return cfg;
}

std::vector<UnpackedTokens> encode_all(const std::vector<bihd::Sample>& data, const bihd::Codebook& cb)
{
    std::vector<UnpackedTokens> out;
    for (const auto& s : data) {
        out.push_back(UnpackedTokens::from(bihd::encode_sequence(s, cb)));
    }
    return out;
}

double mean_loss(const std::vector<UnpackedTokens>& enc, const std::vector<bihd::Sample>& data,
                 const ShadowParams& shadow, const TrainConfig& cfg)
{
    bihd::RngStream rng(0, 0);
    double total = 0.0;
    for (std::size_t i = 0; i < enc.size(); ++i) {
        const auto fwd = bihd::forward_train(enc[i], shadow, cfg, rng, false);
        total += bihd::loss_and_grad(fwd.logits, data[i].label).loss;
    }
    return total / static_cast<double>(enc.size());
}

} // namespace

TEST(Loss, UniformLogitsGiveLogK)
{
    const std::vector<double> logits(4, 0.3);
    const auto lg = bihd::loss_and_grad(logits, 2);
    EXPECT_NEAR(lg.loss, std::log(4.0), 1e-12);
    EXPECT_NEAR(lg.grad[2], -0.75, 1e-12);
    EXPECT_NEAR(lg.grad[0], 0.25, 1e-12);

    const std::vector<double> confident{0.0, 800.0, -5.0};
    EXPECT_LT(bihd::loss_and_grad(confident, 1).loss, 1e-12);
    EXPECT_THROW(bihd::loss_and_grad(confident, 3), bihd::InvalidArgument);
}

TEST(Loss, GradientMatchesCentralDifferences)
{
    bihd::RngStream rng(1, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t k = 2 + static_cast<std::size_t>(rng.uniform_int(0, 8));
        std::vector<double> logits(k);
        for (auto& l : logits) {
            l = rng.normal(0.0, 3.0);
        }
        const int label = static_cast<int>(rng.uniform_int(0, static_cast<std::int64_t>(k) - 1));
        const auto lg = bihd::loss_and_grad(logits, label);
        for (std::size_t j = 0; j < k; ++j) {
            const double h = 1e-5;
            auto up = logits;
            auto down = logits;
            up[j] += h;
            down[j] -= h;
            const double fd = (bihd::loss_and_grad(up, label).loss - bihd::loss_and_grad(down, label).loss) / (2 * h);
            EXPECT_LE(std::abs(fd - lg.grad[j]), 1e-6 * std::max(1.0, std::abs(lg.grad[j])));
        }
    }
}

TEST(Trainer, ConfigValidation)
{
    TrainConfig cfg;
    cfg.epochs = 0;
    EXPECT_THROW(cfg.validate(), bihd::ConfigError);
    cfg = TrainConfig{};
    cfg.heads = 7;
    EXPECT_THROW(cfg.validate(), bihd::ConfigError);
    cfg = TrainConfig{};
    cfg.dropout = 1.0;
    EXPECT_THROW(cfg.validate(), bihd::ConfigError);
    cfg = TrainConfig{};
    EXPECT_DOUBLE_EQ(cfg.effective_logit_scale(), 0.01);
}

TEST(Trainer, ForwardAgreesWithBinaryModel)
{
    const auto data = synthetic::banded(3, 3, 4, 6, 2);
    auto cfg = small_config(1200, 4);
    cfg.init_range = 0.5;
    const auto ranges = bihd::feature_ranges(data, cfg.quant_levels);
    const auto cb = bihd::make_codebook(cfg.dim, cfg.quant_levels, 5, ranges);
    const auto shadow = ShadowParams::random(cfg.dim, cfg.heads, 3, cfg.init_range, bihd::RngStream(5, 3));

    bihd::Model model;
    model.dim = cfg.dim;
    model.max_length = 6;
    model.codebook = cb;
    model.heads = shadow.binarized_heads();
    model.am = shadow.binarized_memory();

    bihd::RngStream rng(0, 0);
    const double scale = cfg.effective_logit_scale();
    for (const auto& s : data) {
        const auto enc = UnpackedTokens::from(bihd::encode_sequence(s, cb));
        const auto fwd = bihd::forward_train(enc, shadow, cfg, rng, false);
        const auto h = model.represent(s);
        for (std::size_t d = 0; d < cfg.dim; ++d) {
            ASSERT_EQ(fwd.tape.features[d], h.bipolar(d));
        }
        const auto pred = model.predict(s);
        for (std::size_t k = 0; k < 3; ++k) {
            // dot = D (1 - 2 Ham)
            const double dot = static_cast<double>(cfg.dim) * (1.0 - 2.0 * pred.distances[k]);
            EXPECT_NEAR(fwd.logits[k], scale * dot, 1e-9);
        }
        const auto best = std::max_element(fwd.logits.begin(), fwd.logits.end()) - fwd.logits.begin();
        EXPECT_EQ(best, pred.label);
    }
}

TEST(Trainer, PrototypeQueryGivesUnitLogit)
{
    auto cfg = small_config(400, 1);
    cfg.logit_scale = 1.0 / 400.0;
    ShadowParams shadow(400, 1, 2);
    auto flat = shadow.flat();
    std::fill(flat.begin(), flat.end(), 0.5);
    bihd::RngStream rng(7, 0);
    bihd::TokenSequence seq;
    seq.tokens.push_back(bihd::random_hv(rng, 400));
    // Prototype 1 equals the (identity-attention) single token.
    auto proto = shadow.prototype(1);
    for (std::size_t d = 0; d < 400; ++d) {
        proto[d] = seq.tokens[0].bit(d) ? 0.5 : -0.5;
    }
    const auto enc = UnpackedTokens::from(seq);
    const auto fwd = bihd::forward_train(enc, shadow, cfg, rng, false);
    EXPECT_DOUBLE_EQ(fwd.logits[1], 1.0);
    EXPECT_GT(fwd.logits[1], fwd.logits[0]);
}

TEST(Trainer, ZeroUpstreamGradientGivesZeroGradients)
{
    const auto data = synthetic::banded(2, 1, 3, 4, 3);
    const auto cfg = small_config(600, 3);
    const auto cb = bihd::make_codebook(600, 16, 1, bihd::feature_ranges(data, 16));
    const auto shadow = ShadowParams::random(600, 3, 2, 0.1, bihd::RngStream(1, 3));
    bihd::RngStream rng(0, 0);
    const auto enc = UnpackedTokens::from(bihd::encode_sequence(data[0], cb));
    const auto fwd = bihd::forward_train(enc, shadow, cfg, rng, true);
    std::vector<double> grads(shadow.size(), 0.0);
    const std::vector<double> zero(2, 0.0);
    bihd::backward_ste(fwd.tape, zero, shadow, cfg, grads);
    EXPECT_TRUE(std::all_of(grads.begin(), grads.end(), [](double g) { return g == 0.0; }));
}

TEST(Trainer, FrozenAttentionMemoryGradientIsClosedForm)
{
    // One token and all-positive bindings: h is the token itself and
    // dL/dC_k = dL/dlogit_k * scale * h.
    auto cfg = small_config(500, 5);
    ShadowParams shadow = ShadowParams::random(500, 5, 3, 0.5, bihd::RngStream(2, 3));
    for (std::size_t h = 0; h < 5; ++h) {
        for (std::size_t w = 0; w < 4; ++w) {
            for (auto& x : shadow.binding(h, w)) {
                x = std::abs(x) + 0.01;
            }
        }
    }
    bihd::RngStream rng(2, 1);
    bihd::TokenSequence seq;
    seq.tokens.push_back(bihd::random_hv(rng, 500));
    const auto enc = UnpackedTokens::from(seq);
    const auto fwd = bihd::forward_train(enc, shadow, cfg, rng, false);
    for (std::size_t d = 0; d < 500; ++d) {
        ASSERT_EQ(fwd.tape.features[d], seq.tokens[0].bipolar(d));
    }
    const auto lg = bihd::loss_and_grad(fwd.logits, 1);
    std::vector<double> grads(shadow.size(), 0.0);
    bihd::backward_ste(fwd.tape, lg.grad, shadow, cfg, grads);
    const double scale = cfg.effective_logit_scale();
    for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t d = 0; d < 500; ++d) {
            ASSERT_EQ(grads[k * 500 + d], lg.grad[k] * scale * fwd.tape.features[d]);
        }
    }
}

TEST(Trainer, StaleTapeIsRejected)
{
    const auto data = synthetic::banded(2, 1, 2, 3, 4);
    const auto cfg = small_config(200, 2);
    const auto cb = bihd::make_codebook(200, 16, 1, bihd::feature_ranges(data, 16));
    auto shadow = ShadowParams::random(200, 2, 2, 0.1, bihd::RngStream(1, 3));
    bihd::RngStream rng(0, 0);
    const auto enc = UnpackedTokens::from(bihd::encode_sequence(data[0], cb));
    const auto fwd = bihd::forward_train(enc, shadow, cfg, rng, true);
    std::vector<double> grads(shadow.size(), 0.0);
    bihd::OptimizerState state(shadow.size());
    bihd::optimizer_step(shadow, grads, state, cfg);
    const std::vector<double> dl{0.5, -0.5};
    EXPECT_THROW(bihd::backward_ste(fwd.tape, dl, shadow, cfg, grads), bihd::ContractViolation);
}

TEST(Trainer, DetachedMaskLeavesQueryAndKeyUntouched)
{
    const auto data = synthetic::banded(2, 2, 3, 5, 6);
    auto cfg = small_config(600, 3);
    const auto cb = bihd::make_codebook(600, 16, 2, bihd::feature_ranges(data, 16));
    const auto shadow = ShadowParams::random(600, 3, 2, 0.1, bihd::RngStream(2, 3));
    bihd::RngStream rng(0, 0);
    const auto enc = UnpackedTokens::from(bihd::encode_sequence(data[1], cb));
    const auto fwd = bihd::forward_train(enc, shadow, cfg, rng, false);
    const auto lg = bihd::loss_and_grad(fwd.logits, data[1].label);

    auto norm = [&](const std::vector<double>& g, std::size_t which) {
        double s = 0.0;
        for (std::size_t h = 0; h < 3; ++h) {
            const auto b = shadow.binding(h, which);
            const auto off = static_cast<std::size_t>(b.data() - shadow.flat().data());
            for (std::size_t d = 0; d < b.size(); ++d) {
                s += std::abs(g[off + d]);
            }
        }
        return s;
    };
    std::vector<double> ste(shadow.size(), 0.0);
    bihd::backward_ste(fwd.tape, lg.grad, shadow, cfg, ste);
    cfg.mask_gradient = bihd::MaskGradient::Detach;
    std::vector<double> detached(shadow.size(), 0.0);
    bihd::backward_ste(fwd.tape, lg.grad, shadow, cfg, detached);
    EXPECT_GT(norm(ste, 0) + norm(ste, 1), 0.0);
    EXPECT_EQ(norm(detached, 0), 0.0);
    EXPECT_EQ(norm(detached, 1), 0.0);
    EXPECT_EQ(norm(detached, 2), norm(ste, 2));
    EXPECT_EQ(norm(detached, 3), norm(ste, 3));
}

TEST(Optimizer, ZeroGradientWithoutDecayIsNoOp)
{
    std::vector<double> p{0.3, -0.7, 0.0};
    const auto before = p;
    const std::vector<double> g(3, 0.0);
    bihd::OptimizerState st(3);
    bihd::AdamSettings s;
    bihd::adam_step(p, g, st, s);
    EXPECT_EQ(p, before);
}

TEST(Optimizer, ClipsIntoUnitBox)
{
    std::vector<double> p{0.9999, -0.9999, 0.5};
    const std::vector<double> g{-10.0, 10.0, -1.0};
    bihd::OptimizerState st(3);
    bihd::AdamSettings s;
    s.learning_rate = 0.5;
    for (int i = 0; i < 10; ++i) {
        bihd::adam_step(p, g, st, s);
    }
    for (const auto x : p) {
        EXPECT_GE(x, -1.0);
        EXPECT_LE(x, 1.0);
    }
    EXPECT_EQ(p[0], 1.0);
    EXPECT_EQ(p[1], -1.0);
}

TEST(Optimizer, SolvesQuadraticToy)
{
    // minimize (x - 0.3)^2 from x = -0.8
    std::vector<double> x{-0.8};
    bihd::OptimizerState st(1);
    bihd::AdamSettings s;
    s.learning_rate = 0.05;
    for (int i = 0; i < 500; ++i) {
        const std::vector<double> g{2.0 * (x[0] - 0.3)};
        bihd::adam_step(x, g, st, s);
    }
    EXPECT_NEAR(x[0], 0.3, 1e-3);
}

TEST(Trainer, LossFallsOnSmallSyntheticSet)
{
    const auto data = synthetic::banded(2, 5, 3, 6, 7);
    auto cfg = small_config(2000, 10);
    cfg.learning_rate = 1e-2;
    cfg.weight_decay = 0.0;
    const auto cb = bihd::make_codebook(2000, 16, 0, bihd::feature_ranges(data, 16));
    const auto enc = encode_all(data, cb);
    auto shadow = ShadowParams::random(2000, 10, 2, cfg.init_range, bihd::RngStream(0, 3));
    bihd::OptimizerState state(shadow.size());
    const double start = mean_loss(enc, data, shadow, cfg);
    EXPECT_NEAR(start, std::log(2.0), 0.5);
    bihd::RngStream rng(0, 0);
    std::vector<double> grads(shadow.size());
    for (std::size_t step = 0; step < 50; ++step) {
        const std::size_t i = step % data.size();
        std::fill(grads.begin(), grads.end(), 0.0);
        const auto fwd = bihd::forward_train(enc[i], shadow, cfg, rng, true);
        bihd::backward_ste(fwd.tape, bihd::loss_and_grad(fwd.logits, data[i].label).grad, shadow, cfg, grads);
        bihd::optimizer_step(shadow, grads, state, cfg);
    }
    EXPECT_LT(mean_loss(enc, data, shadow, cfg), 0.1);
}

TEST(Trainer, SingleSampleSingleEpochLogsOnce)
{
    const auto data = synthetic::banded(1, 1, 2, 3, 8);
    auto cfg = small_config(400, 2);
    std::size_t calls = 0;
    const auto res = bihd::fit(data, cfg, [&](const bihd::EpochLog&) { ++calls; });
    EXPECT_EQ(res.log.size(), 1u);
    EXPECT_EQ(calls, 1u);
    EXPECT_EQ(res.model.classes(), 2u);
}

TEST(Trainer, SeparableSetIsLearnedWithMonotoneLoss)
{
    const auto data = synthetic::banded(3, 10, 4, 8, 9);
    auto cfg = small_config(4000, 10);
    cfg.learning_rate = 1e-3;
    cfg.epochs = 20;
    const auto res = bihd::fit(data, cfg);
    EXPECT_EQ(res.log.back().train_accuracy, 1.0);
    // Mean loss over consecutive 5-epoch windows never rises.
    std::vector<double> windows;
    for (std::size_t e = 0; e + 5 <= res.log.size(); e += 5) {
        double m = 0.0;
        for (std::size_t j = e; j < e + 5; ++j) {
            m += res.log[j].mean_loss / 5.0;
        }
        windows.push_back(m);
    }
    ASSERT_EQ(windows.size(), 4u);
    for (std::size_t w = 1; w < windows.size(); ++w) {
        EXPECT_LE(windows[w], windows[w - 1]);
    }
    std::size_t correct = 0;
    for (const auto& s : data) {
        correct += res.model.predict(s).label == s.label ? 1 : 0;
    }
    EXPECT_EQ(correct, data.size());
}

TEST(Trainer, FitIsDeterministic)
{
    const auto data = synthetic::banded(2, 4, 3, 5, 10);
    auto cfg = small_config(800, 4);
    cfg.dropout = 0.2;
    cfg.batch_size = 3;
    cfg.epochs = 3;
    const auto a = bihd::fit(data, cfg);
    const auto b = bihd::fit(data, cfg);
    EXPECT_EQ(a.model.heads, b.model.heads);
    EXPECT_EQ(a.model.am, b.model.am);
    ASSERT_EQ(a.log.size(), b.log.size());
    for (std::size_t i = 0; i < a.log.size(); ++i) {
        EXPECT_EQ(a.log[i].mean_loss, b.log[i].mean_loss);
    }
}
