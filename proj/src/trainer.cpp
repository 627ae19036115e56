#include "bihd/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "bihd/errors.hpp"
#include "bihd/parallel.hpp"

namespace bihd {

namespace {

constexpr std::size_t kBindingKinds = 4;
enum Binding : std::size_t { kQuery = 0, kKey = 1, kValue = 2, kOutput = 3 };

inline std::int8_t sign_of(double x) noexcept { return x >= 0.0 ? 1 : -1; }

// Straight-through derivative of sign(): identity inside [-1, 1].
inline double ste(double x) noexcept { return std::abs(x) <= 1.0 ? 1.0 : 0.0; }

std::vector<std::int8_t> signs(std::span<const double> xs)
{
    std::vector<std::int8_t> out(xs.size());
    std::transform(xs.begin(), xs.end(), out.begin(), sign_of);
    return out;
}

Hypervector to_hv(std::span<const double> xs)
{
    const auto s = signs(xs);
    return Hypervector::from_bipolar(s);
}

} // namespace

double TrainConfig::effective_logit_scale() const
{
    return logit_scale.value_or(1.0 / std::sqrt(static_cast<double>(dim)));
}

std::size_t TrainConfig::head_dim() const { return head_dim_for(dim, heads); }

void TrainConfig::validate() const
{
    if (!(learning_rate > 0.0)) {
        throw ConfigError("learning rate must be positive");
    }
    if (weight_decay < 0.0) {
        throw ConfigError("weight decay must be non-negative");
    }
    if (!(dropout >= 0.0 && dropout < 1.0)) {
        throw ConfigError("dropout must lie in [0, 1)");
    }
    if (batch_size == 0) {
        throw ConfigError("batch size must be positive");
    }
    if (epochs == 0) {
        throw ConfigError("epochs must be at least 1");
    }
    if (quant_levels < 2) {
        throw ConfigError("quantization needs at least 2 levels");
    }
    if (logit_scale && !(*logit_scale > 0.0)) {
        throw ConfigError("logit scale must be positive");
    }
    head_dim();
}

UnpackedTokens UnpackedTokens::from(const TokenSequence& seq)
{
    UnpackedTokens out;
    out.length = seq.length();
    out.dim = seq.dim();
    out.values.reserve(out.length * out.dim);
    for (const auto& tok : seq.tokens) {
        const auto b = tok.to_bipolar();
        out.values.insert(out.values.end(), b.begin(), b.end());
    }
    return out;
}

ShadowParams::ShadowParams(std::size_t dim, std::size_t heads, std::size_t classes)
    : dim_(dim), heads_(heads), classes_(classes)
{
    head_dim_for(dim, heads);
    data_.assign(classes * dim + kBindingKinds * dim, 0.0);
}

ShadowParams ShadowParams::random(std::size_t dim, std::size_t heads, std::size_t classes,
                                  double range, RngStream rng)
{
    ShadowParams p(dim, heads, classes);
    for (auto& x : p.data_) {
        x = rng.uniform(-range, range);
    }
    return p;
}

std::size_t ShadowParams::offset(std::size_t head, std::size_t which) const
{
    return classes_ * dim_ + head * kBindingKinds * head_dim() + which * head_dim();
}

std::span<const double> ShadowParams::binding(std::size_t head, std::size_t which) const
{
    return {data_.data() + offset(head, which), head_dim()};
}

std::span<double> ShadowParams::binding(std::size_t head, std::size_t which)
{
    return {data_.data() + offset(head, which), head_dim()};
}

std::vector<HeadParams> ShadowParams::binarized_heads() const
{
    std::vector<HeadParams> out;
    out.reserve(heads_);
    for (std::size_t h = 0; h < heads_; ++h) {
        out.push_back(HeadParams{to_hv(binding(h, kQuery)), to_hv(binding(h, kKey)),
                                 to_hv(binding(h, kValue)), to_hv(binding(h, kOutput))});
    }
    return out;
}

AssociativeMemory ShadowParams::binarized_memory() const
{
    std::vector<Hypervector> protos;
    protos.reserve(classes_);
    for (std::size_t k = 0; k < classes_; ++k) {
        protos.push_back(to_hv(prototype(k)));
    }
    return AssociativeMemory(std::move(protos));
}

ForwardResult forward_train(const UnpackedTokens& tokens, const ShadowParams& shadow,
                            const TrainConfig& cfg, RngStream& rng, bool training)
{
    if (tokens.dim != shadow.dim()) {
        throw InvalidArgument("forward_train: token dimension " + std::to_string(tokens.dim) +
                              " does not match parameters " + std::to_string(shadow.dim()));
    }
    if (tokens.length == 0) {
        throw InvalidArgument("forward_train: empty token sequence");
    }
    const std::size_t L = tokens.length;
    const std::size_t D = shadow.dim();
    const std::size_t hd = shadow.head_dim();
    const auto last = tokens.row(L - 1);

    ForwardResult res;
    TrainTape& tape = res.tape;
    tape.version = shadow.version();
    tape.tokens = &tokens;
    tape.heads.resize(shadow.heads());

    std::vector<double> c(D);
    std::vector<std::int32_t> qk(hd);
    std::vector<std::int32_t> bundle(hd);
    for (std::size_t h = 0; h < shadow.heads(); ++h) {
        const std::size_t off = h * hd;
        const auto bq = signs(shadow.binding(h, kQuery));
        const auto bk = signs(shadow.binding(h, kKey));
        const auto bv = signs(shadow.binding(h, kValue));
        const auto ba = signs(shadow.binding(h, kOutput));
        auto& th = tape.heads[h];

        // q_L . k_i = sum_d x_L[d] bq[d] x_i[d] bk[d]
        for (std::size_t d = 0; d < hd; ++d) {
            qk[d] = last[off + d] * bq[d] * bk[d];
        }
        th.scores.resize(L);
        th.mask.resize(L);
        for (std::size_t i = 0; i < L; ++i) {
            const auto x = tokens.row(i).subspan(off, hd);
            std::int32_t s = 0;
            for (std::size_t d = 0; d < hd; ++d) {
                s += qk[d] * x[d];
            }
            th.scores[i] = s;
            th.mask[i] = s > 0 ? 1 : 0;
            th.selected += th.mask[i];
        }

        th.attended.resize(hd);
        if (th.selected == 0) {
            th.fallback = true;
            for (std::size_t d = 0; d < hd; ++d) {
                th.attended[d] = static_cast<std::int8_t>(last[off + d] * bv[d]);
            }
        } else {
            std::fill(bundle.begin(), bundle.end(), 0);
            for (std::size_t i = 0; i < L; ++i) {
                if (th.mask[i] == 0) {
                    continue;
                }
                const auto x = tokens.row(i).subspan(off, hd);
                for (std::size_t d = 0; d < hd; ++d) {
                    bundle[d] += x[d];
                }
            }
            // v_i = x_i * bv, so sum_i v_i = bv * sum_i x_i.
            for (std::size_t d = 0; d < hd; ++d) {
                th.attended[d] = bundle[d] * bv[d] >= 0 ? 1 : -1;
            }
        }
        for (std::size_t d = 0; d < hd; ++d) {
            c[off + d] = static_cast<double>(th.attended[d] * ba[d]);
        }
    }

    tape.keep_scale.assign(D, 1.0);
    if (training && cfg.dropout > 0.0) {
        const double keep = 1.0 / (1.0 - cfg.dropout);
        for (std::size_t d = 0; d < D; ++d) {
            tape.keep_scale[d] = rng.uniform() < cfg.dropout ? 0.0 : keep;
        }
    }
    tape.features.resize(D);
    for (std::size_t d = 0; d < D; ++d) {
        tape.features[d] = c[d] * tape.keep_scale[d];
    }

    const double scale = cfg.effective_logit_scale();
    res.logits.assign(shadow.classes(), 0.0);
    for (std::size_t k = 0; k < shadow.classes(); ++k) {
        const auto proto = shadow.prototype(k);
        double acc = 0.0;
        for (std::size_t d = 0; d < D; ++d) {
            acc += proto[d] >= 0.0 ? tape.features[d] : -tape.features[d];
        }
        res.logits[k] = scale * acc;
    }
    tape.logits = res.logits;
    return res;
}

LossGrad loss_and_grad(std::span<const double> logits, int label)
{
    if (label < 0 || static_cast<std::size_t>(label) >= logits.size()) {
        throw InvalidArgument("loss_and_grad: label out of range");
    }
    const double peak = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (const double l : logits) {
        z += std::exp(l - peak);
    }
    const double log_z = peak + std::log(z);
    LossGrad out;
    out.loss = log_z - logits[static_cast<std::size_t>(label)];
    out.grad.resize(logits.size());
    for (std::size_t k = 0; k < logits.size(); ++k) {
        out.grad[k] = std::exp(logits[k] - log_z);
    }
    out.grad[static_cast<std::size_t>(label)] -= 1.0;
    return out;
}

void backward_ste(const TrainTape& tape, std::span<const double> dlogits, const ShadowParams& shadow,
                  const TrainConfig& cfg, std::span<double> grads)
{
    if (tape.version != shadow.version() || tape.tokens == nullptr) {
        throw ContractViolation("backward_ste: tape was recorded against different parameters");
    }
    if (dlogits.size() != shadow.classes() || grads.size() != shadow.size()) {
        throw InvalidArgument("backward_ste: gradient buffer shapes do not match parameters");
    }
    const UnpackedTokens& tokens = *tape.tokens;
    const std::size_t L = tokens.length;
    const std::size_t D = shadow.dim();
    const std::size_t hd = shadow.head_dim();
    const double scale = cfg.effective_logit_scale();
    const auto flat = shadow.flat();

    // Associative memory and dL/dh.
    std::vector<double> dfeat(D, 0.0);
    for (std::size_t k = 0; k < shadow.classes(); ++k) {
        const double g = dlogits[k] * scale;
        if (g == 0.0) {
            continue;
        }
        const auto proto = shadow.prototype(k);
        double* gk = grads.data() + k * D;
        for (std::size_t d = 0; d < D; ++d) {
            gk[d] += g * tape.features[d] * ste(proto[d]);
            dfeat[d] += proto[d] >= 0.0 ? g : -g;
        }
    }
    for (std::size_t d = 0; d < D; ++d) {
        dfeat[d] *= tape.keep_scale[d];
    }

    const auto last = tokens.row(L - 1);
    std::vector<double> dattended(hd);
    std::vector<double> dbundle(hd);
    std::vector<double> dscore(L);
    for (std::size_t h = 0; h < shadow.heads(); ++h) {
        const std::size_t off = h * hd;
        const auto& th = tape.heads[h];
        const auto sq = shadow.binding(h, kQuery);
        const auto sk = shadow.binding(h, kKey);
        const auto sv = shadow.binding(h, kValue);
        const auto sa = shadow.binding(h, kOutput);
        double* gq = grads.data() + (sq.data() - flat.data());
        double* gk = grads.data() + (sk.data() - flat.data());
        double* gv = grads.data() + (sv.data() - flat.data());
        double* ga = grads.data() + (sa.data() - flat.data());

        // Output binding on bv_a: c = a * sign(bv_a).
        for (std::size_t d = 0; d < hd; ++d) {
            const double g = dfeat[off + d];
            ga[d] += g * th.attended[d] * ste(sa[d]);
            dattended[d] = g * sign_of(sa[d]);
        }

        if (th.fallback) {
            // a = v_L = x_L * sign(bv_v); the mask carries no gradient.
            for (std::size_t d = 0; d < hd; ++d) {
                gv[d] += dattended[d] * last[off + d] * ste(sv[d]);
            }
            continue;
        }

        // a = sign(u / n) with u = sum_i m_i v_i; STE on the normalized sum.
        const double inv_n = 1.0 / static_cast<double>(th.selected);
        for (std::size_t d = 0; d < hd; ++d) {
            dbundle[d] = dattended[d] * inv_n;
        }

        const bool mask_grad = cfg.mask_gradient == MaskGradient::Ste;
        std::vector<double> dv_sum(hd, 0.0);  // sum over selected i of x_i[d]
        for (std::size_t i = 0; i < L; ++i) {
            const auto x = tokens.row(i).subspan(off, hd);
            if (th.mask[i] != 0) {
                for (std::size_t d = 0; d < hd; ++d) {
                    dv_sum[d] += x[d];
                }
            }
            if (mask_grad) {
                // dL/dm_i = sum_d v_i[d] * dL/du[d]
                double dm = 0.0;
                for (std::size_t d = 0; d < hd; ++d) {
                    dm += x[d] * sign_of(sv[d]) * dbundle[d];
                }
                const double s = static_cast<double>(th.scores[i]);
                dscore[i] = std::abs(s) <= static_cast<double>(hd) ? dm / static_cast<double>(hd) : 0.0;
            }
        }
        for (std::size_t d = 0; d < hd; ++d) {
            gv[d] += dbundle[d] * dv_sum[d] * ste(sv[d]);
        }

        if (!mask_grad) {
            continue;
        }
        // s_i = sum_d x_L[d] x_i[d] sign(bq[d]) sign(bk[d])
        std::vector<double> corr(hd, 0.0);  // sum_i ds_i x_L[d] x_i[d]
        for (std::size_t i = 0; i < L; ++i) {
            if (dscore[i] == 0.0) {
                continue;
            }
            const auto x = tokens.row(i).subspan(off, hd);
            for (std::size_t d = 0; d < hd; ++d) {
                corr[d] += dscore[i] * x[d];
            }
        }
        for (std::size_t d = 0; d < hd; ++d) {
            const double c = corr[d] * last[off + d];
            gq[d] += c * sign_of(sk[d]) * ste(sq[d]);
            gk[d] += c * sign_of(sq[d]) * ste(sk[d]);
        }
    }
}

void adam_step(std::span<double> params, std::span<const double> grads, OptimizerState& state,
               const AdamSettings& s)
{
    if (params.size() != grads.size() || state.first_moment.size() != params.size() ||
        state.second_moment.size() != params.size()) {
        throw InvalidArgument("adam_step: parameter, gradient and state sizes differ");
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(s.beta1, t);
    const double c2 = 1.0 - std::pow(s.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        double& m = state.first_moment[i];
        double& v = state.second_moment[i];
        m = s.beta1 * m + (1.0 - s.beta1) * grads[i];
        v = s.beta2 * v + (1.0 - s.beta2) * grads[i] * grads[i];
        const double mhat = m / c1;
        const double vhat = v / c2;
        double p = params[i];
        p -= s.learning_rate * (mhat / (std::sqrt(vhat) + s.epsilon) + s.weight_decay * p);
        if (s.clip > 0.0) {
            p = std::clamp(p, -s.clip, s.clip);
        }
        params[i] = p;
    }
}

void optimizer_step(ShadowParams& shadow, std::span<const double> grads, OptimizerState& state,
                    const TrainConfig& cfg)
{
    AdamSettings s;
    s.learning_rate = cfg.learning_rate;
    s.weight_decay = cfg.weight_decay;
    s.beta1 = cfg.beta1;
    s.beta2 = cfg.beta2;
    s.epsilon = cfg.epsilon;
    s.clip = 1.0;
    adam_step(shadow.flat(), grads, state, s);
    shadow.bump_version();
}

FitResult fit(std::span<const Sample> dataset, const TrainConfig& cfg,
              const std::function<void(const EpochLog&)>& on_epoch)
{
    cfg.validate();
    auto ranges = feature_ranges(dataset, cfg.quant_levels);
    return fit(dataset, cfg, make_codebook(cfg.dim, cfg.quant_levels, cfg.seed, std::move(ranges)),
               on_epoch);
}

FitResult fit(std::span<const Sample> dataset, const TrainConfig& cfg, Codebook codebook,
              const std::function<void(const EpochLog&)>& on_epoch)
{
    cfg.validate();
    if (dataset.empty()) {
        throw InvalidArgument("fit: empty dataset");
    }
    const std::size_t n_features = dataset.front().features;
    const std::size_t length = dataset.front().length;
    int max_label = 0;
    for (const auto& s : dataset) {
        if (s.features != n_features || s.length != length) {
            throw InvalidArgument("fit: samples disagree on feature count or length");
        }
        if (s.label < 0) {
            throw InvalidArgument("fit: negative label");
        }
        max_label = std::max(max_label, s.label);
    }
    if (length == 0 || length > cfg.dim) {
        throw InvalidArgument("fit: sequence length must lie in [1, dim]");
    }
    if (codebook.dim() != cfg.dim || codebook.features() != n_features) {
        throw InvalidArgument("fit: codebook does not match configuration and data");
    }
    // Classes missing from the data keep prototypes that are only shaped by
    // the softmax; dataset loading enforces full coverage for real splits.
    const std::size_t classes = std::max<std::size_t>(2, static_cast<std::size_t>(max_label) + 1);

    std::vector<UnpackedTokens> encoded(dataset.size());
    parallel_for(dataset.size(), [&](std::size_t i) {
        encoded[i] = UnpackedTokens::from(encode_sequence(dataset[i], codebook));
    });

    ShadowParams shadow = ShadowParams::random(cfg.dim, cfg.heads, classes, cfg.init_range,
                                               RngStream(cfg.seed, kInitStream));
    OptimizerState state(shadow.size());
    const RngStream shuffle_root(cfg.seed, kShuffleStream);
    const RngStream dropout_root(cfg.seed, kDropoutStream);

    FitResult result;
    std::vector<std::size_t> order(dataset.size());
    std::vector<double> grads(shadow.size());
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto start = std::chrono::steady_clock::now();
        std::iota(order.begin(), order.end(), std::size_t{0});
        RngStream shuffle = shuffle_root.split(epoch);
        for (std::size_t i = order.size() - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(shuffle.uniform_int(0, static_cast<std::int64_t>(i)));
            std::swap(order[i], order[j]);
        }

        double loss_sum = 0.0;
        std::size_t correct = 0;
        const RngStream epoch_dropout = dropout_root.split(epoch);
        for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
            std::fill(grads.begin(), grads.end(), 0.0);
            for (std::size_t b = begin; b < end; ++b) {
                const std::size_t idx = order[b];
                RngStream rng = epoch_dropout.split(idx);
                const auto fwd = forward_train(encoded[idx], shadow, cfg, rng, true);
                const auto lg = loss_and_grad(fwd.logits, dataset[idx].label);
                loss_sum += lg.loss;
                const auto argmax = static_cast<int>(
                    std::max_element(fwd.logits.begin(), fwd.logits.end()) - fwd.logits.begin());
                correct += argmax == dataset[idx].label ? 1 : 0;
                backward_ste(fwd.tape, lg.grad, shadow, cfg, grads);
            }
            const double inv = 1.0 / static_cast<double>(end - begin);
            for (auto& g : grads) {
                g *= inv;
            }
            optimizer_step(shadow, grads, state, cfg);
        }

        EpochLog row;
        row.epoch = epoch;
        row.mean_loss = loss_sum / static_cast<double>(dataset.size());
        row.train_accuracy = static_cast<double>(correct) / static_cast<double>(dataset.size());
        row.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.log.push_back(row);
        if (on_epoch) {
            on_epoch(row);
        }
    }

    result.model.dim = cfg.dim;
    result.model.max_length = length;
    result.model.seed = cfg.seed;
    result.model.codebook = std::move(codebook);
    result.model.heads = shadow.binarized_heads();
    result.model.am = shadow.binarized_memory();
    return result;
}

} // namespace bihd
