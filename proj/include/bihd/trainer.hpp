#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "bihd/encoder.hpp"
#include "bihd/model.hpp"
#include "bihd/rng.hpp"

namespace bihd {

/// How the gradient crosses the binary attention mask.
enum class MaskGradient {
    Ste,    // scaled identity, 1 / D_head inside |s| <= D_head
    Detach, // no gradient reaches bv_q / bv_k
};

struct TrainConfig {
    double learning_rate = 1e-4;
    double weight_decay = 5e-2;
    double dropout = 0.0;
    std::size_t batch_size = 1;
    std::size_t epochs = 1;
    std::uint64_t seed = 0;
    std::size_t dim = 10000;
    std::size_t heads = 10;
    std::size_t quant_levels = 256;
    /// Defaults to 1 / sqrt(dim) when unset.
    std::optional<double> logit_scale;
    MaskGradient mask_gradient = MaskGradient::Ste;
    double init_range = 0.03;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    double effective_logit_scale() const;
    std::size_t head_dim() const;
    /// Throws ConfigError on out-of-range values.
    void validate() const;
};

/// Encoded tokens as +1/-1 bytes, length x dim, row-major.
struct UnpackedTokens {
    std::size_t length = 0;
    std::size_t dim = 0;
    std::vector<std::int8_t> values;

    static UnpackedTokens from(const TokenSequence& seq);
    std::span<const std::int8_t> row(std::size_t t) const { return {values.data() + t * dim, dim}; }
};

/// Real-valued shadow parameters in one flat buffer:
/// [C: classes x dim][head 0: q k v a][head 1: q k v a]...
/// Every entry stays in [-1, 1].
class ShadowParams {
public:
    ShadowParams() = default;
    ShadowParams(std::size_t dim, std::size_t heads, std::size_t classes);

    /// Uniform in [-range, range].
    static ShadowParams random(std::size_t dim, std::size_t heads, std::size_t classes,
                               double range, RngStream rng);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t heads() const noexcept { return heads_; }
    std::size_t head_dim() const noexcept { return dim_ / heads_; }
    std::size_t classes() const noexcept { return classes_; }
    std::size_t size() const noexcept { return data_.size(); }
    /// Incremented by every optimizer step; used to detect stale tapes.
    std::uint64_t version() const noexcept { return version_; }
    void bump_version() noexcept { ++version_; }

    std::span<double> flat() noexcept { return data_; }
    std::span<const double> flat() const noexcept { return data_; }

    std::span<const double> prototype(std::size_t k) const { return {data_.data() + k * dim_, dim_}; }
    std::span<double> prototype(std::size_t k) { return {data_.data() + k * dim_, dim_}; }
    // which: 0 = q, 1 = k, 2 = v, 3 = a
    std::span<const double> binding(std::size_t head, std::size_t which) const;
    std::span<double> binding(std::size_t head, std::size_t which);

    /// sign() of every parameter, sign(0) = +1.
    std::vector<HeadParams> binarized_heads() const;
    AssociativeMemory binarized_memory() const;

private:
    std::size_t offset(std::size_t head, std::size_t which) const;

    std::size_t dim_ = 0;
    std::size_t heads_ = 1;
    std::size_t classes_ = 0;
    std::uint64_t version_ = 0;
    std::vector<double> data_;
};

/// Cached forward intermediates for one sample.
struct TrainTape {
    struct Head {
        std::vector<std::int32_t> scores;   // q_L . k_i
        std::vector<std::uint8_t> mask;     // scores > 0
        std::size_t selected = 0;           // popcount of mask
        bool fallback = false;              // empty mask row
        std::vector<std::int8_t> attended;  // a = sign(bundle), D_head
    };
    std::uint64_t version = 0;
    const UnpackedTokens* tokens = nullptr;
    std::vector<Head> heads;
    std::vector<double> features;    // h after dropout, length dim
    std::vector<double> keep_scale;  // dropout factor per component (0 or 1/(1-p))
    std::vector<double> logits;
};

struct ForwardResult {
    std::vector<double> logits;
    TrainTape tape;
};

/// Binarized forward pass with cached intermediates. `tokens` must outlive
/// the returned tape. Dropout is applied only when `training` is true.
ForwardResult forward_train(const UnpackedTokens& tokens, const ShadowParams& shadow,
                            const TrainConfig& cfg, RngStream& rng, bool training = true);

struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad;  // dL/dlogits
};

/// Softmax cross-entropy and its gradient softmax(logits) - onehot(label).
LossGrad loss_and_grad(std::span<const double> logits, int label);

/// STE backward; adds this sample's gradient into `grads` (same layout as
/// shadow.flat()). Throws ContractViolation if the tape is stale.
void backward_ste(const TrainTape& tape, std::span<const double> dlogits, const ShadowParams& shadow,
                  const TrainConfig& cfg, std::span<double> grads);

struct OptimizerState {
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    std::uint64_t step = 0;

    explicit OptimizerState(std::size_t n = 0) : first_moment(n, 0.0), second_moment(n, 0.0) {}
};

struct AdamSettings {
    double learning_rate = 1e-3;
    double weight_decay = 0.0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    /// Clip parameters to [-clip, clip] after the update; 0 disables.
    double clip = 1.0;
};

/// Adaptive-moment update with decoupled weight decay, then clipping.
void adam_step(std::span<double> params, std::span<const double> grads, OptimizerState& state,
               const AdamSettings& settings);

void optimizer_step(ShadowParams& shadow, std::span<const double> grads, OptimizerState& state,
                    const TrainConfig& cfg);

struct EpochLog {
    std::size_t epoch = 0;
    double mean_loss = 0.0;
    double train_accuracy = 0.0;
    double wall_seconds = 0.0;
};

struct FitResult {
    Model model;
    std::vector<EpochLog> log;
};

/// Encode, train with STE and binarize once at the end.
/// `on_epoch`, when set, is called after every epoch.
FitResult fit(std::span<const Sample> dataset, const TrainConfig& cfg,
              const std::function<void(const EpochLog&)>& on_epoch = {});

/// The same, with a caller-supplied codebook (ranges already estimated).
FitResult fit(std::span<const Sample> dataset, const TrainConfig& cfg, Codebook codebook,
              const std::function<void(const EpochLog&)>& on_epoch = {});

} // namespace bihd
