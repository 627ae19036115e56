#pragma once

#include <filesystem>
#include <string_view>

#include "bihd/trainer.hpp"

namespace bihd {

/// Flat `key = value` text, one pair per line, `#` starts a comment.
/// Keys (case-insensitive, '-' and '_' interchangeable):
///   hd_dim, d_h, optimizer, lr, wd, dropout, batch, epoch,
///   seed, q, logit_scale, mask_grad (ste | detach), init_range.
/// Missing keys keep their TrainConfig defaults; unknown keys are errors.
TrainConfig parse_config(std::string_view text, std::string_view origin = "<config>");
TrainConfig load_config(const std::filesystem::path& path);

std::string format_config(const TrainConfig& cfg);

} // namespace bihd
