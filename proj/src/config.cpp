#include "bihd/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "bihd/errors.hpp"

namespace bihd {

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string normalize_key(std::string key)
{
    for (auto& c : key) {
        c = c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return key;
}

template <class T>
T parse_number(const std::string& value, const std::string& where)
{
    T out{};
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError(where + ": expected a number, got '" + value + "'");
    }
    return out;
}

} // namespace

TrainConfig parse_config(std::string_view text, std::string_view origin)
{
    TrainConfig cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = std::string(origin) + ":" + std::to_string(lineno);
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string body = trim(line);
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(where + ": expected 'key = value'");
        }
        const std::string key = normalize_key(trim(std::string_view(body).substr(0, eq)));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        if (value.empty()) {
            throw ConfigError(where + ": empty value for '" + key + "'");
        }

        if (key == "hd_dim") {
            cfg.dim = parse_number<std::size_t>(value, where);
        } else if (key == "d_h") {
            cfg.heads = parse_number<std::size_t>(value, where);
        } else if (key == "optimizer") {
            std::string v = value;
            std::transform(v.begin(), v.end(), v.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            if (v != "adam" && v != "adamw") {
                throw ConfigError(where + ": only the adam optimizer is supported");
            }
        } else if (key == "lr") {
            cfg.learning_rate = parse_number<double>(value, where);
        } else if (key == "wd") {
            cfg.weight_decay = parse_number<double>(value, where);
        } else if (key == "dropout") {
            cfg.dropout = parse_number<double>(value, where);
        } else if (key == "batch") {
            cfg.batch_size = parse_number<std::size_t>(value, where);
        } else if (key == "epoch" || key == "epochs") {
            cfg.epochs = parse_number<std::size_t>(value, where);
        } else if (key == "seed") {
            cfg.seed = parse_number<std::uint64_t>(value, where);
        } else if (key == "q") {
            cfg.quant_levels = parse_number<std::size_t>(value, where);
        } else if (key == "logit_scale") {
            cfg.logit_scale = parse_number<double>(value, where);
        } else if (key == "init_range") {
            cfg.init_range = parse_number<double>(value, where);
        } else if (key == "mask_grad") {
            if (value == "ste") {
                cfg.mask_gradient = MaskGradient::Ste;
            } else if (value == "detach") {
                cfg.mask_gradient = MaskGradient::Detach;
            } else {
                throw ConfigError(where + ": mask_grad must be 'ste' or 'detach'");
            }
        } else {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

TrainConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

std::string format_config(const TrainConfig& cfg)
{
    std::ostringstream out;
    out.precision(17);
    out << "hd_dim = " << cfg.dim << '\n'
        << "d_h = " << cfg.heads << '\n'
        << "optimizer = adam\n"
        << "lr = " << cfg.learning_rate << '\n'
        << "wd = " << cfg.weight_decay << '\n'
        << "dropout = " << cfg.dropout << '\n'
        << "batch = " << cfg.batch_size << '\n'
        << "epoch = " << cfg.epochs << '\n'
        << "seed = " << cfg.seed << '\n'
        << "q = " << cfg.quant_levels << '\n';
    if (cfg.logit_scale) {
        out << "logit_scale = " << *cfg.logit_scale << '\n';
    }
    out << "mask_grad = " << (cfg.mask_gradient == MaskGradient::Ste ? "ste" : "detach") << '\n'
        << "init_range = " << cfg.init_range << '\n';
    return out.str();
}

} // namespace bihd
