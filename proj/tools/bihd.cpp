#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bihd/config.hpp"
#include "bihd/errors.hpp"
#include "bihd/harness.hpp"
#include "bihd/model_file.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitShape = 4;

struct Options {
    std::string config;
    std::string model;
    std::string train_set;
    std::string eval_set;
    std::string out;
    std::string log;
    std::vector<std::size_t> dims;
    std::optional<std::uint64_t> seed;
    std::size_t trials = 500;
    std::string mode;
    bool verbose = false;
};

bihd::TrainRequest make_request(const Options& o)
{
    bihd::TrainRequest req;
    req.config = o.config.empty() ? bihd::TrainConfig{} : bihd::load_config(o.config);
    if (o.seed) {
        req.config.seed = *o.seed;
    }
    req.train_set = o.train_set;
    if (!o.eval_set.empty()) {
        req.eval_set = o.eval_set;
    }
    if (!o.model.empty()) {
        req.model_out = o.model;
    }
    if (!o.log.empty()) {
        req.log_out = o.log;
    }
    req.verbose = o.verbose;
    return req;
}

template <class Fn>
void emit(const std::string& path, Fn&& write)
{
    std::cout << std::setprecision(10);
    write(std::cout);
    if (!path.empty()) {
        std::ofstream out(path, std::ios::trunc);
        if (!out) {
            throw bihd::DataError("cannot write " + path);
        }
        out << std::setprecision(10);
        write(out);
    }
}

int cmd_train(const Options& o)
{
    const auto outcome = bihd::run_train(make_request(o));
    emit(o.out, [&](std::ostream& s) { bihd::write_metrics(s, outcome.metrics); });
    std::cerr << std::setprecision(10);
    bihd::write_confusion(std::cerr, outcome.metrics);
    return kExitOk;
}

int cmd_eval(const Options& o)
{
    const auto report = bihd::run_eval(o.model, o.eval_set);
    emit(o.out, [&](std::ostream& s) { bihd::write_metrics(s, report); });
    bihd::write_confusion(std::cerr, report);
    return kExitOk;
}

int cmd_sweep(const Options& o)
{
    auto req = make_request(o);
    const auto rows = bihd::run_sweep(req, o.dims);
    emit(o.out, [&](std::ostream& s) { bihd::write_sweep(s, rows); });
    return kExitOk;
}

int cmd_distortion(const Options& o)
{
    bihd::DistortionRequest req;
    req.mode = bihd::parse_distortion_mode(o.mode);
    req.trials = o.trials;
    req.seed = o.seed.value_or(0);
    if (!o.out.empty()) {
        req.out = o.out;
    }
    const auto rep = bihd::run_distortion(req);
    std::cout << std::setprecision(10);
    bihd::write_distortion(std::cout, rep);
    return kExitOk;
}

int cmd_info(const Options& o)
{
    const auto bytes = bihd::read_file_bytes(o.model);
    const auto h = bihd::read_model_header(bytes);
    std::cout << "field\tvalue\n"
              << "version\t" << h.version << '\n'
              << "hd_dim\t" << h.dim << '\n'
              << "heads\t" << h.heads << '\n'
              << "max_length\t" << h.max_length << '\n'
              << "features\t" << h.features << '\n'
              << "q\t" << h.quant_levels << '\n'
              << "classes\t" << h.classes << '\n'
              << "seed\t" << h.seed << '\n'
              << "bytes\t" << bytes.size() << '\n'
              << "model_size_kb\t" << std::fixed << std::setprecision(2)
              << bihd::model_size_kb(h.dim, h.heads, h.classes) << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Binary hyperdimensional transformer for multivariate time series"};
    app.require_subcommand(1);
    Options o;

    auto* train = app.add_subcommand("train", "Train, evaluate and save a model");
    train->add_option("--config", o.config, "key = value hyperparameter file")->check(CLI::ExistingFile);
    train->add_option("--train-set", o.train_set, "Training split (jsonl)")->required()->check(CLI::ExistingFile);
    train->add_option("--eval-set", o.eval_set, "Evaluation split (jsonl)")->check(CLI::ExistingFile);
    train->add_option("--model", o.model, "Where to write the model file");
    train->add_option("--seed", o.seed, "Override the config seed");
    train->add_option("--out", o.out, "Metrics TSV");
    train->add_option("--log", o.log, "Per-epoch log TSV");
    train->add_flag("-v,--verbose", o.verbose, "Print per-epoch progress");

    auto* eval = app.add_subcommand("eval", "Evaluate a saved model");
    eval->add_option("--model", o.model, "Model file")->required()->check(CLI::ExistingFile);
    eval->add_option("--eval-set", o.eval_set, "Evaluation split (jsonl)")->required()->check(CLI::ExistingFile);
    eval->add_option("--out", o.out, "Metrics TSV");

    auto* sweep = app.add_subcommand("sweep", "Train and evaluate over several dimensions");
    sweep->add_option("--config", o.config, "key = value hyperparameter file")->check(CLI::ExistingFile);
    sweep->add_option("--train-set", o.train_set, "Training split (jsonl)")->required()->check(CLI::ExistingFile);
    sweep->add_option("--eval-set", o.eval_set, "Evaluation split (jsonl)")->check(CLI::ExistingFile);
    sweep->add_option("--dims", o.dims, "Dimensions, comma separated")->required()->delimiter(',');
    sweep->add_option("--seed", o.seed, "Override the config seed");
    sweep->add_option("--out", o.out, "Sweep TSV");
    sweep->add_flag("-v,--verbose", o.verbose, "Print per-epoch progress");

    auto* dist = app.add_subcommand("distortion", "Run a binarization distortion experiment");
    dist->add_option("mode", o.mode, "binarization (alias theorem1) or weighting (alias theorem2)")->required();
    dist->add_option("--trials", o.trials, "Number of random trials")->check(CLI::PositiveNumber);
    dist->add_option("--seed", o.seed, "Master seed");
    dist->add_option("--out", o.out, "Summary TSV; per-trial values go to <out>.trials, a JSON summary to <out>.json");

    auto* info = app.add_subcommand("info", "Print a model file header");
    info->add_option("--model", o.model, "Model file")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*train) {
            return cmd_train(o);
        }
        if (*eval) {
            return cmd_eval(o);
        }
        if (*sweep) {
            return cmd_sweep(o);
        }
        if (*dist) {
            return cmd_distortion(o);
        }
        return cmd_info(o);
    } catch (const bihd::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const bihd::ShapeError& e) {
        std::cerr << "shape error: " << e.what() << '\n';
        return kExitShape;
    } catch (const bihd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitShape;
    } catch (const bihd::InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kExitShape;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
