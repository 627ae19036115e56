#include "bihd/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>

#include <json.hpp>

#include "bihd/errors.hpp"
#include "bihd/model_file.hpp"
#include "bihd/parallel.hpp"

namespace bihd {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << std::setprecision(10);
    return out;
}

void check_compatible(const DatasetFile& train, const DatasetFile& eval)
{
    if (eval.features != train.features || eval.length != train.length) {
        throw ShapeError(eval.path.string() + ": shape " + std::to_string(eval.features) + "x" +
                         std::to_string(eval.length) + " does not match training shape " +
                         std::to_string(train.features) + "x" + std::to_string(train.length));
    }
}

} // namespace

double model_size_kb(std::size_t dim, std::size_t heads, std::size_t classes)
{
    head_dim_for(dim, heads);
    return static_cast<double>(4 * dim + classes * dim) / 8000.0;
}

std::size_t MetricsReport::total() const
{
    std::size_t n = 0;
    for (const auto& row : confusion) {
        for (const auto c : row) {
            n += c;
        }
    }
    return n;
}

MetricsReport evaluate(const Model& model, const DatasetFile& data)
{
    if (data.empty()) {
        throw DataError(data.path.string() + ": dataset is empty");
    }
    const std::size_t k = model.classes();
    if (data.features != model.features()) {
        throw ShapeError("dataset has " + std::to_string(data.features) +
                         " features, model expects " + std::to_string(model.features()));
    }
    if (data.length > model.max_length) {
        throw ShapeError("dataset length " + std::to_string(data.length) +
                         " exceeds model maximum " + std::to_string(model.max_length));
    }
    if (data.classes > k) {
        throw ShapeError("dataset has label " + std::to_string(data.classes - 1) + ", model has " +
                         std::to_string(k) + " classes");
    }

    const auto start = std::chrono::steady_clock::now();
    MetricsReport rep;
    rep.predictions.resize(data.samples.size());
    parallel_for(data.samples.size(),
                 [&](std::size_t i) { rep.predictions[i] = model.predict(data.samples[i]).label; });

    rep.confusion.assign(k, std::vector<std::size_t>(k, 0));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.samples.size(); ++i) {
        const auto truth = static_cast<std::size_t>(data.samples[i].label);
        const auto pred = static_cast<std::size_t>(rep.predictions[i]);
        ++rep.confusion[truth][pred];
        correct += truth == pred ? 1 : 0;
    }
    rep.accuracy = static_cast<double>(correct) / static_cast<double>(data.samples.size());
    rep.per_class_accuracy.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t support = 0;
        for (const auto n : rep.confusion[c]) {
            support += n;
        }
        rep.per_class_accuracy[c] = support == 0
                                        ? std::numeric_limits<double>::quiet_NaN()
                                        : static_cast<double>(rep.confusion[c][c]) / static_cast<double>(support);
    }
    rep.model_size_kb = model_size_kb(model.dim, model.heads.size(), k);
    rep.wall_seconds = seconds_since(start);
    return rep;
}

TrainOutcome run_train(const TrainRequest& request)
{
    request.config.validate();
    const DatasetFile train = load_dataset(request.train_set, "train");
    if (train.empty()) {
        throw DataError(request.train_set.string() + ": dataset is empty");
    }
    std::optional<DatasetFile> eval;
    if (request.eval_set) {
        eval = load_dataset(*request.eval_set, "eval", train.classes);
        if (eval->empty()) {
            throw DataError(request.eval_set->string() + ": dataset is empty");
        }
        check_compatible(train, *eval);
    }
    if (train.length > request.config.dim) {
        throw ConfigError("sequence length exceeds hd_dim");
    }

    std::optional<std::ofstream> log_file;
    if (request.log_out) {
        log_file = open_out(*request.log_out);
        write_epoch_log(*log_file, {});
    }
    auto on_epoch = [&](const EpochLog& row) {
        if (log_file) {
            write_epoch_log(*log_file, std::span(&row, 1));
            log_file->flush();
        }
        if (request.verbose) {
            std::cerr << "epoch " << row.epoch << " loss " << row.mean_loss << " train_acc "
                      << row.train_accuracy << " (" << row.wall_seconds << " s)\n";
        }
    };

    FitResult fitted = fit(train.samples, request.config, on_epoch);
    TrainOutcome outcome;
    outcome.metrics = evaluate(fitted.model, eval ? *eval : train);
    if (request.model_out) {
        save_model(*request.model_out, fitted.model);
    }
    outcome.model = std::move(fitted.model);
    outcome.log = std::move(fitted.log);
    return outcome;
}

MetricsReport run_eval(const std::filesystem::path& model_path,
                       const std::filesystem::path& dataset_path)
{
    const Model model = load_model(model_path);
    const DatasetFile data = load_dataset(dataset_path, "eval");
    return evaluate(model, data);
}

std::vector<SweepRow> run_sweep(const TrainRequest& base, std::span<const std::size_t> dims)
{
    if (dims.empty()) {
        throw ConfigError("sweep needs at least one dimension");
    }
    for (const auto d : dims) {
        TrainConfig cfg = base.config;
        cfg.dim = d;
        cfg.validate();
    }
    std::vector<SweepRow> rows;
    for (const auto d : dims) {
        TrainRequest req = base;
        req.config.dim = d;
        req.model_out.reset();
        req.log_out.reset();
        const auto outcome = run_train(req);
        rows.push_back({d, outcome.metrics.accuracy, outcome.metrics.model_size_kb});
    }
    return rows;
}

DistortionMode parse_distortion_mode(const std::string& name)
{
    if (name == "theorem1" || name == "binarization") {
        return DistortionMode::Binarization;
    }
    if (name == "theorem2" || name == "weighting") {
        return DistortionMode::Weighting;
    }
    throw ConfigError("unknown distortion mode '" + name + "'");
}

DistortionReport run_distortion(const DistortionRequest& request)
{
    if (request.trials == 0) {
        throw ConfigError("trials must be positive");
    }
    DistortionReport rep;
    if (request.mode == DistortionMode::Binarization) {
        BinarizationConfig cfg;
        cfg.trials = request.trials;
        rep = binarization_experiment(cfg, request.seed, request.threads);
    } else {
        WeightingConfig cfg;
        cfg.trials = request.trials;
        rep = weighting_experiment(cfg, request.seed, request.threads);
    }
    if (request.out) {
        auto out = open_out(*request.out);
        write_distortion(out, rep);
        auto trials_path = *request.out;
        trials_path += ".trials";
        auto trials = open_out(trials_path);
        write_distortion_trials(trials, rep);
        auto json_path = *request.out;
        json_path += ".json";
        auto summary = open_out(json_path);
        write_distortion_json(summary, rep);
    }
    return rep;
}

void write_metrics(std::ostream& out, const MetricsReport& report)
{
    out << "metric\tvalue\n";
    out << "accuracy\t" << report.accuracy << '\n';
    out << "samples\t" << report.total() << '\n';
    for (std::size_t c = 0; c < report.per_class_accuracy.size(); ++c) {
        out << "class_" << c << "_accuracy\t";
        if (std::isnan(report.per_class_accuracy[c])) {
            out << "nan\n";
        } else {
            out << report.per_class_accuracy[c] << '\n';
        }
    }
    out << "model_size_kb\t" << report.model_size_kb << '\n';
    out << "wall_seconds\t" << report.wall_seconds << '\n';
}

void write_confusion(std::ostream& out, const MetricsReport& report)
{
    out << "true\\pred";
    for (std::size_t c = 0; c < report.confusion.size(); ++c) {
        out << '\t' << c;
    }
    out << '\n';
    for (std::size_t r = 0; r < report.confusion.size(); ++r) {
        out << r;
        for (const auto n : report.confusion[r]) {
            out << '\t' << n;
        }
        out << '\n';
    }
}

void write_epoch_log(std::ostream& out, std::span<const EpochLog> log)
{
    if (log.empty()) {
        out << "epoch\tmean_loss\ttrain_accuracy\twall_seconds\n";
        return;
    }
    for (const auto& row : log) {
        out << row.epoch << '\t' << row.mean_loss << '\t' << row.train_accuracy << '\t'
            << row.wall_seconds << '\n';
    }
}

void write_sweep(std::ostream& out, std::span<const SweepRow> rows)
{
    out << "dim\taccuracy\tsize_kb\n";
    for (const auto& r : rows) {
        out << r.dim << '\t' << r.accuracy << '\t' << std::fixed << std::setprecision(2) << r.size_kb
            << std::defaultfloat << std::setprecision(10) << '\n';
    }
}

void write_distortion(std::ostream& out, const DistortionReport& report)
{
    out << "experiment\tmetric\ttrials\tseed\tmean\tstddev\tmax\n";
    for (const auto& m : report.metrics) {
        out << report.experiment << '\t' << m.name << '\t' << report.trials << '\t' << report.seed
            << '\t' << m.mean << '\t' << m.stddev << '\t' << m.max << '\n';
    }
}

void write_distortion_trials(std::ostream& out, const DistortionReport& report)
{
    out << "trial";
    for (const auto& m : report.metrics) {
        out << '\t' << m.name;
    }
    out << '\n';
    for (std::size_t t = 0; t < report.trials; ++t) {
        out << t;
        for (const auto& m : report.metrics) {
            out << '\t' << m.per_trial.at(t);
        }
        out << '\n';
    }
}

void write_distortion_json(std::ostream& out, const DistortionReport& report)
{
    nlohmann::ordered_json j;
    j["experiment"] = report.experiment;
    j["trials"] = report.trials;
    j["seed"] = report.seed;
    auto& cfg = j["config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : report.config) {
        cfg[k] = v;
    }
    auto& metrics = j["metrics"] = nlohmann::ordered_json::array();
    for (const auto& m : report.metrics) {
        metrics.push_back({{"metric", m.name}, {"mean", m.mean}, {"stddev", m.stddev}, {"max", m.max}});
    }
    out << j.dump(2) << '\n';
}

} // namespace bihd
