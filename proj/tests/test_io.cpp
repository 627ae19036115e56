#include <gtest/gtest.h>

#include "bihd/config.hpp"
#include "bihd/dataset.hpp"
#include "bihd/errors.hpp"
#include "bihd/model_file.hpp"
#include "bihd/trainer.hpp"
#include "synthetic.hpp"
#include "temp_dir.hpp"

namespace {

std::string error_of(const std::filesystem::path& p, std::optional<std::size_t> classes = std::nullopt,
                     const std::string& split = "train")
{
    try {
        bihd::load_dataset(p, split, classes);
    } catch (const bihd::DataError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST(Dataset, ParsesOneLine)
{
    TempDir dir;
    const auto p = dir.write("one.jsonl", R"({"label": 0, "values": [[1, 2, 3], [4.5, 5, 6]]})" "\n\n");
    const auto ds = bihd::load_dataset(p, "eval");
    ASSERT_EQ(ds.samples.size(), 1u);
    EXPECT_EQ(ds.features, 2u);
    EXPECT_EQ(ds.length, 3u);
    EXPECT_EQ(ds.samples[0].at(1, 0), 4.5);
    EXPECT_EQ(ds.samples[0].column(2), (std::vector<double>{3.0, 6.0}));
}

TEST(Dataset, ReportsErrorsWithLineNumbers)
{
    TempDir dir;
    const std::string good = R"({"label": 0, "values": [[1, 2], [3, 4]]})" "\n";
    EXPECT_NE(error_of(dir.write("a", good + R"({"label": 1, "values": [[1, 2], [3]]})")).find("a:2: ragged"),
              std::string::npos);
    EXPECT_NE(error_of(dir.write("b", good + R"({"label": 1, "values": [[1, 2]], "x": 1})")).find("b:2: unknown field"),
              std::string::npos);
    EXPECT_NE(error_of(dir.write("c", good + R"({"label": 1, "values": [[1, 1e999], [3, 4]]})")).find("c:2: non-finite"),
              std::string::npos);
    EXPECT_NE(error_of(dir.write("d", "{oops\n")).find("d:1: malformed"), std::string::npos);
    EXPECT_NE(error_of(dir.write("e", good + R"({"label": 1, "values": [[1, 2, 3], [3, 4, 5]]})")).find("e:2: shape"),
              std::string::npos);
    EXPECT_NE(error_of(dir.write("f", good + R"({"label": 4, "values": [[1, 2], [3, 4]]})"), 2, "eval").find("f:2: label 4"),
              std::string::npos);
    EXPECT_NE(error_of(dir.write("g", R"({"label": 1, "values": [[1, 2], [3, 4]]})")).find("no sample of class 0"),
              std::string::npos);
    EXPECT_THROW(bihd::load_dataset(dir / "missing"), bihd::DataError);
}

TEST(Dataset, WriteThenReadIsLossless)
{
    TempDir dir;
    auto data = synthetic::banded(3, 4, 5, 7, 1);
    data[0].values[0] = 1.0 / 3.0;
    data[1].values[3] = -2.5e-300;
    bihd::write_dataset(dir / "s.jsonl", data);
    const auto back = bihd::load_dataset(dir / "s.jsonl");
    ASSERT_EQ(back.samples.size(), data.size());
    EXPECT_EQ(back.classes, 3u);
    for (std::size_t i = 0; i < data.size(); ++i) {
        EXPECT_EQ(back.samples[i].values, data[i].values);
        EXPECT_EQ(back.samples[i].label, data[i].label);
    }
}

TEST(Dataset, ShippedJapaneseVowelsSplits)
{
    const auto train = bihd::load_dataset(BIHD_TEST_DATA_DIR "/JapaneseVowels_TRAIN.jsonl");
    const auto test = bihd::load_dataset(BIHD_TEST_DATA_DIR "/JapaneseVowels_TEST.jsonl", "test", train.classes);
    EXPECT_EQ(train.samples.size(), 270u);
    EXPECT_EQ(test.samples.size(), 370u);
    EXPECT_EQ(train.features, 12u);
    EXPECT_EQ(train.length, 25u);
    EXPECT_EQ(train.classes, 9u);
}

TEST(Config, ParsesHyperparameterTable)
{
    const auto cfg = bihd::parse_config(R"(
        # comment
        HD-dim = 3600
        D_h = 10
        optimizer = Adam
        lr = 1e-5
        wd = 5e-2
        dropout = 0.1   # trailing
        batch = 8
        epoch = 100
        seed = 7
        q = 64
        logit_scale = 0.5
        mask_grad = detach
        init_range = 0.2
    )");
    EXPECT_EQ(cfg.dim, 3600u);
    EXPECT_EQ(cfg.heads, 10u);
    EXPECT_EQ(cfg.learning_rate, 1e-5);
    EXPECT_EQ(cfg.weight_decay, 5e-2);
    EXPECT_EQ(cfg.dropout, 0.1);
    EXPECT_EQ(cfg.batch_size, 8u);
    EXPECT_EQ(cfg.epochs, 100u);
    EXPECT_EQ(cfg.seed, 7u);
    EXPECT_EQ(cfg.quant_levels, 64u);
    EXPECT_EQ(cfg.logit_scale, 0.5);
    EXPECT_EQ(cfg.mask_gradient, bihd::MaskGradient::Detach);
    EXPECT_EQ(cfg.init_range, 0.2);

    const auto again = bihd::parse_config(bihd::format_config(cfg));
    EXPECT_EQ(bihd::format_config(again), bihd::format_config(cfg));
}

TEST(Config, RejectsBadInput)
{
    EXPECT_THROW(bihd::parse_config("colour = blue"), bihd::ConfigError);
    EXPECT_THROW(bihd::parse_config("lr 0.1"), bihd::ConfigError);
    EXPECT_THROW(bihd::parse_config("lr = fast"), bihd::ConfigError);
    EXPECT_THROW(bihd::parse_config("optimizer = sgd"), bihd::ConfigError);
    EXPECT_THROW(bihd::parse_config("hd_dim = 1000\nd_h = 3"), bihd::ConfigError);
    EXPECT_THROW(bihd::parse_config("epoch = 0"), bihd::ConfigError);
    EXPECT_THROW(bihd::load_config("/nonexistent/config"), bihd::ConfigError);
}

TEST(ModelFile, RoundTripIsByteIdentical)
{
    const auto data = synthetic::banded(3, 3, 4, 5, 2);
    bihd::TrainConfig cfg;
    cfg.dim = 1000;
    cfg.heads = 10;  // 100-bit heads exercise per-head padding
    cfg.quant_levels = 32;
    cfg.epochs = 2;
    cfg.seed = 99;
    const auto fitted = bihd::fit(data, cfg);
    const auto bytes = bihd::serialize_model(fitted.model);
    // header 40 + 4 ranges x 16 + 4 types x 10 heads x 2 words x 8 + 3 x 16 words x 8
    EXPECT_EQ(bytes.size(), 40u + 64u + 640u + 384u);
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "BHDT");

    TempDir dir;
    bihd::save_model(dir / "m.bhdt", fitted.model);
    const auto loaded = bihd::load_model(dir / "m.bhdt");
    EXPECT_EQ(bihd::serialize_model(loaded), bytes);
    EXPECT_EQ(loaded.heads, fitted.model.heads);
    EXPECT_EQ(loaded.am, fitted.model.am);
    EXPECT_EQ(loaded.codebook.positions.entries(), fitted.model.codebook.positions.entries());
    EXPECT_EQ(loaded.codebook.levels.entries(), fitted.model.codebook.levels.entries());
    for (const auto& s : data) {
        EXPECT_EQ(loaded.predict(s).label, fitted.model.predict(s).label);
    }

    const auto h = bihd::read_model_header(bytes);
    EXPECT_EQ(h.dim, 1000u);
    EXPECT_EQ(h.heads, 10u);
    EXPECT_EQ(h.max_length, 5u);
    EXPECT_EQ(h.features, 4u);
    EXPECT_EQ(h.quant_levels, 32u);
    EXPECT_EQ(h.classes, 3u);
    EXPECT_EQ(h.seed, 99u);
}

TEST(ModelFile, RejectsCorruptFiles)
{
    const auto data = synthetic::banded(2, 2, 2, 3, 3);
    bihd::TrainConfig cfg;
    cfg.dim = 256;
    cfg.heads = 4;
    cfg.quant_levels = 8;
    auto bytes = bihd::serialize_model(bihd::fit(data, cfg).model);

    auto truncated = bytes;
    truncated.pop_back();
    EXPECT_THROW(bihd::deserialize_model(truncated), bihd::DataError);
    auto trailing = bytes;
    trailing.push_back(0);
    EXPECT_THROW(bihd::deserialize_model(trailing), bihd::DataError);
    auto magic = bytes;
    magic[0] = 'X';
    EXPECT_THROW(bihd::deserialize_model(magic), bihd::DataError);
    auto version = bytes;
    version[4] = 9;
    EXPECT_THROW(bihd::deserialize_model(version), bihd::DataError);
    auto heads = bytes;
    heads[12] = 3;  // 256 is not divisible by 3
    EXPECT_THROW(bihd::deserialize_model(heads), bihd::ConfigError);
}
