#include "bihd/dataset.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include <json.hpp>

#include "bihd/errors.hpp"

namespace bihd {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line, const std::string& what)
{
    throw DataError(path.string() + ":" + std::to_string(line) + ": " + what);
}

Sample parse_line(const std::string& text, const std::filesystem::path& path, std::size_t line)
{
    json obj;
    try {
        obj = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(path, line, std::string("malformed JSON: ") + e.what());
    } catch (const json::out_of_range& e) {
        // Literals such as 1e999 overflow to infinity.
        fail(path, line, std::string("non-finite value: ") + e.what());
    }
    if (!obj.is_object()) {
        fail(path, line, "expected an object");
    }
    for (const auto& [key, _] : obj.items()) {
        if (key != "label" && key != "values") {
            fail(path, line, "unknown field \"" + key + "\"");
        }
    }
    if (!obj.contains("label") || !obj["label"].is_number_integer()) {
        fail(path, line, "missing integer field \"label\"");
    }
    if (!obj.contains("values") || !obj["values"].is_array() || obj["values"].empty()) {
        fail(path, line, "missing non-empty array field \"values\"");
    }
    const auto& rows = obj["values"];
    Sample s;
    s.label = obj["label"].get<int>();
    s.features = rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (!row.is_array() || row.empty()) {
            fail(path, line, "feature " + std::to_string(i) + " is not a non-empty array");
        }
        if (i == 0) {
            s.length = row.size();
            s.values.reserve(s.features * s.length);
        } else if (row.size() != s.length) {
            fail(path, line, "ragged values: feature " + std::to_string(i) + " has " +
                                 std::to_string(row.size()) + " steps, expected " +
                                 std::to_string(s.length));
        }
        for (std::size_t t = 0; t < row.size(); ++t) {
            if (!row[t].is_number()) {
                fail(path, line, "non-numeric value at feature " + std::to_string(i) + ", step " +
                                     std::to_string(t));
            }
            const double v = row[t].get<double>();
            if (!std::isfinite(v)) {
                fail(path, line, "non-finite value at feature " + std::to_string(i));
            }
            s.values.push_back(v);
        }
    }
    return s;
}

} // namespace

DatasetFile load_dataset(const std::filesystem::path& path, std::string split,
                         std::optional<std::size_t> classes)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open dataset " + path.string());
    }
    DatasetFile ds;
    ds.path = path;
    ds.split = std::move(split);
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        Sample s = parse_line(text, path, line);
        if (ds.samples.empty()) {
            ds.features = s.features;
            ds.length = s.length;
        } else if (s.features != ds.features || s.length != ds.length) {
            fail(path, line, "shape " + std::to_string(s.features) + "x" + std::to_string(s.length) +
                                 " differs from " + std::to_string(ds.features) + "x" +
                                 std::to_string(ds.length));
        }
        if (s.label < 0 || (classes && static_cast<std::size_t>(s.label) >= *classes)) {
            fail(path, line, "label " + std::to_string(s.label) + " outside [0, " +
                                 (classes ? std::to_string(*classes) : std::string("K")) + ")");
        }
        ds.classes = std::max(ds.classes, static_cast<std::size_t>(s.label) + 1);
        ds.samples.push_back(std::move(s));
    }
    if (ds.split == "train" && !ds.samples.empty()) {
        std::vector<bool> seen(ds.classes, false);
        for (const auto& s : ds.samples) {
            seen[static_cast<std::size_t>(s.label)] = true;
        }
        for (std::size_t k = 0; k < seen.size(); ++k) {
            if (!seen[k]) {
                throw DataError(path.string() + ": training split has no sample of class " +
                                std::to_string(k));
            }
        }
    }
    if (classes) {
        ds.classes = *classes;
    }
    return ds;
}

void write_dataset(const std::filesystem::path& path, std::span<const Sample> samples)
{
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write dataset " + path.string());
    }
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto& s : samples) {
        out << "{\"label\":" << s.label << ",\"values\":[";
        for (std::size_t i = 0; i < s.features; ++i) {
            out << (i ? ",[" : "[");
            for (std::size_t t = 0; t < s.length; ++t) {
                out << (t ? "," : "") << s.at(i, t);
            }
            out << "]";
        }
        out << "]}\n";
    }
}

} // namespace bihd
