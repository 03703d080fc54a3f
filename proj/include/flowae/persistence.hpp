#ifndef FLOWAE_PERSISTENCE_HPP
#define FLOWAE_PERSISTENCE_HPP

// Model bundles as versioned JSON ("mdl-v1"), verdict files, dataset
// manifests and report JSON. Doubles are written in shortest round-trip
// form, so save/load is bit-exact. See docs/bundle-format.md.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "autoencoder.hpp"
#include "common.hpp"
#include "csv.hpp"
#include "detection.hpp"
#include "feature_encode.hpp"
#include "flow_extract.hpp"
#include "interpretation.hpp"

namespace flowae {

using json = nlohmann::json;

inline constexpr std::string_view kBundleVersion = "mdl-v1";
inline constexpr std::string_view kManifestVersion = "manifest-v1";

namespace detail {

inline void require_finite(double v, const std::string& what)
{
    if (!std::isfinite(v)) {
        throw InvalidArgument("cannot save " + what + ": value is not finite");
    }
}

inline const json& section(const json& j, const char* key, const char* where)
{
    if (!j.is_object() || !j.contains(key)) {
        throw ParseError(std::string(where) + ": missing section '" + key + "'");
    }
    return j.at(key);
}

template <class T>
T field(const json& j, const char* key, const char* where)
{
    const json& v = section(j, key, where);
    try {
        return v.get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string(where) + "." + key + ": " + e.what());
    }
}

inline std::vector<double> numbers(const json& j, const char* key, const char* where)
{
    const json& v = section(j, key, where);
    if (!v.is_array()) {
        throw ParseError(std::string(where) + "." + key + ": expected an array");
    }
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) {
        if (!x.is_number()) {
            throw ParseError(std::string(where) + "." + key + ": non-numeric entry");
        }
        out.push_back(x.get<double>());
    }
    return out;
}

inline json parse_document(std::istream& in, const char* what)
{
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string(what) + ": parse error at byte " + std::to_string(e.byte)
                         + ": " + e.what());
    }
}

inline json hyper_json(const HyperParams& h)
{
    return {{"batch_size", h.batch_size},       {"learning_rate", h.learning_rate},
            {"dropout_ratio", h.dropout_ratio}, {"weight_decay", h.weight_decay},
            {"epochs", h.epochs},               {"seed", h.seed},
            {"dropout_min_width", h.dropout_min_width},
            {"beta1", h.beta1},                 {"beta2", h.beta2},
            {"epsilon", h.epsilon}};
}

inline HyperParams hyper_from(const json& j)
{
    const char* w = "bundle.hyper";
    HyperParams h;
    h.batch_size = field<int>(j, "batch_size", w);
    h.learning_rate = field<double>(j, "learning_rate", w);
    h.dropout_ratio = field<double>(j, "dropout_ratio", w);
    h.weight_decay = field<double>(j, "weight_decay", w);
    h.epochs = field<int>(j, "epochs", w);
    h.seed = field<std::uint64_t>(j, "seed", w);
    h.dropout_min_width = field<int>(j, "dropout_min_width", w);
    h.beta1 = field<double>(j, "beta1", w);
    h.beta2 = field<double>(j, "beta2", w);
    h.epsilon = field<double>(j, "epsilon", w);
    try {
        h.validate();
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string(w) + ": " + e.what());
    }
    return h;
}

} // namespace detail

/// Writes one top-level section per line to keep files diffable.
inline void write_bundle(std::ostream& out, const ModelBundle& b)
{
    check_shapes(b.model);
    json layers = json::array();
    for (std::size_t l = 0; l < b.model.layers.size(); ++l) {
        const auto& L = b.model.layers[l];
        json w = json::array();
        for (Eigen::Index r = 0; r < L.weight.rows(); ++r) {
            for (Eigen::Index c = 0; c < L.weight.cols(); ++c) {
                detail::require_finite(L.weight(r, c), "weights");
                w.push_back(L.weight(r, c));
            }
        }
        json bias = json::array();
        for (Eigen::Index r = 0; r < L.bias.size(); ++r) {
            detail::require_finite(L.bias[r], "biases");
            bias.push_back(L.bias[r]);
        }
        layers.push_back({{"rows", L.weight.rows()}, {"cols", L.weight.cols()},
                          {"weight", std::move(w)}, {"bias", std::move(bias)}});
    }
    json names = json::array();
    for (std::size_t i = 0; i < kScalarCount; ++i) {
        names.push_back(std::string(scalar_name(i)));
        detail::require_finite(b.stats.min[i], "normalization minimum");
        detail::require_finite(b.stats.max[i], "normalization maximum");
    }
    detail::require_finite(b.threshold.t_det, "threshold");
    const json stats{{"features", names}, {"min", b.stats.min}, {"max", b.stats.max}};
    const json threshold{{"t_det", b.threshold.t_det}, {"mu", b.threshold.mu},
                         {"sigma", b.threshold.sigma}, {"n_flows", b.threshold.n_flows}};
    const json meta{{"dataset_checksum", b.meta.dataset_checksum}, {"seed", b.meta.seed},
                    {"timestamp", b.meta.timestamp},           {"train_flows", b.meta.train_flows},
                    {"final_loss", b.meta.final_loss}};

    out << "{\n";
    out << "\"format_version\": " << json(kBundleVersion).dump() << ",\n";
    out << "\"encoding\": " << json(kEncodingVersion).dump() << ",\n";
    out << "\"layer_dims\": " << json(b.model.layer_dims).dump() << ",\n";
    out << "\"norm_stats\": " << stats.dump() << ",\n";
    out << "\"threshold\": " << threshold.dump() << ",\n";
    out << "\"hyper\": " << detail::hyper_json(b.hyper).dump() << ",\n";
    out << "\"meta\": " << meta.dump() << ",\n";
    out << "\"layers\": [\n";
    for (std::size_t l = 0; l < layers.size(); ++l) {
        out << layers[l].dump() << (l + 1 < layers.size() ? ",\n" : "\n");
    }
    out << "]\n}\n";
}

inline ModelBundle read_bundle(std::istream& in)
{
    const json j = detail::parse_document(in, "bundle");
    const char* w = "bundle";
    const auto version = detail::field<std::string>(j, "format_version", w);
    if (version != kBundleVersion) {
        throw VersionError("bundle format '" + version + "' is not supported (expected "
                           + std::string(kBundleVersion) + ")");
    }
    const auto encoding = detail::field<std::string>(j, "encoding", w);
    if (encoding != kEncodingVersion) {
        throw VersionError("bundle encoding '" + encoding + "' is not supported (expected "
                           + std::string(kEncodingVersion) + ")");
    }

    ModelBundle b;
    b.model.layer_dims = detail::field<std::vector<int>>(j, "layer_dims", w);
    try {
        validate_layer_dims(b.model.layer_dims);
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("bundle.layer_dims: ") + e.what());
    }

    const json& st = detail::section(j, "norm_stats", w);
    const auto mins = detail::numbers(st, "min", "bundle.norm_stats");
    const auto maxs = detail::numbers(st, "max", "bundle.norm_stats");
    if (mins.size() != kScalarCount || maxs.size() != kScalarCount) {
        throw ParseError("bundle.norm_stats: expected " + std::to_string(kScalarCount)
                         + " minima and maxima");
    }
    std::copy(mins.begin(), mins.end(), b.stats.min.begin());
    std::copy(maxs.begin(), maxs.end(), b.stats.max.begin());

    const json& th = detail::section(j, "threshold", w);
    b.threshold.t_det = detail::field<double>(th, "t_det", "bundle.threshold");
    b.threshold.mu = detail::field<double>(th, "mu", "bundle.threshold");
    b.threshold.sigma = detail::field<double>(th, "sigma", "bundle.threshold");
    b.threshold.n_flows = detail::field<std::uint64_t>(th, "n_flows", "bundle.threshold");

    b.hyper = detail::hyper_from(detail::section(j, "hyper", w));

    const json& meta = detail::section(j, "meta", w);
    b.meta.dataset_checksum = detail::field<std::string>(meta, "dataset_checksum", "bundle.meta");
    b.meta.seed = detail::field<std::uint64_t>(meta, "seed", "bundle.meta");
    b.meta.timestamp = detail::field<std::string>(meta, "timestamp", "bundle.meta");
    b.meta.train_flows = detail::field<std::uint64_t>(meta, "train_flows", "bundle.meta");
    b.meta.final_loss = detail::field<double>(meta, "final_loss", "bundle.meta");

    const json& layers = detail::section(j, "layers", w);
    const auto& dims = b.model.layer_dims;
    if (!layers.is_array() || layers.size() + 1 != dims.size()) {
        throw ParseError("bundle.layers: expected " + std::to_string(dims.size() - 1) + " layers");
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const std::string where = "bundle.layers[" + std::to_string(l) + "]";
        const auto rows = detail::field<Eigen::Index>(layers[l], "rows", where.c_str());
        const auto cols = detail::field<Eigen::Index>(layers[l], "cols", where.c_str());
        if (rows != dims[l + 1] || cols != dims[l]) {
            throw ParseError(where + ": header " + std::to_string(rows) + "x" + std::to_string(cols)
                             + " does not match layer_dims");
        }
        const auto wv = detail::numbers(layers[l], "weight", where.c_str());
        const auto bv = detail::numbers(layers[l], "bias", where.c_str());
        if (wv.size() != static_cast<std::size_t>(rows * cols)
            || bv.size() != static_cast<std::size_t>(rows)) {
            throw ParseError(where + ": payload has " + std::to_string(wv.size()) + " weights and "
                             + std::to_string(bv.size()) + " biases for a " + std::to_string(rows)
                             + "x" + std::to_string(cols) + " layer");
        }
        Layer L{Matrix(rows, cols), Vector(rows)};
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                L.weight(r, c) = wv[static_cast<std::size_t>(r * cols + c)];
            }
            L.bias[r] = bv[static_cast<std::size_t>(r)];
        }
        b.model.layers.push_back(std::move(L));
    }
    check_shapes(b.model);
    return b;
}

inline void save_bundle(const ModelBundle& b, const std::string& path)
{
    std::ostringstream buf;
    write_bundle(buf, b);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    out << buf.str();
    out.flush();
    if (!out) {
        throw Error("failed writing '" + path + "'");
    }
}

inline ModelBundle load_bundle(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open bundle '" + path + "'");
    }
    return read_bundle(in);
}

// ---------------------------------------------------------------------------
// Verdict files: flow_id,error,malicious (1 or 0)

inline constexpr std::string_view kVerdictHeader = "flow_id,error,malicious";

inline void write_verdicts(std::ostream& out, std::span<const Verdict> verdicts)
{
    out << kVerdictHeader << '\n';
    for (const auto& v : verdicts) {
        out << v.flow_id << ',' << csv::format_double(v.error) << ','
            << (v.malicious ? '1' : '0') << '\n';
    }
}

inline std::vector<Verdict> read_verdicts(std::istream& in)
{
    std::string line;
    if (!csv::read_line(in, line) || line != kVerdictHeader) {
        throw ParseError("verdicts: expected header '" + std::string(kVerdictHeader) + "'");
    }
    std::vector<Verdict> out;
    std::size_t row = 1;
    while (csv::read_line(in, line)) {
        ++row;
        if (line.empty()) {
            continue;
        }
        const auto cells = csv::split(line);
        if (cells.size() != 3) {
            csv::fail({row, "flow_id"}, "expected 3 columns");
        }
        Verdict v;
        v.flow_id = csv::parse_u64(cells[0], {row, "flow_id"});
        v.error = csv::parse_double(cells[1], {row, "error"});
        if (cells[2] == "1") {
            v.malicious = true;
        } else if (cells[2] != "0") {
            csv::fail({row, "malicious"}, "expected 0 or 1");
        }
        out.push_back(v);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dataset manifests

struct ManifestEntry {
    std::string split;
    std::string file;
    std::uint64_t rows = 0;
    std::string checksum; // dataset_checksum of the features

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
    std::uint64_t seed = 0;
    std::vector<ManifestEntry> entries;

    friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

inline void write_manifest(std::ostream& out, const DatasetManifest& m)
{
    json entries = json::array();
    for (const auto& e : m.entries) {
        entries.push_back({{"split", e.split}, {"file", e.file}, {"rows", e.rows},
                           {"checksum", e.checksum}});
    }
    const json j{{"format_version", kManifestVersion}, {"seed", m.seed}, {"splits", entries}};
    out << j.dump(2) << '\n';
}

inline DatasetManifest read_manifest(std::istream& in)
{
    const json j = detail::parse_document(in, "manifest");
    const auto version = detail::field<std::string>(j, "format_version", "manifest");
    if (version != kManifestVersion) {
        throw VersionError("manifest format '" + version + "' is not supported");
    }
    DatasetManifest m;
    m.seed = detail::field<std::uint64_t>(j, "seed", "manifest");
    for (const auto& e : detail::section(j, "splits", "manifest")) {
        m.entries.push_back({detail::field<std::string>(e, "split", "manifest.splits"),
                             detail::field<std::string>(e, "file", "manifest.splits"),
                             detail::field<std::uint64_t>(e, "rows", "manifest.splits"),
                             detail::field<std::string>(e, "checksum", "manifest.splits")});
    }
    return m;
}

// ---------------------------------------------------------------------------
// Report JSON

inline json to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json to_json(const Metrics& m)
{
    return {{"tp", m.tp},         {"fp", m.fp},
            {"fn", m.fn},         {"tn", m.tn},
            {"precision", to_json(m.precision)}, {"recall", to_json(m.recall)},
            {"f1", to_json(m.f1)},               {"tnr", to_json(m.tnr)},
            {"fpr", to_json(m.fpr())}};
}

inline json to_json(const AttributionReport& r, std::optional<double> t_det = std::nullopt)
{
    json shares = json::object();
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        shares[std::string(kFeatureNames[f])] = r.logical[f];
    }
    json sig = json::array();
    for (auto f : significant_features(r)) {
        sig.push_back(std::string(kFeatureNames[f]));
    }
    json j{{"flow_id", r.flow_id},
           {"error", flow_error(r)},
           {"no_error", r.no_error},
           {"shares", shares},
           {"significant", sig}};
    if (t_det) {
        json alone = json::array();
        const auto trig = single_feature_trigger(r, flow_error(r), *t_det);
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
            if (trig[f]) {
                alone.push_back(std::string(kFeatureNames[f]));
            }
        }
        j["t_det"] = *t_det;
        j["triggers_alone"] = alone;
    }
    return j;
}

inline json to_json(std::span<const CategoryRow> rows)
{
    json out = json::array();
    for (const auto& r : rows) {
        out.push_back({{"category", r.category}, {"total", r.total}, {"detected", r.detected},
                       {"recall", r.recall()}});
    }
    return out;
}

} // namespace flowae

#endif
