#ifndef FLOWAE_DETECTION_HPP
#define FLOWAE_DETECTION_HPP

// Threshold (mean + 3 sigma of benign errors), verdicts, confusion-matrix
// metrics, and random-search retuning when validation falls below 99%.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "autoencoder.hpp"
#include "common.hpp"
#include "feature_encode.hpp"
#include "flow_extract.hpp"

namespace flowae {

struct Threshold {
    double t_det = 0.0;
    double mu = 0.0;
    double sigma = 0.0;
    std::uint64_t n_flows = 0;

    friend bool operator==(const Threshold&, const Threshold&) = default;
};

/// mu + 3 sigma with the population standard deviation (two-pass).
inline Threshold threshold_from_errors(std::span<const double> errors)
{
    if (errors.empty()) {
        throw InvalidArgument("threshold: empty threshold set");
    }
    const double n = static_cast<double>(errors.size());
    double sum = 0.0;
    for (double e : errors) {
        sum += e;
    }
    const double mu = sum / n;
    double ss = 0.0;
    for (double e : errors) {
        ss += (e - mu) * (e - mu);
    }
    const double sigma = std::sqrt(ss / n);
    return {mu + 3.0 * sigma, mu, sigma, errors.size()};
}

inline Threshold compute_threshold(const ModelParams& model, const SparseColumns& threshold_set)
{
    if (threshold_set.cols() == 0) {
        throw InvalidArgument("compute_threshold: empty threshold set");
    }
    const auto errors = reconstruction_errors(model, threshold_set);
    return threshold_from_errors(errors);
}

struct Verdict {
    std::uint64_t flow_id = 0;
    double error = 0.0;
    bool malicious = false;

    friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// Malicious iff error > t_det; an error equal to the threshold is benign.
inline bool is_malicious(double error, const Threshold& t) { return error > t.t_det; }

inline std::vector<Verdict> verdicts_from_errors(std::span<const double> errors,
                                                 std::span<const std::uint64_t> ids,
                                                 const Threshold& t)
{
    if (errors.size() != ids.size()) {
        throw InvalidArgument("detect: ids and flows differ in count");
    }
    std::vector<Verdict> out;
    out.reserve(errors.size());
    for (std::size_t i = 0; i < errors.size(); ++i) {
        out.push_back({ids[i], errors[i], is_malicious(errors[i], t)});
    }
    return out;
}

inline std::vector<Verdict> detect(const ModelParams& model, const Threshold& t,
                                   const SparseColumns& flows, std::span<const std::uint64_t> ids)
{
    if (flows.cols() == 0) {
        return {};
    }
    const auto errors = reconstruction_errors(model, flows);
    return verdicts_from_errors(errors, ids, t);
}

struct Metrics {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    std::optional<double> tnr;

    /// False-positive rate, fp / (fp + tn).
    std::optional<double> fpr() const
    {
        if (fp + tn == 0) {
            return std::nullopt;
        }
        return static_cast<double>(fp) / static_cast<double>(fp + tn);
    }
};

inline Metrics metrics_from_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn,
                                   std::uint64_t tn)
{
    Metrics m{tp, fp, fn, tn, {}, {}, {}, {}};
    auto ratio = [](std::uint64_t a, std::uint64_t b) -> std::optional<double> {
        if (b == 0) {
            return std::nullopt;
        }
        return static_cast<double>(a) / static_cast<double>(b);
    };
    m.precision = ratio(tp, tp + fp);
    m.recall = ratio(tp, tp + fn);
    m.tnr = ratio(tn, tn + fp);
    if (m.precision && m.recall && *m.precision + *m.recall > 0.0) {
        m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
    }
    return m;
}

inline Metrics evaluate(std::span<const Verdict> verdicts, std::span<const Label> labels)
{
    if (verdicts.size() != labels.size()) {
        throw InvalidArgument("evaluate: verdicts and labels differ in count");
    }
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        const bool truth = labels[i] == Label::malicious;
        const bool pred = verdicts[i].malicious;
        tp += truth && pred;
        fp += !truth && pred;
        fn += truth && !pred;
        tn += !truth && !pred;
    }
    return metrics_from_counts(tp, fp, fn, tn);
}

/// Recall per attack category over malicious-labeled flows.
struct CategoryRow {
    std::string category;
    std::uint64_t total = 0;
    std::uint64_t detected = 0;
    double recall() const { return total ? static_cast<double>(detected) / total : 0.0; }
};

inline std::vector<CategoryRow> per_category_recall(std::span<const Verdict> verdicts,
                                                    std::span<const FlowRecord> flows)
{
    if (verdicts.size() != flows.size()) {
        throw InvalidArgument("per_category_recall: size mismatch");
    }
    std::map<std::string, CategoryRow> rows;
    for (std::size_t i = 0; i < flows.size(); ++i) {
        if (flows[i].label != Label::malicious) {
            continue;
        }
        auto& r = rows[flows[i].category];
        r.category = flows[i].category;
        ++r.total;
        r.detected += verdicts[i].malicious;
    }
    std::vector<CategoryRow> out;
    for (auto& [_, r] : rows) {
        out.push_back(std::move(r));
    }
    return out;
}

/// Validation gate: precision, recall and f1 all >= 0.99; TNR >= 0.99
/// when the validation set has no malicious flows.
inline bool passes_gate(const Metrics& m, double level = 0.99)
{
    if (m.tp + m.fn == 0) {
        return m.tnr && *m.tnr >= level;
    }
    return m.precision && m.recall && m.f1 && *m.precision >= level && *m.recall >= level
           && *m.f1 >= level;
}

// ---------------------------------------------------------------------------
// Model bundle and tuning

struct TrainingMeta {
    std::string dataset_checksum; // FNV-1a over the training features, hex
    std::uint64_t seed = 0;
    std::string timestamp; // empty unless supplied; keeps bundles reproducible
    std::uint64_t train_flows = 0;
    double final_loss = 0.0;

    friend bool operator==(const TrainingMeta&, const TrainingMeta&) = default;
};

/// Everything needed to score new flows.
struct ModelBundle {
    ModelParams model;
    NormStats stats;
    Threshold threshold;
    HyperParams hyper;
    TrainingMeta meta;

    friend bool operator==(const ModelBundle& a, const ModelBundle& b)
    {
        return a.model == b.model && a.stats == b.stats && a.threshold == b.threshold
               && a.hyper == b.hyper && a.meta == b.meta;
    }
};

inline std::string dataset_checksum(std::span<const RawFeatureVector> flows)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&](double v) {
        std::uint64_t bits = 0;
        static_assert(sizeof bits == sizeof v);
        std::memcpy(&bits, &v, sizeof v);
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& f : flows) {
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            mix(f.get(i));
        }
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = hex[h & 0xf];
        h >>= 4;
    }
    return s;
}

/// Fits normalization on `train`, trains a fresh model (init from the
/// "init" sub-seed of hyper.seed), thresholds on `threshold`.
inline ModelBundle fit_bundle(std::span<const RawFeatureVector> train_flows,
                              std::span<const RawFeatureVector> threshold_flows,
                              const HyperParams& hyper,
                              const std::vector<int>& layer_dims = kDefaultLayerDims)
{
    if (train_flows.empty()) {
        throw InvalidArgument("fit_bundle: empty training set");
    }
    if (threshold_flows.empty()) {
        throw InvalidArgument("fit_bundle: empty threshold set");
    }
    ModelBundle b;
    b.hyper = hyper;
    b.stats = fit_normalization(train_flows);
    const auto x_train = encode_dataset(train_flows, b.stats);
    auto result = train(init_model(layer_dims, derive_seed(hyper.seed, "init")), x_train, hyper);
    b.model = std::move(result.model);
    b.model.generation = 0;
    b.threshold = compute_threshold(b.model, encode_dataset(threshold_flows, b.stats));
    b.meta.dataset_checksum = dataset_checksum(train_flows);
    b.meta.seed = hyper.seed;
    b.meta.train_flows = train_flows.size();
    b.meta.final_loss = result.report.epoch_loss.back();
    return b;
}

inline std::vector<Verdict> detect(const ModelBundle& b, std::span<const FlowRecord> flows)
{
    std::vector<RawFeatureVector> raw;
    std::vector<std::uint64_t> ids;
    raw.reserve(flows.size());
    ids.reserve(flows.size());
    for (const auto& f : flows) {
        raw.push_back(f.features);
        ids.push_back(f.id);
    }
    return detect(b.model, b.threshold, encode_dataset(raw, b.stats), ids);
}

struct SearchSpace {
    std::vector<int> batch_sizes{32, 64, 128, 256};
    double lr_lo = 1e-6;
    double lr_hi = 1e-4;
    std::vector<double> dropouts{0.1, 0.2, 0.3, 0.4, 0.5};
    double decay_lo = 1e-7;
    double decay_hi = 1e-4;

    void validate() const
    {
        if (batch_sizes.empty() || dropouts.empty() || !(lr_lo > 0.0) || lr_lo > lr_hi
            || !(decay_lo > 0.0) || decay_lo > decay_hi) {
            throw InvalidArgument("search space is empty or malformed");
        }
    }

    /// Uniform over the lists, log-uniform over the rate and decay ranges.
    HyperParams sample(const HyperParams& base, Rng& rng) const
    {
        HyperParams h = base;
        h.batch_size = batch_sizes[rng.below(batch_sizes.size())];
        h.learning_rate = std::exp(rng.uniform(std::log(lr_lo), std::log(lr_hi)));
        h.dropout_ratio = dropouts[rng.below(dropouts.size())];
        h.weight_decay = std::exp(rng.uniform(std::log(decay_lo), std::log(decay_hi)));
        return h;
    }
};

struct TuningData {
    std::span<const RawFeatureVector> train;
    std::span<const RawFeatureVector> threshold;
    std::span<const FlowRecord> validation; // labeled
};

struct TrialRecord {
    int index = 0;
    HyperParams hyper;
    Metrics metrics;
};

struct TuneResult {
    ModelBundle best;
    Metrics baseline_metrics;
    bool tuned = false;
    int best_trial = -1; // -1 when the baseline is returned
    std::vector<TrialRecord> trials;
};

inline Metrics validate_bundle(const ModelBundle& b, std::span<const FlowRecord> validation)
{
    std::vector<Label> labels;
    labels.reserve(validation.size());
    for (const auto& f : validation) {
        if (!f.label) {
            throw InvalidArgument("validation flows must be labeled");
        }
        labels.push_back(*f.label);
    }
    const auto v = detect(b, validation);
    return evaluate(v, labels);
}

/// Returns the baseline if it passes the 99% gate; otherwise trains
/// `trials` candidates with sampled hyperparameters and keeps the highest
/// validation f1 (earliest trial on ties).
inline TuneResult random_search_tune(ModelBundle baseline, const TuningData& data,
                                     const SearchSpace& space, int trials, std::uint64_t seed)
{
    space.validate();
    if (trials < 1) {
        throw InvalidArgument("random_search_tune: trials must be >= 1");
    }
    TuneResult r;
    r.baseline_metrics = validate_bundle(baseline, data.validation);
    if (passes_gate(r.baseline_metrics)) {
        r.best = std::move(baseline);
        return r;
    }
    r.tuned = true;
    double best_f1 = -1.0;
    for (int i = 0; i < trials; ++i) {
        Rng rng(derive_seed(seed, "trial/" + std::to_string(i)));
        auto hyper = space.sample(baseline.hyper, rng);
        hyper.seed = derive_seed(seed, "trial-seed/" + std::to_string(i));
        auto candidate = fit_bundle(data.train, data.threshold, hyper, baseline.model.layer_dims);
        candidate.meta.timestamp = baseline.meta.timestamp;
        const auto m = validate_bundle(candidate, data.validation);
        r.trials.push_back({i, hyper, m});
        const double f1 = m.f1.value_or(-1.0);
        if (r.best_trial < 0 || f1 > best_f1) {
            best_f1 = f1;
            r.best_trial = i;
            r.best = std::move(candidate);
        }
    }
    return r;
}

} // namespace flowae

#endif
