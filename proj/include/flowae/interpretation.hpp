#ifndef FLOWAE_INTERPRETATION_HPP
#define FLOWAE_INTERPRETATION_HPP

// Per-feature error attribution and counterfactual sweeps.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "autoencoder.hpp"
#include "common.hpp"
#include "csv.hpp"
#include "detection.hpp"
#include "feature_encode.hpp"
#include "flow_extract.hpp"

namespace flowae {

// ---------------------------------------------------------------------------
// Attribution

/// Share of the total squared error carried by each element; nullopt when
/// the total is zero.
inline std::optional<std::vector<double>> element_shares(std::span<const double> in,
                                                         std::span<const double> out)
{
    if (in.size() != out.size()) {
        throw InvalidArgument("attribute: input and output lengths differ");
    }
    std::vector<double> sq(in.size());
    double total = 0.0;
    for (std::size_t j = 0; j < in.size(); ++j) {
        const double d = in[j] - out[j];
        sq[j] = d * d;
        total += sq[j];
    }
    if (total == 0.0) {
        return std::nullopt;
    }
    for (double& v : sq) {
        v /= total;
    }
    return sq;
}

struct AttributionReport {
    std::uint64_t flow_id = 0;
    std::array<double, kFeatureCount> logical{}; // kFeatureNames order
    std::vector<double> element;                 // one share per encoded element
    double squared_error = 0.0;                  // sum over elements
    bool no_error = false;

    double share(std::string_view feature) const
    {
        const auto i = feature_index(feature);
        if (!i) {
            throw InvalidArgument("unknown feature '" + std::string(feature) + "'");
        }
        return logical[*i];
    }
};

inline AttributionReport attribute(const Vector& f_in, const Vector& f_out, std::uint64_t flow_id = 0)
{
    if (f_in.size() != kEncodedDim || f_out.size() != kEncodedDim) {
        throw InvalidArgument("attribute: vectors must have " + std::to_string(kEncodedDim)
                              + " elements");
    }
    AttributionReport r;
    r.flow_id = flow_id;
    r.squared_error = (f_in - f_out).squaredNorm();
    auto shares = element_shares({f_in.data(), static_cast<std::size_t>(f_in.size())},
                                 {f_out.data(), static_cast<std::size_t>(f_out.size())});
    if (!shares) {
        r.no_error = true;
        r.element.assign(kEncodedDim, 0.0);
        return r;
    }
    r.element = std::move(*shares);
    for (int j = 0; j < kEncodedDim; ++j) {
        r.logical[logical_feature_of(j)] += r.element[static_cast<std::size_t>(j)];
    }
    return r;
}

/// Attribution of one encoded flow under `model`.
inline AttributionReport attribute(const ModelParams& model, const Vector& x, std::uint64_t flow_id = 0)
{
    return attribute(x, reconstruct(model, x), flow_id);
}

/// Mean squared error per element, the unit thresholds are expressed in.
inline double flow_error(const AttributionReport& r)
{
    return r.element.empty() ? 0.0 : r.squared_error / static_cast<double>(r.element.size());
}

/// Feature f "triggers alone" when its share of the error still exceeds
/// t_det: share(f) * E > t_det.
inline std::array<bool, kFeatureCount> single_feature_trigger(const AttributionReport& r,
                                                              double error, double t_det)
{
    std::array<bool, kFeatureCount> out{};
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        out[f] = r.logical[f] * error > t_det;
    }
    return out;
}

inline constexpr double kSignificantShare = 0.10;

/// Logical features (indices into kFeatureNames) with share >= cutoff.
inline std::vector<std::size_t> significant_features(const AttributionReport& r,
                                                     double cutoff = kSignificantShare)
{
    std::vector<std::size_t> out;
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        if (r.logical[f] >= cutoff) {
            out.push_back(f);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Counterfactual sweeps

enum class SweepKind : std::uint8_t { src_port, dst_port, protocol, size_pair, scalar };

struct SweepTarget {
    SweepKind kind = SweepKind::dst_port;
    std::size_t scalar = 0; // index into the scalar block when kind == scalar

    std::string name() const
    {
        switch (kind) {
        case SweepKind::src_port: return "src_port";
        case SweepKind::dst_port: return "dst_port";
        case SweepKind::protocol: return "protocol";
        case SweepKind::size_pair: return "size_pair";
        case SweepKind::scalar: break;
        }
        return std::string(scalar_name(scalar));
    }

    friend bool operator==(const SweepTarget&, const SweepTarget&) = default;
};

/// Accepts dst_port/src_port/protocol/size_pair or any feature name.
inline SweepTarget parse_sweep_target(std::string_view s)
{
    if (s == "src_port" || s == "Sport") {
        return {SweepKind::src_port};
    }
    if (s == "dst_port" || s == "Dport") {
        return {SweepKind::dst_port};
    }
    if (s == "protocol" || s == "Proto") {
        return {SweepKind::protocol};
    }
    if (s == "size_pair") {
        return {SweepKind::size_pair};
    }
    if (const auto i = feature_index(s); i && *i >= 3) {
        return {SweepKind::scalar, *i - 3};
    }
    throw InvalidArgument("unknown sweep target '" + std::string(s) + "'");
}

/// One perturbation. `second` is only read for size_pair (value = max
/// packet size, second = min packet size).
struct SweepPoint {
    double value = 0.0;
    double second = 0.0;

    friend bool operator==(const SweepPoint&, const SweepPoint&) = default;
};

inline std::string format_point(const SweepTarget& t, const SweepPoint& p)
{
    if (t.kind == SweepKind::size_pair) {
        return csv::format_double(p.value) + ":" + csv::format_double(p.second);
    }
    return csv::format_double(p.value);
}

inline constexpr int kMaxSweepPacketSize = 512;

/// Ports 0, 51, ..., 65535 (one per bin); protocols 0..255; size pairs
/// over 0..512 x 0..512. Scalars have no natural grid.
inline std::vector<SweepPoint> default_grid(const SweepTarget& t)
{
    std::vector<SweepPoint> g;
    switch (t.kind) {
    case SweepKind::src_port:
    case SweepKind::dst_port:
        for (int p = 0; p <= 65535; p += kPortGroup) {
            g.push_back({static_cast<double>(p)});
        }
        break;
    case SweepKind::protocol:
        for (int p = 0; p < kProtocolCount; ++p) {
            g.push_back({static_cast<double>(p)});
        }
        break;
    case SweepKind::size_pair:
        g.reserve((kMaxSweepPacketSize + 1) * (kMaxSweepPacketSize + 1));
        for (int mx = 0; mx <= kMaxSweepPacketSize; ++mx) {
            for (int mn = 0; mn <= kMaxSweepPacketSize; ++mn) {
                g.push_back({static_cast<double>(mx), static_cast<double>(mn)});
            }
        }
        break;
    case SweepKind::scalar:
        throw InvalidArgument("sweep target " + t.name() + " needs an explicit grid");
    }
    return g;
}

namespace detail {

template <class Int>
Int checked_integral(double v, double hi, const char* what)
{
    if (!(v >= 0.0 && v <= hi) || v != std::floor(v)) {
        throw InvalidArgument(std::string(what) + " sweep value " + csv::format_double(v)
                              + " is not an integer in [0, " + csv::format_double(hi) + "]");
    }
    return static_cast<Int>(v);
}

} // namespace detail

/// `base` with the target replaced by grid point `p`.
inline RawFeatureVector perturb(RawFeatureVector base, const SweepTarget& t, const SweepPoint& p)
{
    switch (t.kind) {
    case SweepKind::src_port:
        base.sport = detail::checked_integral<std::uint16_t>(p.value, 65535, "port");
        break;
    case SweepKind::dst_port:
        base.dport = detail::checked_integral<std::uint16_t>(p.value, 65535, "port");
        break;
    case SweepKind::protocol:
        // Non-TCP/UDP values land in port bin 0 through the encoder.
        base.proto = detail::checked_integral<std::uint8_t>(p.value, 255, "protocol");
        break;
    case SweepKind::size_pair:
        base.s_max_pkt_sz = p.value;
        base.s_min_pkt_sz = p.second;
        break;
    case SweepKind::scalar:
        base.set_scalar(t.scalar, p.value);
        break;
    }
    return base;
}

struct SweepResult {
    std::uint64_t base_id = 0;
    SweepTarget target;
    std::vector<SweepPoint> grid;
    std::vector<double> errors;
    std::vector<double> normalized; // errors / max(errors); all 0 if max is 0
    std::vector<bool> malicious;
};

inline SweepResult counterfactual_sweep(const ModelParams& model, double t_det,
                                        const RawFeatureVector& base, const NormStats& stats,
                                        const SweepTarget& target, std::vector<SweepPoint> grid,
                                        std::uint64_t base_id = 0)
{
    if (grid.empty()) {
        throw InvalidArgument("sweep: empty grid");
    }
    std::vector<RawFeatureVector> variants;
    variants.reserve(grid.size());
    for (const auto& p : grid) {
        variants.push_back(perturb(base, target, p));
    }
    SweepResult r;
    r.base_id = base_id;
    r.target = target;
    r.grid = std::move(grid);
    r.errors = reconstruction_errors(model, encode_dataset(variants, stats));
    const double mx = *std::max_element(r.errors.begin(), r.errors.end());
    r.normalized.reserve(r.errors.size());
    r.malicious.reserve(r.errors.size());
    for (double e : r.errors) {
        r.normalized.push_back(mx > 0.0 ? e / mx : 0.0);
        r.malicious.push_back(e > t_det);
    }
    return r;
}

inline SweepResult counterfactual_sweep(const ModelBundle& b, const RawFeatureVector& base,
                                        const SweepTarget& target, std::vector<SweepPoint> grid,
                                        std::uint64_t base_id = 0)
{
    return counterfactual_sweep(b.model, b.threshold.t_det, base, b.stats, target,
                                std::move(grid), base_id);
}

/// Nearest-rank percentile of an ascending sample: element ceil(p*n), 1-based.
inline double nearest_rank(std::span<const double> sorted, double p)
{
    if (sorted.empty()) {
        throw InvalidArgument("percentile of empty sample");
    }
    const auto n = static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil(p * n));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

struct SweepBox {
    double min = 0, p2 = 0, median = 0, p98 = 0, max = 0;
    double frac_malicious = 0;
};

struct SweepSummary {
    SweepTarget target;
    std::vector<SweepPoint> grid;
    std::vector<SweepBox> boxes;
    std::size_t base_flows = 0;
};

inline SweepSummary sweep_summary(std::span<const SweepResult> sweeps)
{
    if (sweeps.empty()) {
        throw InvalidArgument("sweep_summary: no sweeps");
    }
    const auto& first = sweeps.front();
    for (const auto& s : sweeps) {
        if (!(s.target == first.target) || s.grid != first.grid) {
            throw InvalidArgument("sweep_summary: sweeps use different targets or grids");
        }
    }
    SweepSummary out;
    out.target = first.target;
    out.grid = first.grid;
    out.base_flows = sweeps.size();
    std::vector<double> col(sweeps.size());
    for (std::size_t g = 0; g < first.grid.size(); ++g) {
        std::size_t flagged = 0;
        for (std::size_t s = 0; s < sweeps.size(); ++s) {
            col[s] = sweeps[s].normalized[g];
            flagged += sweeps[s].malicious[g] ? 1 : 0;
        }
        std::sort(col.begin(), col.end());
        out.boxes.push_back({col.front(), nearest_rank(col, 0.02), nearest_rank(col, 0.5),
                             nearest_rank(col, 0.98), col.back(),
                             static_cast<double>(flagged) / static_cast<double>(sweeps.size())});
    }
    return out;
}

inline constexpr std::string_view kSweepCsvHeader = "grid_value,min,p2,median,p98,max,frac_malicious";

inline void write_sweep_csv(std::ostream& out, const SweepSummary& s)
{
    out << kSweepCsvHeader << '\n';
    for (std::size_t g = 0; g < s.grid.size(); ++g) {
        const auto& b = s.boxes[g];
        out << format_point(s.target, s.grid[g]);
        for (double v : {b.min, b.p2, b.median, b.p98, b.max, b.frac_malicious}) {
            out << ',' << csv::format_double(v);
        }
        out << '\n';
    }
}

inline constexpr std::size_t kDefaultBaseFlows = 100;

/// Indices of up to `count` random UDP flows judged benign.
inline std::vector<std::size_t> sample_base_flows(std::span<const FlowRecord> flows,
                                                  std::span<const Verdict> verdicts,
                                                  std::size_t count, std::uint64_t seed)
{
    if (flows.size() != verdicts.size()) {
        throw InvalidArgument("sample_base_flows: flows and verdicts differ in count");
    }
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < flows.size(); ++i) {
        if (!verdicts[i].malicious && flows[i].features.proto == kProtoUdp) {
            pool.push_back(i);
        }
    }
    Rng rng(derive_seed(seed, "base-flows"));
    rng.shuffle(pool.begin(), pool.end());
    pool.resize(std::min(pool.size(), count));
    std::sort(pool.begin(), pool.end());
    return pool;
}

} // namespace flowae

#endif
