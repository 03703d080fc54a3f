#ifndef FLOWAE_SYNTH_DATA_HPP
#define FLOWAE_SYNTH_DATA_HPP

// Labeled synthetic flows: a benign profile (whitelisted destination
// ports, dominant source ports, UDP-heavy, small packets) and attack
// scenarios that each perturb one family of features.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "common.hpp"
#include "feature_encode.hpp"
#include "flow_extract.hpp"

namespace flowae {

struct WeightedValue {
    int value = 0;
    double weight = 0.0;

    friend bool operator==(const WeightedValue&, const WeightedValue&) = default;
};

/// Uniform draw in [lo, hi] chosen with probability `weight`.
struct WeightedRange {
    double weight = 1.0;
    double lo = 0.0;
    double hi = 0.0;

    friend bool operator==(const WeightedRange&, const WeightedRange&) = default;
};

/// min size uniform in [min_lo, min_hi], max size uniform in [min, max_hi].
struct SizeCluster {
    double weight = 1.0;
    int min_lo = 74;
    int min_hi = 74;
    int max_hi = 74;

    friend bool operator==(const SizeCluster&, const SizeCluster&) = default;
};

struct BenignProfile {
    std::vector<WeightedValue> dst_ports{{5000, 1.0}};
    // Frequent source ports; the remaining mass is uniform over the tail range.
    std::vector<WeightedValue> src_ports{{3074, 0.7531}, {27015, 0.0121}};
    int src_tail_lo = 32768;
    int src_tail_hi = 60999;
    std::vector<WeightedValue> protocols{{kProtoUdp, 0.999}, {kProtoTcp, 0.001}};
    std::vector<SizeCluster> sizes{{0.9, 74, 76, 80}, {0.1, 74, 512, 512}};
    std::vector<WeightedRange> ttl{{0.95, 54, 56}, {0.05, 44, 64}};
    // Packet count: pkts_lo + geometric excess with mean pkts_mean_excess, capped.
    int pkts_lo = 2;
    int pkts_hi = 32;
    double pkts_mean_excess = 2.0;
    // Per-flow inter-packet gap band (seconds); each gap is uniform in it.
    std::vector<WeightedRange> gaps{{0.9, 0.05, 0.06}, {0.1, 0.02, 0.3}};
    double noise_rate = 0.005;
    std::vector<int> bl_src_ports{19, 123, 389, 1900, 11211};
    std::string dst_ip = "192.0.2.10";

    void validate() const;
};

enum class Category : std::uint8_t {
    non_wl_dst_port,
    non_wl_protocol,
    bl_src_port,
    port_zero,
    small_payload_pair,
    multi_feature_subtle,
};

inline constexpr std::array<std::string_view, 6> kCategoryNames{
    "non_wl_dst_port",  "non_wl_protocol",    "bl_src_port",
    "port_zero",        "small_payload_pair", "multi_feature_subtle"};

inline std::string_view to_string(Category c) { return kCategoryNames[static_cast<std::size_t>(c)]; }

inline Category parse_category(std::string_view s)
{
    for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
        if (kCategoryNames[i] == s) {
            return static_cast<Category>(i);
        }
    }
    throw InvalidArgument("unknown attack category '" + std::string(s) + "'");
}

struct AttackScenario {
    Category category = Category::non_wl_dst_port;
    // small_payload_pair: every packet of a flow has one of these sizes.
    std::vector<int> small_sizes{56, 60};
    // multi_feature_subtle: TTL band outside the benign range and gap band
    // (seconds) above it.
    int subtle_ttl_lo = 66;
    int subtle_ttl_hi = 72;
    double subtle_gap_lo = 0.3;
    double subtle_gap_hi = 0.6;
};

inline void BenignProfile::validate() const
{
    auto sum = [](const std::vector<WeightedValue>& v) {
        double s = 0.0;
        for (const auto& w : v) {
            if (!(w.weight >= 0.0)) {
                throw InvalidArgument("profile weights must be >= 0");
            }
            s += w.weight;
        }
        return s;
    };
    constexpr double tol = 1e-9;
    if (dst_ports.empty() || std::abs(sum(dst_ports) - 1.0) > tol) {
        throw InvalidArgument("profile dst_ports weights must sum to 1");
    }
    if (protocols.empty() || std::abs(sum(protocols) - 1.0) > tol) {
        throw InvalidArgument("profile protocols weights must sum to 1");
    }
    if (sum(src_ports) > 1.0 + tol) {
        throw InvalidArgument("profile src_ports weights exceed 1");
    }
    double size_sum = 0.0;
    for (const auto& c : sizes) {
        if (!(c.weight >= 0.0) || c.min_lo > c.min_hi || c.min_hi > c.max_hi || c.min_lo < 0) {
            throw InvalidArgument("profile size cluster is inconsistent");
        }
        size_sum += c.weight;
    }
    if (sizes.empty() || std::abs(size_sum - 1.0) > tol) {
        throw InvalidArgument("profile sizes weights must sum to 1");
    }
    if (!(noise_rate >= 0.0 && noise_rate <= 0.05)) {
        throw InvalidArgument("profile noise_rate must be in [0, 0.05]");
    }
    for (const auto& p : dst_ports) {
        if (p.value < 1 || p.value > 65535) {
            throw InvalidArgument("profile dst port out of range");
        }
    }
    for (const auto& p : protocols) {
        if (p.value < 0 || p.value > 255) {
            throw InvalidArgument("profile protocol out of range");
        }
    }
    auto ranges = [&](const std::vector<WeightedRange>& v, double lo, double hi,
                      std::string_view what) {
        double s = 0.0;
        for (const auto& r : v) {
            if (!(r.weight >= 0.0) || r.lo > r.hi || r.lo < lo || r.hi > hi) {
                throw InvalidArgument("profile " + std::string(what) + " range is inconsistent");
            }
            s += r.weight;
        }
        if (v.empty() || std::abs(s - 1.0) > tol) {
            throw InvalidArgument("profile " + std::string(what) + " weights must sum to 1");
        }
    };
    ranges(ttl, 0.0, 255.0, "ttl");
    double max_gap = 0.0;
    for (const auto& g : gaps) {
        max_gap = std::max(max_gap, g.hi);
    }
    ranges(gaps, 0.0, kDefaultWindow, "gaps");
    if (src_tail_lo < 1 || src_tail_hi > 65535 || src_tail_lo > src_tail_hi || pkts_lo < 1
        || pkts_lo > pkts_hi || !(pkts_mean_excess >= 0.0)
        || max_gap * (pkts_hi - 1) >= kDefaultWindow) {
        throw InvalidArgument("profile ranges are inconsistent");
    }
}

/// Port bins of the whitelisted destination ports.
inline std::vector<int> wl_dst_bins(const BenignProfile& p)
{
    std::vector<int> bins;
    for (const auto& d : p.dst_ports) {
        bins.push_back(port_bin(d.value, kProtoUdp).index);
    }
    std::sort(bins.begin(), bins.end());
    bins.erase(std::unique(bins.begin(), bins.end()), bins.end());
    return bins;
}

/// A generated flow before feature extraction.
struct SynthFlow {
    FlowRecord record;
    std::vector<PacketRecord> packets;
};

struct LabeledDataset {
    std::vector<FlowRecord> flows;
    std::vector<PacketRecord> packets; // filled only in packet mode

    FlowTable table() const { return {flows, true, true}; }
};

namespace detail {

inline const WeightedRange& pick_range(const std::vector<WeightedRange>& v, Rng& rng)
{
    double u = rng.uniform();
    for (const auto& r : v) {
        if (u < r.weight) {
            return r;
        }
        u -= r.weight;
    }
    return v.back();
}

inline int pick_weighted(const std::vector<WeightedValue>& v, Rng& rng)
{
    double u = rng.uniform();
    for (const auto& w : v) {
        if (u < w.weight) {
            return w.value;
        }
        u -= w.weight;
    }
    return v.back().value;
}

/// Per-flow choices from which packets are built.
struct FlowPlan {
    int sport = 0;
    int dport = 0;
    int proto = kProtoUdp;
    int pkts = 1;
    double gap_lo = 0.0;
    double gap_hi = 0.0;
    int size_min = 74;
    int size_max = 74;
    std::vector<int> fixed_sizes; // when non-empty, each packet draws from these
    int ttl = 64;
    std::string src_ip;
};

inline FlowPlan benign_plan(const BenignProfile& p, Rng& rng)
{
    FlowPlan f;
    f.proto = pick_weighted(p.protocols, rng);
    f.dport = pick_weighted(p.dst_ports, rng);
    double u = rng.uniform();
    f.sport = -1;
    for (const auto& s : p.src_ports) {
        if (u < s.weight) {
            f.sport = s.value;
            break;
        }
        u -= s.weight;
    }
    if (f.sport < 0) {
        f.sport = static_cast<int>(rng.between(p.src_tail_lo, p.src_tail_hi));
    }
    int pkts = p.pkts_lo;
    const double stop = 1.0 / (1.0 + p.pkts_mean_excess);
    while (pkts < p.pkts_hi && !rng.bernoulli(stop)) {
        ++pkts;
    }
    f.pkts = pkts;
    const auto& gap = pick_range(p.gaps, rng);
    f.gap_lo = gap.lo;
    f.gap_hi = gap.hi;
    double cu = rng.uniform();
    const SizeCluster* cl = &p.sizes.back();
    for (const auto& c : p.sizes) {
        if (cu < c.weight) {
            cl = &c;
            break;
        }
        cu -= c.weight;
    }
    f.size_min = static_cast<int>(rng.between(cl->min_lo, cl->min_hi));
    f.size_max = static_cast<int>(rng.between(f.size_min, cl->max_hi));
    const auto& ttl = pick_range(p.ttl, rng);
    f.ttl = static_cast<int>(rng.between(static_cast<std::int64_t>(std::ceil(ttl.lo)),
                                         static_cast<std::int64_t>(std::floor(ttl.hi))));
    f.src_ip = "10." + std::to_string(rng.below(256)) + "." + std::to_string(rng.below(256)) + "."
               + std::to_string(1 + rng.below(254));
    return f;
}

inline bool in_bins(int port, const std::vector<int>& bins)
{
    return std::binary_search(bins.begin(), bins.end(), port_bin(port, kProtoUdp).index);
}

inline int non_wl_port(const BenignProfile& p, Rng& rng)
{
    const auto bins = wl_dst_bins(p);
    for (;;) {
        const int port = static_cast<int>(rng.between(1, 65535));
        if (!in_bins(port, bins)) {
            return port;
        }
    }
}

inline int non_wl_protocol(const BenignProfile& p, Rng& rng)
{
    for (;;) {
        const int proto = static_cast<int>(rng.below(256));
        const bool wl = std::any_of(p.protocols.begin(), p.protocols.end(),
                                    [&](const WeightedValue& w) { return w.value == proto; });
        if (!wl) {
            return proto;
        }
    }
}

/// Source ports whose bins no benign draw can reach.
inline int unseen_src_port(const BenignProfile& p, Rng& rng)
{
    std::vector<int> bins;
    for (const auto& s : p.src_ports) {
        bins.push_back(port_bin(s.value, kProtoUdp).index);
    }
    std::sort(bins.begin(), bins.end());
    const int tail_lo = port_bin(p.src_tail_lo, kProtoUdp).index;
    const int tail_hi = port_bin(p.src_tail_hi, kProtoUdp).index;
    for (;;) {
        const int port = static_cast<int>(rng.between(1, 65535));
        const int b = port_bin(port, kProtoUdp).index;
        if ((b < tail_lo || b > tail_hi) && !std::binary_search(bins.begin(), bins.end(), b)) {
            return port;
        }
    }
}

inline void apply_scenario(const AttackScenario& s, const BenignProfile& p, FlowPlan& f, Rng& rng)
{
    switch (s.category) {
    case Category::non_wl_dst_port:
        f.proto = kProtoUdp;
        f.dport = non_wl_port(p, rng);
        break;
    case Category::non_wl_protocol:
        f.proto = non_wl_protocol(p, rng);
        break;
    case Category::bl_src_port:
        f.proto = kProtoUdp;
        f.sport = p.bl_src_ports.at(rng.below(p.bl_src_ports.size()));
        break;
    case Category::port_zero:
        f.proto = kProtoUdp;
        if (rng.bernoulli(0.5)) {
            f.sport = 0;
        } else {
            f.dport = 0;
        }
        break;
    case Category::small_payload_pair:
        f.proto = kProtoUdp;
        f.fixed_sizes = {s.small_sizes.at(rng.below(s.small_sizes.size()))};
        break;
    case Category::multi_feature_subtle:
        f.proto = kProtoUdp;
        f.sport = unseen_src_port(p, rng);
        f.ttl = static_cast<int>(rng.between(s.subtle_ttl_lo, s.subtle_ttl_hi));
        f.gap_hi = std::min(s.subtle_gap_hi, 0.95 * kDefaultWindow / std::max(1, f.pkts - 1));
        f.gap_lo = std::min(s.subtle_gap_lo, f.gap_hi);
        break;
    }
}

inline std::vector<PacketRecord> build_packets(const FlowPlan& f, const std::string& dst_ip, Rng& rng)
{
    std::vector<PacketRecord> out;
    const bool ports = has_ports(f.proto);
    const bool tcp = f.proto == kProtoTcp;
    const std::uint64_t seq = tcp ? rng.below(1ULL << 32) : 0;
    double t = rng.uniform(0.0, 1.0);
    for (int i = 0; i < f.pkts; ++i) {
        PacketRecord pk;
        if (i > 0) {
            t += rng.uniform(f.gap_lo, f.gap_hi);
        }
        pk.timestamp = t;
        pk.src_ip = f.src_ip;
        pk.dst_ip = dst_ip;
        pk.src_port = static_cast<std::uint16_t>(ports ? f.sport : 0);
        pk.dst_port = static_cast<std::uint16_t>(ports ? f.dport : 0);
        pk.protocol = static_cast<std::uint8_t>(f.proto);
        int size = 0;
        if (!f.fixed_sizes.empty()) {
            size = f.fixed_sizes[rng.below(f.fixed_sizes.size())];
        } else if (i == 0) {
            size = f.size_min;
        } else if (i == 1) {
            size = f.size_max;
        } else {
            size = static_cast<int>(rng.between(f.size_min, f.size_max));
        }
        pk.packet_size = static_cast<std::uint32_t>(size);
        pk.payload_size = static_cast<std::uint32_t>(std::max(0, size - 42));
        pk.ttl = static_cast<std::uint8_t>(f.ttl);
        if (tcp) {
            if (i == 0) {
                pk.tcp_options.set(static_cast<std::size_t>(TcpOption::M));
                pk.tcp_options.set(static_cast<std::size_t>(TcpOption::w));
                pk.tcp_options.set(static_cast<std::size_t>(TcpOption::s));
            }
            pk.tcp_options.set(static_cast<std::size_t>(TcpOption::T));
            pk.tcp_seq = seq + static_cast<std::uint64_t>(i);
        }
        out.push_back(std::move(pk));
    }
    return out;
}

inline SynthFlow realize(const FlowPlan& plan, const BenignProfile& p, std::uint64_t id,
                         Label label, std::string category, Rng& rng)
{
    SynthFlow s;
    s.packets = build_packets(plan, p.dst_ip, rng);
    Flow flow{FlowKey::of(s.packets.front()), s.packets};
    s.record.id = id;
    s.record.src_ip = plan.src_ip;
    s.record.dst_ip = p.dst_ip;
    s.record.features = compute_features(flow);
    s.record.label = label;
    s.record.category = std::move(category);
    return s;
}

// Noise flows in benign data are drawn from these generators.
inline const std::vector<std::pair<Category, double>> kNoiseMix{
    {Category::non_wl_dst_port, 0.7}, {Category::non_wl_protocol, 0.15}, {Category::port_zero, 0.15}};

inline void append(LabeledDataset& d, SynthFlow&& s, bool packets)
{
    if (packets) {
        d.packets.insert(d.packets.end(), s.packets.begin(), s.packets.end());
    }
    d.flows.push_back(std::move(s.record));
}

} // namespace detail

struct GenerateOptions {
    std::uint64_t first_id = 0;
    bool emit_packets = false;
    std::optional<double> noise_rate; // overrides the profile's
};

/// Benign-labeled flows; a noise_rate fraction comes from attack
/// generators (category set to the generator's name).
inline LabeledDataset generate_benign(const BenignProfile& profile, std::size_t n,
                                      std::uint64_t seed, const GenerateOptions& opt = {})
{
    profile.validate();
    if (n == 0) {
        throw InvalidArgument("generate_benign: n must be >= 1");
    }
    const double noise = opt.noise_rate.value_or(profile.noise_rate);
    Rng rng(seed);
    LabeledDataset out;
    out.flows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto plan = detail::benign_plan(profile, rng);
        std::string category = "benign";
        if (noise > 0.0 && rng.bernoulli(noise)) {
            double u = rng.uniform();
            Category c = detail::kNoiseMix.back().first;
            for (const auto& [cat, w] : detail::kNoiseMix) {
                if (u < w) {
                    c = cat;
                    break;
                }
                u -= w;
            }
            detail::apply_scenario(AttackScenario{c}, profile, plan, rng);
            category = std::string(to_string(c));
        }
        detail::append(out,
                       detail::realize(plan, profile, opt.first_id + i, Label::benign,
                                       std::move(category), rng),
                       opt.emit_packets);
    }
    return out;
}

inline LabeledDataset generate_malicious(const AttackScenario& scenario,
                                         const BenignProfile& profile, std::size_t n,
                                         std::uint64_t seed, const GenerateOptions& opt = {})
{
    profile.validate();
    if (n == 0) {
        throw InvalidArgument("generate_malicious: n must be >= 1");
    }
    Rng rng(seed);
    LabeledDataset out;
    out.flows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto plan = detail::benign_plan(profile, rng);
        detail::apply_scenario(scenario, profile, plan, rng);
        detail::append(out,
                       detail::realize(plan, profile, opt.first_id + i, Label::malicious,
                                       std::string(to_string(scenario.category)), rng),
                       opt.emit_packets);
    }
    return out;
}

struct SplitSizes {
    std::size_t train = 50000;
    std::size_t threshold = 5000;
    std::size_t validation = 5000;
    std::size_t test = 5000;
};

struct Datasets {
    LabeledDataset train;
    LabeledDataset threshold;
    LabeledDataset validation;
    LabeledDataset test;
};

namespace detail {

/// Half malicious (scenarios round-robin), half clean benign, shuffled.
inline LabeledDataset mixed_split(const BenignProfile& profile,
                                  const std::vector<AttackScenario>& scenarios, std::size_t n,
                                  std::uint64_t seed, std::uint64_t first_id, bool packets)
{
    const std::size_t n_mal = scenarios.empty() ? 0 : n / 2;
    const std::size_t n_ben = n - n_mal;
    LabeledDataset out;
    std::uint64_t id = first_id;
    for (std::size_t k = 0; k < scenarios.size(); ++k) {
        const std::size_t share = n_mal / scenarios.size() + (k < n_mal % scenarios.size() ? 1 : 0);
        if (share == 0) {
            continue;
        }
        auto part = generate_malicious(scenarios[k], profile, share,
                                       derive_seed(seed, "malicious/" + std::to_string(k)),
                                       {id, packets, std::nullopt});
        id += share;
        out.flows.insert(out.flows.end(), part.flows.begin(), part.flows.end());
        out.packets.insert(out.packets.end(), part.packets.begin(), part.packets.end());
    }
    if (n_ben > 0) {
        auto part = generate_benign(profile, n_ben, derive_seed(seed, "benign"), {id, packets, 0.0});
        out.flows.insert(out.flows.end(), part.flows.begin(), part.flows.end());
        out.packets.insert(out.packets.end(), part.packets.begin(), part.packets.end());
    }
    Rng rng(derive_seed(seed, "order"));
    rng.shuffle(out.flows.begin(), out.flows.end());
    return out;
}

} // namespace detail

/// Train (benign + noise), threshold (clean benign), and validation/test
/// (half malicious, half clean benign). Ids are globally unique.
inline Datasets make_datasets(const BenignProfile& profile,
                              const std::vector<AttackScenario>& scenarios,
                              const SplitSizes& sizes, std::uint64_t seed,
                              bool emit_packets = false)
{
    if (sizes.train == 0 || sizes.threshold == 0 || sizes.validation == 0 || sizes.test == 0) {
        throw InvalidArgument("make_datasets: split sizes must be >= 1");
    }
    Datasets d;
    std::uint64_t id = 0;
    d.train = generate_benign(profile, sizes.train, derive_seed(seed, "split/train"),
                              {id, emit_packets, std::nullopt});
    id += sizes.train;
    d.threshold = generate_benign(profile, sizes.threshold, derive_seed(seed, "split/threshold"),
                                  {id, emit_packets, 0.0});
    id += sizes.threshold;
    d.validation = detail::mixed_split(profile, scenarios, sizes.validation,
                                       derive_seed(seed, "split/validation"), id, emit_packets);
    id += sizes.validation;
    d.test = detail::mixed_split(profile, scenarios, sizes.test, derive_seed(seed, "split/test"),
                                 id, emit_packets);
    return d;
}

inline std::vector<RawFeatureVector> features_of(const std::vector<FlowRecord>& flows)
{
    std::vector<RawFeatureVector> out;
    out.reserve(flows.size());
    for (const auto& f : flows) {
        out.push_back(f.features);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Profile file: "key = value" lines, '#' comments. List values are
// comma-separated "value:weight" pairs; sizes are "weight:min_lo:min_hi:max_hi"
// and ttl/gaps are "weight:lo:hi".

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_on(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

inline double to_num(const std::string& s, std::size_t line)
{
    csv::Where w{line, "value"};
    return csv::parse_double(s, w);
}

} // namespace detail

inline BenignProfile read_profile(std::istream& in, BenignProfile p = {})
{
    std::string raw;
    std::size_t line = 0;
    auto weighted = [&](const std::string& v) {
        std::vector<WeightedValue> out;
        for (const auto& item : detail::split_on(v, ',')) {
            const auto parts = detail::split_on(item, ':');
            if (parts.size() != 2) {
                throw ParseError("profile line " + std::to_string(line) + ": expected value:weight");
            }
            out.push_back({static_cast<int>(detail::to_num(parts[0], line)),
                           detail::to_num(parts[1], line)});
        }
        return out;
    };
    auto ranged = [&](const std::string& v) {
        std::vector<WeightedRange> out;
        for (const auto& item : detail::split_on(v, ',')) {
            const auto parts = detail::split_on(item, ':');
            if (parts.size() != 3) {
                throw ParseError("profile line " + std::to_string(line) + ": expected weight:lo:hi");
            }
            out.push_back({detail::to_num(parts[0], line), detail::to_num(parts[1], line),
                           detail::to_num(parts[2], line)});
        }
        return out;
    };
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const auto body = detail::trim(std::string_view(raw).substr(0, hash));
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ParseError("profile line " + std::to_string(line) + ": expected key = value");
        }
        const auto key = detail::trim(std::string_view(body).substr(0, eq));
        const auto val = detail::trim(std::string_view(body).substr(eq + 1));
        auto num = [&] { return detail::to_num(val, line); };
        auto integer = [&] { return static_cast<int>(num()); };
        if (key == "dst_ports") {
            p.dst_ports = weighted(val);
        } else if (key == "src_ports") {
            p.src_ports = val.empty() ? std::vector<WeightedValue>{} : weighted(val);
        } else if (key == "protocols") {
            p.protocols = weighted(val);
        } else if (key == "sizes") {
            p.sizes.clear();
            for (const auto& item : detail::split_on(val, ',')) {
                const auto parts = detail::split_on(item, ':');
                if (parts.size() != 4) {
                    throw ParseError("profile line " + std::to_string(line)
                                     + ": expected weight:min_lo:min_hi:max_hi");
                }
                p.sizes.push_back({detail::to_num(parts[0], line),
                                   static_cast<int>(detail::to_num(parts[1], line)),
                                   static_cast<int>(detail::to_num(parts[2], line)),
                                   static_cast<int>(detail::to_num(parts[3], line))});
            }
        } else if (key == "bl_src_ports") {
            p.bl_src_ports.clear();
            for (const auto& item : detail::split_on(val, ',')) {
                p.bl_src_ports.push_back(static_cast<int>(detail::to_num(item, line)));
            }
        } else if (key == "src_tail_lo") {
            p.src_tail_lo = integer();
        } else if (key == "src_tail_hi") {
            p.src_tail_hi = integer();
        } else if (key == "ttl") {
            p.ttl = ranged(val);
        } else if (key == "gaps") {
            p.gaps = ranged(val);
        } else if (key == "pkts_lo") {
            p.pkts_lo = integer();
        } else if (key == "pkts_hi") {
            p.pkts_hi = integer();
        } else if (key == "pkts_mean_excess") {
            p.pkts_mean_excess = num();
        } else if (key == "noise_rate") {
            p.noise_rate = num();
        } else if (key == "dst_ip") {
            p.dst_ip = val;
        } else {
            throw ParseError("profile line " + std::to_string(line) + ": unknown key '" + key + "'");
        }
    }
    p.validate();
    return p;
}

} // namespace flowae

#endif
