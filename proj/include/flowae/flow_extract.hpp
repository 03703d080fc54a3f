#ifndef FLOWAE_FLOW_EXTRACT_HPP
#define FLOWAE_FLOW_EXTRACT_HPP

// Packet records -> 5-tuple flows -> the 23 per-flow features.

#include <algorithm>
#include <array>
#include <bitset>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "common.hpp"
#include "csv.hpp"

namespace flowae {

inline constexpr std::uint8_t kProtoTcp = 6;
inline constexpr std::uint8_t kProtoUdp = 17;

inline constexpr bool has_ports(int protocol) noexcept
{
    return protocol == kProtoTcp || protocol == kProtoUdp;
}

/// TCP option flags, in feature order.
enum class TcpOption : std::uint8_t { M, w, s, S, e, E, T, c, N, O, SS, D };

inline constexpr std::size_t kTcpOptionCount = 12;
inline constexpr std::array<std::string_view, kTcpOptionCount> kTcpOptionNames{
    "M", "w", "s", "S", "e", "E", "T", "c", "N", "O", "SS", "D"};

using TcpOptions = std::bitset<kTcpOptionCount>;

/// One sampled inbound packet.
struct PacketRecord {
    double timestamp = 0.0; // seconds
    std::string src_ip;
    std::string dst_ip;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    std::uint8_t protocol = 0;
    std::uint32_t packet_size = 0; // on-wire bytes
    std::uint32_t payload_size = 0;
    std::uint8_t ttl = 0;
    TcpOptions tcp_options;
    std::optional<std::uint64_t> tcp_seq;

    friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

struct FlowKey {
    std::string src_ip;
    std::string dst_ip;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    std::uint8_t protocol = 0;

    friend bool operator==(const FlowKey&, const FlowKey&) = default;
    friend auto operator<=>(const FlowKey&, const FlowKey&) = default;

    static FlowKey of(const PacketRecord& p)
    {
        return {p.src_ip, p.dst_ip, p.src_port, p.dst_port, p.protocol};
    }
};

/// Number of scalar (non-categorical) features: 8 statistics + 12 option flags.
inline constexpr std::size_t kScalarCount = 20;
inline constexpr std::size_t kFeatureCount = 23;

/// Feature names, in the fixed column order of the flow CSV.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{
    "Sport",     "Dport",     "Proto",      "SrcPkts",   "SrcRate",   "SrcLoad",
    "SIntPkt",   "sTtl",      "sMaxPktSz",  "sMinPktSz", "SrcTCPBase", "TcpOpt_M",
    "TcpOpt_w",  "TcpOpt_s",  "TcpOpt_S",   "TcpOpt_e",  "TcpOpt_E",  "TcpOpt_T",
    "TcpOpt_c",  "TcpOpt_N",  "TcpOpt_O",   "TcpOpt_SS", "TcpOpt_D"};

/// Scalar feature names; index i is kFeatureNames[i + 3].
inline constexpr std::string_view scalar_name(std::size_t i) { return kFeatureNames[i + 3]; }

/// Index into kFeatureNames, or nullopt.
inline std::optional<std::size_t> feature_index(std::string_view name)
{
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        if (kFeatureNames[i] == name) {
            return i;
        }
    }
    return std::nullopt;
}

/// A flow's 23 features before encoding.
struct RawFeatureVector {
    std::uint16_t sport = 0;
    std::uint16_t dport = 0;
    std::uint8_t proto = 0;
    double src_pkts = 1;
    double src_rate = 0;  // packets/s
    double src_load = 0;  // bits/s
    double s_int_pkt = 0; // ms
    double s_ttl = 0;
    double s_max_pkt_sz = 0;
    double s_min_pkt_sz = 0;
    double src_tcp_base = 0;
    TcpOptions tcp_opt;

    /// Scalar block in feature order.
    std::array<double, kScalarCount> scalars() const
    {
        std::array<double, kScalarCount> out{src_pkts,     src_rate,     src_load,
                                             s_int_pkt,    s_ttl,        s_max_pkt_sz,
                                             s_min_pkt_sz, src_tcp_base};
        for (std::size_t i = 0; i < kTcpOptionCount; ++i) {
            out[8 + i] = tcp_opt[i] ? 1.0 : 0.0;
        }
        return out;
    }

    /// Sets scalar i. Option flags are set iff value != 0.
    void set_scalar(std::size_t i, double v)
    {
        switch (i) {
        case 0: src_pkts = v; break;
        case 1: src_rate = v; break;
        case 2: src_load = v; break;
        case 3: s_int_pkt = v; break;
        case 4: s_ttl = v; break;
        case 5: s_max_pkt_sz = v; break;
        case 6: s_min_pkt_sz = v; break;
        case 7: src_tcp_base = v; break;
        default:
            if (i >= kScalarCount) {
                throw InvalidArgument("scalar index out of range");
            }
            tcp_opt[i - 8] = v != 0.0;
        }
    }

    /// Value of feature i (0..22) as a double.
    double get(std::size_t i) const
    {
        switch (i) {
        case 0: return sport;
        case 1: return dport;
        case 2: return proto;
        default: return scalars().at(i - 3);
        }
    }

    friend bool operator==(const RawFeatureVector&, const RawFeatureVector&) = default;
};

/// Guard for zero-duration flows when dividing by duration.
inline constexpr double kMinDuration = 1e-6;
inline constexpr double kDefaultWindow = 10.0;

struct Flow {
    FlowKey key;
    std::vector<PacketRecord> packets;
};

// ---------------------------------------------------------------------------
// Packet CSV

inline constexpr std::string_view kPacketCsvHeader =
    "ts,src_ip,dst_ip,src_port,dst_port,proto,pkt_size,payload_size,ttl,tcp_opts,tcp_seq";

inline TcpOptions parse_tcp_opts(std::string_view s, const csv::Where& w)
{
    if (s.size() != kTcpOptionCount) {
        csv::fail(w, "expected a 12-character 0/1 bitstring");
    }
    TcpOptions out;
    for (std::size_t i = 0; i < kTcpOptionCount; ++i) {
        if (s[i] == '1') {
            out.set(i);
        } else if (s[i] != '0') {
            csv::fail(w, "expected a 12-character 0/1 bitstring");
        }
    }
    return out;
}

inline std::string format_tcp_opts(const TcpOptions& o)
{
    std::string s(kTcpOptionCount, '0');
    for (std::size_t i = 0; i < kTcpOptionCount; ++i) {
        if (o[i]) {
            s[i] = '1';
        }
    }
    return s;
}

/// Parses the packet CSV. Rows are numbered from 1 at the header line.
inline std::vector<PacketRecord> parse_packet_records(std::istream& in)
{
    static constexpr std::array<std::string_view, 11> cols{
        "ts",       "src_ip",       "dst_ip", "src_port", "dst_port", "proto",
        "pkt_size", "payload_size", "ttl",    "tcp_opts", "tcp_seq"};

    std::vector<PacketRecord> out;
    std::string line;
    if (!csv::read_line(in, line)) {
        return out;
    }
    if (line != kPacketCsvHeader) {
        throw ParseError("row 1: packet CSV header must be '" + std::string(kPacketCsvHeader) + "'");
    }
    std::size_t row = 1;
    while (csv::read_line(in, line)) {
        ++row;
        if (line.empty()) {
            continue;
        }
        const auto f = csv::split(line);
        if (f.size() != cols.size()) {
            throw ParseError("row " + std::to_string(row) + ": expected 11 columns, got "
                             + std::to_string(f.size()));
        }
        auto at = [&](std::size_t c) { return csv::Where{row, cols[c]}; };
        PacketRecord p;
        p.timestamp = csv::parse_double(f[0], at(0));
        if (!(p.timestamp >= 0.0)) {
            csv::fail(at(0), "timestamp must be >= 0");
        }
        p.src_ip = std::string(f[1]);
        p.dst_ip = std::string(f[2]);
        p.src_port = csv::parse_int<std::uint16_t>(f[3], at(3), 0, 65535);
        p.dst_port = csv::parse_int<std::uint16_t>(f[4], at(4), 0, 65535);
        p.protocol = csv::parse_int<std::uint8_t>(f[5], at(5), 0, 255);
        p.packet_size = csv::parse_int<std::uint32_t>(f[6], at(6), 0, 0xffffffffLL);
        p.payload_size = csv::parse_int<std::uint32_t>(f[7], at(7), 0, 0xffffffffLL);
        if (p.payload_size > p.packet_size) {
            csv::fail(at(7), "payload_size exceeds pkt_size");
        }
        p.ttl = csv::parse_int<std::uint8_t>(f[8], at(8), 0, 255);
        p.tcp_options = parse_tcp_opts(f[9], at(9));
        if (!f[10].empty()) {
            p.tcp_seq = csv::parse_u64(f[10], at(10));
        }
        if (!has_ports(p.protocol) && (p.src_port != 0 || p.dst_port != 0)) {
            csv::fail(at(3), "ports must be 0 for protocols other than TCP and UDP");
        }
        out.push_back(std::move(p));
    }
    return out;
}

inline void write_packet_records(std::ostream& out, const std::vector<PacketRecord>& packets)
{
    out << kPacketCsvHeader << '\n';
    for (const auto& p : packets) {
        out << csv::format_double(p.timestamp) << ',' << p.src_ip << ',' << p.dst_ip << ','
            << p.src_port << ',' << p.dst_port << ',' << int(p.protocol) << ',' << p.packet_size
            << ',' << p.payload_size << ',' << int(p.ttl) << ',' << format_tcp_opts(p.tcp_options)
            << ',';
        if (p.tcp_seq) {
            out << *p.tcp_seq;
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Aggregation and features

/// Groups packets by 5-tuple, keeping only each flow's first `window`
/// seconds. Flows are ordered by their first packet; packets keep
/// arrival order.
inline std::vector<Flow> aggregate_flows(std::vector<PacketRecord> packets,
                                         double window = kDefaultWindow)
{
    std::stable_sort(packets.begin(), packets.end(),
                     [](const PacketRecord& a, const PacketRecord& b) {
                         return a.timestamp < b.timestamp;
                     });
    std::vector<Flow> flows;
    std::map<FlowKey, std::size_t> index;
    for (auto& p : packets) {
        auto key = FlowKey::of(p);
        auto it = index.find(key);
        if (it == index.end()) {
            index.emplace(key, flows.size());
            flows.push_back({std::move(key), {}});
            flows.back().packets.push_back(std::move(p));
            continue;
        }
        auto& flow = flows[it->second];
        if (p.timestamp < flow.packets.front().timestamp + window) {
            flow.packets.push_back(std::move(p));
        }
    }
    return flows;
}

inline RawFeatureVector compute_features(const Flow& flow)
{
    const auto& pk = flow.packets;
    if (pk.empty()) {
        throw InvalidArgument("compute_features: flow has no packets");
    }
    RawFeatureVector f;
    f.sport = flow.key.src_port;
    f.dport = flow.key.dst_port;
    f.proto = flow.key.protocol;
    const double n = static_cast<double>(pk.size());
    const double duration = std::max(pk.back().timestamp - pk.front().timestamp, kMinDuration);
    double bytes = 0.0;
    double max_sz = pk.front().packet_size;
    double min_sz = pk.front().packet_size;
    for (const auto& p : pk) {
        bytes += p.packet_size;
        max_sz = std::max<double>(max_sz, p.packet_size);
        min_sz = std::min<double>(min_sz, p.packet_size);
        f.tcp_opt |= p.tcp_options;
    }
    f.src_pkts = n;
    f.src_rate = n / duration;
    f.src_load = 8.0 * bytes / duration;
    if (pk.size() > 1) {
        double gaps = 0.0;
        for (std::size_t i = 1; i < pk.size(); ++i) {
            gaps += pk[i].timestamp - pk[i - 1].timestamp;
        }
        f.s_int_pkt = 1000.0 * gaps / (n - 1.0);
    }
    f.s_ttl = pk.back().ttl;
    f.s_max_pkt_sz = max_sz;
    f.s_min_pkt_sz = min_sz;
    f.src_tcp_base = pk.front().tcp_seq ? static_cast<double>(*pk.front().tcp_seq) : 0.0;
    return f;
}

// ---------------------------------------------------------------------------
// Flow CSV

enum class Label : std::uint8_t { benign, malicious };

inline std::string_view to_string(Label l) { return l == Label::benign ? "benign" : "malicious"; }

/// A flow row as exchanged between pipeline stages.
struct FlowRecord {
    std::uint64_t id = 0;
    std::string src_ip;
    std::string dst_ip;
    RawFeatureVector features;
    std::optional<Label> label;
    std::string category; // empty when absent

    friend bool operator==(const FlowRecord&, const FlowRecord&) = default;
};

struct FlowTable {
    std::vector<FlowRecord> rows;
    bool has_label = false;
    bool has_category = false;
};

inline void write_flow_csv(std::ostream& out, const FlowTable& table)
{
    out << "flow_id,src_ip,dst_ip";
    for (auto name : kFeatureNames) {
        out << ',' << name;
    }
    if (table.has_label) {
        out << ",label";
    }
    if (table.has_category) {
        out << ",category";
    }
    out << '\n';
    for (const auto& r : table.rows) {
        const auto& f = r.features;
        out << r.id << ',' << r.src_ip << ',' << r.dst_ip << ',' << f.sport << ',' << f.dport << ','
            << int(f.proto);
        for (double v : f.scalars()) {
            out << ',' << csv::format_double(v);
        }
        if (table.has_label) {
            out << ',' << (r.label ? to_string(*r.label) : "");
        }
        if (table.has_category) {
            out << ',' << r.category;
        }
        out << '\n';
    }
}

inline FlowTable read_flow_csv(std::istream& in)
{
    FlowTable table;
    std::string line;
    if (!csv::read_line(in, line)) {
        throw ParseError("flow CSV is empty (no header)");
    }
    const auto header = csv::split(line);
    std::vector<std::string_view> expected{"flow_id", "src_ip", "dst_ip"};
    expected.insert(expected.end(), kFeatureNames.begin(), kFeatureNames.end());
    if (header.size() < expected.size()
        || !std::equal(expected.begin(), expected.end(), header.begin())) {
        throw ParseError("row 1: flow CSV header does not match the 26 required columns");
    }
    std::size_t extra = expected.size();
    if (header.size() > extra && header[extra] == "label") {
        table.has_label = true;
        ++extra;
    }
    if (header.size() > extra && header[extra] == "category") {
        table.has_category = true;
        ++extra;
    }
    if (header.size() != extra) {
        throw ParseError("row 1: unexpected column '" + std::string(header[extra]) + "'");
    }
    const std::vector<std::string> names(header.begin(), header.end());

    std::size_t row = 1;
    while (csv::read_line(in, line)) {
        ++row;
        if (line.empty()) {
            continue;
        }
        const auto f = csv::split(line);
        if (f.size() != names.size()) {
            throw ParseError("row " + std::to_string(row) + ": expected "
                             + std::to_string(names.size()) + " columns, got "
                             + std::to_string(f.size()));
        }
        auto at = [&](std::size_t c) { return csv::Where{row, names[c]}; };
        FlowRecord r;
        r.id = csv::parse_u64(f[0], at(0));
        r.src_ip = std::string(f[1]);
        r.dst_ip = std::string(f[2]);
        auto& x = r.features;
        x.sport = csv::parse_int<std::uint16_t>(f[3], at(3), 0, 65535);
        x.dport = csv::parse_int<std::uint16_t>(f[4], at(4), 0, 65535);
        x.proto = csv::parse_int<std::uint8_t>(f[5], at(5), 0, 255);
        for (std::size_t i = 0; i < kScalarCount; ++i) {
            const double v = csv::parse_double(f[6 + i], at(6 + i));
            if (i >= 8 && v != 0.0 && v != 1.0) {
                csv::fail(at(6 + i), "option flag must be 0 or 1");
            }
            x.set_scalar(i, v);
        }
        std::size_t c = 26;
        if (table.has_label) {
            if (f[c] == "benign") {
                r.label = Label::benign;
            } else if (f[c] == "malicious") {
                r.label = Label::malicious;
            } else if (!f[c].empty()) {
                csv::fail(at(c), "label must be 'benign' or 'malicious'");
            }
            ++c;
        }
        if (table.has_category) {
            r.category = std::string(f[c]);
        }
        table.rows.push_back(std::move(r));
    }
    return table;
}

/// Converts flows to CSV rows, numbering them from `first_id`.
inline FlowTable to_flow_table(const std::vector<Flow>& flows, std::uint64_t first_id = 0)
{
    FlowTable t;
    for (const auto& fl : flows) {
        FlowRecord r;
        r.id = first_id++;
        r.src_ip = fl.key.src_ip;
        r.dst_ip = fl.key.dst_ip;
        r.features = compute_features(fl);
        t.rows.push_back(std::move(r));
    }
    return t;
}

} // namespace flowae

#endif
