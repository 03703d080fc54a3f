#ifndef FLOWAE_FEATURE_ENCODE_HPP
#define FLOWAE_FEATURE_ENCODE_HPP

// RawFeatureVector -> 2848-element model input.
//
// Layout "enc-v1" (frozen; model files depend on it):
//   [   0, 1286)  source port bins, one-hot
//   [1286, 2572)  destination port bins, one-hot
//   [2572, 2828)  protocol number, one-hot
//   [2828, 2848)  min-max normalized scalars, feature order

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "common.hpp"
#include "flow_extract.hpp"

namespace flowae {

inline constexpr std::string_view kEncodingVersion = "enc-v1";

inline constexpr int kPortGroup = 51;
inline constexpr int kPortBins = 1286;
inline constexpr int kProtocolCount = 256;
inline constexpr int kSrcPortOffset = 0;
inline constexpr int kDstPortOffset = kPortBins;
inline constexpr int kProtocolOffset = 2 * kPortBins;
inline constexpr int kScalarOffset = kProtocolOffset + kProtocolCount;
inline constexpr int kEncodedDim = kScalarOffset + static_cast<int>(kScalarCount);
static_assert(kEncodedDim == 2848);

struct PortBin {
    int index = 0;
    friend bool operator==(PortBin, PortBin) = default;
};

/// Bin 0 holds port 0 and every port of a non-TCP/UDP flow; bin i >= 1
/// holds ports (i-1)*51+1 .. i*51.
inline PortBin port_bin(std::int64_t port, int protocol)
{
    if (port < 0 || port > 65535) {
        throw InvalidArgument("port_bin: port " + std::to_string(port) + " outside [0, 65535]");
    }
    if (port == 0 || !has_ports(protocol)) {
        return {0};
    }
    return {static_cast<int>((port - 1) / kPortGroup) + 1};
}

/// Lowest port of a bin (bin 0 -> 0).
inline int bin_first_port(int bin) { return bin == 0 ? 0 : (bin - 1) * kPortGroup + 1; }

/// Per-scalar training minimum and maximum.
struct NormStats {
    std::array<double, kScalarCount> min{};
    std::array<double, kScalarCount> max{};

    friend bool operator==(const NormStats&, const NormStats&) = default;
};

inline NormStats fit_normalization(std::span<const RawFeatureVector> training)
{
    if (training.empty()) {
        throw InvalidArgument("fit_normalization: empty training set");
    }
    NormStats s;
    s.min = s.max = training.front().scalars();
    for (const auto& f : training.subspan(1)) {
        const auto v = f.scalars();
        for (std::size_t i = 0; i < kScalarCount; ++i) {
            s.min[i] = std::min(s.min[i], v[i]);
            s.max[i] = std::max(s.max[i], v[i]);
        }
    }
    return s;
}

/// Min-max normalization in the orientation min -> 1, max -> 0. Values
/// outside the training range extrapolate; a constant feature maps to 0.
inline double normalize_scalar(double value, double tmin, double tmax)
{
    if (tmin == tmax) {
        return 0.0;
    }
    return (value - tmax) / (tmin - tmax);
}

using EncodedVector = Eigen::VectorXd;

/// Indices of the three active one-hot entries (src bin, dst bin, protocol).
inline std::array<int, 3> one_hot_indices(const RawFeatureVector& raw)
{
    return {kSrcPortOffset + port_bin(raw.sport, raw.proto).index,
            kDstPortOffset + port_bin(raw.dport, raw.proto).index,
            kProtocolOffset + raw.proto};
}

inline std::array<double, kScalarCount> normalized_scalars(const RawFeatureVector& raw,
                                                           const NormStats& stats)
{
    auto v = raw.scalars();
    for (std::size_t i = 0; i < kScalarCount; ++i) {
        v[i] = normalize_scalar(v[i], stats.min[i], stats.max[i]);
    }
    return v;
}

inline EncodedVector encode_flow(const RawFeatureVector& raw, const NormStats& stats)
{
    EncodedVector x = EncodedVector::Zero(kEncodedDim);
    for (int idx : one_hot_indices(raw)) {
        x[idx] = 1.0;
    }
    const auto s = normalized_scalars(raw, stats);
    for (std::size_t i = 0; i < kScalarCount; ++i) {
        x[kScalarOffset + static_cast<int>(i)] = s[i];
    }
    return x;
}

/// Column-per-flow sparse encoding; column j encodes flows[j].
using EncodedDataset = Eigen::SparseMatrix<double, Eigen::ColMajor>;

inline EncodedDataset encode_dataset(std::span<const RawFeatureVector> flows,
                                     const NormStats& stats)
{
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(flows.size() * (3 + kScalarCount));
    for (std::size_t j = 0; j < flows.size(); ++j) {
        const int col = static_cast<int>(j);
        for (int idx : one_hot_indices(flows[j])) {
            t.emplace_back(idx, col, 1.0);
        }
        const auto s = normalized_scalars(flows[j], stats);
        for (std::size_t i = 0; i < kScalarCount; ++i) {
            if (s[i] != 0.0) {
                t.emplace_back(kScalarOffset + static_cast<int>(i), col, s[i]);
            }
        }
    }
    EncodedDataset m(kEncodedDim, static_cast<int>(flows.size()));
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

/// Sparse dataset from dense columns of any width.
inline EncodedDataset to_dataset(std::span<const Eigen::VectorXd> columns)
{
    if (columns.empty()) {
        return {};
    }
    std::vector<Eigen::Triplet<double>> t;
    const auto rows = columns.front().size();
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j].size() != rows) {
            throw InvalidArgument("to_dataset: columns differ in length");
        }
        for (Eigen::Index i = 0; i < rows; ++i) {
            if (columns[j][i] != 0.0) {
                t.emplace_back(static_cast<int>(i), static_cast<int>(j), columns[j][i]);
            }
        }
    }
    EncodedDataset m(rows, static_cast<Eigen::Index>(columns.size()));
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

/// Logical feature (0..22, kFeatureNames order) owning encoded element j.
inline std::size_t logical_feature_of(int element)
{
    if (element < kDstPortOffset) {
        return 0;
    }
    if (element < kProtocolOffset) {
        return 1;
    }
    if (element < kScalarOffset) {
        return 2;
    }
    return 3 + static_cast<std::size_t>(element - kScalarOffset);
}

} // namespace flowae

#endif
