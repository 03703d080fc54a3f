#include <gtest/gtest.h>

#include <numeric>
#include <sstream>
#include <vector>

#include "flowae/interpretation.hpp"
#include "flowae/synth_data.hpp"

using namespace flowae;

namespace {

Vector random_encoded(Rng& rng)
{
    Vector v(kEncodedDim);
    for (int i = 0; i < kEncodedDim; ++i) {
        v[i] = rng.uniform(-1, 1);
    }
    return v;
}

AttributionReport with_shares(std::initializer_list<std::pair<const char*, double>> shares)
{
    AttributionReport r;
    for (const auto& [name, s] : shares) {
        r.logical[*feature_index(name)] = s;
    }
    return r;
}

SweepResult fake_sweep(std::vector<double> normalized, std::vector<bool> malicious = {})
{
    SweepResult s;
    s.target = {SweepKind::protocol};
    for (std::size_t i = 0; i < normalized.size(); ++i) {
        s.grid.push_back({static_cast<double>(i)});
    }
    s.errors = normalized;
    s.normalized = std::move(normalized);
    s.malicious = malicious.empty() ? std::vector<bool>(s.grid.size(), false) : malicious;
    return s;
}

} // namespace

TEST(Shares, SquaredErrorRatios)
{
    const std::vector<double> in{1, 1, std::sqrt(2.0)}, out{0, 0, 0};
    const auto s = element_shares(in, out);
    ASSERT_TRUE(s);
    EXPECT_DOUBLE_EQ((*s)[0], 0.25);
    EXPECT_DOUBLE_EQ((*s)[1], 0.25);
    EXPECT_DOUBLE_EQ((*s)[2], 0.5);
    EXPECT_FALSE(element_shares(in, in));
    EXPECT_THROW(element_shares(in, std::vector<double>{1.0}), InvalidArgument);
}

TEST(Attribute, IdenticalVectorsAreFlagged)
{
    Rng rng(1);
    const Vector x = random_encoded(rng);
    const auto r = attribute(x, x, 5);
    EXPECT_TRUE(r.no_error);
    EXPECT_EQ(r.flow_id, 5u);
    for (double s : r.logical) {
        EXPECT_EQ(s, 0.0);
    }
    EXPECT_EQ(flow_error(r), 0.0);
    EXPECT_TRUE(significant_features(r).empty());
    EXPECT_THROW(attribute(Vector::Zero(10), Vector::Zero(10)), InvalidArgument);
}

TEST(Attribute, LogicalSharesAreGroupSums)
{
    Rng rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        const Vector a = random_encoded(rng), b = random_encoded(rng);
        const auto r = attribute(a, b);
        ASSERT_FALSE(r.no_error);
        double total = 0;
        for (int j = 0; j < kEncodedDim; ++j) {
            total += (a[j] - b[j]) * (a[j] - b[j]);
        }
        auto group = [&](int lo, int hi) {
            double s = 0;
            for (int j = lo; j < hi; ++j) {
                s += (a[j] - b[j]) * (a[j] - b[j]);
            }
            return s / total;
        };
        EXPECT_NEAR(r.share("Sport"), group(0, 1286), 1e-12);
        EXPECT_NEAR(r.share("Dport"), group(1286, 2572), 1e-12);
        EXPECT_NEAR(r.share("Proto"), group(2572, 2828), 1e-12);
        for (std::size_t k = 0; k < kScalarCount; ++k) {
            EXPECT_NEAR(r.logical[3 + k], group(2828 + static_cast<int>(k), 2829 + static_cast<int>(k)), 1e-12);
        }
        EXPECT_NEAR(std::accumulate(r.logical.begin(), r.logical.end(), 0.0), 1.0, 1e-9);
        EXPECT_NEAR(std::accumulate(r.element.begin(), r.element.end(), 0.0), 1.0, 1e-9);
        EXPECT_NEAR(flow_error(r), total / kEncodedDim, 1e-12);
        for (double s : r.element) {
            EXPECT_GE(s, 0.0);
        }
    }
}

TEST(Attribute, SharesIgnoreUniformScaling)
{
    Rng rng(3);
    const Vector a = random_encoded(rng), b = random_encoded(rng);
    const auto r = attribute(a, b);
    for (double k : {-3.0, 0.5, 7.0}) {
        const Vector scaled = b + k * (a - b);
        const auto q = attribute(scaled, b);
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
            EXPECT_NEAR(q.logical[f], r.logical[f], 1e-12);
        }
    }
}

TEST(Trigger, Examples)
{
    const auto whole = with_shares({{"Dport", 1.0}});
    EXPECT_TRUE(single_feature_trigger(whole, 2.0, 1.0)[1]);

    const auto half = with_shares({{"Dport", 0.5}, {"SrcPkts", 0.5}});
    const auto t = single_feature_trigger(half, 1.5, 1.0);
    EXPECT_FALSE(t[1]);
    EXPECT_FALSE(t[3]);

    for (bool b : single_feature_trigger(whole, 1.0, 1.0)) {
        EXPECT_FALSE(b);
    }
    for (bool b : single_feature_trigger(half, 0.9, 1.0)) {
        EXPECT_FALSE(b);
    }
}

TEST(Significance, CutoffIsInclusive)
{
    const auto r = with_shares({{"Dport", 0.8}, {"Sport", 0.15}, {"sTtl", 0.05}});
    EXPECT_EQ(significant_features(r), (std::vector<std::size_t>{0, 1}));

    AttributionReport uniform;
    uniform.logical.fill(1.0 / 23.0);
    EXPECT_TRUE(significant_features(uniform).empty());

    const auto edge = with_shares({{"Proto", 0.10}, {"Sport", 0.9}});
    EXPECT_EQ(significant_features(edge), (std::vector<std::size_t>{0, 2}));
    EXPECT_THROW(edge.share("bogus"), InvalidArgument);
}

TEST(SweepTargets, ParsingAndNames)
{
    EXPECT_EQ(parse_sweep_target("dst_port").kind, SweepKind::dst_port);
    EXPECT_EQ(parse_sweep_target("Dport").kind, SweepKind::dst_port);
    EXPECT_EQ(parse_sweep_target("Sport").kind, SweepKind::src_port);
    EXPECT_EQ(parse_sweep_target("Proto").kind, SweepKind::protocol);
    EXPECT_EQ(parse_sweep_target("size_pair").kind, SweepKind::size_pair);
    const auto t = parse_sweep_target("sTtl");
    EXPECT_EQ(t.kind, SweepKind::scalar);
    EXPECT_EQ(t.scalar, 4u);
    EXPECT_EQ(t.name(), "sTtl");
    EXPECT_THROW(parse_sweep_target("ttl"), InvalidArgument);
    EXPECT_EQ(format_point({SweepKind::size_pair}, {74, 60}), "74:60");
}

TEST(SweepTargets, DefaultGridSizes)
{
    const auto ports = default_grid({SweepKind::dst_port});
    ASSERT_EQ(ports.size(), 1286u);
    EXPECT_EQ(ports.front().value, 0);
    EXPECT_EQ(ports.back().value, 65535);
    // One grid point per bin.
    for (std::size_t i = 0; i < ports.size(); ++i) {
        EXPECT_EQ(port_bin(static_cast<std::int64_t>(ports[i].value), kProtoUdp).index, static_cast<int>(i));
    }
    EXPECT_EQ(default_grid({SweepKind::protocol}).size(), 256u);
    EXPECT_EQ(default_grid({SweepKind::size_pair}).size(), 513u * 513u);
    EXPECT_THROW(default_grid({SweepKind::scalar, 0}), InvalidArgument);
}

TEST(SweepTargets, PerturbRejectsNonIntegralPorts)
{
    RawFeatureVector base;
    EXPECT_THROW(perturb(base, {SweepKind::dst_port}, {1.5}), InvalidArgument);
    EXPECT_THROW(perturb(base, {SweepKind::protocol}, {256}), InvalidArgument);
    EXPECT_EQ(perturb(base, {SweepKind::dst_port}, {80}).dport, 80);
    const auto s = perturb(base, {SweepKind::size_pair}, {100, 60});
    EXPECT_EQ(s.s_max_pkt_sz, 100);
    EXPECT_EQ(s.s_min_pkt_sz, 60);
}

TEST(Sweep, IdentityBinCollisionAndNormalization)
{
    const auto flows = generate_benign(BenignProfile{}, 60, 3, {0, false, 0.0}).flows;
    const auto raw = features_of(flows);
    const auto stats = fit_normalization(raw);
    const auto model = init_model({2848, 16, 4, 16, 2848}, 9);
    const auto base_errors = reconstruction_errors(model, encode_dataset(raw, stats));
    const auto& base = raw[5];
    const double t_det = 0.5 * base_errors[5];

    const auto own = counterfactual_sweep(model, t_det, base, stats, {SweepKind::dst_port},
                                          {{static_cast<double>(base.dport)}, {4999}, {5049}, {6000}});
    EXPECT_EQ(own.errors[0], base_errors[5]);
    EXPECT_EQ(own.errors[1], own.errors[2]);
    EXPECT_TRUE(own.malicious[0]);
    const double mx = *std::max_element(own.errors.begin(), own.errors.end());
    EXPECT_EQ(*std::max_element(own.normalized.begin(), own.normalized.end()), 1.0);
    for (std::size_t i = 0; i < own.errors.size(); ++i) {
        EXPECT_EQ(own.normalized[i], own.errors[i] / mx);
        EXPECT_GE(own.normalized[i], 0.0);
        EXPECT_LE(own.normalized[i], 1.0);
    }

    const auto flat = counterfactual_sweep(model, t_det, base, stats, {SweepKind::dst_port},
                                           {{4999}, {5000}, {5049}});
    for (double v : flat.normalized) {
        EXPECT_EQ(v, 1.0);
    }

    const auto sizes = counterfactual_sweep(model, t_det, base, stats, {SweepKind::size_pair},
                                            {{base.s_max_pkt_sz, base.s_min_pkt_sz}});
    EXPECT_EQ(sizes.errors[0], base_errors[5]);
    EXPECT_THROW(counterfactual_sweep(model, t_det, base, stats, {SweepKind::dst_port}, {}), InvalidArgument);
}

TEST(Summary, NearestRank)
{
    const std::vector<double> two{0, 1};
    EXPECT_EQ(nearest_rank(two, 0.5), 0.0);
    EXPECT_EQ(nearest_rank(two, 0.02), 0.0);
    EXPECT_EQ(nearest_rank(two, 0.98), 1.0);
    std::vector<double> hundred(100);
    std::iota(hundred.begin(), hundred.end(), 1.0);
    EXPECT_EQ(nearest_rank(hundred, 0.02), 2.0);
    EXPECT_EQ(nearest_rank(hundred, 0.5), 50.0);
    EXPECT_EQ(nearest_rank(hundred, 0.98), 98.0);
    EXPECT_EQ(nearest_rank(hundred, 0.0), 1.0);
}

TEST(Summary, SingleAndPairedSweeps)
{
    const std::vector<SweepResult> one{fake_sweep({0.2, 1.0, 0.5})};
    const auto s1 = sweep_summary(one);
    for (std::size_t g = 0; g < 3; ++g) {
        const auto& b = s1.boxes[g];
        EXPECT_EQ(b.min, one[0].normalized[g]);
        EXPECT_EQ(b.p2, b.min);
        EXPECT_EQ(b.median, b.min);
        EXPECT_EQ(b.p98, b.min);
        EXPECT_EQ(b.max, b.min);
    }

    const std::vector<SweepResult> pair{fake_sweep({0.0}, {false}), fake_sweep({1.0}, {true})};
    const auto s2 = sweep_summary(pair);
    EXPECT_EQ(s2.boxes[0].min, 0.0);
    EXPECT_EQ(s2.boxes[0].max, 1.0);
    EXPECT_EQ(s2.boxes[0].median, 0.0);
    EXPECT_EQ(s2.boxes[0].frac_malicious, 0.5);
    EXPECT_EQ(s2.base_flows, 2u);

    const std::vector<SweepResult> same(100, fake_sweep({0.9, 1.0}));
    for (const auto& b : sweep_summary(same).boxes) {
        EXPECT_EQ(b.min, b.max);
    }

    std::vector<SweepResult> mismatch{fake_sweep({0.1, 1.0}), fake_sweep({1.0})};
    EXPECT_THROW(sweep_summary(mismatch), InvalidArgument);
    EXPECT_THROW(sweep_summary(std::vector<SweepResult>{}), InvalidArgument);
}

TEST(Summary, BoxesAreOrderedOnRandomSweeps)
{
    Rng rng(4);
    std::vector<SweepResult> sweeps;
    for (int i = 0; i < 37; ++i) {
        std::vector<double> v;
        for (int g = 0; g < 20; ++g) {
            v.push_back(rng.uniform());
        }
        sweeps.push_back(fake_sweep(v));
    }
    for (const auto& b : sweep_summary(sweeps).boxes) {
        EXPECT_LE(b.min, b.p2);
        EXPECT_LE(b.p2, b.median);
        EXPECT_LE(b.median, b.p98);
        EXPECT_LE(b.p98, b.max);
    }
}

TEST(Summary, CsvLayout)
{
    auto s = fake_sweep({0.5, 1.0});
    s.target = {SweepKind::size_pair};
    s.grid = {{74, 74}, {56, 56}};
    const auto summary = sweep_summary(std::vector<SweepResult>{s});
    std::ostringstream out;
    write_sweep_csv(out, summary);
    EXPECT_EQ(out.str(), "grid_value,min,p2,median,p98,max,frac_malicious\n"
                         "74:74,0.5,0.5,0.5,0.5,0.5,0\n"
                         "56:56,1,1,1,1,1,0\n");
}

TEST(BaseFlows, OnlyBenignUdpAndDeterministic)
{
    std::vector<FlowRecord> flows(50);
    std::vector<Verdict> verdicts(50);
    for (std::size_t i = 0; i < 50; ++i) {
        flows[i].features.proto = i % 3 == 0 ? kProtoTcp : kProtoUdp;
        verdicts[i].malicious = i % 5 == 0;
    }
    const auto a = sample_base_flows(flows, verdicts, 10, 7);
    EXPECT_EQ(a.size(), 10u);
    EXPECT_EQ(a, sample_base_flows(flows, verdicts, 10, 7));
    EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
    for (auto i : a) {
        EXPECT_EQ(flows[i].features.proto, kProtoUdp);
        EXPECT_FALSE(verdicts[i].malicious);
    }
    EXPECT_LT(sample_base_flows(flows, verdicts, 1000, 7).size(), 50u);
}
