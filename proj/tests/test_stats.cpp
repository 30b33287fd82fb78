// Copyright 2026 The eprsteer Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include <eprsteer/experiment.hpp>
#include <eprsteer/stats.hpp>

using namespace eprsteer;
using Kind = SteeringDirection::Kind;

namespace {

SetupParams pure_params(double dB, double v = 0.0) {
    SetupParams p;
    p.squeezer = SqueezerModel::pure(dB);
    p.vacuum_fraction = v;
    return p;
}

Dataset patterned_dataset() {
    Dataset d;
    for (int k = 0; k < 100; ++k) {
        const double a = (k % 2 == 0) ? 1.0 : -1.0;
        d.xx.a.push_back(a);
        d.xx.b.push_back(0.5 * a + ((k % 4 < 2) ? 0.1 : -0.1));
        d.pp.a.push_back(-a);
        d.pp.b.push_back(a + ((k % 4 < 2) ? 0.2 : -0.2));
    }
    d.n_per_setting = 100;
    return d;
}

} // namespace

TEST(SampleConditionalVariance, PerfectCorrelationGivesZero) {
    const std::vector<double> a{1.0, -1.0};
    const std::vector<double> b{1.0, -1.0};
    EXPECT_NEAR(sample_conditional_variance(a, b, Kind::AtoB), 0.0, 1e-15);
}

TEST(SampleConditionalVariance, UncorrelatedByConstruction) {
    // a and b orthogonal after centering: Cov = 0 exactly.
    const std::vector<double> a{1.0, -1.0, 1.0, -1.0};
    const std::vector<double> b{1.0, 1.0, -1.0, -1.0};
    EXPECT_EQ(sample_conditional_variance(a, b, Kind::AtoB), 4.0 / 3.0);
    EXPECT_EQ(sample_conditional_variance(a, b, Kind::BtoA), 4.0 / 3.0);
}

TEST(SampleConditionalVariance, MinimisesResidualVariance) {
    std::mt19937_64 rng(40);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> a(500), b(500);
    for (std::size_t k = 0; k < a.size(); ++k) {
        a[k] = normal(rng);
        b[k] = -0.7 * a[k] + 0.4 * normal(rng);
    }
    const double cv = sample_conditional_variance(a, b, Kind::AtoB);
    const auto residual_var = [&](double g) {
        std::vector<double> r(a.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            r[k] = b[k] - g * a[k];
        }
        const double m = std::accumulate(r.begin(), r.end(), 0.0) / r.size();
        double s = 0.0;
        for (double x : r) {
            s += (x - m) * (x - m);
        }
        return s / (r.size() - 1);
    };
    double best = 1e300;
    for (int k = 0; k <= 20000; ++k) {
        best = std::min(best, residual_var(-2.0 + 4.0 * k / 20000.0));
    }
    EXPECT_LE(cv, best + 1e-12);
    EXPECT_NEAR(cv, best, 1e-6);
}

TEST(SampleConditionalVariance, DegenerateInputs) {
    const std::vector<double> flat{2.0, 2.0, 2.0};
    const std::vector<double> b{1.0, 2.0, 3.0};
    EXPECT_THROW(sample_conditional_variance(flat, b, Kind::AtoB), DegenerateData);
    const std::vector<double> one{1.0};
    EXPECT_THROW(sample_conditional_variance(one, one, Kind::AtoB), DegenerateData);
    EXPECT_THROW(sample_conditional_variance(flat, one, Kind::AtoB), InvalidArgument);
}

TEST(SampleConditionalVariance, LargeSampleMatchesClosedForm) {
    const auto state = build_bipartite(pure_params(10.2));
    const auto s = sample_joint_quadratures(state, MeasurementSetting::xx(), 1000000, 41);
    constexpr double kVs = 0.09549925860214359;
    EXPECT_NEAR(sample_conditional_variance(s, Kind::AtoB), 2.0 * kVs / (kVs + 1.0), 0.001);
}

TEST(ProductEstimate, VacuumNearOneAndMissingSettingRejected) {
    const auto d = generate_dataset(pure_params(0.0), 0.0, 100000, 42);
    EXPECT_NEAR(product_estimate(d, Kind::AtoB), 1.0, 0.02);
    Dataset partial = d;
    partial.pp = {};
    EXPECT_THROW(product_estimate(partial, Kind::AtoB), InvalidInput);
}

TEST(ProductEstimate, ConsistentWithAnalyticProducts) {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        SetupParams p;
        p.squeezer.squeezing_dB = 1.0 + 11.0 * unit(rng);
        p.squeezer.antisqueezing_dB = p.squeezer.squeezing_dB + 3.0 * unit(rng);
        p.eta_A = 0.6 + 0.4 * unit(rng);
        p.eta_B = 0.6 + 0.4 * unit(rng);
        const double v = unit(rng);
        const auto state = build_bipartite(p.with_vacuum(v));
        const auto d = generate_dataset(p, v, 1000000, 500 + trial);
        for (auto kind : {Kind::AtoB, Kind::BtoA}) {
            const SteeringDirection dir{kind, 0, 1};
            const auto r = reid_product(state, dir);
            // Delta-method standard error of a product of two conditional variances,
            // each with relative sd sqrt(2 / n).
            const double se = r.product * std::sqrt(2.0 * 2.0 / 1000000.0);
            EXPECT_NEAR(product_estimate(d, kind), r.product, 5.0 * se) << trial;
        }
    }
}

TEST(Bootstrap, IdenticalPairsAreDegenerate) {
    Dataset d;
    for (int k = 0; k < 10; ++k) {
        d.xx.a.push_back(1.0);
        d.xx.b.push_back(2.0);
    }
    d.pp = d.xx;
    // Identical pairs have zero conditioning variance.
    EXPECT_THROW(bootstrap(d, Kind::AtoB, 10, 5, 1), DegenerateData);
}

TEST(Bootstrap, PatternedDataSummary) {
    const auto d = patterned_dataset();
    const auto r = bootstrap(d, Kind::AtoB, 200, 100, 7);
    EXPECT_EQ(r.resamples, 200u);
    EXPECT_EQ(r.resample_size, 100u);
    EXPECT_GE(r.std, 0.0);
    std::size_t total = 0;
    for (auto c : r.histogram.counts) {
        total += c;
    }
    EXPECT_EQ(total, 200u);
    EXPECT_EQ(r.histogram.counts.size(), kHistogramBins);
    EXPECT_EQ(r.histogram.edges.size(), kHistogramBins + 1);
    EXPECT_NEAR(r.sigmas_from_one, std::abs(r.mean - 1.0) / r.std, 1e-12);
}

TEST(Bootstrap, ZeroSpreadHistogramAndSigmas) {
    const std::vector<double> values(30, 0.9);
    const auto h = make_histogram(values, 0.9, 0.0);
    EXPECT_NEAR(h.edges.front(), 0.4, 1e-12);
    EXPECT_NEAR(h.edges.back(), 1.4, 1e-12);
    EXPECT_EQ(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}), 30u);
    EXPECT_EQ(h.counts[25], 30u);
}

TEST(Bootstrap, DeterministicAndThreadCountIndependent) {
    const auto d = generate_dataset(pure_params(6.0, 0.3), 0.3, 20000, 9);
    const auto a = bootstrap(d, Kind::BtoA, 64, 5000, 11, 1);
    const auto b = bootstrap(d, Kind::BtoA, 64, 5000, 11, 4);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.std, b.std);
    EXPECT_EQ(a.histogram.counts, b.histogram.counts);
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
    const auto c = bootstrap(d, Kind::BtoA, 64, 5000, 12, 1);
    EXPECT_NE(a.mean, c.mean);
}

TEST(Bootstrap, CentredOnFullDataEstimate) {
    const auto d = generate_dataset(pure_params(8.0), 0.4, 100000, 13);
    for (auto kind : {Kind::AtoB, Kind::BtoA}) {
        const auto r = bootstrap(d, kind, 300, 20000, 14);
        EXPECT_NEAR(r.mean, product_estimate(d, kind), 3.0 * r.std);
    }
}

TEST(Bootstrap, SpreadScalesWithInverseRootResampleSize) {
    const auto d = generate_dataset(pure_params(8.0), 0.4, 100000, 15);
    double ratio_sum = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto small = bootstrap(d, Kind::AtoB, 200, 10000, 100 + seed);
        const auto large = bootstrap(d, Kind::AtoB, 200, 40000, 200 + seed);
        ratio_sum += small.std / large.std;
    }
    EXPECT_NEAR(ratio_sum / 5.0, 2.0, 0.4);
}

TEST(Bootstrap, ArgumentChecks) {
    const auto d = generate_dataset(pure_params(3.0), 0.0, 100, 16);
    EXPECT_THROW(bootstrap(d, Kind::AtoB, 1, 10, 0), InvalidArgument);
    EXPECT_THROW(bootstrap(d, Kind::AtoB, 10, 1, 0), InvalidArgument);
    EXPECT_THROW(bootstrap(d, Kind::AtoB, 10, 101, 0), InvalidArgument);
}

TEST(BootstrapExport, JsonFieldsAndHistogramCsv) {
    const auto d = generate_dataset(pure_params(3.0), 0.0, 1000, 17);
    const auto r = bootstrap(d, Kind::AtoB, 20, 500, 18);
    const auto j = to_json(r);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) {
        keys.push_back(it.key());
    }
    EXPECT_EQ(keys, (std::vector<std::string>{"mean", "std", "sigmas_from_one", "resamples",
                                              "resample_size", "histogram"}));
    EXPECT_EQ(j["histogram"]["edges"].size(), kHistogramBins + 1);
    EXPECT_EQ(j["mean"].get<double>(), r.mean);
    const auto csv = histogram_csv(r.histogram);
    EXPECT_EQ(csv.rfind("edge_low,edge_high,count\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), static_cast<long>(kHistogramBins + 1));
}
