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
#include <random>

#include <gtest/gtest.h>

#include <eprsteer/homodyne.hpp>
#include <eprsteer/random_state.hpp>
#include <eprsteer/stats.hpp>

using namespace eprsteer;

namespace {

struct Moments2 {
    double va, vb, cab, ma, mb;
};

/// Two-pass sample moments (n - 1 denominators).
Moments2 moments(const SamplePairs &s) {
    const double n = static_cast<double>(s.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        ma += s.a[k];
        mb += s.b[k];
    }
    ma /= n;
    mb /= n;
    double va = 0.0, vb = 0.0, c = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        va += (s.a[k] - ma) * (s.a[k] - ma);
        vb += (s.b[k] - mb) * (s.b[k] - mb);
        c += (s.a[k] - ma) * (s.b[k] - mb);
    }
    return {va / (n - 1), vb / (n - 1), c / (n - 1), ma, mb};
}

SetupParams pure_params(double dB, double v = 0.0) {
    SetupParams p;
    p.squeezer = SqueezerModel::pure(dB);
    p.vacuum_fraction = v;
    return p;
}

} // namespace

TEST(Sampling, VacuumStatistics) {
    const auto s = sample_joint_quadratures(vacuum_state(2), MeasurementSetting::xx(), 100000, 1);
    const auto m = moments(s);
    EXPECT_NEAR(m.va, 1.0, 0.02);
    EXPECT_NEAR(m.vb, 1.0, 0.02);
    EXPECT_NEAR(m.cab, 0.0, 0.02);
}

TEST(Sampling, SplitSqueezedStateCrossCovariance) {
    const auto state = build_bipartite(pure_params(10.2));
    const auto s = sample_joint_quadratures(state, MeasurementSetting::xx(), 1000000, 2);
    EXPECT_NEAR(moments(s).cab, 0.452, 0.005);
}

TEST(Sampling, SameSeedIsBitIdentical) {
    const auto state = build_bipartite(pure_params(6.0, 0.3));
    const auto a = sample_joint_quadratures(state, MeasurementSetting::pp(), 1000, 99);
    const auto b = sample_joint_quadratures(state, MeasurementSetting::pp(), 1000, 99);
    const auto c = sample_joint_quadratures(state, MeasurementSetting::pp(), 1000, 100);
    EXPECT_EQ(a.a, b.a);
    EXPECT_EQ(a.b, b.b);
    EXPECT_NE(a.a, c.a);
}

TEST(Sampling, RejectsUnphysicalAndEmpty) {
    const GaussianState bad(Vector::Zero(4), 0.5 * Matrix::Identity(4, 4));
    EXPECT_THROW(sample_joint_quadratures(bad, MeasurementSetting::xx(), 10, 0), InvalidArgument);
    EXPECT_THROW(sample_joint_quadratures(vacuum_state(2), MeasurementSetting::xx(), 0, 0),
                 InvalidArgument);
    EXPECT_THROW(sample_joint_quadratures(vacuum_state(3), MeasurementSetting::xx(), 10, 0),
                 InvalidArgument);
}

TEST(Sampling, MomentsConvergeToAnalyticCovariance) {
    std::mt19937_64 rng(30);
    for (std::size_t n : {1000u, 10000u, 100000u}) {
        for (int trial = 0; trial < 5; ++trial) {
            const auto state = random_two_mode_state(rng, true);
            const MeasurementSetting setting{0.3 * trial, 1.1 * trial};
            const auto [mean, cov] = joint_quadrature_moments(state, setting);
            const auto m = moments(sample_joint_quadratures(state, setting, n, 1000 + trial));
            const double vmax = std::max(cov(0, 0), cov(1, 1));
            // 5 sigma-equivalent bound on each second moment.
            const double bound = 5.0 * std::sqrt(2.0 / static_cast<double>(n)) * vmax;
            EXPECT_NEAR(m.va, cov(0, 0), bound);
            EXPECT_NEAR(m.vb, cov(1, 1), bound);
            EXPECT_NEAR(m.cab, cov(0, 1), bound);
            EXPECT_NEAR(m.ma, mean(0), 5.0 * std::sqrt(cov(0, 0) / static_cast<double>(n)));
            EXPECT_NEAR(m.mb, mean(1), 5.0 * std::sqrt(cov(1, 1) / static_cast<double>(n)));
        }
    }
}

TEST(Sampling, PPSettingEqualsXXOnRotatedState) {
    const auto state = build_bipartite(pure_params(8.0, 0.2));
    const auto rotated = apply_phase_rotation(
        apply_phase_rotation(state, 0, std::numbers::pi / 2.0), 1, std::numbers::pi / 2.0);
    const auto [m1, c1] = joint_quadrature_moments(state, MeasurementSetting::pp());
    const auto [m2, c2] = joint_quadrature_moments(rotated, MeasurementSetting::xx());
    EXPECT_LT((c1 - c2).cwiseAbs().maxCoeff(), 1e-12);

    const std::size_t n = 200000;
    const auto a = moments(sample_joint_quadratures(state, MeasurementSetting::pp(), n, 5));
    const auto b = moments(sample_joint_quadratures(rotated, MeasurementSetting::xx(), n, 6));
    const double bound = 5.0 * std::sqrt(2.0 / n) * std::max(c1(0, 0), c1(1, 1)) * std::sqrt(2.0);
    EXPECT_NEAR(a.va, b.va, bound);
    EXPECT_NEAR(a.vb, b.vb, bound);
    EXPECT_NEAR(a.cab, b.cab, bound);
}

TEST(Dataset, MinimalDatasetIsValid) {
    const auto d = generate_dataset(pure_params(10.2), 0.0, 2, 3);
    EXPECT_EQ(d.xx.size(), 2u);
    EXPECT_EQ(d.pp.size(), 2u);
    EXPECT_TRUE(std::isfinite(moments(d.xx).va));
    EXPECT_THROW(generate_dataset(pure_params(10.2), 0.0, 1, 3), InvalidArgument);
}

TEST(Dataset, FullAdmixtureMakesBobVacuum) {
    const std::size_t n = 100000;
    const auto d = generate_dataset(pure_params(10.2), 1.0, n, 4);
    const double tol = 4.0 / std::sqrt(static_cast<double>(n));
    EXPECT_NEAR(moments(d.xx).vb, 1.0, tol);
    EXPECT_NEAR(moments(d.pp).vb, 1.0, tol);
}

TEST(Dataset, DeterministicAndSettingsUseDistinctStreams) {
    const auto a = generate_dataset(pure_params(5.0), 0.4, 500, 77);
    const auto b = generate_dataset(pure_params(5.0), 0.4, 500, 77);
    EXPECT_EQ(format_dataset_csv(a), format_dataset_csv(b));
    EXPECT_EQ(format_dataset_metadata(a), format_dataset_metadata(b));
    const auto xx_alone = sample_joint_quadratures(build_bipartite(pure_params(5.0, 0.4)),
                                                   MeasurementSetting::xx(), 500,
                                                   77 ^ setting_salt(Setting::XX));
    EXPECT_EQ(xx_alone.a, a.xx.a);
}

TEST(DatasetFile, CsvParsesBackExactly) {
    const auto d = generate_dataset(pure_params(7.0), 0.3, 1000, 8);
    const auto text = format_dataset_csv(d);
    EXPECT_EQ(text.substr(0, 12), "setting,a,b\n");
    const auto back = parse_dataset_csv(text);
    EXPECT_EQ(back.xx.a, d.xx.a);
    EXPECT_EQ(back.xx.b, d.xx.b);
    EXPECT_EQ(back.pp.a, d.pp.a);
    EXPECT_EQ(back.pp.b, d.pp.b);
    EXPECT_EQ(back.n_per_setting, 1000u);
}

TEST(DatasetFile, MalformedInputs) {
    EXPECT_THROW(parse_dataset_csv("a,b\n1,2\n"), InvalidInput);
    EXPECT_THROW(parse_dataset_csv("setting,a,b\nXY,1,2\n"), InvalidInput);
    EXPECT_THROW(parse_dataset_csv("setting,a,b\nXX,1\n"), InvalidInput);
    EXPECT_THROW(parse_dataset_csv("setting,a,b\nXX,1,nan\n"), InvalidInput);
    EXPECT_THROW(parse_dataset_csv("setting,a,b\nXX,1,zz\n"), InvalidInput);
}

TEST(DatasetFile, MetadataSidecar) {
    const auto d = generate_dataset(pure_params(7.0), 0.25, 10, 12345);
    const auto meta = format_dataset_metadata(d);
    EXPECT_NE(meta.find("seed = 12345\n"), std::string::npos);
    EXPECT_NE(meta.find("vacuum_fraction = 0.25\n"), std::string::npos);
    EXPECT_NE(meta.find("n_per_setting = 10\n"), std::string::npos);
}
