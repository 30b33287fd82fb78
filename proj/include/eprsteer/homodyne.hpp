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

/**
 * @file homodyne.hpp
 * Seeded synthetic joint homodyne records drawn from a bipartite Gaussian
 * state (A = mode 0, B = mode 1).
 *
 * Seeding: every stream is a std::mt19937_64 seeded with splitmix64 of a
 * derived 64-bit key. A setting stream uses key = seed ^ setting_salt, with
 * salt 0x5858585858585858 for XX and 0x5050505050505050 for PP. Samples are
 * i.i.d. quadrature draws.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "experiment.hpp"
#include "gaussian.hpp"
#include "io.hpp"

namespace eprsteer {

/// splitmix64 finalizer; maps nearby keys to unrelated seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 make_stream(std::uint64_t key) { return std::mt19937_64(splitmix64(key)); }

/// LO phases of Alice and Bob, reduced mod 2*pi.
struct MeasurementSetting {
    double phi_A = 0.0;
    double phi_B = 0.0;

    static constexpr MeasurementSetting xx() { return {0.0, 0.0}; }
    static constexpr MeasurementSetting pp() {
        return {std::numbers::pi / 2.0, std::numbers::pi / 2.0};
    }
};

/// Canonical settings recorded in a Dataset.
enum class Setting { XX = 0, PP = 1 };

inline constexpr std::string_view to_string(Setting s) { return s == Setting::XX ? "XX" : "PP"; }

inline constexpr std::uint64_t setting_salt(Setting s) {
    return s == Setting::XX ? 0x5858585858585858ULL : 0x5050505050505050ULL;
}

inline constexpr MeasurementSetting measurement_for(Setting s) {
    return s == Setting::XX ? MeasurementSetting::xx() : MeasurementSetting::pp();
}

/// Column-split sample pairs (a_k, b_k).
struct SamplePairs {
    std::vector<double> a;
    std::vector<double> b;

    [[nodiscard]] std::size_t size() const { return a.size(); }
};

/**
 * Mean and 2x2 covariance of (x_A(phi_A), x_B(phi_B)) for the given setting.
 */
inline std::pair<Eigen::Vector2d, Eigen::Matrix2d> joint_quadrature_moments(
    const GaussianState &state, const MeasurementSetting &setting) {
    if (state.n_modes() != 2) {
        throw InvalidArgument("joint_quadrature_moments: bipartite state required");
    }
    GaussianState r = apply_phase_rotation(state, 0, setting.phi_A);
    r = apply_phase_rotation(r, 1, setting.phi_B);
    Eigen::Vector2d mean(r.mean()(0), r.mean()(2));
    Eigen::Matrix2d cov;
    cov << r.cov()(0, 0), r.cov()(0, 2), r.cov()(2, 0), r.cov()(2, 2);
    return {mean, cov};
}

/// n i.i.d. draws of the joint homodyne outcomes; deterministic in `seed`.
inline SamplePairs sample_joint_quadratures(const GaussianState &state,
                                            const MeasurementSetting &setting, std::size_t n,
                                            std::uint64_t seed) {
    if (n == 0) {
        throw InvalidArgument("sample_joint_quadratures: n must be >= 1");
    }
    if (!is_physical(state)) {
        throw InvalidArgument("sample_joint_quadratures: state is not physical");
    }
    const auto [mean, cov] = joint_quadrature_moments(state, setting);
    // Cholesky factor [[l11, 0], [l21, l22]]; zero-variance rows are shortcut.
    const double l11 = cov(0, 0) > 0.0 ? std::sqrt(cov(0, 0)) : 0.0;
    const double l21 = l11 > 0.0 ? cov(1, 0) / l11 : 0.0;
    const double l22 = std::sqrt(std::max(0.0, cov(1, 1) - l21 * l21));

    auto rng = make_stream(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    SamplePairs out;
    out.a.resize(n);
    out.b.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double z1 = normal(rng);
        const double z2 = normal(rng);
        out.a[k] = mean(0) + l11 * z1;
        out.b[k] = mean(1) + l21 * z1 + l22 * z2;
    }
    return out;
}

struct Dataset {
    SamplePairs xx;
    SamplePairs pp;
    std::uint64_t seed = 0;
    SetupParams params{};
    std::size_t n_per_setting = 0;

    [[nodiscard]] const SamplePairs &at(Setting s) const { return s == Setting::XX ? xx : pp; }
};

/// Builds the bipartite state at `v` and samples XX and PP on independent streams.
inline Dataset generate_dataset(const SetupParams &params, double v, std::size_t n_per_setting,
                                std::uint64_t seed) {
    if (n_per_setting < 2) {
        throw InvalidArgument("generate_dataset: n_per_setting must be >= 2");
    }
    Dataset d;
    d.params = params.with_vacuum(v);
    d.seed = seed;
    d.n_per_setting = n_per_setting;
    const GaussianState state = build_bipartite(d.params);
    // Each setting owns its stream, so running them concurrently cannot change the output.
    std::thread worker([&] {
        d.pp = sample_joint_quadratures(state, measurement_for(Setting::PP), n_per_setting,
                                        seed ^ setting_salt(Setting::PP));
    });
    d.xx = sample_joint_quadratures(state, measurement_for(Setting::XX), n_per_setting,
                                    seed ^ setting_salt(Setting::XX));
    worker.join();
    return d;
}

// ---------------------------------------------------------------------------
// Files: CSV `setting,a,b` plus a key=value metadata sidecar.

/// Sample values are written in shortest round-trip form so that reading the
/// file back reproduces the in-memory doubles exactly.
inline std::string format_dataset_csv(const Dataset &d) {
    std::string out = "setting,a,b\n";
    out.reserve(out.size() + 48 * (d.xx.size() + d.pp.size()));
    for (Setting s : {Setting::XX, Setting::PP}) {
        const auto &pairs = d.at(s);
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            out += to_string(s);
            out += ',';
            out += io::format_roundtrip(pairs.a[k]);
            out += ',';
            out += io::format_roundtrip(pairs.b[k]);
            out += '\n';
        }
    }
    return out;
}

inline std::string format_dataset_metadata(const Dataset &d) {
    std::ostringstream os;
    os << "seed = " << d.seed << '\n'
       << format_params(d.params) << "n_per_setting = " << d.n_per_setting << '\n';
    return os.str();
}

/// Parses the dataset CSV. Provenance fields other than the sample count stay default.
inline Dataset parse_dataset_csv(std::string_view text) {
    Dataset d;
    const auto nl = text.find('\n');
    if (nl == std::string_view::npos || io::trim(text.substr(0, nl)) != "setting,a,b") {
        throw InvalidInput("dataset: expected header 'setting,a,b'");
    }
    text.remove_prefix(nl + 1);
    std::size_t line_no = 1;
    while (!text.empty()) {
        const auto e = text.find('\n');
        std::string_view line = io::trim(text.substr(0, e));
        text = e == std::string_view::npos ? std::string_view{} : text.substr(e + 1);
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string_view::npos) {
            throw InvalidInput("dataset line " + std::to_string(line_no) + ": expected 3 fields");
        }
        const auto tag = line.substr(0, c1);
        SamplePairs *target = nullptr;
        if (tag == "XX") {
            target = &d.xx;
        } else if (tag == "PP") {
            target = &d.pp;
        } else {
            throw InvalidInput("dataset line " + std::to_string(line_no) + ": unknown setting '" +
                               std::string(tag) + "'");
        }
        const double a = io::parse_double(line.substr(c1 + 1, c2 - c1 - 1), "a");
        const double b = io::parse_double(line.substr(c2 + 1), "b");
        if (!std::isfinite(a) || !std::isfinite(b)) {
            throw InvalidInput("dataset line " + std::to_string(line_no) + ": non-finite value");
        }
        target->a.push_back(a);
        target->b.push_back(b);
    }
    d.n_per_setting = std::min(d.xx.size(), d.pp.size());
    return d;
}

} // namespace eprsteer
