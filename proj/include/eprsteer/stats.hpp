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
 * @file stats.hpp
 * Plug-in conditional-variance products from homodyne samples and their
 * bootstrap distribution.
 *
 * Bootstrap streams: resample r, setting s draws its indices from
 * make_stream(seed ^ splitmix64(r) ^ setting_salt(s)), so results do not
 * depend on how resamples are distributed over threads.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "homodyne.hpp"
#include "io.hpp"
#include "steering.hpp"

namespace eprsteer {

/// Running sums of centered pair moments.
struct PairMoments {
    double center_a = 0.0;
    double center_b = 0.0;
    double n = 0.0;
    double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;

    void add(double a, double b) {
        const double da = a - center_a;
        const double db = b - center_b;
        n += 1.0;
        sa += da;
        sb += db;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    // Bessel-corrected (n - 1) moments.
    [[nodiscard]] double var_a() const { return (saa - sa * sa / n) / (n - 1.0); }
    [[nodiscard]] double var_b() const { return (sbb - sb * sb / n) / (n - 1.0); }
    [[nodiscard]] double cov_ab() const { return (sab - sa * sb / n) / (n - 1.0); }

    /// Variance of the steered variable conditioned on the steering one.
    [[nodiscard]] double conditional_variance(SteeringDirection::Kind kind) const {
        if (n < 2.0) {
            throw DegenerateData("sample_conditional_variance: need at least 2 pairs");
        }
        // A steers B: condition b on a.
        const double vc = kind == SteeringDirection::Kind::AtoB ? var_a() : var_b();
        const double vt = kind == SteeringDirection::Kind::AtoB ? var_b() : var_a();
        if (!(vc > 0.0)) {
            throw DegenerateData("sample_conditional_variance: conditioning variance is zero");
        }
        const double c = cov_ab();
        return vt - c * c / vc;
    }
};

inline double mean_of(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) {
        s += v;
    }
    return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

/**
 * Plug-in estimate Vhat(t) - Covhat(t, c)^2 / Vhat(c), where (t, c) = (b, a)
 * for A->B and (a, b) for B->A.
 */
inline double sample_conditional_variance(std::span<const double> a, std::span<const double> b,
                                          SteeringDirection::Kind kind) {
    if (a.size() != b.size()) {
        throw InvalidArgument("sample_conditional_variance: column length mismatch");
    }
    PairMoments m;
    m.center_a = mean_of(a);
    m.center_b = mean_of(b);
    for (std::size_t k = 0; k < a.size(); ++k) {
        m.add(a[k], b[k]);
    }
    return m.conditional_variance(kind);
}

inline double sample_conditional_variance(const SamplePairs &pairs, SteeringDirection::Kind kind) {
    return sample_conditional_variance(pairs.a, pairs.b, kind);
}

inline void require_settings(const Dataset &d) {
    if (d.xx.size() == 0 || d.pp.size() == 0) {
        throw InvalidInput("dataset is missing the XX or PP setting");
    }
}

/// Product of the XX and PP conditional variances.
inline double product_estimate(const Dataset &d, SteeringDirection::Kind kind) {
    require_settings(d);
    return sample_conditional_variance(d.xx, kind) * sample_conditional_variance(d.pp, kind);
}

struct Histogram {
    std::vector<double> edges;
    std::vector<std::size_t> counts;
};

struct BootstrapResult {
    double mean = 0.0;
    double std = 0.0;
    /// |mean - 1| / std; infinite when std == 0 and mean != 1.
    double sigmas_from_one = 0.0;
    Histogram histogram;
    std::size_t resamples = 0;
    std::size_t resample_size = 0;
};

inline constexpr std::size_t kHistogramBins = 50;

/// 50 uniform bins over mean +- 5 std (+- 0.5 when std == 0); outliers go to the end bins.
inline Histogram make_histogram(const std::vector<double> &values, double mean, double std) {
    const double half = std > 0.0 ? 5.0 * std : 0.5;
    Histogram h;
    h.edges.resize(kHistogramBins + 1);
    for (std::size_t k = 0; k <= kHistogramBins; ++k) {
        h.edges[k] = mean - half + 2.0 * half * static_cast<double>(k) / kHistogramBins;
    }
    h.counts.assign(kHistogramBins, 0);
    const double width = 2.0 * half / kHistogramBins;
    for (double v : values) {
        const double pos = std::floor((v - (mean - half)) / width);
        const auto bin = static_cast<std::size_t>(
            std::clamp(pos, 0.0, static_cast<double>(kHistogramBins - 1)));
        ++h.counts[bin];
    }
    return h;
}

namespace detail {

inline PairMoments resample_moments(const SamplePairs &pairs, std::size_t m, std::uint64_t key,
                                    double center_a, double center_b) {
    auto rng = make_stream(key);
    std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
    PairMoments acc;
    acc.center_a = center_a;
    acc.center_b = center_b;
    const double *a = pairs.a.data();
    const double *b = pairs.b.data();
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t i = pick(rng);
        acc.add(a[i], b[i]);
    }
    return acc;
}

} // namespace detail

/**
 * Bootstrap of product_estimate: `resamples` rounds, each drawing
 * `resample_size` pairs with replacement from XX and PP independently.
 * Deterministic in `seed` regardless of `threads`.
 */
inline BootstrapResult bootstrap(const Dataset &d, SteeringDirection::Kind kind,
                                 std::size_t resamples, std::size_t resample_size,
                                 std::uint64_t seed, unsigned threads = 0) {
    require_settings(d);
    if (resamples < 2 || resample_size < 2) {
        throw InvalidArgument("bootstrap: resamples and resample_size must be >= 2");
    }
    if (resample_size > d.xx.size() || resample_size > d.pp.size()) {
        throw InvalidArgument("bootstrap: resample_size exceeds the per-setting sample count");
    }
    const double ca_x = mean_of(d.xx.a), cb_x = mean_of(d.xx.b);
    const double ca_p = mean_of(d.pp.a), cb_p = mean_of(d.pp.b);

    std::vector<double> products(resamples);
    const auto run = [&](std::size_t r) {
        const std::uint64_t base = seed ^ splitmix64(r);
        const auto mx = detail::resample_moments(d.xx, resample_size,
                                                 base ^ setting_salt(Setting::XX), ca_x, cb_x);
        const auto mp = detail::resample_moments(d.pp, resample_size,
                                                 base ^ setting_salt(Setting::PP), ca_p, cb_p);
        products[r] = mx.conditional_variance(kind) * mp.conditional_variance(kind);
    };

    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, resamples));
    if (threads <= 1) {
        for (std::size_t r = 0; r < resamples; ++r) {
            run(r);
        }
    } else {
        std::vector<std::jthread> pool;
        std::vector<std::exception_ptr> errors(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t r = t; r < resamples; r += threads) {
                        run(r);
                    }
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        pool.clear();
        for (auto &e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
    }

    BootstrapResult out;
    out.resamples = resamples;
    out.resample_size = resample_size;
    out.mean = mean_of(products);
    double ss = 0.0;
    for (double p : products) {
        ss += (p - out.mean) * (p - out.mean);
    }
    out.std = std::sqrt(ss / static_cast<double>(resamples - 1));
    const double dev = std::abs(out.mean - 1.0);
    out.sigmas_from_one =
        out.std > 0.0 ? dev / out.std : (dev > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    out.histogram = make_histogram(products, out.mean, out.std);
    return out;
}

/// JSON export; non-finite numbers become null.
inline nlohmann::ordered_json to_json(const BootstrapResult &r) {
    nlohmann::ordered_json j;
    j["mean"] = r.mean;
    j["std"] = r.std;
    j["sigmas_from_one"] = r.sigmas_from_one;
    j["resamples"] = r.resamples;
    j["resample_size"] = r.resample_size;
    j["histogram"]["edges"] = r.histogram.edges;
    j["histogram"]["counts"] = r.histogram.counts;
    return j;
}

/// Histogram as CSV rows `edge_low,edge_high,count`.
inline std::string histogram_csv(const Histogram &h) {
    std::string out = "edge_low,edge_high,count\n";
    for (std::size_t k = 0; k < h.counts.size(); ++k) {
        out += io::format_number(h.edges[k]) + ',' + io::format_number(h.edges[k + 1]) + ',' +
               std::to_string(h.counts[k]) + '\n';
    }
    return out;
}

} // namespace eprsteer
