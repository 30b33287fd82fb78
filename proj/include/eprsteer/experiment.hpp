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
 * @file experiment.hpp
 * Parametric model of the one-way steering setup:
 *
 *   squeezer (mode A) --+-- balanced BS --> A --[eta_A]--> homodyne A
 *   vacuum   (mode B) --+               --> B --vBS(1-v)--[eta_B]--> homodyne B
 *                                                  |
 *                                      second vacuum / Charlie (mode C)
 *
 * The variable beam splitter admixes a power fraction v of a second vacuum
 * into B. In the bipartite model its other output is discarded (a loss of
 * 1-v); the tripartite model keeps it as mode C.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gaussian.hpp"
#include "io.hpp"
#include "steering.hpp"

namespace eprsteer {

struct SetupParams {
    SqueezerModel squeezer{};
    double eta_A = 1.0;
    double eta_B = 1.0;
    /// Detection efficiency for Charlie in the tripartite model.
    double eta_C = 1.0;
    double vacuum_fraction = 0.0;

    void validate() const {
        const auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
        if (!in_unit(eta_A) || !in_unit(eta_B) || !in_unit(eta_C)) {
            throw InvalidArgument("SetupParams: efficiencies must lie in [0, 1]");
        }
        if (!in_unit(vacuum_fraction)) {
            throw InvalidArgument("SetupParams: vacuum_fraction must lie in [0, 1]");
        }
        if (squeezer.antisqueezing_dB < squeezer.squeezing_dB) {
            throw UnphysicalModel("SetupParams: antisqueezing_dB below squeezing_dB");
        }
    }

    [[nodiscard]] SetupParams with_vacuum(double v) const {
        SetupParams p = *this;
        p.vacuum_fraction = v;
        return p;
    }
};

inline GaussianState build_bipartite(const SetupParams &params) {
    params.validate();
    GaussianState s = tensor_product(squeezed_vacuum(params.squeezer), vacuum_state(1));
    s = apply_beam_splitter(s, 0, 1, 0.5);
    s = apply_loss(s, 1, 1.0 - params.vacuum_fraction);
    s = apply_loss(s, 0, params.eta_A);
    s = apply_loss(s, 1, params.eta_B);
    return s;
}

/// Modes (A, B, C) = (0, 1, 2); C is the second vBS output.
inline GaussianState build_tripartite(const SetupParams &params) {
    params.validate();
    GaussianState s = tensor_product(squeezed_vacuum(params.squeezer), vacuum_state(2));
    s = apply_beam_splitter(s, 0, 1, 0.5);
    s = apply_beam_splitter(s, 1, 2, 1.0 - params.vacuum_fraction);
    s = apply_loss(s, 0, params.eta_A);
    s = apply_loss(s, 1, params.eta_B);
    s = apply_loss(s, 2, params.eta_C);
    return s;
}

struct SweepRow {
    double v = 0.0;
    double product_AtoB = 0.0;
    double product_BtoA = 0.0;
    StateClass state_class = StateClass::Separable;
};

/// Analytic evaluation per grid point; rows are independent of each other.
inline std::vector<SweepRow> sweep_vacuum(const SetupParams &params,
                                          const std::vector<double> &v_grid) {
    std::vector<SweepRow> rows;
    rows.reserve(v_grid.size());
    for (double v : v_grid) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw InvalidArgument("sweep_vacuum: grid value outside [0, 1]");
        }
        const GaussianState s = build_bipartite(params.with_vacuum(v));
        rows.push_back({v, reid_product(s, SteeringDirection::a_to_b()).product,
                        reid_product(s, SteeringDirection::b_to_a()).product, classify(s)});
    }
    return rows;
}

/// `steps` equally spaced points from `start` to `end` inclusive (one point if steps == 1).
inline std::vector<double> linear_grid(double start, double end, std::size_t steps) {
    if (steps == 0) {
        throw InvalidArgument("linear_grid: steps must be >= 1");
    }
    std::vector<double> grid(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        grid[k] = steps == 1 ? start
                             : start + (end - start) * static_cast<double>(k) /
                                           static_cast<double>(steps - 1);
    }
    return grid;
}

/// Points in the pre-bisection scan of the threshold finders.
inline constexpr std::size_t kThresholdScanPoints = 101;

struct Crossing {
    std::optional<double> value;
    bool multiple = false;
};

/**
 * Smallest v in [0, 1] where `certified(v)` switches from true to false,
 * located on a 101-point scan and refined by bisection to width `tol`.
 */
inline Crossing find_loss_of_certification(const std::function<bool(double)> &certified,
                                           double tol) {
    Crossing out;
    const auto grid = linear_grid(0.0, 1.0, kThresholdScanPoints);
    bool prev = certified(grid[0]);
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const bool cur = certified(grid[k]);
        if (prev && !cur) {
            if (out.value) {
                out.multiple = true;
                break;
            }
            double lo = grid[k - 1];
            double hi = grid[k];
            while (hi - lo > tol) {
                const double mid = 0.5 * (lo + hi);
                (certified(mid) ? lo : hi) = mid;
            }
            out.value = 0.5 * (lo + hi);
        }
        prev = cur;
    }
    return out;
}

struct ThresholdReport {
    std::optional<double> v_BtoA_lost;
    std::optional<double> v_AtoB_lost;
    bool multiple_BtoA = false;
    bool multiple_AtoB = false;
    /// [v_BtoA_lost, v_AtoB_lost] when both exist and are ordered.
    std::optional<std::pair<double, double>> one_way_window;
};

inline ThresholdReport find_thresholds(const SetupParams &params, double tol_v) {
    if (!(tol_v > 0.0)) {
        throw InvalidArgument("find_thresholds: tol_v must be positive");
    }
    const auto certified = [&params](SteeringDirection dir) {
        return [&params, dir](double v) {
            return reid_product(build_bipartite(params.with_vacuum(v)), dir).certified;
        };
    };
    ThresholdReport r;
    const auto ba = find_loss_of_certification(certified(SteeringDirection::b_to_a()), tol_v);
    const auto ab = find_loss_of_certification(certified(SteeringDirection::a_to_b()), tol_v);
    r.v_BtoA_lost = ba.value;
    r.multiple_BtoA = ba.multiple;
    r.v_AtoB_lost = ab.value;
    r.multiple_AtoB = ab.multiple;
    if (r.v_BtoA_lost && r.v_AtoB_lost && *r.v_BtoA_lost <= *r.v_AtoB_lost) {
        r.one_way_window = std::make_pair(*r.v_BtoA_lost, *r.v_AtoB_lost);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Parameter fitting

/// Reid products at `v` (default 0.5) and optionally the B->A threshold.
struct FitTargets {
    double product_AtoB = 0.0;
    double product_BtoA = 0.0;
    std::optional<double> v_BtoA_lost;
    double squeezing_dB = 10.2;
    double v = 0.5;
};

struct FitBounds {
    double antisqueezing_max_dB = 25.0;
    double eta_min = 0.5;
    double eta_max = 1.0;
};

struct FitResult {
    SetupParams params;
    double residual = 0.0;
    double product_AtoB = 0.0;
    double product_BtoA = 0.0;
    std::optional<double> v_BtoA_lost;
};

/// Residual above which fit_params reports failure.
inline constexpr double kFitResidualLimit = 1e-2;

namespace detail {

/// Sum of squared relative residuals for free parameters (anti_dB, eta_A, eta_B).
struct FitObjective {
    const FitTargets &targets;

    [[nodiscard]] SetupParams params(const std::array<double, 3> &x) const {
        SetupParams p;
        p.squeezer = {targets.squeezing_dB, x[0], Quadrature::X};
        p.eta_A = x[1];
        p.eta_B = x[2];
        p.eta_C = x[2];
        p.vacuum_fraction = targets.v;
        return p;
    }

    [[nodiscard]] double products_only(const SetupParams &p, double &ab, double &ba) const {
        const GaussianState s = build_bipartite(p);
        ab = reid_product(s, SteeringDirection::a_to_b()).product;
        ba = reid_product(s, SteeringDirection::b_to_a()).product;
        const double ra = (ab - targets.product_AtoB) / targets.product_AtoB;
        const double rb = (ba - targets.product_BtoA) / targets.product_BtoA;
        return ra * ra + rb * rb;
    }

    /// B->A loss threshold by plain bisection on [0, 1]. B->A is never
    /// certified at v = 1 (Bob holds vacuum); no steering at v = 0 scores as 0.
    [[nodiscard]] double threshold(const SetupParams &p) const {
        const auto certified = [&p](double v) {
            return reid_product(build_bipartite(p.with_vacuum(v)), SteeringDirection::b_to_a())
                .certified;
        };
        if (!certified(0.0)) {
            return 0.0;
        }
        double lo = 0.0;
        double hi = 1.0;
        while (hi - lo > 1e-11) {
            const double mid = 0.5 * (lo + hi);
            (certified(mid) ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    [[nodiscard]] double operator()(const std::array<double, 3> &x) const {
        double ab = 0.0;
        double ba = 0.0;
        const SetupParams p = params(x);
        double r = products_only(p, ab, ba);
        if (targets.v_BtoA_lost) {
            const double rv = (threshold(p) - *targets.v_BtoA_lost) / *targets.v_BtoA_lost;
            r += rv * rv;
        }
        return r;
    }
};

} // namespace detail

/**
 * Fits (antisqueezing_dB, eta_A, eta_B) with squeezing_dB held at the
 * target value. Coarse grid search over the bounds followed by a compass
 * (pattern) search. eta_C is set equal to eta_B. Throws FitFailed when the
 * best residual exceeds kFitResidualLimit.
 */
inline FitResult fit_params(const FitTargets &targets, const FitBounds &bounds = {}) {
    const auto finite_positive = [](double x) { return std::isfinite(x) && x > 0.0; };
    if (!finite_positive(targets.product_AtoB) || !finite_positive(targets.product_BtoA) ||
        (targets.v_BtoA_lost && !finite_positive(*targets.v_BtoA_lost))) {
        throw InvalidArgument("fit_params: targets must be finite and positive");
    }
    if (!(targets.squeezing_dB >= 0.0 && targets.squeezing_dB <= 20.0) ||
        !(bounds.antisqueezing_max_dB >= targets.squeezing_dB &&
          bounds.antisqueezing_max_dB <= 25.0) ||
        !(bounds.eta_min >= 0.5 && bounds.eta_min <= bounds.eta_max && bounds.eta_max <= 1.0)) {
        throw InvalidArgument("fit_params: bounds outside the admissible ranges");
    }
    const detail::FitObjective objective{targets};
    const std::array<double, 3> lower{targets.squeezing_dB, bounds.eta_min, bounds.eta_min};
    const std::array<double, 3> upper{bounds.antisqueezing_max_dB, bounds.eta_max, bounds.eta_max};

    // Coarse grid on the products alone; the threshold term is only added
    // where the products are already close.
    constexpr std::size_t kGrid = 21;
    std::array<double, 3> best{};
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < kGrid; ++i) {
        for (std::size_t j = 0; j < kGrid; ++j) {
            for (std::size_t k = 0; k < kGrid; ++k) {
                const std::array<double, 3> x{
                    lower[0] + (upper[0] - lower[0]) * static_cast<double>(i) / (kGrid - 1),
                    lower[1] + (upper[1] - lower[1]) * static_cast<double>(j) / (kGrid - 1),
                    lower[2] + (upper[2] - lower[2]) * static_cast<double>(k) / (kGrid - 1)};
                double ab = 0.0;
                double ba = 0.0;
                double value = objective.products_only(objective.params(x), ab, ba);
                if (value >= best_value) {
                    continue;
                }
                if (targets.v_BtoA_lost && value < 0.05) {
                    value = objective(x);
                }
                if (value < best_value) {
                    best_value = value;
                    best = x;
                }
            }
        }
    }
    best_value = objective(best);

    // Compass search in coordinates scaled to the box.
    std::array<double, 3> step{};
    for (std::size_t d = 0; d < 3; ++d) {
        step[d] = (upper[d] - lower[d]) / (kGrid - 1);
    }
    const double min_step = 1e-12;
    while (*std::max_element(step.begin(), step.end()) > min_step && best_value > 0.0) {
        bool improved = false;
        for (std::size_t d = 0; d < 3; ++d) {
            for (double sign : {1.0, -1.0}) {
                auto trial = best;
                trial[d] = std::clamp(trial[d] + sign * step[d], lower[d], upper[d]);
                if (trial[d] == best[d]) {
                    continue;
                }
                const double value = objective(trial);
                if (value < best_value) {
                    best_value = value;
                    best = trial;
                    improved = true;
                }
            }
        }
        if (!improved) {
            for (auto &s : step) {
                s *= 0.5;
            }
        }
    }

    FitResult result;
    result.params = objective.params(best);
    result.residual = best_value;
    static_cast<void>(
        objective.products_only(result.params, result.product_AtoB, result.product_BtoA));
    if (targets.v_BtoA_lost) {
        result.v_BtoA_lost = objective.threshold(result.params);
    }
    if (!(result.residual <= kFitResidualLimit)) {
        std::ostringstream os;
        os << "fit_params: residual " << result.residual << " above " << kFitResidualLimit
           << " (best: antisqueezing_dB=" << best[0] << ", eta_A=" << best[1]
           << ", eta_B=" << best[2] << ", products " << result.product_AtoB << " / "
           << result.product_BtoA << " vs targets " << targets.product_AtoB << " / "
           << targets.product_BtoA << ")";
        throw FitFailed(os.str());
    }
    return result;
}

// ---------------------------------------------------------------------------
// Single squeezed mode shared between two parties

struct SplitThreshold {
    double threshold = 0.0;
    /// False when B cannot steer C even without added vacuum.
    bool steerable_at_zero = false;
};

/// Squeezed mode with vacuum fraction f, split on a balanced BS into (B, C).
inline GaussianState build_single_mode_split(const SqueezerModel &squeezer, double f) {
    GaussianState s = apply_loss(squeezed_vacuum(squeezer), 0, 1.0 - f);
    s = tensor_product(s, vacuum_state(1));
    return apply_beam_splitter(s, 0, 1, 0.5);
}

/// Largest vacuum fraction f for which B still steers C.
inline SplitThreshold single_mode_split_threshold(const SqueezerModel &squeezer, double tol) {
    if (!(tol > 0.0)) {
        throw InvalidArgument("single_mode_split_threshold: tol must be positive");
    }
    const auto certified = [&squeezer](double f) {
        return reid_product(build_single_mode_split(squeezer, f), SteeringDirection::a_to_b())
            .certified;
    };
    if (!certified(0.0)) {
        return {0.0, false};
    }
    const auto grid = linear_grid(0.0, 1.0, kThresholdScanPoints);
    std::size_t last = 0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (certified(grid[k])) {
            last = k;
        }
    }
    if (last + 1 == grid.size()) {
        return {1.0, true};
    }
    double lo = grid[last];
    double hi = grid[last + 1];
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (certified(mid) ? lo : hi) = mid;
    }
    return {0.5 * (lo + hi), true};
}

// ---------------------------------------------------------------------------
// Parameter files

/**
 * Flat key=value parameter file. Keys: squeezing_db (required),
 * antisqueezing_db (default: squeezing_db), eta_a, eta_b (default 1),
 * eta_c (default: eta_b), vacuum_fraction (default 0).
 */
inline SetupParams parse_params(std::string_view text) {
    const auto kv = io::parse_key_values(
        text, {"squeezing_db", "antisqueezing_db", "eta_a", "eta_b", "eta_c", "vacuum_fraction"});
    const auto get = [&kv](std::string_view key) -> std::optional<double> {
        auto it = kv.find(key);
        if (it == kv.end()) {
            return std::nullopt;
        }
        return io::parse_double(it->second, key);
    };
    SetupParams p;
    const auto sq = get("squeezing_db");
    if (!sq) {
        throw InvalidInput("parameter file: missing squeezing_db");
    }
    p.squeezer.squeezing_dB = *sq;
    p.squeezer.antisqueezing_dB = get("antisqueezing_db").value_or(*sq);
    p.eta_A = get("eta_a").value_or(1.0);
    p.eta_B = get("eta_b").value_or(1.0);
    p.eta_C = get("eta_c").value_or(p.eta_B);
    p.vacuum_fraction = get("vacuum_fraction").value_or(0.0);
    try {
        p.validate();
        static_cast<void>(squeezed_vacuum(p.squeezer));
    } catch (const std::exception &e) {
        throw InvalidInput(std::string("parameter file: ") + e.what());
    }
    return p;
}

inline std::string format_params(const SetupParams &p) {
    std::ostringstream os;
    os << "squeezing_db = " << io::format_roundtrip(p.squeezer.squeezing_dB) << '\n'
       << "antisqueezing_db = " << io::format_roundtrip(p.squeezer.antisqueezing_dB) << '\n'
       << "eta_a = " << io::format_roundtrip(p.eta_A) << '\n'
       << "eta_b = " << io::format_roundtrip(p.eta_B) << '\n'
       << "eta_c = " << io::format_roundtrip(p.eta_C) << '\n'
       << "vacuum_fraction = " << io::format_roundtrip(p.vacuum_fraction) << '\n';
    return os.str();
}

/// Keys: product_a_to_b, product_b_to_a (required), v_b_to_a_lost, squeezing_db, v.
inline FitTargets parse_targets(std::string_view text) {
    const auto kv = io::parse_key_values(
        text, {"product_a_to_b", "product_b_to_a", "v_b_to_a_lost", "squeezing_db", "v"});
    FitTargets t;
    const auto need = [&kv](std::string_view key) {
        auto it = kv.find(key);
        if (it == kv.end()) {
            throw InvalidInput("targets file: missing " + std::string(key));
        }
        return io::parse_double(it->second, key);
    };
    t.product_AtoB = need("product_a_to_b");
    t.product_BtoA = need("product_b_to_a");
    if (auto it = kv.find("v_b_to_a_lost"); it != kv.end()) {
        t.v_BtoA_lost = io::parse_double(it->second, "v_b_to_a_lost");
    }
    if (auto it = kv.find("squeezing_db"); it != kv.end()) {
        t.squeezing_dB = io::parse_double(it->second, "squeezing_db");
    }
    if (auto it = kv.find("v"); it != kv.end()) {
        t.v = io::parse_double(it->second, "v");
    }
    return t;
}

} // namespace eprsteer
