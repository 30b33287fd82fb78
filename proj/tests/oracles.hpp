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

// Closed-form reference values computed without the library's matrix path.

#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace oracle {

inline double db_to_variance(double dB) { return std::pow(10.0, dB / 10.0); }

/// Two-mode covariance of the setup written out entry by entry: a single
/// squeezed mode (vx, vp) split with vacuum, B attenuated by (1 - v) * eta_b
/// and A by eta_a. Cross-covariance sign follows out_B = -in_A/sqrt2 + in_B/sqrt2.
inline Eigen::Matrix4d setup_cov(double vx, double vp, double v, double eta_a, double eta_b) {
    const double tb = (1.0 - v) * eta_b;
    const double ax = eta_a * (vx + 1.0) / 2.0 + 1.0 - eta_a;
    const double ap = eta_a * (vp + 1.0) / 2.0 + 1.0 - eta_a;
    const double bx = tb * (vx + 1.0) / 2.0 + 1.0 - tb;
    const double bp = tb * (vp + 1.0) / 2.0 + 1.0 - tb;
    const double cx = std::sqrt(eta_a * tb) * (1.0 - vx) / 2.0;
    const double cp = std::sqrt(eta_a * tb) * (1.0 - vp) / 2.0;
    Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
    g(0, 0) = ax;
    g(1, 1) = ap;
    g(2, 2) = bx;
    g(3, 3) = bp;
    g(0, 2) = g(2, 0) = cx;
    g(1, 3) = g(3, 1) = cp;
    return g;
}

/// Reid product A->B (or B->A) for the standard-form covariance above.
inline double reid_product(const Eigen::Matrix4d &g, bool a_to_b) {
    double prod = 1.0;
    for (int q = 0; q < 2; ++q) {
        const double va = g(q, q);
        const double vb = g(2 + q, 2 + q);
        const double c = g(q, 2 + q);
        prod *= a_to_b ? vb - c * c / va : va - c * c / vb;
    }
    return prod;
}

/// Smallest symplectic eigenvalue of the partial transpose via the
/// two-mode invariants: nu^2 = (D - sqrt(D^2 - 4 det g)) / 2, D = det A + det B - 2 det C.
inline double ppt_nu(const Eigen::Matrix4d &g) {
    const double da = g.block<2, 2>(0, 0).determinant();
    const double db = g.block<2, 2>(2, 2).determinant();
    const double dc = g.block<2, 2>(0, 2).determinant();
    const double delta = da + db - 2.0 * dc;
    const double disc = std::max(0.0, delta * delta - 4.0 * g.determinant());
    return std::sqrt(std::max(0.0, (delta - std::sqrt(disc)) / 2.0));
}

/// min over g on a uniform grid of V(t - g c) = vt - 2 g cov + g^2 vc.
inline double grid_min_residual_variance(double vt, double vc, double cov, double g_max,
                                         int points) {
    double best = vt;
    for (int k = 0; k <= points; ++k) {
        const double g = -g_max + 2.0 * g_max * k / points;
        best = std::min(best, vt - 2.0 * g * cov + g * g * vc);
    }
    return best;
}

} // namespace oracle
