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
 * @file steering.hpp
 * Reid conditional-variance criterion, Gaussian steering test, PPT
 * entanglement test and the resulting state classification.
 *
 * All criteria are normalized so that the classical bound is 1 (vacuum
 * units, see gaussian.hpp).
 */

#pragma once

#include <cmath>
#include <cstddef>
#include <string_view>
#include <utility>

#include "gaussian.hpp"

namespace eprsteer {

/// A quadrature of one mode.
struct QuadratureRef {
    std::size_t mode;
    Quadrature quadrature;
};

/// Who steers whom. `alice` and `bob` are the mode indices of parties A and B.
struct SteeringDirection {
    enum class Kind { AtoB, BtoA };
    Kind kind = Kind::AtoB;
    std::size_t alice = 0;
    std::size_t bob = 1;

    static constexpr SteeringDirection a_to_b(std::size_t a = 0, std::size_t b = 1) {
        return {Kind::AtoB, a, b};
    }
    static constexpr SteeringDirection b_to_a(std::size_t a = 0, std::size_t b = 1) {
        return {Kind::BtoA, a, b};
    }
    /// The measuring (steering) party.
    [[nodiscard]] constexpr std::size_t steering_mode() const {
        return kind == Kind::AtoB ? alice : bob;
    }
    /// The party whose conditional variances are tested.
    [[nodiscard]] constexpr std::size_t steered_mode() const {
        return kind == Kind::AtoB ? bob : alice;
    }
    [[nodiscard]] constexpr SteeringDirection reversed() const {
        return {kind == Kind::AtoB ? Kind::BtoA : Kind::AtoB, alice, bob};
    }
};

struct CriterionResult {
    double cond_var_x = 0.0;
    double cond_var_p = 0.0;
    double product = 0.0;
    bool certified = false;
};

enum class StateClass { Separable, EntangledNoSteering, OneWayAtoB, OneWayBtoA, TwoWay };

inline std::string_view to_string(StateClass c) {
    switch (c) {
    case StateClass::Separable:
        return "Separable";
    case StateClass::EntangledNoSteering:
        return "EntangledNoSteering";
    case StateClass::OneWayAtoB:
        return "OneWayAtoB";
    case StateClass::OneWayBtoA:
        return "OneWayBtoA";
    case StateClass::TwoWay:
        return "TwoWay";
    }
    return "?";
}

/// Conditioning variances below this are treated as carrying no information.
inline constexpr double kConditionerTolerance = 1e-12;
/// Half-width of the band around 1 that classify() treats as not steerable.
inline constexpr double kBorderlineBand = 1e-9;

/**
 * Variance of `target` conditioned on `conditioner`:
 *   V(t) - Cov(t, c)^2 / V(c),
 * which for Gaussian states is the variance of the conditional distribution
 * and equals min_g V(t - g c).
 */
inline double conditional_variance(const GaussianState &state, QuadratureRef target,
                                   QuadratureRef conditioner) {
    if (target.mode == conditioner.mode) {
        throw InvalidArgument("conditional_variance: target and conditioner share a mode");
    }
    const double vt = state.variance(target.mode, target.quadrature);
    const double vc = state.variance(conditioner.mode, conditioner.quadrature);
    if (vc < kConditionerTolerance) {
        return vt;
    }
    const double c = state.covariance(target.mode, target.quadrature, conditioner.mode,
                                      conditioner.quadrature);
    return vt - c * c / vc;
}

inline CriterionResult reid_product(const GaussianState &state, SteeringDirection dir) {
    const auto steered = dir.steered_mode();
    const auto steering = dir.steering_mode();
    CriterionResult r;
    r.cond_var_x = conditional_variance(state, {steered, Quadrature::X}, {steering, Quadrature::X});
    r.cond_var_p = conditional_variance(state, {steered, Quadrature::P}, {steering, Quadrature::P});
    r.product = r.cond_var_x * r.cond_var_p;
    r.certified = r.product < 1.0;
    return r;
}

struct SteeringTestResult {
    bool steerable = false;
    double schur_det = 0.0;
};

/**
 * Gaussian steering test for one steered mode: with gamma_S the steering
 * party's block and C the cross block, M = gamma_T - C^T gamma_S^{-1} C is
 * the conditional covariance of the steered mode, and the state is steerable
 * by Gaussian measurements iff det M < 1.
 */
inline SteeringTestResult gaussian_steering_test(const GaussianState &state,
                                                 SteeringDirection dir) {
    const auto steering = dir.steering_mode();
    const auto steered = dir.steered_mode();
    if (steering == steered) {
        throw InvalidArgument("gaussian_steering_test: parties share a mode");
    }
    const Eigen::Matrix2d gs = state.block(steering, steering);
    const Eigen::Matrix2d gt = state.block(steered, steered);
    const Eigen::Matrix2d c = state.block(steering, steered);
    if (std::abs(gs.determinant()) < kConditionerTolerance) {
        throw NumericalDegeneracy("gaussian_steering_test: steering block is singular");
    }
    const Eigen::Matrix2d m = gt - c.transpose() * gs.inverse() * c;
    const double det = m.determinant();
    return {det < 1.0, det};
}

struct EntanglementTestResult {
    bool entangled = false;
    double min_sympl_eig = 0.0;
};

/**
 * PPT test for a 1x1-mode state (necessary and sufficient). The partial
 * transpose flips p_B; the smallest symplectic eigenvalue is the smallest
 * |lambda| over the spectrum of i*Omega*gamma~.
 */
inline EntanglementTestResult ppt_entanglement_test(const GaussianState &state,
                                                    std::size_t mode_a = 0,
                                                    std::size_t mode_b = 1) {
    if (mode_a == mode_b) {
        throw InvalidArgument("ppt_entanglement_test: parties share a mode");
    }
    const GaussianState two = marginal(state, {mode_a, mode_b});
    Eigen::Matrix4d flip = Eigen::Matrix4d::Identity();
    flip(3, 3) = -1.0;
    const Eigen::Matrix4d pt = flip * Eigen::Matrix4d(two.cov()) * flip;
    const Eigen::Matrix4d omega = symplectic_form(2);
    Eigen::EigenSolver<Eigen::Matrix4d> solver(omega * pt, false);
    // Eigenvalues of Omega*gamma are +-i*nu; i*Omega*gamma has real spectrum +-nu.
    double nu = std::abs(solver.eigenvalues()(0));
    for (Eigen::Index k = 1; k < 4; ++k) {
        nu = std::min(nu, std::abs(solver.eigenvalues()(k)));
    }
    return {nu < 1.0 - kBorderlineBand, nu};
}

/// Combines the PPT test and both Gaussian steering tests.
inline StateClass classify(const GaussianState &state, std::size_t mode_a = 0,
                           std::size_t mode_b = 1) {
    const auto ent = ppt_entanglement_test(state, mode_a, mode_b);
    const auto ab = gaussian_steering_test(state, SteeringDirection::a_to_b(mode_a, mode_b));
    const auto ba = gaussian_steering_test(state, SteeringDirection::b_to_a(mode_a, mode_b));
    const bool steers_ab = ab.schur_det < 1.0 - kBorderlineBand;
    const bool steers_ba = ba.schur_det < 1.0 - kBorderlineBand;
    if ((steers_ab || steers_ba) && !ent.entangled) {
        throw HierarchyViolation("classify: steerable state reported PPT-separable");
    }
    if (steers_ab && steers_ba) {
        return StateClass::TwoWay;
    }
    if (steers_ab) {
        return StateClass::OneWayAtoB;
    }
    if (steers_ba) {
        return StateClass::OneWayBtoA;
    }
    return ent.entangled ? StateClass::EntangledNoSteering : StateClass::Separable;
}

} // namespace eprsteer
