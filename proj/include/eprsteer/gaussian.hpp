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
 * @file gaussian.hpp
 * Covariance-matrix representation of multimode Gaussian states.
 *
 * Conventions used throughout the library:
 *  - quadratures are ordered (x1, p1, x2, p2, ...), so mode k occupies rows
 *    and columns 2k and 2k+1;
 *  - vacuum units: the vacuum covariance matrix is the identity, and the
 *    uncertainty principle reads cov + i*Omega >= 0;
 *  - a phase rotation by theta maps x -> cos(theta) x + sin(theta) p, so a
 *    homodyne detector with LO phase theta measures the x-quadrature of the
 *    mode rotated by theta (theta = pi/2 measures p);
 *  - beam splitter between modes i and j with transmissivity T:
 *        out_i =  sqrt(T) in_i + sqrt(1-T) in_j
 *        out_j = -sqrt(1-T) in_i + sqrt(T) in_j
 *    applied identically to both quadratures. Its inverse is the same
 *    splitter with i and j exchanged.
 */

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace eprsteer {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Tolerance used to validate covariance-matrix symmetry.
inline constexpr double kSymmetryTolerance = 1e-10;

enum class Quadrature { X = 0, P = 1 };

/// Immutable mean vector + covariance matrix over `n_modes()` modes.
class GaussianState {
  public:
    GaussianState(Vector mean, Matrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
        if (cov_.rows() == 0 || cov_.rows() % 2 != 0 || cov_.rows() != cov_.cols()) {
            throw InvalidArgument("GaussianState: covariance must be square of even size");
        }
        if (mean_.size() != cov_.rows()) {
            throw InvalidArgument("GaussianState: mean/covariance size mismatch");
        }
        if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance) {
            throw InvalidArgument("GaussianState: covariance is not symmetric");
        }
        if (!cov_.allFinite() || !mean_.allFinite()) {
            throw InvalidArgument("GaussianState: non-finite entries");
        }
    }

    [[nodiscard]] std::size_t n_modes() const { return static_cast<std::size_t>(cov_.rows() / 2); }
    [[nodiscard]] const Vector &mean() const { return mean_; }
    [[nodiscard]] const Matrix &cov() const { return cov_; }

    /// Variance of one quadrature of one mode.
    [[nodiscard]] double variance(std::size_t mode, Quadrature q) const {
        const auto k = index(mode, q);
        return cov_(k, k);
    }
    [[nodiscard]] double covariance(std::size_t mode_a, Quadrature qa, std::size_t mode_b,
                                    Quadrature qb) const {
        return cov_(index(mode_a, qa), index(mode_b, qb));
    }

    /// 2x2 block of modes (row_mode, col_mode).
    [[nodiscard]] Eigen::Matrix2d block(std::size_t row_mode, std::size_t col_mode) const {
        check_mode(row_mode);
        check_mode(col_mode);
        return cov_.block<2, 2>(2 * static_cast<Eigen::Index>(row_mode),
                                2 * static_cast<Eigen::Index>(col_mode));
    }

    void check_mode(std::size_t mode) const {
        if (mode >= n_modes()) {
            throw InvalidArgument("mode index " + std::to_string(mode) + " out of range for " +
                                  std::to_string(n_modes()) + "-mode state");
        }
    }

  private:
    [[nodiscard]] Eigen::Index index(std::size_t mode, Quadrature q) const {
        check_mode(mode);
        return 2 * static_cast<Eigen::Index>(mode) + static_cast<Eigen::Index>(q);
    }

    Vector mean_;
    Matrix cov_;
};

/// Block-diagonal symplectic form with blocks [[0, 1], [-1, 0]].
inline Matrix symplectic_form(std::size_t n_modes) {
    const auto dim = 2 * static_cast<Eigen::Index>(n_modes);
    Matrix omega = Matrix::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; k += 2) {
        omega(k, k + 1) = 1.0;
        omega(k + 1, k) = -1.0;
    }
    return omega;
}

/// Single-mode squeezer described by its observable (anti-)squeezing in dB.
struct SqueezerModel {
    double squeezing_dB = 0.0;
    double antisqueezing_dB = 0.0;
    Quadrature squeezed_quadrature = Quadrature::X;

    /// Variance of the squeezed quadrature, 10^(-dB/10).
    [[nodiscard]] double squeezed_variance() const { return std::pow(10.0, -squeezing_dB / 10.0); }
    [[nodiscard]] double antisqueezed_variance() const {
        return std::pow(10.0, antisqueezing_dB / 10.0);
    }
    /// Pure squeezer (minimum-uncertainty state).
    static SqueezerModel pure(double dB, Quadrature q = Quadrature::X) { return {dB, dB, q}; }
};

inline GaussianState vacuum_state(std::size_t n_modes) {
    if (n_modes == 0) {
        throw InvalidArgument("vacuum_state: n_modes must be >= 1");
    }
    const auto dim = 2 * static_cast<Eigen::Index>(n_modes);
    return {Vector::Zero(dim), Matrix::Identity(dim, dim)};
}

inline GaussianState squeezed_vacuum(const SqueezerModel &model) {
    if (!std::isfinite(model.squeezing_dB) || !std::isfinite(model.antisqueezing_dB) ||
        model.squeezing_dB < 0.0) {
        throw UnphysicalModel("squeezed_vacuum: squeezing_dB must be finite and >= 0");
    }
    const double v_sq = model.squeezed_variance();
    const double v_anti = model.antisqueezed_variance();
    // Relative slack so that pure models (equal dB) are never rejected on rounding.
    if (v_sq * v_anti < 1.0 - 1e-12) {
        throw UnphysicalModel("squeezed_vacuum: V_sq * V_anti < 1 violates the uncertainty principle");
    }
    Matrix cov = Matrix::Zero(2, 2);
    if (model.squeezed_quadrature == Quadrature::X) {
        cov(0, 0) = v_sq;
        cov(1, 1) = v_anti;
    } else {
        cov(0, 0) = v_anti;
        cov(1, 1) = v_sq;
    }
    return {Vector::Zero(2), cov};
}

/// Direct sum of two states; modes of `second` are appended after `first`.
inline GaussianState tensor_product(const GaussianState &first, const GaussianState &second) {
    const auto d1 = first.cov().rows();
    const auto d2 = second.cov().rows();
    Vector mean(d1 + d2);
    mean << first.mean(), second.mean();
    Matrix cov = Matrix::Zero(d1 + d2, d1 + d2);
    cov.topLeftCorner(d1, d1) = first.cov();
    cov.bottomRightCorner(d2, d2) = second.cov();
    return {mean, cov};
}

/// Applies a linear quadrature map S: mean -> S mean, cov -> S cov S^T.
inline GaussianState apply_symplectic(const GaussianState &state, const Matrix &s) {
    Matrix cov = s * state.cov() * s.transpose();
    // Restore exact symmetry lost to rounding.
    cov = 0.5 * (cov + cov.transpose()).eval();
    return {s * state.mean(), cov};
}

inline GaussianState apply_beam_splitter(const GaussianState &state, std::size_t mode_i,
                                         std::size_t mode_j, double transmissivity) {
    state.check_mode(mode_i);
    state.check_mode(mode_j);
    if (mode_i == mode_j) {
        throw InvalidArgument("apply_beam_splitter: modes must differ");
    }
    if (!(transmissivity >= 0.0 && transmissivity <= 1.0)) {
        throw InvalidArgument("apply_beam_splitter: transmissivity outside [0, 1]");
    }
    const double t = std::sqrt(transmissivity);
    const double r = std::sqrt(1.0 - transmissivity);
    const auto dim = state.cov().rows();
    Matrix s = Matrix::Identity(dim, dim);
    const auto i = 2 * static_cast<Eigen::Index>(mode_i);
    const auto j = 2 * static_cast<Eigen::Index>(mode_j);
    for (Eigen::Index q = 0; q < 2; ++q) {
        s(i + q, i + q) = t;
        s(i + q, j + q) = r;
        s(j + q, i + q) = -r;
        s(j + q, j + q) = t;
    }
    return apply_symplectic(state, s);
}

/// Pure-loss channel of transmission `efficiency` on one mode.
inline GaussianState apply_loss(const GaussianState &state, std::size_t mode, double efficiency) {
    state.check_mode(mode);
    if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
        throw InvalidArgument("apply_loss: efficiency outside [0, 1]");
    }
    const double s = std::sqrt(efficiency);
    const auto k = 2 * static_cast<Eigen::Index>(mode);
    const auto dim = state.cov().rows();
    Matrix cov = state.cov();
    Vector mean = state.mean();
    for (Eigen::Index q = 0; q < 2; ++q) {
        mean(k + q) *= s;
        for (Eigen::Index c = 0; c < dim; ++c) {
            if (c == k || c == k + 1) {
                continue;
            }
            cov(k + q, c) *= s;
            cov(c, k + q) *= s;
        }
    }
    Eigen::Matrix2d local = cov.block<2, 2>(k, k);
    cov.block<2, 2>(k, k) = efficiency * local + (1.0 - efficiency) * Eigen::Matrix2d::Identity();
    return {mean, cov};
}

inline GaussianState apply_phase_rotation(const GaussianState &state, std::size_t mode,
                                          double theta) {
    state.check_mode(mode);
    theta = std::remainder(theta, 2.0 * std::numbers::pi);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const auto dim = state.cov().rows();
    const auto k = 2 * static_cast<Eigen::Index>(mode);
    Matrix rot = Matrix::Identity(dim, dim);
    rot(k, k) = c;
    rot(k, k + 1) = s;
    rot(k + 1, k) = -s;
    rot(k + 1, k + 1) = c;
    return apply_symplectic(state, rot);
}

/// Uncertainty principle: minimum eigenvalue of cov + i*Omega >= -tol.
inline bool is_physical(const GaussianState &state, double tol = 1e-9) {
    const auto n = state.n_modes();
    Eigen::MatrixXcd h = state.cov().cast<std::complex<double>>();
    h += std::complex<double>(0.0, 1.0) * symplectic_form(n).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        return false;
    }
    return solver.eigenvalues().minCoeff() >= -tol;
}

/// Reduced state on `modes` (in the order given).
inline GaussianState marginal(const GaussianState &state, const std::vector<std::size_t> &modes) {
    if (modes.empty()) {
        throw InvalidArgument("marginal: empty mode list");
    }
    for (std::size_t a = 0; a < modes.size(); ++a) {
        state.check_mode(modes[a]);
        for (std::size_t b = a + 1; b < modes.size(); ++b) {
            if (modes[a] == modes[b]) {
                throw InvalidArgument("marginal: duplicate mode index");
            }
        }
    }
    const auto dim = 2 * static_cast<Eigen::Index>(modes.size());
    std::vector<Eigen::Index> idx;
    idx.reserve(static_cast<std::size_t>(dim));
    for (auto m : modes) {
        idx.push_back(2 * static_cast<Eigen::Index>(m));
        idx.push_back(2 * static_cast<Eigen::Index>(m) + 1);
    }
    Vector mean(dim);
    Matrix cov(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        mean(r) = state.mean()(idx[static_cast<std::size_t>(r)]);
        for (Eigen::Index c = 0; c < dim; ++c) {
            cov(r, c) = state.cov()(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
        }
    }
    return {mean, cov};
}

/// Projected variance below which homodyne conditioning is refused.
inline constexpr double kConditioningTolerance = 1e-12;

/**
 * State of the remaining modes after homodyne detection of the
 * theta-quadrature of `measured_mode` with outcome `outcome`.
 *
 * With e = (cos theta, sin theta), s = e^T gamma_M e and c = C e the
 * covariance of the remaining quadratures with the measured one:
 *   cov'  = gamma_R - c c^T / s
 *   mean' = mu_R + c (outcome - e^T mu_M) / s
 * The covariance does not depend on the outcome.
 */
inline GaussianState condition_on_homodyne(const GaussianState &state, std::size_t measured_mode,
                                           double theta, double outcome) {
    state.check_mode(measured_mode);
    const auto n = state.n_modes();
    if (n < 2) {
        throw InvalidArgument("condition_on_homodyne: no modes would remain");
    }
    std::vector<std::size_t> rest;
    for (std::size_t m = 0; m < n; ++m) {
        if (m != measured_mode) {
            rest.push_back(m);
        }
    }
    const Eigen::Vector2d e(std::cos(theta), std::sin(theta));
    const auto km = 2 * static_cast<Eigen::Index>(measured_mode);
    const double s = e.dot(state.cov().block<2, 2>(km, km) * e);
    if (s < kConditioningTolerance) {
        throw SingularConditioning("condition_on_homodyne: projected variance below tolerance");
    }
    const double mu_m = e.dot(state.mean().segment<2>(km));

    const GaussianState reduced = marginal(state, rest);
    const auto dim = reduced.cov().rows();
    Vector c(dim);
    for (std::size_t a = 0; a < rest.size(); ++a) {
        const auto kr = 2 * static_cast<Eigen::Index>(rest[a]);
        const auto ka = 2 * static_cast<Eigen::Index>(a);
        c.segment<2>(ka) = state.cov().block<2, 2>(kr, km) * e;
    }
    Matrix cov = reduced.cov() - c * c.transpose() / s;
    cov = 0.5 * (cov + cov.transpose()).eval();
    Vector mean = reduced.mean() + c * ((outcome - mu_m) / s);
    return {mean, cov};
}

/// Debug text dump: mean and row-major covariance, 12 significant digits.
inline std::string dump(const GaussianState &state) {
    std::ostringstream os;
    os << std::setprecision(12);
    os << "n_modes " << state.n_modes() << "\nmean\n";
    for (Eigen::Index k = 0; k < state.mean().size(); ++k) {
        os << (k ? " " : "") << state.mean()(k) + 0.0;
    }
    // "+ 0.0" folds -0 into 0.
    os << "\ncov\n";
    for (Eigen::Index r = 0; r < state.cov().rows(); ++r) {
        for (Eigen::Index c = 0; c < state.cov().cols(); ++c) {
            os << (c ? " " : "") << state.cov()(r, c) + 0.0;
        }
        os << '\n';
    }
    return os.str();
}

} // namespace eprsteer
