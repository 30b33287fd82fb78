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

#pragma once

#include <cstddef>
#include <numbers>
#include <random>

#include "gaussian.hpp"

namespace eprsteer {

/**
 * Random physical two-mode states for property tests, built without
 * rejection: per mode a squeezer (0..15 dB, anti-squeezing 0..5 dB above
 * it) at a random angle, then a beam splitter (T uniform in [0, 1]), random
 * phase rotations and a loss in [0.3, 1] on each mode. Optionally a random
 * displacement in [-2, 2] per quadrature.
 */
template <class Rng>
GaussianState random_two_mode_state(Rng &rng, bool displaced = false) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double two_pi = 2.0 * std::numbers::pi;
    const auto squeezer = [&] {
        const double sq = 15.0 * unit(rng);
        return squeezed_vacuum({sq, sq + 5.0 * unit(rng), Quadrature::X});
    };
    GaussianState s = tensor_product(squeezer(), squeezer());
    s = apply_phase_rotation(s, 0, two_pi * unit(rng));
    s = apply_phase_rotation(s, 1, two_pi * unit(rng));
    s = apply_beam_splitter(s, 0, 1, unit(rng));
    s = apply_phase_rotation(s, 0, two_pi * unit(rng));
    s = apply_phase_rotation(s, 1, two_pi * unit(rng));
    s = apply_loss(s, 0, 0.3 + 0.7 * unit(rng));
    s = apply_loss(s, 1, 0.3 + 0.7 * unit(rng));
    if (displaced) {
        Vector mean(4);
        for (Eigen::Index k = 0; k < 4; ++k) {
            mean(k) = -2.0 + 4.0 * unit(rng);
        }
        s = GaussianState(mean, s.cov());
    }
    return s;
}

} // namespace eprsteer
