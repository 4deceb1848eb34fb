// SPDX-License-Identifier: Apache-2.0
//
// simee - energy-efficient hybrid precoding for stacked intelligent metasurfaces
// Copyright (C) 2026 The simee authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef SIMEE_TEST_FIXTURES_HPP
#define SIMEE_TEST_FIXTURES_HPP

#include <cmath>
#include <numbers>

#include "simee/channel.hpp"
#include "simee/metrics.hpp"
#include "simee/rng.hpp"

namespace simee::testing
{
    // Two meta-atoms side by side: the first row of a 2 x 2 grid.
    inline ChannelRealization two_atom_channel(SystemConfig config, std::uint64_t seed)
    {
        config.atoms = 4;
        SimGeometry g = build_geometry(config);
        g.atoms = 2;
        for (auto &layer : g.layer_positions)
            layer = layer.leftCols(2).eval();
        const auto w = build_interlayer_matrices(g);
        const CorrelationModel corr = build_sinc_correlation(g);
        const auto users = sample_user_positions(config, derive_seed(seed, 0, 1));
        config.atoms = 2;
        return sample_user_channels(g, corr, w, users, config, derive_seed(seed, 0, 2));
    }

    // Best sum rate over a 64 x 64 phase grid of a one-layer, two-atom surface.
    inline double grid_optimum(const ChannelRealization &ch, const Eigen::MatrixXcd &precoder, int levels = 64)
    {
        double best = 0.0;
        Eigen::MatrixXd ph(1, 2);
        for (int a = 0; a < levels; ++a)
            for (int b = 0; b < levels; ++b)
            {
                ph << 2 * std::numbers::pi * a / levels, 2 * std::numbers::pi * b / levels;
                best = std::max(best, sum_rate(ch, PhaseState(ph, ch.w), precoder));
            }
        return best;
    }
}

#endif
