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

#include "simee/gradcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "simee/channel.hpp"
#include "simee/metrics.hpp"
#include "simee/pga_sim.hpp"
#include "simee/rng.hpp"

namespace simee
{
    GradcheckReport run_gradcheck(const GradcheckOptions &options)
    {
        const auto start = std::chrono::steady_clock::now();
        GradcheckReport report;
        for (int i = 0; i < options.instances; ++i)
        {
            const std::uint64_t seed = derive_seed(options.seed, static_cast<std::uint64_t>(i));
            Rng rng(derive_seed(seed, 0, 7));
            auto pick = [&](int lo, int hi)
            { return lo + static_cast<int>(rng.uniform() * (hi - lo + 1)); };

            SystemConfig config;
            config.antennas = pick(2, 4);
            config.users = pick(2, std::min(3, config.antennas));
            config.layers = pick(1, 3);
            const int side = pick(2, 3);
            config.atoms = side * side; // 4 or 9

            const ChannelRealization channel = build_channel(config, derive_seed(seed, 0, 1));
            const Eigen::MatrixXd phases = random_phases(config.layers, config.atoms, derive_seed(seed, 0, 2));

            // random precoder, each column at the equal-power share
            Eigen::MatrixXcd precoder(config.antennas, config.users);
            for (Eigen::Index k = 0; k < precoder.cols(); ++k)
            {
                for (Eigen::Index l = 0; l < precoder.rows(); ++l)
                    precoder(l, k) = rng.complex_normal();
                precoder.col(k) *= std::sqrt(config.p_max_w / config.users) / precoder.col(k).norm();
            }

            const Eigen::MatrixXd g = sum_rate_gradient(channel, phases, precoder);
            GradcheckCase c{config.users, config.antennas, config.layers, config.atoms, seed};
            const double h = options.step;
            for (int m = 0; m < config.layers; ++m)
                for (int n = 0; n < config.atoms; ++n)
                {
                    Eigen::MatrixXd a = phases, b = phases;
                    a(m, n) += h;
                    b(m, n) -= h;
                    const double fd = (sum_rate(channel, PhaseState(a, channel.w), precoder) -
                                       sum_rate(channel, PhaseState(b, channel.w), precoder)) /
                                      (2.0 * h);
                    c.max_abs_error = std::max(c.max_abs_error, std::abs(fd - g(m, n)));
                    c.gradient_scale = std::max(c.gradient_scale, std::abs(fd));
                }
            c.relative_error = c.gradient_scale > 0.0 ? c.max_abs_error / c.gradient_scale : c.max_abs_error;
            report.max_relative_error = std::max(report.max_relative_error, c.relative_error);
            report.cases.push_back(c);
        }
        report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return report;
    }
}
