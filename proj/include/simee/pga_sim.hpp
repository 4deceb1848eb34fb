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

#ifndef SIMEE_PGA_SIM_HPP
#define SIMEE_PGA_SIM_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "simee/channel.hpp"
#include "simee/config.hpp"

namespace simee
{
    // G = B_m Phi_m W_m Q_m for m >= 2 and G = B_1 Phi_1 for m = 1 (W_1 sits outside G).
    struct CascadeFactors
    {
        Eigen::MatrixXcd b; // Phi_M W_M ... Phi_{m+1} W_{m+1}, identity for m = M
        Eigen::MatrixXcd q; // Phi_{m-1} W_{m-1} ... Phi_1, identity for m = 1
    };

    CascadeFactors cascade_factors(const Eigen::MatrixXd &phases, const std::vector<Eigen::MatrixXcd> &matrices, int m);

    // dR_sum / dphi_m^n as an M x N matrix (bit/s/Hz per radian).
    Eigen::MatrixXd sum_rate_gradient(const ChannelRealization &channel, const Eigen::MatrixXd &phases,
                                      const Eigen::MatrixXcd &precoder);

    // phi + step * grad wrapped into [0, 2 pi).
    Eigen::MatrixXd pga_step(const Eigen::MatrixXd &phases, const Eigen::MatrixXd &gradient, double step);

    struct PgaResult
    {
        Eigen::MatrixXd phases;
        double sum_rate = 0.0;
        int iterations = 0;              // accepted steps over all restarts
        int best_restart = -1;           // -1 when no restart was admissible
        std::vector<std::vector<double>> traces; // R_sum after each accepted step, per restart
    };

    struct PgaOptions
    {
        PgaConfig config;
        double gamma_min = 0.0;                // QoS floor enforced when `require_qos`
        bool require_qos = false;              // reject steps and restarts that break QoS
        std::optional<Eigen::MatrixXd> warm;   // replaces the first random restart
    };

    // Multi-start projected gradient ascent of R_sum over all phases for a fixed precoder.
    PgaResult run_pga(const ChannelRealization &channel, const Eigen::MatrixXcd &precoder, const PgaOptions &options,
                      std::uint64_t seed);
}

#endif
