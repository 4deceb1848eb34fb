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

#ifndef SIMEE_AO_HPP
#define SIMEE_AO_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "simee/channel.hpp"
#include "simee/config.hpp"
#include "simee/metrics.hpp"

namespace simee
{
    enum class Scheme
    {
        hybrid_sdp,
        hybrid_pga,
        digital_pre,
        wave_sim
    };

    const char *to_string(Scheme s);
    Scheme parse_scheme(const std::string &name); // throws std::invalid_argument

    enum class SolveStatus
    {
        converged,      // relative EE change fell below the tolerance
        max_iterations, // outer cap reached
        infeasible      // QoS could not be met at initialization
    };

    const char *to_string(SolveStatus s);

    struct SolveReport
    {
        Scheme scheme = Scheme::hybrid_pga;
        SolveStatus status = SolveStatus::infeasible;
        std::string phase_optimizer; // "sdp", "pga" or "none"
        std::string init_method;     // how the first feasible precoder was found
        std::string detail;          // infeasibility or solver notes

        std::vector<double> ee_trace; // hard-count EE, bit/J; entry 0 is the starting point
        Eigen::MatrixXcd precoder;    // L x K
        Eigen::MatrixXd phases;       // M x N
        RateReport rates;
        PowerBreakdown power; // hard-count
        double ee = 0.0;      // final EE, 0 when infeasible
        double t = 0.0;       // last auxiliary variable

        int outer_iterations = 0; // I_AO
        int sca_iterations = 0;   // I_BS, summed
        int sim_iterations = 0;   // SDP rounds or PGA steps, summed
        int rejected_updates = 0; // block updates discarded by the EE guard
        int ee_violations = 0;    // trace decreases beyond 1e-6
        double seconds = 0.0;

        bool feasible() const { return status != SolveStatus::infeasible; }
    };

    // Power used by the precoder step at the current precoder: smoothed indicator, top-K chains pinned.
    double surrogate_power(const Eigen::MatrixXcd &precoder, const SystemConfig &config);

    // p_k = sqrt(min(P_max / K, P_l^max)) e_k.
    Eigen::MatrixXcd one_stream_precoder(const SystemConfig &config);

    SolveReport solve_hybrid(const ChannelRealization &channel, const SystemConfig &config, Scheme method, std::uint64_t seed);
    SolveReport solve_digital_pre(const ChannelRealization &channel, const SystemConfig &config, std::uint64_t seed);
    SolveReport solve_wave_sim(const ChannelRealization &channel, const SystemConfig &config, std::uint64_t seed);
    SolveReport solve(Scheme scheme, const ChannelRealization &channel, const SystemConfig &config, std::uint64_t seed);
}

#endif
