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

#ifndef SIMEE_SCA_PRECODER_HPP
#define SIMEE_SCA_PRECODER_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "simee/conic.hpp"
#include "simee/config.hpp"

namespace simee
{
    // Scenario constants the precoder step needs besides the channel.
    struct PrecoderContext
    {
        Eigen::MatrixXcd heff;  // K x L, row k is h_k^H
        Eigen::VectorXd noise_w; // sigma_k^2
        int atoms = 0;
        int layers = 0;
    };

    struct ScaState
    {
        Eigen::VectorXd gamma;     // SINR of the expansion iterate
        Eigen::VectorXd q;         // AM-GM coefficients on noise-normalized channels
        Eigen::VectorXd expansion; // per-antenna powers of the expansion iterate
        std::vector<bool> pinned;  // chains held active
        Eigen::MatrixXcd previous; // expansion precoder, L x K
        std::vector<double> trace; // true objective after each iteration
    };

    // q_k = sqrt(gamma_k) / ||[h_k^H p_j (j != k), sigma_k]||
    Eigen::VectorXd update_q(const Eigen::VectorXd &gamma, const Eigen::MatrixXcd &precoder, const Eigen::MatrixXcd &heff,
                             const Eigen::VectorXd &noise_w);

    // Rotates every p_k so that h_k^H p_k is real and nonnegative.
    Eigen::MatrixXcd rotate_precoder(const Eigen::MatrixXcd &precoder, const Eigen::MatrixXcd &heff);

    // Top-K chains by output power of `precoder` among those at or above rho.
    std::vector<bool> pin_chains(const Eigen::MatrixXcd &precoder, int users, double rho);

    // f = 2 t sqrt(R_sum) - t^2 P_total with the smoothed indicator (pinned chains count 1).
    double precoder_objective(const PrecoderContext &ctx, const Eigen::MatrixXcd &precoder, double t, const SystemConfig &config,
                              const std::vector<bool> &pinned);

    // Variable layout of the subproblem, for reading solutions back.
    struct ScaLayout
    {
        int users = 0, antennas = 0;
        int p = 0;     // 2 L K reals: (re, im) of p_lk at p + 2 (k L + l)
        int gamma = 0; // K
        int rate = 0;  // K, nats
        int root = 0;  // sqrt of the sum rate
        int power = 0; // L per-antenna powers
        int re(int l, int k) const { return p + 2 * (k * antennas + l); }
        int im(int l, int k) const { return re(l, k) + 1; }
    };

    conic::ConvexProgram build_sca_subproblem(const PrecoderContext &ctx, double t, const ScaState &state,
                                              const SystemConfig &config, ScaLayout *layout = nullptr);

    struct InitResult
    {
        bool feasible = false;
        Eigen::MatrixXcd precoder;
        std::string method; // "mrt", "mrt-scaled", "min-power", "none"
    };

    // Maximum-ratio start scaled to meet QoS; falls back to the minimum-power QoS program.
    InitResult initial_precoder(const PrecoderContext &ctx, const SystemConfig &config);

    struct ScaResult
    {
        Eigen::MatrixXcd precoder;
        ScaState state;
        int iterations = 0;
        std::string termination; // "converged", "max-iterations", "solver"
    };

    // Requires init to satisfy QoS and power limits.
    ScaResult run_sca(const PrecoderContext &ctx, double t, const SystemConfig &config, const Eigen::MatrixXcd &init);

    // True when the precoder meets the power limits and QoS (relative slack `tol`).
    bool precoder_feasible(const PrecoderContext &ctx, const Eigen::MatrixXcd &precoder, const SystemConfig &config,
                           double tol = 1e-6);
}

#endif
