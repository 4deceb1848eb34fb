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

#ifndef SIMEE_POWER_HPP
#define SIMEE_POWER_HPP

#include <Eigen/Dense>
#include <vector>

namespace simee
{
    // Power-consumption parameters, all in watts unless noted.
    struct PowerParams
    {
        double static_w = 4.5;             // P_S, BS static power
        double rf_active_w = 0.4;          // P_RF^active, per active RF chain
        double pa_efficiency = 0.5;        // eta in (0, 1]
        double meta_w = 0.01;              // P_meta, per meta-atom (10 dBm)
        double controller_w = 0.31622776601683794; // P_controller (25 dBm)
        double ue_w = 0.1;                 // P_UE (20 dBm)
        double activation_threshold_w = 1e-4; // rho_l, hard RF-chain activation rule
        double smoothing = 1e-10;          // epsilon of the smoothed indicator

        void validate() const; // throws std::invalid_argument naming the field
    };

    enum class ActivationRule
    {
        hard,  // chain active iff its output power >= rho_l
        smooth // log(1 + x/eps) / log(1 + 1/eps)
    };

    struct PowerBreakdown
    {
        double pa_w = 0.0;       // sum_k ||p_k||^2 / eta
        double active_w = 0.0;   // P_RF^active * sum_l I(P_l^out)
        double sim_w = 0.0;      // N M P_meta + P_controller
        double static_w = 0.0;   // P_S
        double ue_w = 0.0;       // K P_UE
        double total_w = 0.0;
        Eigen::VectorXd antenna_out_w; // P_l^out
        std::vector<bool> active;      // hard activation mask, always filled
        int active_count() const;
    };

    // g(x) = log(1 + x/eps) / log(1 + 1/eps); throws std::domain_error for x < 0.
    double smoothed_indicator(double x, double eps);

    // First-order expansion of g around xbar; affine in x and an upper bound of g.
    double indicator_taylor(double x, double xbar, double eps);

    // Slope of indicator_taylor in x.
    double indicator_taylor_slope(double xbar, double eps);

    // Per-antenna output powers sum_k |e_l^T p_k|^2 of an L x K precoder.
    Eigen::VectorXd antenna_powers(const Eigen::MatrixXcd &precoder);

    // Total consumption for precoder (L x K). When `pinned` is non-empty, chains flagged
    // true count as active regardless of the rule.
    PowerBreakdown power_breakdown(const Eigen::MatrixXcd &precoder, const PowerParams &params,
                                   int atoms, int layers, int users, ActivationRule rule,
                                   const std::vector<bool> &pinned = {});

    double dbm_to_watt(double dbm);
    double watt_to_dbm(double w);
    double db_to_linear(double db);
}

#endif
