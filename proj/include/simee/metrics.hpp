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

#ifndef SIMEE_METRICS_HPP
#define SIMEE_METRICS_HPP

#include <Eigen/Dense>

#include "simee/channel.hpp"
#include "simee/power.hpp"

namespace simee
{
    struct RateReport
    {
        Eigen::VectorXd sinr;  // gamma_k, linear
        Eigen::VectorXd rate;  // log2(1 + gamma_k)
        double sum_rate = 0.0; // bit/s/Hz
    };

    // K x L matrix whose row k is h_SIM,k^H G W_1.
    Eigen::MatrixXcd effective_channels(const ChannelRealization &channel, const PhaseState &phases);

    // Rates from effective channels (K x L), precoder (L x K) and noise powers.
    RateReport rates(const Eigen::MatrixXcd &heff, const Eigen::MatrixXcd &precoder, const Eigen::VectorXd &noise_w);

    double sinr(const ChannelRealization &channel, const PhaseState &phases, const Eigen::MatrixXcd &precoder, int k);
    double sum_rate(const ChannelRealization &channel, const PhaseState &phases, const Eigen::MatrixXcd &precoder);

    // BW * R_sum / P_total, bit/J.
    double energy_efficiency(double bandwidth_hz, double sum_rate, double total_power_w);

    // f = 2 t sqrt(R_sum) - t^2 P_total, without the bandwidth factor.
    double quadratic_objective(double sum_rate, double total_power_w, double t);

    // t* = sqrt(R_sum) / P_total.
    double update_t(double sum_rate, double total_power_w);

    struct Evaluation
    {
        RateReport rates;
        PowerBreakdown power;
        double ee = 0.0; // bit/J
    };

    Evaluation evaluate(const ChannelRealization &channel, const PhaseState &phases, const Eigen::MatrixXcd &precoder,
                        const SystemConfig &config, ActivationRule rule = ActivationRule::hard);
}

#endif
