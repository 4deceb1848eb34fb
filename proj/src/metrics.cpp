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

#include "simee/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace simee
{
    Eigen::MatrixXcd effective_channels(const ChannelRealization &channel, const PhaseState &phases)
    {
        if (phases.atoms() != channel.atoms() || phases.layers() != channel.layers())
            throw std::invalid_argument("effective_channels: phase shape does not match the channel");
        return channel.h_sim.adjoint() * phases.cascade() * channel.w.front();
    }

    RateReport rates(const Eigen::MatrixXcd &heff, const Eigen::MatrixXcd &precoder, const Eigen::VectorXd &noise_w)
    {
        if (heff.cols() != precoder.rows() || heff.rows() != precoder.cols() || noise_w.size() != heff.rows())
            throw std::invalid_argument("rates: shape mismatch");
        const Eigen::MatrixXd rx = (heff * precoder).cwiseAbs2(); // rx(k, j) = |h_k^H p_j|^2
        const Eigen::Index k_users = heff.rows();
        RateReport r;
        r.sinr.resize(k_users);
        r.rate.resize(k_users);
        for (Eigen::Index k = 0; k < k_users; ++k)
        {
            const double signal = rx(k, k);
            const double interference = rx.row(k).sum() - signal;
            r.sinr[k] = signal / (interference + noise_w[k]);
            r.rate[k] = std::log2(1.0 + r.sinr[k]);
        }
        r.sum_rate = r.rate.sum();
        return r;
    }

    double sinr(const ChannelRealization &channel, const PhaseState &phases, const Eigen::MatrixXcd &precoder, int k)
    {
        return rates(effective_channels(channel, phases), precoder, channel.noise_w).sinr[k];
    }

    double sum_rate(const ChannelRealization &channel, const PhaseState &phases, const Eigen::MatrixXcd &precoder)
    {
        return rates(effective_channels(channel, phases), precoder, channel.noise_w).sum_rate;
    }

    double energy_efficiency(double bandwidth_hz, double sum_rate, double total_power_w)
    {
        if (!(total_power_w > 0.0))
            throw std::domain_error("energy_efficiency: total power must be positive");
        return bandwidth_hz * sum_rate / total_power_w;
    }

    double quadratic_objective(double sum_rate, double total_power_w, double t)
    {
        return 2.0 * t * std::sqrt(sum_rate) - t * t * total_power_w;
    }

    double update_t(double sum_rate, double total_power_w)
    {
        if (!(total_power_w > 0.0))
            throw std::domain_error("update_t: total power must be positive");
        return std::sqrt(sum_rate) / total_power_w;
    }

    Evaluation evaluate(const ChannelRealization &channel, const PhaseState &phases, const Eigen::MatrixXcd &precoder,
                        const SystemConfig &config, ActivationRule rule)
    {
        Evaluation e;
        e.rates = rates(effective_channels(channel, phases), precoder, channel.noise_w);
        e.power = power_breakdown(precoder, config.power, channel.atoms(), channel.layers(), channel.users(), rule);
        e.ee = energy_efficiency(config.bandwidth_hz, e.rates.sum_rate, e.power.total_w);
        return e;
    }
}
