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

#include "simee/power.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace simee
{
    void PowerParams::validate() const
    {
        auto require = [](bool ok, const char *field)
        {
            if (!ok)
                throw std::invalid_argument(std::string("invalid power parameter: ") + field);
        };
        require(static_w >= 0.0, "p_static");
        require(rf_active_w >= 0.0, "p_rf_active");
        require(pa_efficiency > 0.0 && pa_efficiency <= 1.0, "pa_efficiency");
        require(meta_w >= 0.0, "p_meta");
        require(controller_w >= 0.0, "p_controller");
        require(ue_w >= 0.0, "p_ue");
        require(activation_threshold_w >= 0.0, "rho");
        require(smoothing > 0.0 && smoothing < 1.0, "smoothing_eps");
    }

    int PowerBreakdown::active_count() const
    {
        int n = 0;
        for (bool a : active)
            n += a ? 1 : 0;
        return n;
    }

    double smoothed_indicator(double x, double eps)
    {
        if (x < 0.0)
            throw std::domain_error("smoothed_indicator: negative argument");
        return std::log1p(x / eps) / std::log1p(1.0 / eps);
    }

    double indicator_taylor_slope(double xbar, double eps)
    {
        return 1.0 / ((xbar + eps) * std::log1p(1.0 / eps));
    }

    double indicator_taylor(double x, double xbar, double eps)
    {
        if (x < 0.0 || xbar < 0.0)
            throw std::domain_error("indicator_taylor: negative argument");
        return (std::log1p(xbar / eps) + (x - xbar) / (xbar + eps)) / std::log1p(1.0 / eps);
    }

    Eigen::VectorXd antenna_powers(const Eigen::MatrixXcd &precoder)
    {
        return precoder.cwiseAbs2().rowwise().sum();
    }

    PowerBreakdown power_breakdown(const Eigen::MatrixXcd &precoder, const PowerParams &params,
                                   int atoms, int layers, int users, ActivationRule rule,
                                   const std::vector<bool> &pinned)
    {
        PowerBreakdown out;
        out.antenna_out_w = antenna_powers(precoder);
        const Eigen::Index n_ant = out.antenna_out_w.size();
        if (!pinned.empty() && static_cast<Eigen::Index>(pinned.size()) != n_ant)
            throw std::invalid_argument("power_breakdown: pinned mask size mismatch");

        out.active.assign(static_cast<size_t>(n_ant), false);
        double chains = 0.0;
        for (Eigen::Index l = 0; l < n_ant; ++l)
        {
            const double x = out.antenna_out_w[l];
            const bool pin = !pinned.empty() && pinned[static_cast<size_t>(l)];
            const bool hard_on = pin || x >= params.activation_threshold_w;
            out.active[static_cast<size_t>(l)] = hard_on;
            if (rule == ActivationRule::hard || pin)
                chains += hard_on ? 1.0 : 0.0;
            else
                chains += smoothed_indicator(x, params.smoothing);
        }

        out.pa_w = out.antenna_out_w.sum() / params.pa_efficiency;
        out.active_w = params.rf_active_w * chains;
        out.sim_w = static_cast<double>(atoms) * layers * params.meta_w + params.controller_w;
        out.static_w = params.static_w;
        out.ue_w = users * params.ue_w;
        out.total_w = out.static_w + out.pa_w + out.active_w + out.sim_w + out.ue_w;
        return out;
    }

    double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
    double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
    double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
}
