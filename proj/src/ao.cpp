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

#include "simee/ao.hpp"

#include "simee/pga_sim.hpp"
#include "simee/rng.hpp"
#include "simee/sca_precoder.hpp"
#include "simee/sdp_sim.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace simee
{
    namespace
    {
        // RNG stream purposes below the trial seed
        constexpr std::uint64_t stream_phases = 3;
        constexpr std::uint64_t stream_pga = 5;
        constexpr std::uint64_t stream_restore = 6;

        constexpr double ee_slack = 1e-6;
        constexpr int restore_sweeps = 10;

        PrecoderContext context(const ChannelRealization &ch, const PhaseState &ps)
        {
            PrecoderContext ctx;
            ctx.heff = effective_channels(ch, ps);
            ctx.noise_w = ch.noise_w;
            ctx.atoms = ch.atoms();
            ctx.layers = ch.layers();
            return ctx;
        }

        struct Timer
        {
            std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
            double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); }
        };

        void finish(SolveReport &rep, const ChannelRealization &ch, const SystemConfig &config)
        {
            const Evaluation ev = evaluate(ch, PhaseState(rep.phases, ch.w), rep.precoder, config);
            rep.rates = ev.rates;
            rep.power = ev.power;
            rep.ee = rep.feasible() ? ev.ee : 0.0;
        }

        double hard_ee(const ChannelRealization &ch, const Eigen::MatrixXd &phases, const Eigen::MatrixXcd &p, const SystemConfig &config)
        {
            return evaluate(ch, PhaseState(phases, ch.w), p, config).ee;
        }

        // Phase update for a fixed precoder; returns the number of inner iterations spent.
        // `sweeps` bounds the SDP layer sweeps (stopping early once a sweep gains less than the
        // AO tolerance); `qos` keeps PGA inside the QoS set.
        int improve_phases(Scheme method, const ChannelRealization &ch, Eigen::MatrixXd &phases, const Eigen::MatrixXcd &p,
                           const SystemConfig &config, std::uint64_t seed, bool qos, int sweeps = 1)
        {
            if (method == Scheme::hybrid_sdp)
            {
                int rounds = 0;
                double rate = sum_rate(ch, PhaseState(phases, ch.w), p);
                for (int s = 0; s < sweeps; ++s)
                {
                    const double start = rate;
                    for (int m = 1; m <= ch.layers(); ++m)
                    {
                        const LayerUpdate up = optimize_layer(m, ch, phases, p, config);
                        rounds += static_cast<int>(up.rounds.size());
                        if (up.accepted)
                        {
                            phases.row(m - 1) = up.phases.transpose();
                            rate = up.rate_after;
                        }
                    }
                    if (rate - start <= config.ao_tolerance * std::max(start, 1e-12))
                        break;
                }
                return rounds;
            }
            PgaOptions opt;
            opt.config = config.pga;
            opt.gamma_min = config.gamma_min;
            opt.require_qos = qos;
            opt.warm = phases;
            const double before = sum_rate(ch, PhaseState(phases, ch.w), p);
            const PgaResult r = run_pga(ch, p, opt, seed);
            if (r.best_restart >= 0 && r.sum_rate >= before)
                phases = r.phases;
            return r.iterations;
        }
    }

    const char *to_string(Scheme s)
    {
        switch (s)
        {
        case Scheme::hybrid_sdp:
            return "hybrid-sdp";
        case Scheme::hybrid_pga:
            return "hybrid-pga";
        case Scheme::digital_pre:
            return "digital-pre";
        case Scheme::wave_sim:
            return "wave-sim";
        }
        return "?";
    }

    Scheme parse_scheme(const std::string &name)
    {
        for (Scheme s : {Scheme::hybrid_sdp, Scheme::hybrid_pga, Scheme::digital_pre, Scheme::wave_sim})
            if (name == to_string(s))
                return s;
        throw std::invalid_argument("unknown scheme '" + name + "'");
    }

    const char *to_string(SolveStatus s)
    {
        switch (s)
        {
        case SolveStatus::converged:
            return "converged";
        case SolveStatus::max_iterations:
            return "max-iterations";
        case SolveStatus::infeasible:
            return "infeasible";
        }
        return "?";
    }

    double surrogate_power(const Eigen::MatrixXcd &p, const SystemConfig &config)
    {
        const auto pinned = pin_chains(p, static_cast<int>(p.cols()), config.power.activation_threshold_w);
        return power_breakdown(p, config.power, config.atoms, config.layers, static_cast<int>(p.cols()), ActivationRule::smooth, pinned)
            .total_w;
    }

    Eigen::MatrixXcd one_stream_precoder(const SystemConfig &config)
    {
        if (config.antennas < config.users)
            throw std::invalid_argument("one_stream_precoder: needs at least as many antennas as users");
        const double pw = std::min(config.p_max_w / config.users, config.p_antenna_max_w);
        Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(config.antennas, config.users);
        for (int k = 0; k < config.users; ++k)
            p(k, k) = std::sqrt(pw);
        return p;
    }

    namespace
    {
        // t-update, precoder step and optional phase step until the hard-count EE settles.
        SolveReport alternate(Scheme scheme, const ChannelRealization &ch, const SystemConfig &config, Eigen::MatrixXd phases,
                              Eigen::MatrixXcd p, SolveReport rep, std::uint64_t seed)
        {
            const bool move_phases = scheme == Scheme::hybrid_sdp || scheme == Scheme::hybrid_pga;
            double ee = hard_ee(ch, phases, p, config);
            rep.ee_trace.push_back(ee);
            rep.status = SolveStatus::max_iterations;
            for (int r = 1; r <= config.ao_max_iterations; ++r)
            {
                const double prev = ee;
                const PhaseState ps(phases, ch.w);
                const PrecoderContext ctx = context(ch, ps);
                rep.t = update_t(rates(ctx.heff, p, ch.noise_w).sum_rate, surrogate_power(p, config));

                const ScaResult sca = run_sca(ctx, rep.t, config, p);
                rep.sca_iterations += sca.iterations;
                const double ee_sca = hard_ee(ch, phases, sca.precoder, config);
                if (ee_sca >= ee)
                {
                    p = sca.precoder;
                    ee = ee_sca;
                }
                else
                {
                    ++rep.rejected_updates;
                }

                if (move_phases)
                {
                    Eigen::MatrixXd cand = phases;
                    rep.sim_iterations += improve_phases(scheme, ch, cand, p, config, derive_seed(seed, static_cast<std::uint64_t>(r), stream_pga), true);
                    const double ee_sim = hard_ee(ch, cand, p, config);
                    if (ee_sim >= ee)
                    {
                        phases = cand;
                        ee = ee_sim;
                    }
                    else
                    {
                        ++rep.rejected_updates;
                    }
                }

                rep.ee_trace.push_back(ee);
                ++rep.outer_iterations;
                if (ee < prev - ee_slack)
                    ++rep.ee_violations;
                if (std::abs(ee - prev) <= config.ao_tolerance * std::max(std::abs(prev), 1e-300))
                {
                    rep.status = SolveStatus::converged;
                    break;
                }
            }
            rep.phases = phases;
            rep.precoder = p;
            return rep;
        }

        SolveReport infeasible_report(SolveReport rep, const Eigen::MatrixXd &phases, const Eigen::MatrixXcd &p, std::string why)
        {
            rep.status = SolveStatus::infeasible;
            rep.phases = phases;
            rep.precoder = p;
            rep.detail = std::move(why);
            return rep;
        }
    }

    SolveReport solve_hybrid(const ChannelRealization &ch, const SystemConfig &config, Scheme method, std::uint64_t seed)
    {
        if (method != Scheme::hybrid_sdp && method != Scheme::hybrid_pga)
            throw std::invalid_argument("solve_hybrid: method must be hybrid-sdp or hybrid-pga");
        config.validate();
        const Timer timer;
        SolveReport rep;
        rep.scheme = method;
        rep.phase_optimizer = method == Scheme::hybrid_sdp ? "sdp" : "pga";

        Eigen::MatrixXd phases = random_phases(ch.layers(), ch.atoms(), derive_seed(seed, 0, stream_phases));
        InitResult init = initial_precoder(context(ch, PhaseState(phases, ch.w)), config);
        if (!init.feasible)
        {
            // restoration: steer the phases with the one-stream precoder, then retry
            rep.sim_iterations += improve_phases(method, ch, phases, one_stream_precoder(config), config, derive_seed(seed, 0, stream_restore), false,
                                                restore_sweeps);
            init = initial_precoder(context(ch, PhaseState(phases, ch.w)), config);
            init.method = "restored+" + init.method;
        }
        rep.init_method = init.method;
        if (!init.feasible)
        {
            rep = infeasible_report(rep, phases, one_stream_precoder(config), "QoS unreachable after phase restoration");
            rep.ee_trace.push_back(0.0);
            finish(rep, ch, config);
            rep.seconds = timer.seconds();
            return rep;
        }
        rep = alternate(method, ch, config, phases, init.precoder, rep, seed);
        finish(rep, ch, config);
        rep.seconds = timer.seconds();
        return rep;
    }

    SolveReport solve_digital_pre(const ChannelRealization &ch, const SystemConfig &config, std::uint64_t seed)
    {
        config.validate();
        const Timer timer;
        SolveReport rep;
        rep.scheme = Scheme::digital_pre;
        rep.phase_optimizer = "none";
        const Eigen::MatrixXd phases = random_phases(ch.layers(), ch.atoms(), derive_seed(seed, 0, stream_phases));
        const InitResult init = initial_precoder(context(ch, PhaseState(phases, ch.w)), config);
        rep.init_method = init.method;
        if (!init.feasible)
        {
            rep = infeasible_report(rep, phases, one_stream_precoder(config), "QoS unreachable with the random phases");
            rep.ee_trace.push_back(0.0);
        }
        else
        {
            rep = alternate(Scheme::digital_pre, ch, config, phases, init.precoder, rep, seed);
        }
        finish(rep, ch, config);
        rep.seconds = timer.seconds();
        return rep;
    }

    SolveReport solve_wave_sim(const ChannelRealization &ch, const SystemConfig &config, std::uint64_t seed)
    {
        config.validate();
        const Timer timer;
        SolveReport rep;
        rep.scheme = Scheme::wave_sim;
        rep.phase_optimizer = "pga";
        rep.init_method = "one-stream";
        rep.precoder = one_stream_precoder(config);

        PgaOptions opt;
        opt.config = config.pga;
        opt.warm = random_phases(ch.layers(), ch.atoms(), derive_seed(seed, 0, stream_phases));
        const double ee0 = hard_ee(ch, *opt.warm, rep.precoder, config);
        const PgaResult r = run_pga(ch, rep.precoder, opt, derive_seed(seed, 1, stream_pga));
        rep.phases = r.phases;
        rep.sim_iterations = r.iterations;
        rep.outer_iterations = 1;
        const Evaluation ev = evaluate(ch, PhaseState(rep.phases, ch.w), rep.precoder, config);
        if (ev.rates.sinr.minCoeff() < config.gamma_min)
        {
            rep = infeasible_report(rep, rep.phases, rep.precoder, "QoS not met by the one-stream precoder");
            rep.ee_trace = {0.0};
        }
        else
        {
            rep.status = SolveStatus::converged;
            rep.ee_trace = {ee0, ev.ee};
        }
        finish(rep, ch, config);
        rep.seconds = timer.seconds();
        return rep;
    }

    SolveReport solve(Scheme scheme, const ChannelRealization &ch, const SystemConfig &config, std::uint64_t seed)
    {
        switch (scheme)
        {
        case Scheme::hybrid_sdp:
        case Scheme::hybrid_pga:
            return solve_hybrid(ch, config, scheme, seed);
        case Scheme::digital_pre:
            return solve_digital_pre(ch, config, seed);
        case Scheme::wave_sim:
            return solve_wave_sim(ch, config, seed);
        }
        throw std::invalid_argument("solve: unknown scheme");
    }
}
