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

#include "simee/sca_precoder.hpp"

#include "simee/metrics.hpp"
#include "simee/power.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace simee
{
    using conic::Affine;

    namespace
    {
        // Real and imaginary parts of (h_k^H / sigma_k) p_j as affine expressions in the p block.
        std::pair<Affine, Affine> received(const ScaLayout &lay, const Eigen::MatrixXcd &hn, int k, int j)
        {
            Affine re, im;
            for (int l = 0; l < lay.antennas; ++l)
            {
                const double ar = hn(k, l).real(), ai = hn(k, l).imag();
                re.add(lay.re(l, j), ar).add(lay.im(l, j), -ai);
                im.add(lay.im(l, j), ar).add(lay.re(l, j), ai);
            }
            return {re, im};
        }

        Eigen::MatrixXcd normalized(const PrecoderContext &ctx)
        {
            return ctx.noise_w.cwiseSqrt().cwiseInverse().asDiagonal() * ctx.heff;
        }

        double max_scale(const Eigen::MatrixXcd &p, const SystemConfig &config)
        {
            const double total = p.squaredNorm();
            const double per = antenna_powers(p).maxCoeff();
            double a2 = std::numeric_limits<double>::infinity();
            if (total > 0.0)
                a2 = std::min(a2, config.p_max_w / total);
            if (per > 0.0)
                a2 = std::min(a2, config.p_antenna_max_w / per);
            return std::sqrt(a2);
        }

        bool qos_met(const PrecoderContext &ctx, const Eigen::MatrixXcd &p, double gamma_min)
        {
            return rates(ctx.heff, p, ctx.noise_w).sinr.minCoeff() >= gamma_min;
        }
    }

    Eigen::VectorXd update_q(const Eigen::VectorXd &gamma, const Eigen::MatrixXcd &precoder, const Eigen::MatrixXcd &heff,
                             const Eigen::VectorXd &noise_w)
    {
        const Eigen::MatrixXd rx = (heff * precoder).cwiseAbs2();
        Eigen::VectorXd q(gamma.size());
        for (Eigen::Index k = 0; k < gamma.size(); ++k)
        {
            const double denom = std::sqrt(rx.row(k).sum() - rx(k, k) + noise_w[k]);
            q[k] = std::sqrt(std::max(gamma[k], 0.0)) / denom;
        }
        return q;
    }

    Eigen::MatrixXcd rotate_precoder(const Eigen::MatrixXcd &precoder, const Eigen::MatrixXcd &heff)
    {
        Eigen::MatrixXcd out = precoder;
        for (Eigen::Index k = 0; k < precoder.cols(); ++k)
        {
            const cplx s = heff.row(k).dot(precoder.col(k).conjugate()); // conj(h_k^H p_k)
            if (std::abs(s) > 0.0)
                out.col(k) *= s / std::abs(s);
        }
        return out;
    }

    std::vector<bool> pin_chains(const Eigen::MatrixXcd &precoder, int users, double rho)
    {
        const Eigen::VectorXd pw = antenna_powers(precoder);
        std::vector<int> order(static_cast<size_t>(pw.size()));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return pw[a] > pw[b]; });
        std::vector<bool> pinned(static_cast<size_t>(pw.size()), false);
        for (int i = 0; i < std::min<int>(users, static_cast<int>(order.size())); ++i)
            if (pw[order[static_cast<size_t>(i)]] >= rho)
                pinned[static_cast<size_t>(order[static_cast<size_t>(i)])] = true;
        return pinned;
    }

    double precoder_objective(const PrecoderContext &ctx, const Eigen::MatrixXcd &precoder, double t, const SystemConfig &config,
                              const std::vector<bool> &pinned)
    {
        const double r = rates(ctx.heff, precoder, ctx.noise_w).sum_rate;
        const PowerBreakdown pb = power_breakdown(precoder, config.power, ctx.atoms, ctx.layers,
                                                  static_cast<int>(ctx.heff.rows()), ActivationRule::smooth, pinned);
        return quadratic_objective(r, pb.total_w, t);
    }

    bool precoder_feasible(const PrecoderContext &ctx, const Eigen::MatrixXcd &precoder, const SystemConfig &config, double tol)
    {
        if (precoder.squaredNorm() > config.p_max_w * (1.0 + tol))
            return false;
        if (antenna_powers(precoder).maxCoeff() > config.p_antenna_max_w * (1.0 + tol))
            return false;
        return rates(ctx.heff, precoder, ctx.noise_w).sinr.minCoeff() >= config.gamma_min * (1.0 - tol);
    }

    conic::ConvexProgram build_sca_subproblem(const PrecoderContext &ctx, double t, const ScaState &state,
                                              const SystemConfig &config, ScaLayout *layout_out)
    {
        const int K = static_cast<int>(ctx.heff.rows());
        const int L = static_cast<int>(ctx.heff.cols());
        if (K > L)
            throw std::invalid_argument("build_sca_subproblem: more users than antennas");
        const PowerParams &pw = config.power;
        const Eigen::MatrixXcd hn = normalized(ctx);

        conic::ConvexProgram prog;
        prog.maximize = true;
        ScaLayout lay;
        lay.users = K;
        lay.antennas = L;
        lay.p = prog.add_scalars(2 * L * K);
        lay.gamma = prog.add_scalars(K);
        lay.rate = prog.add_scalars(K);
        lay.root = prog.add_scalar();
        lay.power = prog.add_scalars(L);

        // per-antenna power x_l >= sum_k |p_lk|^2, x_l <= P_l^max, sum x_l <= P_max
        Affine total(config.p_max_w);
        for (int l = 0; l < L; ++l)
        {
            std::vector<Affine> y;
            for (int k = 0; k < K; ++k)
            {
                y.push_back(Affine::var(lay.re(l, k)));
                y.push_back(Affine::var(lay.im(l, k)));
            }
            prog.add_rotated_soc(Affine::var(lay.power + l), Affine(0.5), y);
            prog.add_nonneg(Affine(config.p_antenna_max_w).add(lay.power + l, -1.0));
            total.add(lay.power + l, -1.0);
        }
        prog.add_nonneg(total);

        for (int k = 0; k < K; ++k)
        {
            auto [sre, sim] = received(lay, hn, k, k);
            prog.add_equality(sim);
            prog.add_nonneg(sre);

            // 2 Re{h^H p_k} - gamma_k / q_k >= q_k ||[h^H p_j, 1]||^2
            const double q = state.q[k];
            std::vector<Affine> y;
            for (int j = 0; j < K; ++j)
            {
                if (j == k)
                    continue;
                auto [ire, iim] = received(lay, hn, k, j);
                y.push_back(ire);
                y.push_back(iim);
            }
            y.emplace_back(1.0);
            Affine lhs;
            lhs.add(sre, 2.0).add(lay.gamma + k, -1.0 / q);
            prog.add_rotated_soc(lhs, Affine(0.5 / q), y);

            prog.add_nonneg(Affine::var(lay.gamma + k).add_constant(-config.gamma_min));
            prog.add_nonneg(Affine::var(lay.gamma + k));
            prog.add_log_hypo(Affine::var(lay.rate + k), Affine::var(lay.gamma + k).add_constant(1.0));
        }
        Affine sum_bits;
        for (int k = 0; k < K; ++k)
            sum_bits.add(lay.rate + k, 1.0 / std::numbers::ln2);
        prog.add_sqrt_hypo(Affine::var(lay.root), sum_bits);

        // objective: 2 t s - t^2 (sum x / eta + P_RF sum g~(x_l)), constants dropped
        prog.objective.add(lay.root, 2.0 * t);
        for (int l = 0; l < L; ++l)
        {
            double coef = 1.0 / pw.pa_efficiency;
            if (!state.pinned[static_cast<size_t>(l)])
                coef += pw.rf_active_w * indicator_taylor_slope(state.expansion[l], pw.smoothing);
            prog.objective.add(lay.power + l, -t * t * coef);
        }

        // pinned chains: linearized ||p_l||^2 >= rho around the expansion iterate
        for (int l = 0; l < L; ++l)
        {
            if (!state.pinned[static_cast<size_t>(l)])
                continue;
            Affine lin(-state.previous.row(l).squaredNorm() - pw.activation_threshold_w);
            for (int k = 0; k < K; ++k)
            {
                const cplx pb = state.previous(l, k);
                lin.add(lay.re(l, k), 2.0 * pb.real()).add(lay.im(l, k), 2.0 * pb.imag());
            }
            prog.add_nonneg(lin);
        }

        if (layout_out)
            *layout_out = lay;
        return prog;
    }

    InitResult initial_precoder(const PrecoderContext &ctx, const SystemConfig &config)
    {
        const int K = static_cast<int>(ctx.heff.rows());
        const int L = static_cast<int>(ctx.heff.cols());
        InitResult out;

        Eigen::MatrixXcd mrt(L, K);
        for (int k = 0; k < K; ++k)
        {
            const Eigen::VectorXcd hk = ctx.heff.row(k).adjoint();
            const double nrm = hk.norm();
            mrt.col(k) = nrm > 0.0 ? (hk / nrm).eval() : Eigen::VectorXcd::Zero(L);
        }
        const double budget = 0.5 * std::min(config.p_max_w, L * config.p_antenna_max_w);
        Eigen::MatrixXcd p = std::sqrt(budget / K) * mrt;
        const double amax = max_scale(p, config);
        if (amax < 1.0)
            p *= amax;
        if (mrt.squaredNorm() > 0.0)
        {
            if (qos_met(ctx, p, config.gamma_min))
            {
                out.feasible = true;
                out.precoder = rotate_precoder(p, ctx.heff);
                out.method = "mrt";
                return out;
            }
            const double top = max_scale(p, config);
            if (qos_met(ctx, top * p, config.gamma_min))
            {
                double lo = 1.0, hi = top;
                for (int i = 0; i < 60; ++i)
                {
                    const double mid = 0.5 * (lo + hi);
                    (qos_met(ctx, mid * p, config.gamma_min) ? hi : lo) = mid;
                }
                // sit midway between the QoS edge and the power limit
                const double a = 0.5 * (hi + top);
                out.feasible = true;
                out.precoder = rotate_precoder(a * p, ctx.heff);
                out.method = "mrt-scaled";
                return out;
            }
        }

        // minimize transmit power subject to exact SINR cones with a small margin
        const Eigen::MatrixXcd hn = normalized(ctx);
        conic::ConvexProgram prog;
        prog.maximize = false;
        ScaLayout lay;
        lay.users = K;
        lay.antennas = L;
        lay.p = prog.add_scalars(2 * L * K);
        lay.power = prog.add_scalars(L);
        Affine total(config.p_max_w);
        for (int l = 0; l < L; ++l)
        {
            std::vector<Affine> y;
            for (int k = 0; k < K; ++k)
            {
                y.push_back(Affine::var(lay.re(l, k)));
                y.push_back(Affine::var(lay.im(l, k)));
            }
            prog.add_rotated_soc(Affine::var(lay.power + l), Affine(0.5), y);
            prog.add_nonneg(Affine(config.p_antenna_max_w).add(lay.power + l, -1.0));
            total.add(lay.power + l, -1.0);
            prog.objective.add(lay.power + l, 1.0);
        }
        prog.add_nonneg(total);
        const double root_g = std::sqrt(config.gamma_min * (1.0 + 1e-4));
        for (int k = 0; k < K; ++k)
        {
            auto [sre, sim] = received(lay, hn, k, k);
            prog.add_equality(sim);
            std::vector<Affine> y;
            for (int j = 0; j < K; ++j)
            {
                if (j == k)
                    continue;
                auto [ire, iim] = received(lay, hn, k, j);
                y.push_back(Affine().add(ire, root_g));
                y.push_back(Affine().add(iim, root_g));
            }
            y.emplace_back(root_g);
            prog.add_soc(sre, y);
        }
        const conic::Solution sol = conic::solve(prog);
        if (sol.status == conic::Status::optimal || sol.status == conic::Status::numerical_limit)
        {
            if (sol.x.size() == prog.num_scalars)
            {
                Eigen::MatrixXcd pm(L, K);
                for (int k = 0; k < K; ++k)
                    for (int l = 0; l < L; ++l)
                        pm(l, k) = {sol.x[lay.re(l, k)], sol.x[lay.im(l, k)]};
                pm = rotate_precoder(pm, ctx.heff);
                // spend half of the remaining headroom so later SCA steps start inside the power set
                const double top = max_scale(pm, config);
                if (top > 1.0)
                    pm *= std::sqrt(0.5 * (1.0 + top * top));
                if (precoder_feasible(ctx, pm, config, 1e-9))
                {
                    out.feasible = true;
                    out.precoder = pm;
                    out.method = "min-power";
                    return out;
                }
            }
        }
        out.feasible = false;
        out.precoder = Eigen::MatrixXcd::Zero(L, K);
        out.method = "none";
        return out;
    }

    ScaResult run_sca(const PrecoderContext &ctx, double t, const SystemConfig &config, const Eigen::MatrixXcd &init)
    {
        const int K = static_cast<int>(ctx.heff.rows());
        ScaResult res;
        ScaState &st = res.state;
        st.previous = rotate_precoder(init, ctx.heff);
        st.pinned = pin_chains(st.previous, K, config.power.activation_threshold_w);
        double f_prev = precoder_objective(ctx, st.previous, t, config, st.pinned);
        st.trace.push_back(f_prev);
        res.precoder = st.previous;
        res.termination = "max-iterations";

        for (int it = 0; it < config.sca_max_iterations; ++it)
        {
            st.gamma = rates(ctx.heff, st.previous, ctx.noise_w).sinr;
            // the subproblem works on noise-normalized channels, so q is taken there too
            st.q = update_q(st.gamma, st.previous, normalized(ctx), Eigen::VectorXd::Ones(K));
            for (int k = 0; k < K; ++k)
                st.q[k] = std::max(st.q[k], 1e-9);
            st.expansion = antenna_powers(st.previous);

            ScaLayout lay;
            const conic::ConvexProgram prog = build_sca_subproblem(ctx, t, st, config, &lay);
            const conic::Solution sol = conic::solve(prog);
            ++res.iterations;
            if (sol.x.size() != prog.num_scalars)
            {
                res.termination = "solver";
                break;
            }
            Eigen::MatrixXcd p(lay.antennas, K);
            for (int k = 0; k < K; ++k)
                for (int l = 0; l < lay.antennas; ++l)
                    p(l, k) = {sol.x[lay.re(l, k)], sol.x[lay.im(l, k)]};
            p = rotate_precoder(p, ctx.heff);
            // trim solver slack on the power limits
            const double top = max_scale(p, config);
            if (top < 1.0)
                p *= top;

            const double f_new = precoder_objective(ctx, p, t, config, st.pinned);
            if (!precoder_feasible(ctx, p, config, 1e-7) || f_new < f_prev - 1e-9 * std::max(1.0, std::abs(f_prev)))
            {
                res.termination = "solver";
                break;
            }
            st.previous = p;
            res.precoder = p;
            st.trace.push_back(f_new);
            const double change = std::abs(f_new - f_prev) / std::max(std::abs(f_prev), 1e-12);
            f_prev = f_new;
            if (change <= config.sca_tolerance)
            {
                res.termination = "converged";
                break;
            }
        }
        st.gamma = rates(ctx.heff, res.precoder, ctx.noise_w).sinr;
        return res;
    }
}
