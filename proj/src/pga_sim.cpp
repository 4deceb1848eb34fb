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

#include "simee/pga_sim.hpp"

#include "simee/metrics.hpp"
#include "simee/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace simee
{
    namespace
    {
        Eigen::VectorXcd unit(const Eigen::MatrixXd &phases, int m)
        {
            Eigen::VectorXcd v(phases.cols());
            for (Eigen::Index n = 0; n < phases.cols(); ++n)
                v[n] = std::polar(1.0, phases(m - 1, n));
            return v;
        }

        // forward propagation of the antenna columns, O(M N^2 L)
        RateReport rates_at(const ChannelRealization &ch, const Eigen::MatrixXd &phases, const Eigen::MatrixXcd &p)
        {
            Eigen::MatrixXcd x = unit(phases, 1).asDiagonal() * ch.w.front();
            for (int m = 2; m <= ch.layers(); ++m)
                x = unit(phases, m).asDiagonal() * (ch.w[static_cast<size_t>(m - 1)] * x);
            return rates(ch.h_sim.adjoint() * x, p, ch.noise_w);
        }
    }

    CascadeFactors cascade_factors(const Eigen::MatrixXd &phases, const std::vector<Eigen::MatrixXcd> &matrices, int m)
    {
        const int M = static_cast<int>(phases.rows());
        const int N = static_cast<int>(phases.cols());
        if (m < 1 || m > M)
            throw std::invalid_argument("cascade_factors: layer index out of range");
        CascadeFactors f;
        f.b = Eigen::MatrixXcd::Identity(N, N);
        for (int i = M; i > m; --i)
            f.b = f.b * unit(phases, i).asDiagonal() * matrices[static_cast<size_t>(i - 1)];
        f.q = Eigen::MatrixXcd::Identity(N, N);
        for (int i = 1; i < m; ++i)
            f.q = (i == 1 ? unit(phases, 1).asDiagonal().toDenseMatrix()
                          : (unit(phases, i).asDiagonal() * matrices[static_cast<size_t>(i - 1)] * f.q).eval());
        return f;
    }

    Eigen::MatrixXd sum_rate_gradient(const ChannelRealization &ch, const Eigen::MatrixXd &phases, const Eigen::MatrixXcd &p)
    {
        const int M = static_cast<int>(phases.rows());
        const int N = static_cast<int>(phases.cols());
        const int K = ch.users();

        // forward fields v_m = (input to Phi_m) for every stream, backward rows r_m = h^H B_m per user
        std::vector<Eigen::MatrixXcd> fwd(static_cast<size_t>(M)); // N x K
        fwd[0] = ch.w.front() * p;
        for (int m = 2; m <= M; ++m)
            fwd[static_cast<size_t>(m - 1)] = ch.w[static_cast<size_t>(m - 1)] * (unit(phases, m - 1).asDiagonal() * fwd[static_cast<size_t>(m - 2)]);
        std::vector<Eigen::MatrixXcd> bwd(static_cast<size_t>(M)); // K x N
        bwd[static_cast<size_t>(M - 1)] = ch.h_sim.adjoint();
        for (int m = M - 1; m >= 1; --m)
            bwd[static_cast<size_t>(m - 1)] = (bwd[static_cast<size_t>(m)] * unit(phases, m + 1).asDiagonal()) * ch.w[static_cast<size_t>(m)];

        // a(k, j) = h_k^H G W_1 p_j
        const Eigen::MatrixXcd a = bwd[static_cast<size_t>(M - 1)] * (unit(phases, M).asDiagonal() * fwd[static_cast<size_t>(M - 1)]);
        const Eigen::MatrixXd rx = a.cwiseAbs2();
        Eigen::VectorXd chi(K), gamma(K);
        for (int k = 0; k < K; ++k)
        {
            const double total = rx.row(k).sum() + ch.noise_w[k];
            chi[k] = 1.0 / total;
            gamma[k] = rx(k, k) / (total - rx(k, k));
        }
        // weight on d|a_kj|^2: chi_k for j = k, -chi_k gamma_k otherwise
        Eigen::MatrixXd wgt(K, K);
        for (int k = 0; k < K; ++k)
            for (int j = 0; j < K; ++j)
                wgt(k, j) = j == k ? chi[k] : -chi[k] * gamma[k];

        // d|a_kj|^2 / dphi_n = -2 Im(e^{j phi_n} r_kn v_jn conj(a_kj))
        Eigen::MatrixXd grad(M, N);
        for (int m = 1; m <= M; ++m)
        {
            const Eigen::VectorXcd u = unit(phases, m);
            const auto &r = bwd[static_cast<size_t>(m - 1)];
            const auto &v = fwd[static_cast<size_t>(m - 1)];
            for (int n = 0; n < N; ++n)
            {
                cplx acc = 0.0;
                for (int k = 0; k < K; ++k)
                    for (int j = 0; j < K; ++j)
                        acc += wgt(k, j) * r(k, n) * v(n, j) * std::conj(a(k, j));
                grad(m - 1, n) = -2.0 * std::imag(u[n] * acc);
            }
        }
        return grad / std::numbers::ln2;
    }

    Eigen::MatrixXd pga_step(const Eigen::MatrixXd &phases, const Eigen::MatrixXd &gradient, double step)
    {
        return (phases + step * gradient).unaryExpr([](double x) { return wrap_phase(x); });
    }

    PgaResult run_pga(const ChannelRealization &ch, const Eigen::MatrixXcd &precoder, const PgaOptions &opt, std::uint64_t seed)
    {
        const PgaConfig &cfg = opt.config;
        cfg.validate();
        const int M = ch.layers(), N = ch.atoms();
        PgaResult best;
        best.phases = Eigen::MatrixXd::Zero(M, N);
        best.sum_rate = -1.0;

        auto qos_ok = [&](const RateReport &r) { return !opt.require_qos || r.sinr.minCoeff() >= opt.gamma_min; };

        for (int restart = 0; restart < cfg.restarts; ++restart)
        {
            Eigen::MatrixXd phi = restart == 0 && opt.warm ? opt.warm->unaryExpr([](double x) { return wrap_phase(x); }).eval()
                                                           : random_phases(M, N, derive_seed(seed, static_cast<std::uint64_t>(restart), 7));
            RateReport cur = rates_at(ch, phi, precoder);
            const bool guard = opt.require_qos && qos_ok(cur);
            std::vector<double> trace{cur.sum_rate};
            // The step carries over between iterations and grows after a first-try acceptance,
            // so tiny gradients (low SNR) still make progress.
            double trial_step = cfg.initial_step;
            for (int it = 0; it < cfg.max_iterations; ++it)
            {
                const Eigen::MatrixXd g = sum_rate_gradient(ch, phi, precoder);
                const double g2 = g.squaredNorm();
                if (!(g2 > 0.0))
                    break;
                double step = trial_step;
                bool accepted = false;
                Eigen::MatrixXd cand;
                RateReport next;
                while (step >= cfg.min_step)
                {
                    cand = pga_step(phi, g, step);
                    next = rates_at(ch, cand, precoder);
                    if (next.sum_rate >= cur.sum_rate + cfg.armijo * step * g2 && (!guard || qos_ok(next)))
                    {
                        accepted = true;
                        break;
                    }
                    step *= cfg.decay;
                }
                if (!accepted)
                    break;
                const bool first_try = step == trial_step;
                const double gain = (next.sum_rate - cur.sum_rate) / std::max(cur.sum_rate, 1e-12);
                phi = cand;
                cur = next;
                trace.push_back(cur.sum_rate);
                ++best.iterations;
                trial_step = first_try ? step / cfg.decay : step;
                if (gain < cfg.relative_tolerance && !first_try)
                    break;
            }
            best.traces.push_back(trace);
            if (qos_ok(cur) && cur.sum_rate > best.sum_rate)
            {
                best.sum_rate = cur.sum_rate;
                best.phases = phi;
                best.best_restart = restart;
            }
        }
        if (best.best_restart < 0)
            best.sum_rate = 0.0;
        return best;
    }
}
