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

#include "simee/sdp_sim.hpp"

#include "simee/metrics.hpp"
#include "simee/pga_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace simee
{
    namespace
    {
        RateReport rates_for(const ChannelRealization &ch, const Eigen::MatrixXd &phases, const Eigen::MatrixXcd &p)
        {
            return rates(effective_channels(ch, compose_cascade(phases, ch.w)), p, ch.noise_w);
        }

        // |u^T H p_j|^2 / sigma_k^2 for every (k, j), read off a lifted matrix
        Eigen::MatrixXd lifted_powers(const std::vector<Eigen::MatrixXcd> &hh, const Eigen::MatrixXcd &p, const Eigen::VectorXd &noise,
                                      const Eigen::MatrixXcd &v)
        {
            const int K = static_cast<int>(hh.size());
            Eigen::MatrixXd out(K, K);
            for (int k = 0; k < K; ++k)
                for (int j = 0; j < K; ++j)
                {
                    const Eigen::VectorXcd u = lifting_vector(hh[static_cast<size_t>(k)], p.col(j), std::sqrt(noise[k]));
                    out(k, j) = std::max(0.0, std::real(u.dot(v * u)));
                }
            return out;
        }

        // Every lifting vector has a zero last entry, so the solver may return V = diag(X, 1) with the
        // homogenizing slot decoupled. The cut direction is therefore the lifted vector of the phases
        // read off V, which coincides with the leading eigenvector whenever V is rank one.
        Eigen::VectorXcd cut_direction(const Eigen::MatrixXcd &v)
        {
            const Eigen::Index N = v.rows() - 1;
            Eigen::VectorXd ref(N);
            for (Eigen::Index n = 0; n < N; ++n)
                ref[n] = std::arg(v(n, N));
            const Eigen::VectorXcd z = lifted_vector(extract_phases(v, ref));
            return z / z.norm();
        }

        SdpExpansion expansion_from(const Eigen::MatrixXd &rx, const Eigen::MatrixXcd &v, double epsilon)
        {
            const Eigen::Index K = rx.rows();
            SdpExpansion e;
            e.mu.resize(K);
            e.gamma.resize(K);
            for (Eigen::Index k = 0; k < K; ++k)
            {
                const double s = std::max(rx(k, k), 1e-12);
                e.mu[k] = std::sqrt(s);
                e.gamma[k] = s / (rx.row(k).sum() - rx(k, k) + 1.0);
            }
            e.zeta = cut_direction(v);
            e.epsilon = epsilon;
            return e;
        }

        double eigen_ratio(const Eigen::MatrixXcd &v)
        {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(v, Eigen::EigenvaluesOnly);
            const auto &ev = es.eigenvalues();
            const Eigen::Index n = ev.size();
            if (n < 2 || ev[n - 1] <= 0.0)
                return 0.0;
            return std::max(0.0, ev[n - 2]) / ev[n - 1];
        }
    }

    std::vector<Eigen::MatrixXcd> build_layer_channel(const ChannelRealization &ch, const Eigen::MatrixXd &phases, int m)
    {
        if (m < 1 || m > ch.layers())
            throw std::invalid_argument("build_layer_channel: layer index out of range");
        if (phases.rows() != ch.layers() || phases.cols() != ch.atoms())
            throw std::invalid_argument("build_layer_channel: phase tensor shape mismatch");
        const CascadeFactors f = cascade_factors(phases, ch.w, m);
        const Eigen::MatrixXcd t = m == 1 ? ch.w.front() : (ch.w[static_cast<size_t>(m - 1)] * (f.q * ch.w.front())).eval();
        const Eigen::MatrixXcd r = ch.h_sim.adjoint() * f.b; // K x N
        std::vector<Eigen::MatrixXcd> out;
        out.reserve(static_cast<size_t>(ch.users()));
        for (int k = 0; k < ch.users(); ++k)
            out.push_back(r.row(k).transpose().asDiagonal() * t);
        return out;
    }

    Eigen::VectorXcd lifted_vector(const Eigen::VectorXd &layer_phases)
    {
        Eigen::VectorXcd v(layer_phases.size() + 1);
        for (Eigen::Index n = 0; n < layer_phases.size(); ++n)
            v[n] = std::polar(1.0, layer_phases[n]);
        v[layer_phases.size()] = 1.0;
        return v;
    }

    Eigen::VectorXcd lifting_vector(const Eigen::MatrixXcd &layer_channel, const Eigen::VectorXcd &p, double scale)
    {
        Eigen::VectorXcd u = Eigen::VectorXcd::Zero(layer_channel.rows() + 1);
        u.head(layer_channel.rows()) = (layer_channel * p).conjugate() / scale;
        return u;
    }

    conic::ConvexProgram build_sdp_subproblem(const std::vector<Eigen::MatrixXcd> &hh, const Eigen::MatrixXcd &p, const Eigen::VectorXd &noise,
                                              const SdpExpansion &e, double gamma_min, SdpLayout *layout)
    {
        using conic::Affine;
        const int K = static_cast<int>(hh.size());
        if (K == 0)
            throw std::invalid_argument("build_sdp_subproblem: no users");
        const int N = static_cast<int>(hh.front().rows());
        if (e.mu.size() != K || e.gamma.size() != K || e.zeta.size() != N + 1)
            throw std::invalid_argument("build_sdp_subproblem: expansion point shape mismatch");

        conic::ConvexProgram prog;
        prog.maximize = true;
        SdpLayout lay;
        // With epsilon = 1 and a unit-modulus cut direction the only feasible lifted matrix is
        // (N + 1) zeta zeta^H, so its terms enter as constants.
        const bool fixed = e.epsilon >= 1.0;
        const Eigen::MatrixXcd v_fixed = fixed ? ((N + 1.0) * e.zeta * e.zeta.adjoint()).eval() : Eigen::MatrixXcd();
        auto lifted = [&](Affine &a, double weight, const Eigen::VectorXcd &u) -> Affine &
        {
            if (fixed)
                return a.add_constant(weight * std::real(u.dot(v_fixed * u)));
            return a.add_block(lay.block, weight, u);
        };

        lay.block = fixed ? -1 : prog.add_block(N + 1);
        lay.mu = prog.add_scalars(K);
        lay.gamma = prog.add_scalars(K);
        lay.rate = prog.add_scalars(K);

        for (int n = 0; !fixed && n <= N; ++n)
        {
            Eigen::VectorXcd en = Eigen::VectorXcd::Zero(N + 1);
            en[n] = 1.0;
            prog.add_equality(Affine().add_block(lay.block, 1.0, en).add_constant(-1.0));
        }

        for (int k = 0; k < K; ++k)
        {
            const double sigma = std::sqrt(noise[k]);
            const int mu = lay.mu + k, g = lay.gamma + k, r = lay.rate + k;
            // Tr(V U_kk) >= mu^2
            Affine signal;
            prog.add_rotated_soc(lifted(signal, 1.0, lifting_vector(hh[static_cast<size_t>(k)], p.col(k), sigma)), Affine(0.5),
                                 {Affine::var(mu)});
            prog.add_nonneg(Affine::var(mu));
            // tangent of mu^2 / gamma at the expansion point bounds interference plus noise
            const double mb = e.mu[k], gb = std::max(e.gamma[k], 1e-12);
            Affine lin = Affine::var(mu, 2.0 * mb / gb).add(g, -mb * mb / (gb * gb)).add_constant(-1.0);
            for (int j = 0; j < K; ++j)
                if (j != k)
                    lifted(lin, -1.0, lifting_vector(hh[static_cast<size_t>(k)], p.col(j), sigma));
            prog.add_nonneg(lin);
            prog.add_nonneg(Affine::var(g).add_constant(-gamma_min));
            // r <= ln(1 + gamma)
            prog.add_log_hypo(Affine::var(r), Affine::var(g).add_constant(1.0));
            prog.objective.add(r, 1.0 / std::numbers::ln2);
        }

        if (e.epsilon > 0.0 && !fixed)
            prog.add_nonneg(Affine().add_block(lay.block, 1.0, e.zeta).add_constant(-e.epsilon * (N + 1)));
        if (layout)
            *layout = lay;
        return prog;
    }

    Eigen::VectorXd extract_phases(const Eigen::MatrixXcd &v, const Eigen::VectorXd &previous)
    {
        const Eigen::Index N = v.rows() - 1;
        if (N < 1 || v.cols() != v.rows())
            throw std::invalid_argument("extract_phases: expected a square lifted matrix");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(v);
        Eigen::VectorXcd u = es.eigenvectors().col(N);
        Eigen::VectorXd out(N);
        if (std::abs(u[N]) >= 1e-9)
        {
            u /= u[N];
        }
        else
        {
            // align the global phase with the previous layer setting
            if (previous.size() != N)
                throw std::invalid_argument("extract_phases: previous phases needed for the fallback");
            cplx c = 0.0;
            for (Eigen::Index n = 0; n < N; ++n)
                c += std::conj(u[n]) * std::polar(1.0, previous[n]);
            if (std::abs(c) > 0.0)
                u *= c / std::abs(c);
        }
        for (Eigen::Index n = 0; n < N; ++n)
            out[n] = wrap_phase(std::arg(u[n]));
        return out;
    }

    LayerUpdate optimize_layer(int m, const ChannelRealization &ch, const Eigen::MatrixXd &phases, const Eigen::MatrixXcd &p,
                               const SystemConfig &config)
    {
        LayerUpdate out;
        const Eigen::VectorXd prev = phases.row(m - 1).transpose();
        out.phases = prev;
        const RateReport before = rates_for(ch, phases, p);
        out.rate_before = out.rate_after = before.sum_rate;
        const double qos = before.sinr.minCoeff() >= config.gamma_min ? config.gamma_min : 0.0;

        const auto hh = build_layer_channel(ch, phases, m);
        Eigen::MatrixXcd v = lifted_vector(prev) * lifted_vector(prev).adjoint();
        Eigen::MatrixXd rx = lifted_powers(hh, p, ch.noise_w, v);

        const double N1 = static_cast<double>(prev.size() + 1);
        conic::SolverOptions opts;
        // Candidates are re-scored on the true cascade, so a modest gap suffices; it also keeps the
        // barrier weight low enough for the unit-diagonal rows to stay within the residual limit.
        opts.tolerance = 1e-6;
        double best = before.sum_rate;
        Eigen::VectorXd best_phases = prev;
        const int rounds = static_cast<int>(std::ceil(1.0 / config.sdp_eps_step - 1e-9)) + 1;
        double opt_prev = 0.0;
        bool settled = false;
        for (int l = 0; l < rounds; ++l)
        {
            SdpRound round;
            // once the relaxed objective settles the schedule jumps to its rank-one end
            round.epsilon = settled ? 1.0 : std::min(1.0, l * config.sdp_eps_step);
            const SdpExpansion e = expansion_from(rx, v, round.epsilon);
            const conic::Solution sol = conic::solve(build_sdp_subproblem(hh, p, ch.noise_w, e, qos), opts);
            round.status = sol.status;
            round.newton = sol.iterations;
            if (sol.status != conic::Status::optimal)
            {
                out.rounds.push_back(round);
                std::ostringstream s;
                s << "round " << l << " ended with status " << conic::to_string(sol.status);
                out.note = s.str();
                break;
            }
            v = sol.blocks.empty() ? ((N1 * e.zeta) * e.zeta.adjoint()).eval() : sol.blocks.front();
            rx = lifted_powers(hh, p, ch.noise_w, v);
            round.lambda_ratio = eigen_ratio(v);

            Eigen::MatrixXd cand = phases;
            cand.row(m - 1) = extract_phases(v, prev).transpose();
            const RateReport r = rates_for(ch, cand, p);
            round.candidate_rate = r.sum_rate;
            out.rounds.push_back(round);
            if (r.sum_rate > best && r.sinr.minCoeff() >= qos)
            {
                best = r.sum_rate;
                best_phases = cand.row(m - 1).transpose();
            }
            if (round.epsilon >= 1.0)
                break;
            settled = l > 0 && std::abs(sol.objective - opt_prev) <= config.sca_tolerance * std::abs(sol.objective);
            opt_prev = sol.objective;
        }
        if (best > before.sum_rate)
        {
            out.accepted = true;
            out.phases = best_phases;
            out.rate_after = best;
        }
        else if (out.note.empty())
        {
            out.note = "no candidate improved the sum rate";
        }
        return out;
    }
}
