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

#include <doctest.h>

#include <cmath>

#include "simee/ao.hpp"
#include "simee/metrics.hpp"
#include "simee/pga_sim.hpp"
#include "simee/sca_precoder.hpp"

using namespace simee;

namespace
{
    PrecoderContext context(const SystemConfig &c, std::uint64_t seed)
    {
        // random phases rarely admit the QoS floor; steer them for the one-stream precoder first
        const ChannelRealization ch = build_channel(c, seed);
        PgaOptions opt;
        opt.config = c.pga;
        const PhaseState ph(run_pga(ch, one_stream_precoder(c), opt, seed + 1).phases, ch.w);
        return {effective_channels(ch, ph), ch.noise_w, c.atoms, c.layers};
    }
}

TEST_CASE("AM-GM bound is tight at the update")
{
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Random(3, 4), p = Eigen::MatrixXcd::Random(4, 3);
    const Eigen::VectorXd noise = Eigen::VectorXd::Constant(3, 0.2);
    const RateReport r = rates(h, p, noise);
    const Eigen::VectorXd q = update_q(r.sinr, p, h, noise);
    const Eigen::MatrixXd rx = (h * p).cwiseAbs2();
    for (int k = 0; k < 3; ++k)
    {
        const double x = std::sqrt(r.sinr[k]);
        const double y = std::sqrt(rx.row(k).sum() - rx(k, k) + noise[k]);
        CHECK(x * x / q[k] + q[k] * y * y == doctest::Approx(2 * x * y).epsilon(1e-12));
    }
}

TEST_CASE("q is invariant under a unitary change of antenna basis")
{
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Random(2, 3), p = Eigen::MatrixXcd::Random(3, 2);
    const Eigen::VectorXd noise = Eigen::VectorXd::Constant(2, 0.5);
    const Eigen::MatrixXcd u = Eigen::HouseholderQR<Eigen::MatrixXcd>(Eigen::MatrixXcd::Random(3, 3)).householderQ();
    const Eigen::VectorXd g = Eigen::VectorXd::Constant(2, 1.3);
    const Eigen::VectorXd a = update_q(g, p, h, noise), b = update_q(g, u.adjoint() * p, h * u, noise);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("rotation makes the desired gains real")
{
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Random(3, 3), p = Eigen::MatrixXcd::Random(3, 3);
    const Eigen::MatrixXcd r = rotate_precoder(p, h);
    const Eigen::MatrixXcd g = h * r;
    for (int k = 0; k < 3; ++k)
    {
        CHECK(std::abs(g(k, k).imag()) < 1e-12);
        CHECK(g(k, k).real() >= 0.0);
    }
    CHECK(rates(h, r, Eigen::VectorXd::Ones(3)).sum_rate == doctest::Approx(rates(h, p, Eigen::VectorXd::Ones(3)).sum_rate));
}

TEST_CASE("pinning keeps the strongest chains above rho")
{
    Eigen::MatrixXcd p(4, 2);
    p << 0.1, 0, 0.8, 0, 0, 1e-3, 0.3, 0.2;
    const auto pin = pin_chains(p, 2, 1e-4);
    CHECK(pin == std::vector<bool>{false, true, false, true});
}

TEST_CASE("SCA objective trace is nondecreasing and iterates stay feasible")
{
    SystemConfig c;
    c.atoms = 25;
    int ran = 0;
    for (int i = 0; i < 20; ++i)
    {
        const PrecoderContext ctx = context(c, 500 + 3 * i);
        const InitResult init = initial_precoder(ctx, c);
        if (!init.feasible)
            continue;
        ++ran;
        CHECK(precoder_feasible(ctx, init.precoder, c));
        const RateReport r0 = rates(ctx.heff, init.precoder, ctx.noise_w);
        const PowerBreakdown p0 = power_breakdown(init.precoder, c.power, c.atoms, c.layers, c.users, ActivationRule::hard);
        const ScaResult s = run_sca(ctx, update_t(r0.sum_rate, p0.total_w), c, init.precoder);
        for (size_t j = 1; j < s.state.trace.size(); ++j)
            CHECK(s.state.trace[j] >= s.state.trace[j - 1] - 1e-9 * std::abs(s.state.trace[j - 1]));
        CHECK(precoder_feasible(ctx, s.precoder, c));
    }
    MESSAGE("instances with a feasible start: " << ran);
    CHECK(ran >= 10);
}

TEST_CASE("single antenna single user: closed-form power")
{
    SystemConfig c;
    c.users = 1;
    c.antennas = 1;
    c.atoms = 1;
    c.layers = 1;
    c.power.static_w = 0.05;
    c.power.meta_w = 0.0;
    c.power.controller_w = 0.0;
    c.power.ue_w = 0.0;
    c.gamma_min = 0.0;
    PrecoderContext ctx;
    ctx.heff.resize(1, 1);
    ctx.heff(0, 0) = cplx(2.0, -1.0);
    ctx.noise_w = Eigen::VectorXd::Constant(1, 0.5); // |h|^2 / sigma^2 = 10 per watt
    ctx.atoms = 1;
    ctx.layers = 1;

    // 1-D grid over the transmit power
    const double cap = std::min(c.p_max_w, c.p_antenna_max_w);
    double best_x = 0.0, best = -1.0;
    for (int i = 1; i <= 200000; ++i)
    {
        const double x = cap * i / 200000.0;
        const double ee = std::log2(1 + 10 * x) / (x / c.power.pa_efficiency + c.power.rf_active_w + c.power.static_w);
        if (ee > best)
            best = ee, best_x = x;
    }
    REQUIRE(best_x < 0.9 * cap); // interior optimum

    Eigen::MatrixXcd p = initial_precoder(ctx, c).precoder;
    for (int it = 0; it < 60; ++it)
    {
        const RateReport r = rates(ctx.heff, p, ctx.noise_w);
        const PowerBreakdown pw = power_breakdown(p, c.power, 1, 1, 1, ActivationRule::hard);
        p = run_sca(ctx, update_t(r.sum_rate, pw.total_w), c, p).precoder;
    }
    CHECK(std::norm(p(0, 0)) == doctest::Approx(best_x).epsilon(0.01));
}

TEST_CASE("QoS floor binds when power-starved")
{
    SystemConfig c;
    c.atoms = 25;
    const PrecoderContext ctx = context(c, 77);
    const InitResult init = initial_precoder(ctx, c);
    if (init.feasible)
    {
        const RateReport r = rates(ctx.heff, init.precoder, ctx.noise_w);
        CHECK(r.sinr.minCoeff() >= c.gamma_min * (1 - 1e-6));
    }
    SystemConfig starved = c;
    starved.p_max_w = 1e-9;
    starved.p_antenna_max_w = 1e-9;
    CHECK_FALSE(initial_precoder(ctx, starved).feasible);
}
