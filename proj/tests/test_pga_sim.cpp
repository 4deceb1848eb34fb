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

#include "fixtures.hpp"
#include "simee/pga_sim.hpp"
#include "simee/rng.hpp"

using namespace simee;

namespace
{
    SystemConfig small(int k, int l, int m, int n)
    {
        SystemConfig c;
        c.users = k;
        c.antennas = l;
        c.layers = m;
        c.atoms = n;
        return c;
    }

    Eigen::MatrixXcd random_precoder(int l, int k, std::uint64_t seed)
    {
        Rng rng(seed);
        Eigen::MatrixXcd p(l, k);
        for (int j = 0; j < k; ++j)
            for (int i = 0; i < l; ++i)
                p(i, j) = 0.7 * rng.complex_normal();
        return p;
    }
}

TEST_CASE("gradient matches central differences (L=2, K=2, M=2, N=4)")
{
    const SystemConfig c = small(2, 2, 2, 4);
    const ChannelRealization ch = build_channel(c, 31);
    const Eigen::MatrixXd ph = random_phases(2, 4, 32);
    const Eigen::MatrixXcd p = random_precoder(2, 2, 33);
    const Eigen::MatrixXd g = sum_rate_gradient(ch, ph, p);
    const double h = 1e-6;
    for (int m = 0; m < 2; ++m)
        for (int n = 0; n < 4; ++n)
        {
            Eigen::MatrixXd a = ph, b = ph;
            a(m, n) += h;
            b(m, n) -= h;
            const double fd = (sum_rate(ch, PhaseState(a, ch.w), p) - sum_rate(ch, PhaseState(b, ch.w), p)) / (2 * h);
            CHECK(std::abs(fd - g(m, n)) <= 1e-5 * std::abs(fd));
        }
}

TEST_CASE("cascade factors rebuild G")
{
    const SystemConfig c = small(1, 2, 3, 4);
    const ChannelRealization ch = build_channel(c, 3);
    const Eigen::MatrixXd ph = random_phases(3, 4, 4);
    const Eigen::MatrixXcd g = cascade_matrix(ph, ch.w);
    for (int m = 1; m <= 3; ++m)
    {
        const CascadeFactors f = cascade_factors(ph, ch.w, m);
        Eigen::VectorXcd d(4);
        for (int n = 0; n < 4; ++n)
            d[n] = std::polar(1.0, ph(m - 1, n));
        const Eigen::MatrixXcd rebuilt =
            m == 1 ? (f.b * d.asDiagonal()).eval() : (f.b * d.asDiagonal() * ch.w[m - 1] * f.q).eval();
        CHECK((rebuilt - g).norm() < 1e-12 * g.norm());
    }
}

TEST_CASE("a small step along the gradient increases the sum rate")
{
    for (int inst = 0; inst < 10; ++inst)
    {
        const SystemConfig c = small(2, 3, 2, 9);
        const ChannelRealization ch = build_channel(c, 90 + inst);
        const Eigen::MatrixXd ph = random_phases(2, 9, 100 + inst);
        const Eigen::MatrixXcd p = random_precoder(3, 2, inst);
        const Eigen::MatrixXd g = sum_rate_gradient(ch, ph, p);
        const double r0 = sum_rate(ch, PhaseState(ph, ch.w), p);
        const double step = 1e-3 / g.cwiseAbs().maxCoeff();
        CHECK(sum_rate(ch, PhaseState(pga_step(ph, g, step), ch.w), p) > r0);
    }
}

TEST_CASE("pga traces are nondecreasing within each restart")
{
    const SystemConfig c = small(3, 3, 2, 9);
    const ChannelRealization ch = build_channel(c, 5);
    PgaOptions opt;
    opt.config = c.pga;
    const PgaResult r = run_pga(ch, random_precoder(3, 3, 6), opt, 7);
    CHECK(r.traces.size() == static_cast<size_t>(c.pga.restarts));
    for (const auto &t : r.traces)
        for (size_t i = 1; i < t.size(); ++i)
            CHECK(t[i] >= t[i - 1]);
    CHECK(r.best_restart >= 0);
    CHECK(r.sum_rate == doctest::Approx(sum_rate(ch, PhaseState(r.phases, ch.w), random_precoder(3, 3, 6))));
}

TEST_CASE("step wraps into [0, 2 pi)")
{
    Eigen::MatrixXd ph(1, 3), g(1, 3);
    ph << 6.2, 0.05, 3.0;
    g << 1.0, -1.0, 0.0;
    const Eigen::MatrixXd out = pga_step(ph, g, 0.1);
    CHECK(out(0, 0) == doctest::Approx(6.3 - 2 * std::numbers::pi));
    CHECK(out(0, 1) == doctest::Approx(2 * std::numbers::pi - 0.05));
    CHECK(out(0, 2) == 3.0);
}

TEST_CASE("single user, two atoms: close to the grid optimum")
{
    SystemConfig c = small(1, 2, 1, 4);
    for (int inst = 0; inst < 5; ++inst)
    {
        const ChannelRealization ch = testing::two_atom_channel(c, 50 + inst);
        const Eigen::MatrixXcd p = random_precoder(2, 1, inst);
        PgaOptions opt;
        opt.config = c.pga;
        const PgaResult r = run_pga(ch, p, opt, inst);
        CHECK(r.sum_rate >= 0.98 * testing::grid_optimum(ch, p));
    }
}
