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
#include <numbers>

#include "simee/channel.hpp"
#include "simee/metrics.hpp"

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

    // Field propagation one element at a time, recomputing every coefficient from positions.
    cplx propagate(const SimGeometry &g, const Eigen::MatrixXd &phases, const Eigen::VectorXcd &h, int l)
    {
        std::vector<cplx> field(static_cast<size_t>(g.atoms));
        for (int n = 0; n < g.atoms; ++n)
            field[n] = std::polar(1.0, phases(0, n)) *
                       diffraction_coefficient(g.antenna_positions.col(l), g.layer_positions[0].col(n), g);
        for (int m = 1; m < g.layers; ++m)
        {
            std::vector<cplx> next(static_cast<size_t>(g.atoms), 0.0);
            for (int n = 0; n < g.atoms; ++n)
            {
                for (int s = 0; s < g.atoms; ++s)
                    next[n] += diffraction_coefficient(g.layer_positions[m - 1].col(s), g.layer_positions[m].col(n), g) * field[s];
                next[n] *= std::polar(1.0, phases(m, n));
            }
            field = next;
        }
        cplx out = 0.0;
        for (int n = 0; n < g.atoms; ++n)
            out += std::conj(h[n]) * field[n];
        return out;
    }
}

TEST_CASE("wavelength and pitch at 28 GHz")
{
    const SimGeometry g = build_geometry(SystemConfig{});
    CHECK(g.wavelength == doctest::Approx(0.010714).epsilon(1e-4));
    CHECK(g.pitch == doctest::Approx(0.005357).epsilon(1e-4));
    CHECK(g.layer_spacing == doctest::Approx(5.0 * g.wavelength / 4.0));
}

TEST_CASE("axial coefficient at one wavelength")
{
    SystemConfig c = small(1, 1, 5, 1);
    SimGeometry g = build_geometry(c);
    g.layer_spacing = g.wavelength;
    const cplx w = diffraction_coefficient({0, 0, 0}, {0, 0, g.wavelength}, g);
    const double expect = 0.25 * std::sqrt(1.0 / (4.0 * std::numbers::pi * std::numbers::pi) + 1.0);
    CHECK(std::abs(w) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(std::abs(w) == doctest::Approx(0.2531).epsilon(1e-3));
}

TEST_CASE("single atom single antenna: W1 is the axial coefficient")
{
    const SystemConfig c = small(1, 1, 2, 1);
    const SimGeometry g = build_geometry(c);
    const auto w = build_interlayer_matrices(g);
    const double d = g.layer_spacing, lam = g.wavelength;
    const cplx expect = (g.pitch * g.pitch / d) * cplx(1.0 / (2 * std::numbers::pi * d), -1.0 / lam) *
                        std::polar(1.0, 2 * std::numbers::pi * d / lam);
    CHECK(std::abs(w[0](0, 0) - expect) < 1e-14 * std::abs(expect));
}

TEST_CASE("inter-layer matrices depend only on index offsets")
{
    const SimGeometry g = build_geometry(small(1, 2, 3, 16));
    const auto w = build_interlayer_matrices(g);
    const int s = g.atoms_per_side;
    auto idx = [s](int x, int y) { return y * s + x; };
    for (int m = 1; m < 3; ++m)
    {
        CHECK(std::abs(w[m](idx(1, 1), idx(0, 0)) - w[m](idx(3, 2), idx(2, 1))) < 1e-15);
        CHECK(std::abs(w[m](idx(0, 2), idx(1, 0)) - w[m](idx(2, 3), idx(3, 1))) < 1e-15);
        CHECK((w[m] - w[m].transpose()).cwiseAbs().maxCoeff() < 1e-15); // reciprocity on parallel planes
    }
}

TEST_CASE("path loss constants")
{
    const SystemConfig c;
    CHECK(path_loss(1.0 + 1e-12, c) == doctest::Approx(7.27e-7).epsilon(2e-3));
    CHECK(10 * std::log10(path_loss(1.0 + 1e-12, c)) == doctest::Approx(-61.4).epsilon(1e-3));
    CHECK(path_loss(100.0, c) == doctest::Approx(7.27e-14).epsilon(2e-3));
    CHECK_THROWS_AS(path_loss(1.0, c), std::domain_error);
}

TEST_CASE("sinc correlation")
{
    const SimGeometry g = build_geometry(small(1, 1, 1, 9));
    const CorrelationModel r = build_sinc_correlation(g);
    CHECK(r.r(0, 0) == 1.0);
    // half-wavelength neighbours: sinc(1) = 0
    CHECK(std::abs(r.r(0, 1)) < 1e-15);
    CHECK(std::abs((r.root * r.root.transpose() - r.r).maxCoeff()) < 1e-10);
}

TEST_CASE("channel statistics")
{
    SystemConfig c = small(1, 1, 1, 9);
    const SimGeometry g = build_geometry(c);
    const auto w = build_interlayer_matrices(g);
    const CorrelationModel corr = build_sinc_correlation(g);
    const auto users = sample_user_positions(c, 5);
    const int draws = 10000;
    double beta = 0.0, energy = 0.0;
    Eigen::MatrixXcd cov = Eigen::MatrixXcd::Zero(c.atoms, c.atoms);
    for (int t = 0; t < draws; ++t)
    {
        const ChannelRealization ch = sample_user_channels(g, corr, w, users, c, 1000 + t);
        beta = ch.path_loss[0];
        energy += ch.h_sim.col(0).squaredNorm() / c.atoms;
        cov += ch.h_sim.col(0) * ch.h_sim.col(0).adjoint();
    }
    cov /= draws * beta;
    CHECK(energy / draws == doctest::Approx(beta).epsilon(0.03));
    // grid spacing lambda/2 zeroes the sinc for axis neighbours; the diagonal is 1
    for (int i = 0; i < c.atoms; ++i)
        CHECK(std::abs(cov(i, i) - 1.0) < 0.05);
    CHECK(std::abs(cov(0, 1)) < 0.05);
}

TEST_CASE("users stay in the cluster disc")
{
    SystemConfig c;
    const auto pos = sample_user_positions(c, 11);
    for (int k = 0; k < c.users; ++k)
    {
        CHECK(std::hypot(pos(0, k) - 100.0, pos(1, k)) <= 5.0);
        CHECK(pos(2, k) == doctest::Approx(1.65));
    }
}

TEST_CASE("effective channel matches element-wise propagation")
{
    for (int seed = 0; seed < 3; ++seed)
    {
        SystemConfig c = small(2, 3, 3, 9);
        const SimGeometry g = build_geometry(c);
        const ChannelRealization ch = build_channel(c, 40 + seed);
        const Eigen::MatrixXd ph = random_phases(3, 9, 90 + seed);
        const Eigen::MatrixXcd heff = effective_channels(ch, PhaseState(ph, ch.w));
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 3; ++l)
            {
                const cplx ref = propagate(g, ph, ch.h_sim.col(k), l);
                CHECK(std::abs(heff(k, l) - ref) <= 1e-10 * std::abs(ref));
            }
    }
}

TEST_CASE("constant shift of the last layer rotates every channel")
{
    SystemConfig c = small(3, 3, 2, 9);
    const ChannelRealization ch = build_channel(c, 3);
    Eigen::MatrixXd ph = random_phases(2, 9, 4);
    const Eigen::MatrixXcd a = effective_channels(ch, PhaseState(ph, ch.w));
    ph.row(1).array() += 0.7;
    const Eigen::MatrixXcd b = effective_channels(ch, PhaseState(ph, ch.w));
    CHECK((b - std::polar(1.0, 0.7) * a).norm() < 1e-12 * a.norm());
    const Eigen::MatrixXcd p = Eigen::MatrixXcd::Random(3, 3);
    const RateReport ra = rates(a, p, ch.noise_w), rb = rates(b, p, ch.noise_w);
    CHECK((ra.sinr - rb.sinr).cwiseAbs().maxCoeff() < 1e-9 * ra.sinr.maxCoeff());
}

TEST_CASE("phase state layer update matches a fresh cascade")
{
    SystemConfig c = small(1, 2, 3, 4);
    const ChannelRealization ch = build_channel(c, 8);
    Eigen::MatrixXd ph = random_phases(3, 4, 1);
    PhaseState s(ph, ch.w);
    Eigen::VectorXd row = Eigen::VectorXd::LinSpaced(4, -1.0, 8.0);
    s.set_layer(2, row, ch.w);
    ph.row(1) = row.transpose();
    CHECK((s.cascade() - cascade_matrix(ph.unaryExpr([](double x) { return wrap_phase(x); }), ch.w)).norm() < 1e-14);
    CHECK(wrap_phase(-1e-18) == 0.0);
    CHECK(wrap_phase(7.0) == doctest::Approx(7.0 - 2 * std::numbers::pi));
}
