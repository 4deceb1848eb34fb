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

#include "simee/channel.hpp"

#include "simee/rng.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace simee
{
    namespace
    {
        constexpr double two_pi = 2.0 * std::numbers::pi;

        double sinc(double x)
        {
            if (std::abs(x) < 1e-12)
                return 1.0;
            return std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
        }
    }

    double wrap_phase(double x)
    {
        double y = std::fmod(x, two_pi);
        if (y < 0.0)
            y += two_pi;
        if (y >= two_pi) // fmod of a tiny negative value
            y = 0.0;
        return y;
    }

    SimGeometry build_geometry(const SystemConfig &config)
    {
        if (config.users < 1 || config.antennas < 1 || config.layers < 1)
            throw std::invalid_argument("build_geometry: counts must be positive");
        if (!(config.sim_thickness_wl > 0.0) || !(config.atom_pitch_wl > 0.0) || !(config.antenna_pitch_wl > 0.0))
            throw std::invalid_argument("build_geometry: lengths must be positive");

        SimGeometry g;
        g.wavelength = config.wavelength_m();
        g.pitch = config.atom_pitch_wl * g.wavelength;
        g.thickness = config.sim_thickness_wl * g.wavelength;
        g.layers = config.layers;
        g.layer_spacing = g.thickness / g.layers;
        g.antenna_pitch = config.antenna_pitch_wl * g.wavelength;
        g.atoms_per_side = config.atoms_per_side();
        g.atoms = config.atoms;
        g.antennas = config.antennas;

        g.antenna_positions.resize(3, g.antennas);
        const double a0 = 0.5 * (g.antennas - 1);
        for (int l = 0; l < g.antennas; ++l)
            g.antenna_positions.col(l) << (l - a0) * g.antenna_pitch, 0.0, 0.0;

        const int nx = g.atoms_per_side;
        const double c0 = 0.5 * (nx - 1);
        for (int m = 1; m <= g.layers; ++m)
        {
            Eigen::Matrix3Xd pos(3, g.atoms);
            for (int iy = 0; iy < nx; ++iy)
                for (int ix = 0; ix < nx; ++ix)
                    pos.col(iy * nx + ix) << (ix - c0) * g.pitch, (iy - c0) * g.pitch, m * g.layer_spacing;
            g.layer_positions.push_back(std::move(pos));
        }
        return g;
    }

    cplx diffraction_coefficient(const Eigen::Vector3d &src, const Eigen::Vector3d &dst, const SimGeometry &geometry)
    {
        const double d = (dst - src).norm();
        if (!(d > 0.0))
            throw std::domain_error("diffraction_coefficient: coincident points");
        const double lambda = geometry.wavelength;
        const double cos_chi = geometry.layer_spacing / d;
        const double area = geometry.pitch * geometry.pitch;
        const cplx near_far(1.0 / (two_pi * d), -1.0 / lambda);
        return (area * cos_chi / d) * near_far * std::polar(1.0, two_pi * d / lambda);
    }

    std::vector<Eigen::MatrixXcd> build_interlayer_matrices(const SimGeometry &geometry)
    {
        std::vector<Eigen::MatrixXcd> out;
        out.reserve(static_cast<size_t>(geometry.layers));

        Eigen::MatrixXcd w1(geometry.atoms, geometry.antennas);
        for (int n = 0; n < geometry.atoms; ++n)
            for (int l = 0; l < geometry.antennas; ++l)
                w1(n, l) = diffraction_coefficient(geometry.antenna_positions.col(l), geometry.layer_positions[0].col(n), geometry);
        out.push_back(std::move(w1));

        for (int m = 2; m <= geometry.layers; ++m)
        {
            const auto &src = geometry.layer_positions[static_cast<size_t>(m - 2)];
            const auto &dst = geometry.layer_positions[static_cast<size_t>(m - 1)];
            Eigen::MatrixXcd w(geometry.atoms, geometry.atoms);
            for (int n = 0; n < geometry.atoms; ++n)
                for (int np = 0; np < geometry.atoms; ++np)
                    w(n, np) = diffraction_coefficient(src.col(np), dst.col(n), geometry);
            out.push_back(std::move(w));
        }
        return out;
    }

    CorrelationModel build_sinc_correlation(const SimGeometry &geometry)
    {
        const auto &pos = geometry.layer_positions.back();
        const int n = geometry.atoms;
        CorrelationModel c;
        c.r.resize(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
            {
                const double d = (pos.col(i).head<2>() - pos.col(j).head<2>()).norm();
                c.r(i, j) = sinc(2.0 * d / geometry.wavelength);
            }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c.r);
        const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
        c.root = eig.eigenvectors() * lam.cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();
        return c;
    }

    double path_loss(double distance_m, const SystemConfig &config)
    {
        const double d0 = config.reference_distance_m;
        if (!(distance_m > d0))
            throw std::domain_error("path_loss: distance must exceed the reference distance");
        const double c0 = std::pow(config.wavelength_m() / (4.0 * std::numbers::pi * d0), 2);
        return c0 * std::pow(distance_m / d0, -config.path_loss_exponent);
    }

    Eigen::Matrix3Xd sample_user_positions(const SystemConfig &config, std::uint64_t seed)
    {
        Rng rng(seed);
        Eigen::Matrix3Xd pos(3, config.users);
        for (int k = 0; k < config.users; ++k)
        {
            const double r = config.cluster_radius_m * std::sqrt(rng.uniform());
            const double a = two_pi * rng.uniform();
            pos.col(k) << config.cluster_distance_m + r * std::cos(a), r * std::sin(a), config.ue_height_m;
        }
        return pos;
    }

    ChannelRealization sample_user_channels(const SimGeometry &geometry, const CorrelationModel &correlation,
                                            const std::vector<Eigen::MatrixXcd> &matrices,
                                            const Eigen::Matrix3Xd &user_positions, const SystemConfig &config,
                                            std::uint64_t seed)
    {
        const int n = geometry.atoms;
        const int k_users = static_cast<int>(user_positions.cols());
        ChannelRealization ch;
        ch.w = matrices;
        ch.user_positions = user_positions;
        ch.path_loss.resize(k_users);
        ch.noise_w = Eigen::VectorXd::Constant(k_users, config.noise_power_w());
        ch.h_sim.resize(n, k_users);

        const Eigen::Vector3d bs(0.0, 0.0, config.bs_height_m);
        Rng rng(seed);
        for (int k = 0; k < k_users; ++k)
        {
            ch.path_loss[k] = path_loss((user_positions.col(k) - bs).norm(), config);
            Eigen::VectorXcd z(n);
            for (int i = 0; i < n; ++i)
                z[i] = rng.complex_normal();
            ch.h_sim.col(k) = std::sqrt(ch.path_loss[k]) * (correlation.root.cast<cplx>() * z);
        }
        return ch;
    }

    ChannelRealization build_channel(const SystemConfig &config, std::uint64_t seed)
    {
        const SimGeometry g = build_geometry(config);
        const CorrelationModel c = build_sinc_correlation(g);
        const auto w = build_interlayer_matrices(g);
        const auto users = sample_user_positions(config, derive_seed(seed, 0, 1));
        return sample_user_channels(g, c, w, users, config, derive_seed(seed, 0, 2));
    }

    Eigen::MatrixXcd cascade_matrix(const Eigen::MatrixXd &phases, const std::vector<Eigen::MatrixXcd> &matrices)
    {
        const int m_layers = static_cast<int>(phases.rows());
        if (m_layers != static_cast<int>(matrices.size()))
            throw std::invalid_argument("cascade_matrix: phase rows must equal the layer count");
        const int n = static_cast<int>(phases.cols());
        if (matrices.front().rows() != n)
            throw std::invalid_argument("cascade_matrix: phase columns must equal the atom count");

        auto phi = [&](int m) -> Eigen::VectorXcd
        {
            Eigen::VectorXcd v(n);
            for (int i = 0; i < n; ++i)
                v[i] = std::polar(1.0, phases(m - 1, i));
            return v;
        };
        Eigen::MatrixXcd g = phi(1).asDiagonal().toDenseMatrix();
        for (int m = 2; m <= m_layers; ++m)
            g = phi(m).asDiagonal() * (matrices[static_cast<size_t>(m - 1)] * g);
        return g;
    }

    PhaseState::PhaseState(const Eigen::MatrixXd &phases, const std::vector<Eigen::MatrixXcd> &matrices)
    {
        set_all(phases, matrices);
    }

    void PhaseState::set_all(const Eigen::MatrixXd &phases, const std::vector<Eigen::MatrixXcd> &matrices)
    {
        phases_ = phases.unaryExpr([](double x) { return wrap_phase(x); });
        g_ = cascade_matrix(phases_, matrices);
    }

    void PhaseState::set_layer(int m, const Eigen::VectorXd &phases, const std::vector<Eigen::MatrixXcd> &matrices)
    {
        if (m < 1 || m > layers() || phases.size() != atoms())
            throw std::invalid_argument("PhaseState::set_layer: index or size out of range");
        phases_.row(m - 1) = phases.unaryExpr([](double x) { return wrap_phase(x); }).transpose();
        g_ = cascade_matrix(phases_, matrices);
    }

    PhaseState compose_cascade(const Eigen::MatrixXd &phases, const std::vector<Eigen::MatrixXcd> &matrices)
    {
        return PhaseState(phases, matrices);
    }

    Eigen::MatrixXd random_phases(int layers, int atoms, std::uint64_t seed)
    {
        Rng rng(seed);
        Eigen::MatrixXd p(layers, atoms);
        for (int m = 0; m < layers; ++m)
            for (int n = 0; n < atoms; ++n)
                p(m, n) = two_pi * rng.uniform();
        return p;
    }
}
