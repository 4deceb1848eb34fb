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

#ifndef SIMEE_CHANNEL_HPP
#define SIMEE_CHANNEL_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "simee/config.hpp"

namespace simee
{
    using cplx = std::complex<double>;

    struct SimGeometry
    {
        double wavelength = 0.0;    // m
        double pitch = 0.0;         // meta-atom spacing, d_x = d_y
        double thickness = 0.0;     // T_SIM
        double layer_spacing = 0.0; // T_SIM / M
        double antenna_pitch = 0.0;
        int atoms_per_side = 0;
        int atoms = 0;
        int layers = 0;
        int antennas = 0;

        // Antennas sit in the plane z = 0, layer m (1-based) in the plane z = m * layer_spacing.
        Eigen::Matrix3Xd antenna_positions;            // 3 x L
        std::vector<Eigen::Matrix3Xd> layer_positions; // M entries, 3 x N each
    };

    SimGeometry build_geometry(const SystemConfig &config);

    // Rayleigh-Sommerfeld coefficient between two elements on parallel planes.
    cplx diffraction_coefficient(const Eigen::Vector3d &src, const Eigen::Vector3d &dst, const SimGeometry &geometry);

    // Element 0 is W_1 (N x L); element m-1 is W_m (N x N) for m >= 2.
    std::vector<Eigen::MatrixXcd> build_interlayer_matrices(const SimGeometry &geometry);

    struct CorrelationModel
    {
        Eigen::MatrixXd r;    // N x N, sinc(2 d / lambda)
        Eigen::MatrixXd root; // S with S S^T = R with negative eigenvalues clamped
    };

    CorrelationModel build_sinc_correlation(const SimGeometry &geometry);

    // beta = (lambda / (4 pi d0))^2 (d / d0)^(-exponent); throws std::domain_error for d <= d0.
    double path_loss(double distance_m, const SystemConfig &config);

    struct ChannelRealization
    {
        std::vector<Eigen::MatrixXcd> w; // see build_interlayer_matrices
        Eigen::MatrixXcd h_sim;          // N x K, column k is h_SIM,k
        Eigen::VectorXd path_loss;       // beta_k
        Eigen::VectorXd noise_w;         // sigma_k^2
        Eigen::Matrix3Xd user_positions; // 3 x K

        int atoms() const { return static_cast<int>(h_sim.rows()); }
        int users() const { return static_cast<int>(h_sim.cols()); }
        int layers() const { return static_cast<int>(w.size()); }
        int antennas() const { return static_cast<int>(w.front().cols()); }
    };

    // Users i.i.d. uniform in the cluster disc, heights from the config.
    Eigen::Matrix3Xd sample_user_positions(const SystemConfig &config, std::uint64_t seed);

    // h_k = sqrt(beta_k) S z_k with z_k ~ CN(0, I).
    ChannelRealization sample_user_channels(const SimGeometry &geometry, const CorrelationModel &correlation,
                                            const std::vector<Eigen::MatrixXcd> &matrices,
                                            const Eigen::Matrix3Xd &user_positions, const SystemConfig &config,
                                            std::uint64_t seed);

    // Whole pipeline for one Monte-Carlo draw.
    ChannelRealization build_channel(const SystemConfig &config, std::uint64_t seed);

    class PhaseState
    {
    public:
        PhaseState() = default;
        // phases: M x N radians (any real values, wrapped on entry).
        PhaseState(const Eigen::MatrixXd &phases, const std::vector<Eigen::MatrixXcd> &matrices);

        const Eigen::MatrixXd &phases() const { return phases_; }
        const Eigen::MatrixXcd &cascade() const { return g_; }
        int layers() const { return static_cast<int>(phases_.rows()); }
        int atoms() const { return static_cast<int>(phases_.cols()); }

        // Replaces the phases of layer m (1-based) and refreshes G.
        void set_layer(int m, const Eigen::VectorXd &phases, const std::vector<Eigen::MatrixXcd> &matrices);
        void set_all(const Eigen::MatrixXd &phases, const std::vector<Eigen::MatrixXcd> &matrices);

    private:
        Eigen::MatrixXd phases_;
        Eigen::MatrixXcd g_;
    };

    // G = Phi_M W_M ... Phi_2 W_2 Phi_1, computed from scratch.
    Eigen::MatrixXcd cascade_matrix(const Eigen::MatrixXd &phases, const std::vector<Eigen::MatrixXcd> &matrices);

    PhaseState compose_cascade(const Eigen::MatrixXd &phases, const std::vector<Eigen::MatrixXcd> &matrices);

    Eigen::MatrixXd random_phases(int layers, int atoms, std::uint64_t seed);

    double wrap_phase(double x); // into [0, 2 pi)
}

#endif
