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

#ifndef SIMEE_SDP_SIM_HPP
#define SIMEE_SDP_SIM_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "simee/channel.hpp"
#include "simee/conic.hpp"
#include "simee/config.hpp"

namespace simee
{
    // For user k and layer m: N x L matrix H_{k,m}^H with u^T H_{k,m}^H p = h_SIM,k^H G W_1 p,
    // where u holds the unit-modulus coefficients e^{j phi} of layer m.
    std::vector<Eigen::MatrixXcd> build_layer_channel(const ChannelRealization &channel, const Eigen::MatrixXd &phases, int m);

    // Lifted vector v = [e^{j phi}; 1] and its Gram matrix.
    Eigen::VectorXcd lifted_vector(const Eigen::VectorXd &layer_phases);

    // u_kj = [conj(H_{k,m}^H p_j); 0] / scale, so that u_kj^H V u_kj = |h_k^H G W_1 p_j|^2 / scale^2 for V = v v^H.
    Eigen::VectorXcd lifting_vector(const Eigen::MatrixXcd &layer_channel, const Eigen::VectorXcd &p, double scale = 1.0);

    struct SdpRound
    {
        double epsilon = 0.0;
        conic::Status status = conic::Status::numerical_limit;
        double lambda_ratio = 0.0; // lambda_2 / lambda_1 of the solution
        double candidate_rate = 0.0;
        int newton = 0; // solver steps spent on the round
    };

    struct LayerUpdate
    {
        Eigen::VectorXd phases; // accepted phases for the layer (previous ones when rejected)
        bool accepted = false;
        double rate_before = 0.0;
        double rate_after = 0.0;
        std::vector<SdpRound> rounds;
        std::string note; // why the update was rejected, if it was
    };

    // Expansion point and eigen-cut direction for one SDP round.
    struct SdpExpansion
    {
        Eigen::VectorXd mu;    // sqrt of normalized signal power
        Eigen::VectorXd gamma; // SINR
        Eigen::VectorXcd zeta; // unit-norm cut direction from the previous lifted matrix
        double epsilon = 0.0;  // eigen-cut level; 1 fixes V = (N + 1) zeta zeta^H
    };

    struct SdpLayout
    {
        int block = 0; // -1 when the lifted matrix is fixed
        int mu = 0;    // K
        int gamma = 0; // K
        int rate = 0;  // K, nats
    };

    // Channels are normalized by the noise standard deviation, so the noise term is 1.
    conic::ConvexProgram build_sdp_subproblem(const std::vector<Eigen::MatrixXcd> &layer_channels, const Eigen::MatrixXcd &precoder,
                                              const Eigen::VectorXd &noise_w, const SdpExpansion &expansion, double gamma_min,
                                              SdpLayout *layout = nullptr);

    // Leading-eigenvector phase recovery; falls back to `previous` alignment when the homogenizing entry vanishes.
    Eigen::VectorXd extract_phases(const Eigen::MatrixXcd &v, const Eigen::VectorXd &previous);

    // One layer of the SDP method with guarded acceptance.
    LayerUpdate optimize_layer(int m, const ChannelRealization &channel, const Eigen::MatrixXd &phases, const Eigen::MatrixXcd &precoder,
                               const SystemConfig &config);
}

#endif
