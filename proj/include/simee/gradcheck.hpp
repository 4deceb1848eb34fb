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

#ifndef SIMEE_GRADCHECK_HPP
#define SIMEE_GRADCHECK_HPP

#include <cstdint>
#include <vector>

namespace simee
{
    struct GradcheckCase
    {
        int users = 0, antennas = 0, layers = 0, atoms = 0;
        std::uint64_t seed = 0;
        double max_abs_error = 0.0;
        double gradient_scale = 0.0; // inf-norm of the finite-difference gradient
        double relative_error = 0.0; // max_abs_error / gradient_scale
    };

    struct GradcheckReport
    {
        std::vector<GradcheckCase> cases;
        double max_relative_error = 0.0;
        double seconds = 0.0;
    };

    struct GradcheckOptions
    {
        int instances = 50;
        double step = 1e-6; // central difference half-width, radians
        std::uint64_t seed = 2024;
    };

    // Analytic dR_sum/dphi against central differences on random small systems
    // (L = 2..4, K = 2..min(3, L), M = 1..3, N in {4, 9}).
    GradcheckReport run_gradcheck(const GradcheckOptions &options = {});
}

#endif
