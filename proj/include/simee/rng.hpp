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

#ifndef SIMEE_RNG_HPP
#define SIMEE_RNG_HPP

#include <complex>
#include <cstdint>
#include <random>

namespace simee
{
    // Portable random stream. std::uniform_real_distribution and std::normal_distribution are
    // implementation-defined, so doubles are built from raw mt19937_64 bits instead.
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed) : engine_(seed) {}

        double uniform(); // [0, 1)
        double uniform(double lo, double hi);
        double normal(); // standard normal, Box-Muller
        std::complex<double> complex_normal(); // CN(0, 1)

    private:
        std::mt19937_64 engine_;
        bool has_spare_ = false;
        double spare_ = 0.0;
    };

    std::uint64_t splitmix64(std::uint64_t x);

    // Independent stream seed for (master, index, purpose).
    std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t purpose = 0);
}

#endif
