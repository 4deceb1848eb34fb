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

#ifndef SIMEE_CONFIG_HPP
#define SIMEE_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "simee/power.hpp"

namespace simee
{
    inline constexpr double speed_of_light = 3.0e8; // m/s, rounded as in the usual 28 GHz link budgets

    struct SweepAxis
    {
        std::string key;                 // any numeric config key, e.g. "m" or "p_max"
        std::vector<std::string> values; // raw values, parsed with the key's own unit rules
    };

    struct PgaConfig
    {
        double initial_step = 0.1;   // xi_0
        double decay = 0.5;          // backtracking factor
        double min_step = 1e-8;
        double armijo = 1e-4;        // sufficient-increase slope c
        int max_iterations = 100;
        int restarts = 4;
        double relative_tolerance = 1e-4;

        void validate() const;
    };

    struct SystemConfig
    {
        // counts
        int users = 4;    // K
        int antennas = 4; // L
        int layers = 4;   // M
        int atoms = 49;   // N, perfect square

        // radio
        double carrier_hz = 28e9;
        double bandwidth_hz = 10e6;
        double noise_dbm_per_hz = -174.0;

        // geometry, lengths in wavelengths where noted
        double sim_thickness_wl = 5.0;
        double atom_pitch_wl = 0.5;
        double antenna_pitch_wl = 0.5;
        double bs_height_m = 15.0;
        double ue_height_m = 1.65;
        double cluster_distance_m = 100.0;
        double cluster_radius_m = 5.0;
        double reference_distance_m = 1.0;
        double path_loss_exponent = 3.5;

        // power, watts
        double p_max_w = 3.1622776601683795;   // 35 dBm
        double p_antenna_max_w = 1.0;          // 30 dBm
        PowerParams power;
        double gamma_min = 1.0;                // linear (0 dB)

        // solver tolerances
        double ao_tolerance = 1e-3;
        int ao_max_iterations = 20;
        double sca_tolerance = 1e-3;
        int sca_max_iterations = 30;
        double sdp_eps_step = 0.2;
        PgaConfig pga;

        // experiment
        int trials = 1;
        std::uint64_t seed = 1;
        std::vector<std::string> schemes = {"hybrid-sdp", "hybrid-pga", "digital-pre", "wave-sim"};
        std::vector<SweepAxis> sweep;

        double wavelength_m() const { return speed_of_light / carrier_hz; }
        double noise_power_w() const; // sigma^2 = N0 * BW
        int atoms_per_side() const;   // sqrt(N), throws if N is not a perfect square

        // Throws std::invalid_argument naming the offending field.
        void validate() const;
    };

    // Applies one key=value assignment. Units: powers accept "dBm" or "W" suffixes (bare numbers
    // are watts), gamma_min accepts "dB" (bare numbers are linear).
    void apply_setting(SystemConfig &config, const std::string &key, const std::string &value);

    // Parses the key=value text format. Lines starting with '#' are comments.
    // Unknown keys raise std::invalid_argument listing all of them.
    SystemConfig parse_config(const std::string &text);
    SystemConfig load_config(const std::string &path);

    // Resolved configuration in the same key=value format (round-trips through parse_config).
    std::string format_config(const SystemConfig &config);

    std::vector<std::string> known_config_keys();
}

#endif
