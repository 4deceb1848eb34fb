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

#include "simee/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace simee
{
    namespace
    {
        std::string trim(const std::string &s)
        {
            size_t b = 0, e = s.size();
            while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
                ++b;
            while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
                --e;
            return s.substr(b, e - b);
        }

        std::string lower(std::string s)
        {
            std::transform(s.begin(), s.end(), s.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            return s;
        }

        std::vector<std::string> split(const std::string &s, char sep)
        {
            std::vector<std::string> out;
            std::stringstream ss(s);
            std::string item;
            while (std::getline(ss, item, sep))
            {
                item = trim(item);
                if (!item.empty())
                    out.push_back(item);
            }
            return out;
        }

        // Splits "35 dBm" into (35, "dbm").
        std::pair<double, std::string> number_with_unit(const std::string &key, const std::string &raw)
        {
            const std::string v = trim(raw);
            size_t pos = 0;
            double x = 0.0;
            try
            {
                x = std::stod(v, &pos);
            }
            catch (const std::exception &)
            {
                throw std::invalid_argument("config field '" + key + "': not a number: '" + raw + "'");
            }
            return {x, lower(trim(v.substr(pos)))};
        }

        double plain_number(const std::string &key, const std::string &raw)
        {
            auto [x, unit] = number_with_unit(key, raw);
            if (!unit.empty())
                throw std::invalid_argument("config field '" + key + "': unexpected unit '" + unit + "'");
            return x;
        }

        int integer(const std::string &key, const std::string &raw)
        {
            const double x = plain_number(key, raw);
            if (x != std::floor(x) || std::abs(x) > 1e9)
                throw std::invalid_argument("config field '" + key + "': expected an integer");
            return static_cast<int>(x);
        }

        double power_watts(const std::string &key, const std::string &raw)
        {
            auto [x, unit] = number_with_unit(key, raw);
            if (unit.empty() || unit == "w")
                return x;
            if (unit == "mw")
                return x * 1e-3;
            if (unit == "dbm")
                return dbm_to_watt(x);
            throw std::invalid_argument("config field '" + key + "': unknown power unit '" + unit + "'");
        }

        double ratio_linear(const std::string &key, const std::string &raw)
        {
            auto [x, unit] = number_with_unit(key, raw);
            if (unit.empty())
                return x;
            if (unit == "db")
                return db_to_linear(x);
            throw std::invalid_argument("config field '" + key + "': unknown ratio unit '" + unit + "'");
        }

        std::string fmt(double x)
        {
            std::ostringstream os;
            os.precision(17);
            os << x;
            return os.str();
        }

        using Setter = std::function<void(SystemConfig &, const std::string &, const std::string &)>;
        using Getter = std::function<std::string(const SystemConfig &)>;
        struct Field
        {
            Setter set;
            Getter get;
        };

        template <typename T>
        Field int_field(T SystemConfig::*member)
        {
            return {[member](SystemConfig &c, const std::string &k, const std::string &v) { c.*member = integer(k, v); },
                    [member](const SystemConfig &c) { return std::to_string(c.*member); }};
        }
        Field real_field(double SystemConfig::*member)
        {
            return {[member](SystemConfig &c, const std::string &k, const std::string &v) { c.*member = plain_number(k, v); },
                    [member](const SystemConfig &c) { return fmt(c.*member); }};
        }
        Field watt_field(double SystemConfig::*member)
        {
            return {[member](SystemConfig &c, const std::string &k, const std::string &v) { c.*member = power_watts(k, v); },
                    [member](const SystemConfig &c) { return fmt(c.*member) + " W"; }};
        }
        Field power_watt_field(double PowerParams::*member)
        {
            return {[member](SystemConfig &c, const std::string &k, const std::string &v) { c.power.*member = power_watts(k, v); },
                    [member](const SystemConfig &c) { return fmt(c.power.*member) + " W"; }};
        }
        Field power_real_field(double PowerParams::*member)
        {
            return {[member](SystemConfig &c, const std::string &k, const std::string &v) { c.power.*member = plain_number(k, v); },
                    [member](const SystemConfig &c) { return fmt(c.power.*member); }};
        }
        Field pga_real_field(double PgaConfig::*member)
        {
            return {[member](SystemConfig &c, const std::string &k, const std::string &v) { c.pga.*member = plain_number(k, v); },
                    [member](const SystemConfig &c) { return fmt(c.pga.*member); }};
        }
        Field pga_int_field(int PgaConfig::*member)
        {
            return {[member](SystemConfig &c, const std::string &k, const std::string &v) { c.pga.*member = integer(k, v); },
                    [member](const SystemConfig &c) { return std::to_string(c.pga.*member); }};
        }

        const std::vector<std::pair<std::string, Field>> &fields()
        {
            static const std::vector<std::pair<std::string, Field>> table = {
                {"k", int_field(&SystemConfig::users)},
                {"l", int_field(&SystemConfig::antennas)},
                {"m", int_field(&SystemConfig::layers)},
                {"n", int_field(&SystemConfig::atoms)},
                {"carrier_hz", real_field(&SystemConfig::carrier_hz)},
                {"bandwidth_hz", real_field(&SystemConfig::bandwidth_hz)},
                {"noise_dbm_per_hz", real_field(&SystemConfig::noise_dbm_per_hz)},
                {"sim_thickness_wl", real_field(&SystemConfig::sim_thickness_wl)},
                {"atom_pitch_wl", real_field(&SystemConfig::atom_pitch_wl)},
                {"antenna_pitch_wl", real_field(&SystemConfig::antenna_pitch_wl)},
                {"bs_height_m", real_field(&SystemConfig::bs_height_m)},
                {"ue_height_m", real_field(&SystemConfig::ue_height_m)},
                {"cluster_distance_m", real_field(&SystemConfig::cluster_distance_m)},
                {"cluster_radius_m", real_field(&SystemConfig::cluster_radius_m)},
                {"reference_distance_m", real_field(&SystemConfig::reference_distance_m)},
                {"path_loss_exponent", real_field(&SystemConfig::path_loss_exponent)},
                {"p_max", watt_field(&SystemConfig::p_max_w)},
                {"p_antenna_max", watt_field(&SystemConfig::p_antenna_max_w)},
                {"p_static", power_watt_field(&PowerParams::static_w)},
                {"p_rf_active", power_watt_field(&PowerParams::rf_active_w)},
                {"pa_efficiency", power_real_field(&PowerParams::pa_efficiency)},
                {"p_meta", power_watt_field(&PowerParams::meta_w)},
                {"p_controller", power_watt_field(&PowerParams::controller_w)},
                {"p_ue", power_watt_field(&PowerParams::ue_w)},
                {"rho", power_watt_field(&PowerParams::activation_threshold_w)},
                {"smoothing_eps", power_real_field(&PowerParams::smoothing)},
                {"gamma_min",
                 {[](SystemConfig &c, const std::string &k, const std::string &v) { c.gamma_min = ratio_linear(k, v); },
                  [](const SystemConfig &c) { return fmt(c.gamma_min); }}},
                {"ao_tolerance", real_field(&SystemConfig::ao_tolerance)},
                {"ao_max_iterations", int_field(&SystemConfig::ao_max_iterations)},
                {"sca_tolerance", real_field(&SystemConfig::sca_tolerance)},
                {"sca_max_iterations", int_field(&SystemConfig::sca_max_iterations)},
                {"sdp_eps_step", real_field(&SystemConfig::sdp_eps_step)},
                {"pga_initial_step", pga_real_field(&PgaConfig::initial_step)},
                {"pga_decay", pga_real_field(&PgaConfig::decay)},
                {"pga_min_step", pga_real_field(&PgaConfig::min_step)},
                {"pga_armijo", pga_real_field(&PgaConfig::armijo)},
                {"pga_max_iterations", pga_int_field(&PgaConfig::max_iterations)},
                {"pga_restarts", pga_int_field(&PgaConfig::restarts)},
                {"pga_tolerance", pga_real_field(&PgaConfig::relative_tolerance)},
                {"trials", int_field(&SystemConfig::trials)},
                {"seed",
                 {[](SystemConfig &c, const std::string &k, const std::string &v)
                  {
                      const std::string s = trim(v);
                      if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char ch) { return std::isdigit(ch); }))
                          throw std::invalid_argument("config field '" + k + "': expected a non-negative integer");
                      c.seed = std::stoull(s);
                  },
                  [](const SystemConfig &c) { return std::to_string(c.seed); }}},
                {"schemes",
                 {[](SystemConfig &c, const std::string &, const std::string &v) { c.schemes = split(v, ','); },
                  [](const SystemConfig &c)
                  {
                      std::string s;
                      for (size_t i = 0; i < c.schemes.size(); ++i)
                          s += (i ? "," : "") + c.schemes[i];
                      return s;
                  }}},
            };
            return table;
        }

        const Field *find_field(const std::string &key)
        {
            for (const auto &[name, f] : fields())
                if (name == key)
                    return &f;
            return nullptr;
        }
    }

    void PgaConfig::validate() const
    {
        if (!(initial_step > 0.0))
            throw std::invalid_argument("config field 'pga_initial_step' must be positive");
        if (!(decay > 0.0 && decay < 1.0))
            throw std::invalid_argument("config field 'pga_decay' must lie in (0, 1)");
        if (!(min_step > 0.0))
            throw std::invalid_argument("config field 'pga_min_step' must be positive");
        if (!(armijo >= 0.0 && armijo < 1.0))
            throw std::invalid_argument("config field 'pga_armijo' must lie in [0, 1)");
        if (max_iterations < 1)
            throw std::invalid_argument("config field 'pga_max_iterations' must be >= 1");
        if (restarts < 1)
            throw std::invalid_argument("config field 'pga_restarts' must be >= 1");
    }

    double SystemConfig::noise_power_w() const
    {
        return dbm_to_watt(noise_dbm_per_hz + 10.0 * std::log10(bandwidth_hz));
    }

    int SystemConfig::atoms_per_side() const
    {
        if (atoms < 1)
            throw std::invalid_argument("config field 'n' must be positive");
        const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(atoms))));
        if (side * side != atoms)
            throw std::invalid_argument("config field 'n' must be a perfect square, got " + std::to_string(atoms));
        return side;
    }

    void SystemConfig::validate() const
    {
        auto require = [](bool ok, const std::string &msg)
        {
            if (!ok)
                throw std::invalid_argument(msg);
        };
        require(users >= 1, "config field 'k' must be >= 1");
        require(antennas >= 1, "config field 'l' must be >= 1");
        require(layers >= 1, "config field 'm' must be >= 1");
        atoms_per_side();
        require(antennas >= users, "config fields 'l' and 'k' must satisfy l >= k");
        require(carrier_hz > 0.0, "config field 'carrier_hz' must be positive");
        require(bandwidth_hz > 0.0, "config field 'bandwidth_hz' must be positive");
        require(sim_thickness_wl > 0.0, "config field 'sim_thickness_wl' must be positive");
        require(atom_pitch_wl > 0.0, "config field 'atom_pitch_wl' must be positive");
        require(antenna_pitch_wl > 0.0, "config field 'antenna_pitch_wl' must be positive");
        require(bs_height_m >= 0.0 && ue_height_m >= 0.0, "config fields 'bs_height_m'/'ue_height_m' must be non-negative");
        require(cluster_distance_m > 0.0, "config field 'cluster_distance_m' must be positive");
        require(cluster_radius_m >= 0.0, "config field 'cluster_radius_m' must be non-negative");
        require(reference_distance_m > 0.0, "config field 'reference_distance_m' must be positive");
        require(p_max_w > 0.0, "config field 'p_max' must be positive");
        require(p_antenna_max_w > 0.0, "config field 'p_antenna_max' must be positive");
        require(gamma_min >= 0.0, "config field 'gamma_min' must be non-negative");
        require(ao_tolerance > 0.0, "config field 'ao_tolerance' must be positive");
        require(ao_max_iterations >= 1, "config field 'ao_max_iterations' must be >= 1");
        require(sca_tolerance > 0.0, "config field 'sca_tolerance' must be positive");
        require(sca_max_iterations >= 1, "config field 'sca_max_iterations' must be >= 1");
        require(sdp_eps_step > 0.0 && sdp_eps_step <= 1.0, "config field 'sdp_eps_step' must lie in (0, 1]");
        require(trials >= 1, "config field 'trials' must be >= 1");
        for (const auto &s : schemes)
            require(s == "hybrid-sdp" || s == "hybrid-pga" || s == "digital-pre" || s == "wave-sim",
                    "config field 'schemes': unknown scheme '" + s + "'");
        power.validate();
        pga.validate();
        for (const auto &axis : sweep)
        {
            require(axis.key != "sweep" && find_field(axis.key) != nullptr, "config field 'sweep': unknown key '" + axis.key + "'");
            require(!axis.values.empty(), "config field 'sweep': axis '" + axis.key + "' has no values");
        }
    }

    void apply_setting(SystemConfig &config, const std::string &key_raw, const std::string &value)
    {
        const std::string key = lower(trim(key_raw));
        if (key == "sweep")
        {
            const auto colon = value.find(':');
            if (colon == std::string::npos)
                throw std::invalid_argument("config field 'sweep': expected 'key: v1, v2, ...'");
            SweepAxis axis{lower(trim(value.substr(0, colon))), split(value.substr(colon + 1), ',')};
            const Field *f = find_field(axis.key);
            if (f == nullptr || axis.key == "schemes" || axis.key == "trials" || axis.key == "seed")
                throw std::invalid_argument("config field 'sweep': cannot sweep '" + axis.key + "'");
            SystemConfig probe = config;
            for (const auto &v : axis.values)
                f->set(probe, axis.key, v); // reject malformed values at load time
            config.sweep.push_back(std::move(axis));
            return;
        }
        const Field *f = find_field(key);
        if (f == nullptr)
            throw std::invalid_argument("unknown config key: '" + key + "'");
        f->set(config, key, value);
    }

    SystemConfig parse_config(const std::string &text)
    {
        SystemConfig config;
        std::vector<std::string> unknown;
        std::istringstream in(text);
        std::string line;
        int line_no = 0;
        while (std::getline(in, line))
        {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos)
                line = line.substr(0, hash);
            line = trim(line);
            if (line.empty())
                continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
            const std::string key = lower(trim(line.substr(0, eq)));
            if (key != "sweep" && find_field(key) == nullptr)
            {
                unknown.push_back(key);
                continue;
            }
            apply_setting(config, key, line.substr(eq + 1));
        }
        if (!unknown.empty())
        {
            std::string msg = "unknown config keys:";
            for (const auto &k : unknown)
                msg += " " + k;
            throw std::invalid_argument(msg);
        }
        config.validate();
        return config;
    }

    SystemConfig load_config(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot read config file: " + path);
        std::stringstream buffer;
        buffer << in.rdbuf();
        return parse_config(buffer.str());
    }

    std::string format_config(const SystemConfig &config)
    {
        std::ostringstream os;
        for (const auto &[name, f] : fields())
            os << name << " = " << f.get(config) << "\n";
        for (const auto &axis : config.sweep)
        {
            os << "sweep = " << axis.key << ":";
            for (size_t i = 0; i < axis.values.size(); ++i)
                os << (i ? ", " : " ") << axis.values[i];
            os << "\n";
        }
        return os.str();
    }

    std::vector<std::string> known_config_keys()
    {
        std::vector<std::string> keys;
        for (const auto &[name, f] : fields())
            keys.push_back(name);
        keys.push_back("sweep");
        return keys;
    }
}
