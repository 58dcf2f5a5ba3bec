// SPDX-License-Identifier: Apache-2.0
//
// nearfield-bd: near-field array gain and beam depth analysis
// Copyright (C) 2026 The nearfield-bd Authors
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

#ifndef NFBD_EXPERIMENTS_HPP
#define NFBD_EXPERIMENTS_HPP

#include "beam_depth.hpp"
#include "csv.hpp"
#include "error.hpp"
#include "field.hpp"
#include "gain.hpp"
#include "geometry.hpp"
#include "multiplexing.hpp"
#include "parallel.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace nfbd::experiments
{
    using json = nlohmann::json;

    inline constexpr std::string_view version = "0.1.0";

    struct run_options
    {
        unsigned threads = 0; // 0: hardware concurrency
        std::optional<std::uint64_t> seed;
        std::string preset; // empty for a custom configuration
    };

    struct output
    {
        std::string suffix; // appended to the output stem; empty for the main file
        csv::table table;
    };

    struct run_result
    {
        std::string experiment;
        std::vector<output> outputs;
    };

    // ---- config reading ----------------------------------------------------------------------

    namespace detail
    {
        inline std::string join(const std::string &path, const std::string &key)
        {
            return path.empty() ? key : path + "." + key;
        }

        inline const json &field(const json &obj, const std::string &key, const std::string &path)
        {
            if (!obj.is_object())
                throw validation_error("'" + (path.empty() ? std::string("config") : path) + "' must be an object");
            const auto it = obj.find(key);
            if (it == obj.end())
                throw validation_error("missing field '" + join(path, key) + "'");
            return *it;
        }

        inline const json *optional_field(const json &obj, const std::string &key)
        {
            if (!obj.is_object())
                return nullptr;
            const auto it = obj.find(key);
            return it == obj.end() ? nullptr : &*it;
        }

        inline double number(const json &j, const std::string &path)
        {
            if (!j.is_number())
                throw validation_error("'" + path + "' must be a number");
            const double v = j.get<double>();
            if (!std::isfinite(v))
                throw validation_error("'" + path + "' must be finite");
            return v;
        }

        inline double positive(const json &j, const std::string &path)
        {
            const double v = number(j, path);
            if (!(v > 0.0))
                throw validation_error("'" + path + "' must be positive");
            return v;
        }

        inline long long integer(const json &j, const std::string &path)
        {
            if (!j.is_number_integer())
                throw validation_error("'" + path + "' must be an integer");
            return j.get<long long>();
        }

        inline std::string text(const json &j, const std::string &path)
        {
            if (!j.is_string())
                throw validation_error("'" + path + "' must be a string");
            return j.get<std::string>();
        }

        inline bool flag(const json &j, const std::string &path)
        {
            if (!j.is_boolean())
                throw validation_error("'" + path + "' must be true or false");
            return j.get<bool>();
        }

        inline double number_or(const json &obj, const std::string &key, const std::string &path, double fallback)
        {
            const json *j = optional_field(obj, key);
            return j ? number(*j, join(path, key)) : fallback;
        }

        inline std::string text_or(const json &obj, const std::string &key, const std::string &path,
                                   std::string fallback)
        {
            const json *j = optional_field(obj, key);
            return j ? text(*j, join(path, key)) : fallback;
        }

        template <typename Enum>
        Enum choice(const std::string &value, const std::map<std::string, Enum> &options, const std::string &path)
        {
            const auto it = options.find(value);
            if (it != options.end())
                return it->second;
            std::string names;
            for (const auto &[name, e] : options)
                names += (names.empty() ? "" : ", ") + name;
            throw validation_error("'" + path + "' must be one of: " + names);
        }

        struct quantity
        {
            double value;
            std::string unit;
        };

        inline std::optional<double> parse_double(std::string_view s)
        {
            double v = 0.0;
            const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
                return std::nullopt;
            return v;
        }

        /// "12.5m" -> {12.5, "m"}; a unit is mandatory.
        inline quantity split_quantity(const json &j, const std::string &path)
        {
            if (!j.is_string())
                throw validation_error("'" + path + "' must be a string with an explicit unit, e.g. \"400dF\" or \"2.5m\"");
            const std::string s = j.get<std::string>();
            std::size_t pos = 0;
            while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.' ||
                                      s[pos] == '-' || s[pos] == '+' ||
                                      ((s[pos] == 'e' || s[pos] == 'E') && pos > 0 && pos + 1 < s.size() &&
                                       (std::isdigit(static_cast<unsigned char>(s[pos + 1])) || s[pos + 1] == '-' ||
                                        s[pos + 1] == '+'))))
                ++pos;
            const auto value = parse_double(std::string_view(s).substr(0, pos));
            std::string unit = s.substr(pos);
            unit.erase(0, unit.find_first_not_of(' '));
            if (!value || unit.empty())
                throw validation_error("'" + path + "' = \"" + s + "\" needs a number followed by a unit");
            if (!std::isfinite(*value))
                throw validation_error("'" + path + "' must be finite");
            return {*value, unit};
        }

        /// Lengths for sizing: "m" or "lambda".
        inline double length(const json &j, double wavelength, const std::string &path)
        {
            const auto q = split_quantity(j, path);
            double v;
            if (q.unit == "m")
                v = q.value;
            else if (q.unit == "lambda")
                v = q.value * wavelength;
            else
                throw validation_error("'" + path + "' unit must be \"m\" or \"lambda\"");
            if (!(v > 0.0))
                throw validation_error("'" + path + "' must be positive");
            return v;
        }

        inline double area(const json &j, double wavelength, const std::string &path)
        {
            const auto q = split_quantity(j, path);
            double v;
            if (q.unit == "m2")
                v = q.value;
            else if (q.unit == "lambda2")
                v = q.value * wavelength * wavelength;
            else
                throw validation_error("'" + path + "' unit must be \"m2\" or \"lambda2\"");
            if (!(v > 0.0))
                throw validation_error("'" + path + "' must be positive");
            return v;
        }

        /// Distances: "m" or "dF" (multiples of the reference Fraunhofer distance); "inf" when allowed.
        inline double distance(const json &j, double d_f, const std::string &path, bool allow_inf = false)
        {
            if (allow_inf && j.is_string() && j.get<std::string>() == "inf")
                return std::numeric_limits<double>::infinity();
            const auto q = split_quantity(j, path);
            double v;
            if (q.unit == "m")
                v = q.value;
            else if (q.unit == "dF")
                v = q.value * d_f;
            else
                throw validation_error("'" + path + "' unit must be \"m\" or \"dF\"");
            if (!(v > 0.0))
                throw validation_error("'" + path + "' must be positive");
            return v;
        }

        /// Radians as a number, or a string such as "pi/16", "-3pi/8", "0.25".
        inline double angle(const json &j, const std::string &path)
        {
            if (j.is_number())
                return number(j, path);
            const std::string s = text(j, path);
            const auto pi_pos = s.find("pi");
            if (pi_pos == std::string::npos)
            {
                const auto v = parse_double(s);
                if (!v)
                    throw validation_error("'" + path + "' is not an angle: \"" + s + "\"");
                return *v;
            }
            const std::string head = s.substr(0, pi_pos);
            double coeff = 1.0;
            if (head == "-")
                coeff = -1.0;
            else if (!head.empty() && head != "+")
            {
                const auto v = parse_double(head);
                if (!v)
                    throw validation_error("'" + path + "' is not an angle: \"" + s + "\"");
                coeff = *v;
            }
            double divisor = 1.0;
            const std::string tail = s.substr(pi_pos + 2);
            if (!tail.empty())
            {
                if (tail[0] != '/')
                    throw validation_error("'" + path + "' is not an angle: \"" + s + "\"");
                const auto v = parse_double(std::string_view(tail).substr(1));
                if (!v || *v == 0.0)
                    throw validation_error("'" + path + "' is not an angle: \"" + s + "\"");
                divisor = *v;
            }
            return coeff * std::numbers::pi / divisor;
        }

        using scalar_reader = std::function<double(const json &, const std::string &)>;

        /// {"values": [...]} or {"start", "stop", "points", "spacing": "linear" | "log"}.
        inline std::vector<double> grid(const json &j, const std::string &path, const scalar_reader &read)
        {
            std::vector<double> out;
            if (const json *values = optional_field(j, "values"))
            {
                if (!values->is_array())
                    throw validation_error("'" + join(path, "values") + "' must be an array");
                for (std::size_t i = 0; i < values->size(); ++i)
                    out.push_back(read((*values)[i], join(path, "values") + "[" + std::to_string(i) + "]"));
            }
            else
            {
                const double start = read(field(j, "start", path), join(path, "start"));
                const double stop = read(field(j, "stop", path), join(path, "stop"));
                const long long points = integer(field(j, "points", path), join(path, "points"));
                if (points < 0)
                    throw validation_error("'" + join(path, "points") + "' must be >= 0");
                const std::string spacing = text_or(j, "spacing", path, "linear");
                if (spacing != "linear" && spacing != "log")
                    throw validation_error("'" + join(path, "spacing") + "' must be \"linear\" or \"log\"");
                if (spacing == "log" && !(start > 0.0 && stop > 0.0))
                    throw validation_error("'" + path + "' log spacing needs positive endpoints");
                for (long long i = 0; i < points; ++i)
                {
                    if (points == 1)
                    {
                        out.push_back(start);
                        break;
                    }
                    const double t = static_cast<double>(i) / static_cast<double>(points - 1);
                    double v = spacing == "log" ? start * std::pow(stop / start, t) : start + t * (stop - start);
                    if (i == points - 1)
                        v = stop;
                    out.push_back(v);
                }
            }
            if (out.empty())
                throw validation_error("'" + path + "' is an empty sweep grid");
            return out;
        }

        inline std::vector<double> increasing_grid(const json &j, const std::string &path, const scalar_reader &read)
        {
            auto g = grid(j, path, read);
            for (std::size_t i = 1; i < g.size(); ++i)
                if (!(g[i] > g[i - 1]))
                    throw validation_error("'" + path + "' must be strictly increasing");
            return g;
        }

        // ---- geometry ----

        struct rect_family
        {
            int n_per_side = 1;
            double eta = 1.0;
            double wavelength = 0.0;
            array_sizing sizing = fixed_element_diagonal{1.0};
            std::string label; // "diagonal", "area" or "length"

            rect_array make(double e) const { return make_rect_array(n_per_side, e, sizing, wavelength); }
            rect_array base() const { return make(eta); }
        };

        inline double carrier_wavelength(const json &g, const std::string &path)
        {
            return wavelength_from_carrier(positive(field(g, "carrier_hz", path), join(path, "carrier_hz")));
        }

        inline std::pair<array_sizing, std::string> sizing(const json &s, double wavelength, const std::string &path)
        {
            const std::string mode = text(field(s, "mode", path), join(path, "mode"));
            const json &value = field(s, "value", path);
            const std::string vpath = join(path, "value");
            if (mode == "element_diagonal")
                return {fixed_element_diagonal{length(value, wavelength, vpath)}, "diagonal"};
            if (mode == "aperture_area")
                return {fixed_aperture_area{area(value, wavelength, vpath)}, "area"};
            if (mode == "aperture_length")
                return {fixed_aperture_length{length(value, wavelength, vpath)}, "length"};
            throw validation_error("'" + join(path, "mode") +
                                   "' must be element_diagonal, aperture_area or aperture_length");
        }

        inline bool is_circular(const json &g, const std::string &path)
        {
            const std::string shape = text_or(g, "shape", path, "rect");
            if (shape != "rect" && shape != "circular")
                throw validation_error("'" + join(path, "shape") + "' must be \"rect\" or \"circular\"");
            return shape == "circular";
        }

        inline rect_family rect_geometry(const json &g, const std::string &path, bool require_sizing = true)
        {
            if (is_circular(g, path))
                throw validation_error("this experiment needs a rectangular geometry");
            rect_family f;
            const long long n = integer(field(g, "n_per_side", path), join(path, "n_per_side"));
            if (n < 1 || n > 100000)
                throw validation_error("'" + join(path, "n_per_side") + "' must be in [1, 100000]");
            f.n_per_side = static_cast<int>(n);
            f.eta = optional_field(g, "eta") ? positive(g["eta"], join(path, "eta")) : 1.0;
            f.wavelength = carrier_wavelength(g, path);
            if (require_sizing || optional_field(g, "sizing"))
            {
                auto [s, label] = sizing(field(g, "sizing", path), f.wavelength, join(path, "sizing"));
                f.sizing = s;
                f.label = label;
                f.base(); // validates the combination
            }
            return f;
        }

        /// One family per entry of "sizings" (if present), else the geometry's own sizing.
        inline std::vector<rect_family> rect_families(const json &cfg)
        {
            const json &g = field(cfg, "geometry", "");
            const json *list = optional_field(cfg, "sizings");
            if (!list)
                return {rect_geometry(g, "geometry")};
            if (!list->is_array() || list->empty())
                throw validation_error("'sizings' must be a non-empty array");
            auto proto = rect_geometry(g, "geometry", false);
            std::vector<rect_family> out;
            for (std::size_t i = 0; i < list->size(); ++i)
            {
                auto f = proto;
                auto [s, label] = sizing((*list)[i], f.wavelength, "sizings[" + std::to_string(i) + "]");
                f.sizing = s;
                f.label = label;
                f.base();
                for (const auto &o : out)
                    if (o.label == f.label)
                        throw validation_error("'sizings' lists the same sizing mode twice");
                out.push_back(f);
            }
            return out;
        }

        struct circ_spec
        {
            circ_array circ;
            double d_f = 0.0; // reference Fraunhofer distance used for "dF" units and output scaling
        };

        inline circ_spec circ_geometry(const json &g, const std::string &path)
        {
            if (!is_circular(g, path))
                throw validation_error("this experiment needs a circular geometry");
            circ_spec c;
            const double lambda = carrier_wavelength(g, path);
            c.circ = make_circ_array(length(field(g, "radius", path), lambda, join(path, "radius")), lambda);
            const double diag = length(field(g, "reference_element_diagonal", path), lambda,
                                       join(path, "reference_element_diagonal"));
            c.d_f = 2.0 * diag * diag / lambda;
            return c;
        }

        inline quadrature_spec quadrature(const json &cfg)
        {
            quadrature_spec q;
            if (const json *j = optional_field(cfg, "quadrature"))
            {
                if (const json *v = optional_field(*j, "order"))
                    q.order = static_cast<int>(integer(*v, "quadrature.order"));
                if (const json *v = optional_field(*j, "refinement"))
                    q.refinement = static_cast<int>(integer(*v, "quadrature.refinement"));
                if (const json *v = optional_field(*j, "tolerance"))
                    q.tolerance = number(*v, "quadrature.tolerance");
                if (const json *v = optional_field(*j, "max_depth"))
                    q.max_depth = static_cast<int>(integer(*v, "quadrature.max_depth"));
            }
            q.validate();
            return q;
        }

        inline disk_quadrature disk(const json &cfg)
        {
            disk_quadrature q;
            if (const json *j = optional_field(cfg, "disk_quadrature"))
            {
                if (const json *v = optional_field(*j, "radial_order"))
                    q.radial_order = static_cast<int>(integer(*v, "disk_quadrature.radial_order"));
                if (const json *v = optional_field(*j, "radial_panels"))
                    q.radial_panels = static_cast<int>(integer(*v, "disk_quadrature.radial_panels"));
                if (const json *v = optional_field(*j, "angular_points"))
                    q.angular_points = static_cast<int>(integer(*v, "disk_quadrature.angular_points"));
            }
            q.validate();
            return q;
        }

        inline field_model field_model_of(const json &cfg)
        {
            return choice<field_model>(text_or(cfg, "field_model", "", "exact"),
                                       {{"exact", field_model::exact}, {"fresnel", field_model::fresnel}},
                                       "field_model");
        }

        inline focus_model focus_model_of(const std::string &s, const std::string &path)
        {
            return choice<focus_model>(s, {{"fresnel", focus_model::fresnel}, {"spherical", focus_model::spherical}},
                                       path);
        }

        /// "focus": "<distance>" or {"distance", "azimuth", "elevation", "model"}.
        inline focus focus_of(const json &cfg, double d_f, focus_model default_model = focus_model::fresnel)
        {
            const json &j = field(cfg, "focus", "");
            focus f;
            f.model = default_model;
            if (j.is_string())
                f.distance = distance(j, d_f, "focus", true);
            else
            {
                f.distance = distance(field(j, "distance", "focus"), d_f, "focus.distance", true);
                if (const json *v = optional_field(j, "azimuth"))
                    f.azimuth = angle(*v, "focus.azimuth");
                if (const json *v = optional_field(j, "elevation"))
                    f.elevation = angle(*v, "focus.elevation");
                if (const json *v = optional_field(j, "model"))
                    f.model = focus_model_of(text(*v, "focus.model"), "focus.model");
            }
            f.validate();
            return f;
        }

        struct region
        {
            double z_min, z_max;
        };

        inline region region_of(const json &cfg, double d_f)
        {
            const json &r = field(cfg, "region", "");
            region out{distance(field(r, "z_min", "region"), d_f, "region.z_min"),
                       distance(field(r, "z_max", "region"), d_f, "region.z_max")};
            if (!(out.z_max > out.z_min))
                throw validation_error("'region.z_max' must exceed 'region.z_min'");
            return out;
        }

        inline channel_options channel_of(const json &cfg, unsigned threads)
        {
            channel_options o;
            o.threads = threads;
            if (const json *c = optional_field(cfg, "channel"))
            {
                o.model = choice<channel_model>(text_or(*c, "model", "channel", "fresnel-midpoint"),
                                                {{"fresnel-midpoint", channel_model::fresnel_midpoint},
                                                 {"exact-midpoint", channel_model::exact_midpoint},
                                                 {"exact-quadrature", channel_model::exact_quadrature}},
                                                "channel.model");
                o.scaling = choice<channel_scaling>(text_or(*c, "scaling", "channel", "path-loss-normalized"),
                                                    {{"path-loss-normalized", channel_scaling::path_loss_normalized},
                                                     {"physical", channel_scaling::physical}},
                                                    "channel.scaling");
            }
            o.quad = quadrature(cfg);
            return o;
        }

        inline precoder_normalization normalization_of(const json &cfg)
        {
            return choice<precoder_normalization>(
                text_or(cfg, "normalization", "", "transmit-power"),
                {{"transmit-power", precoder_normalization::transmit_power},
                 {"channel-frobenius", precoder_normalization::channel_frobenius}},
                "normalization");
        }

        inline std::vector<std::string> string_list(const json &cfg, const std::string &key,
                                                    const std::vector<std::string> &allowed)
        {
            const json &j = field(cfg, key, "");
            if (!j.is_array() || j.empty())
                throw validation_error("'" + key + "' must be a non-empty array");
            std::vector<std::string> out;
            for (std::size_t i = 0; i < j.size(); ++i)
            {
                const std::string path = key + "[" + std::to_string(i) + "]";
                std::string v = text(j[i], path);
                if (std::find(allowed.begin(), allowed.end(), v) == allowed.end())
                {
                    std::string names;
                    for (const auto &a : allowed)
                        names += (names.empty() ? "" : ", ") + a;
                    throw validation_error("'" + path + "' must be one of: " + names);
                }
                out.push_back(std::move(v));
            }
            return out;
        }

        inline scalar_reader positive_reader()
        {
            return [](const json &j, const std::string &p) { return positive(j, p); };
        }

        inline scalar_reader angle_reader()
        {
            return [](const json &j, const std::string &p) { return angle(j, p); };
        }

        inline scalar_reader distance_reader(double d_f)
        {
            return [d_f](const json &j, const std::string &p) { return distance(j, d_f, p); };
        }

        inline std::string suffix_for(const std::string &label, std::size_t count)
        {
            return count > 1 ? "_" + label : "";
        }

        inline void check_angles(const std::vector<double> &phis, const std::string &path)
        {
            for (double p : phis)
                if (!(std::abs(p) < std::numbers::pi / 2))
                    throw validation_error("'" + path + "' angles must lie in (-pi/2, pi/2)");
        }

        inline std::uint64_t seed_of(const json &cfg, const run_options &opt)
        {
            if (opt.seed)
                return *opt.seed;
            if (const json *s = optional_field(cfg, "seed"))
            {
                if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<long long>() >= 0))
                    throw validation_error("'seed' must be a non-negative integer");
                return s->get<std::uint64_t>();
            }
            return 1;
        }
    } // namespace detail

    // ---- experiments -------------------------------------------------------------------------

    namespace detail
    {
        inline csv::table profile_table(const gain_profile &p, double d_f)
        {
            csv::table t("distance_over_dF,gain");
            for (const auto &s : p.samples)
                t.row(s.distance / d_f, s.gain);
            return t;
        }

        /// gain-profile and circular-gain: one file per method.
        inline run_result gain_profile_experiment(const json &cfg, const run_options &opt, bool circular_only)
        {
            const json &g = field(cfg, "geometry", "");
            const bool circular = is_circular(g, "geometry");
            if (circular_only && !circular)
                throw validation_error("circular-gain needs geometry.shape = \"circular\"");

            profile_request req;
            double d_f;
            if (circular)
            {
                const auto c = circ_geometry(g, "geometry");
                req.geometry = c.circ;
                d_f = c.d_f;
            }
            else
            {
                const auto arr = rect_geometry(g, "geometry").base();
                req.geometry = arr;
                d_f = arr.fraunhofer_distance();
            }
            const auto methods = string_list(cfg, "methods", {"exact", "analytic"});
            auto distances = increasing_grid(field(cfg, "distances", ""), "distances", distance_reader(d_f));
            if (const json *v = optional_field(cfg, "azimuth"))
                req.azimuth = angle(*v, "azimuth");
            if (const json *v = optional_field(cfg, "elevation"))
                req.elevation = angle(*v, "elevation");
            tx_geometry{1.0, req.azimuth, req.elevation}.validate();
            req.fc = focus_of(cfg, d_f);
            req.model = field_model_of(cfg);
            req.quad = quadrature(cfg);
            req.disk = disk(cfg);
            req.threads = opt.threads;
            const bool clip = optional_field(cfg, "clip_reactive") ? flag(cfg["clip_reactive"], "clip_reactive") : false;
            if (circular && (req.azimuth != 0.0 || req.elevation != 0.0) &&
                std::find(methods.begin(), methods.end(), "analytic") != methods.end())
                throw validation_error("the circular closed form needs a broadside source");

            run_result out;
            for (const auto &m : methods)
            {
                auto r = req;
                r.method = m == "exact" ? gain_method::exact : gain_method::analytic;
                r.distances = distances;
                if (r.method == gain_method::exact)
                {
                    const double reactive = 1.2 * aperture_length(r.geometry);
                    if (clip)
                        r.distances.erase(std::remove_if(r.distances.begin(), r.distances.end(),
                                                         [&](double d) { return d < reactive; }),
                                          r.distances.end());
                    if (r.distances.empty() || r.distances.front() < reactive)
                        throw validation_error("exact gains need distances >= 1.2 D_array (" +
                                               csv::format(reactive / d_f) + " dF); set clip_reactive to skip them");
                }
                out.outputs.push_back({suffix_for(m, methods.size()), profile_table(sweep_gain_profile(r), d_f)});
            }
            return out;
        }

        /// Focus for a BD sweep: "bjornson" tracks each array's own d_B.
        inline double bd_focus(const json &cfg, const rect_array &arr)
        {
            const json &f = field(cfg, "focus", "");
            if (f.is_string() && f.get<std::string>() == "bjornson")
                return arr.bjornson_distance();
            return distance(f, arr.fraunhofer_distance(), "focus");
        }

        /// Half-power interval of the exact gain, bracketed on a log grid around the closed-form interval.
        inline beam_depth_result exact_bd(const rect_array &arr, double f, double a3db, const quadrature_spec &quad,
                                          unsigned threads)
        {
            const auto closed = bd_rect(arr, f, a3db);
            const double reactive = 1.2 * arr.aperture_length();
            const double lo = std::max(0.5 * closed.z_lo, reactive);
            const double hi = closed.is_finite() ? 2.0 * closed.z_hi : 100.0 * closed.finite_limit * 1.01;
            const int points = closed.is_finite() ? 33 : 49;
            profile_request req;
            req.method = gain_method::exact;
            req.geometry = arr;
            req.fc = focus::broadside(f);
            req.quad = quad;
            req.threads = threads;
            for (int i = 0; i < points; ++i)
                req.distances.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1)));
            if (std::find_if(req.distances.begin(), req.distances.end(), [&](double d) { return d >= f; }) !=
                req.distances.end())
            {
                // include the focus itself so the peak is sampled
                req.distances.push_back(f);
                std::sort(req.distances.begin(), req.distances.end());
                req.distances.erase(std::unique(req.distances.begin(), req.distances.end()), req.distances.end());
            }
            const auto profile = sweep_gain_profile(req);
            return numeric_bd(
                profile,
                [&](double z) { return exact_array_gain(arr, tx_geometry::broadside(z), req.fc, quad); },
                closed.finite_limit);
        }

        inline run_result bd_vs_eta(const json &cfg, const run_options &opt)
        {
            const auto families = rect_families(cfg);
            const auto etas = grid(field(cfg, "etas", ""), "etas", positive_reader());
            const std::string method = text_or(cfg, "method", "", "closed-form");
            if (method != "closed-form" && method != "exact")
                throw validation_error("'method' must be \"closed-form\" or \"exact\"");
            const auto quad = quadrature(cfg);
            field(cfg, "focus", "");
            for (const auto &fam : families)
                for (double e : etas)
                    bd_focus(cfg, fam.make(e));

            run_result out;
            for (const auto &fam : families)
            {
                csv::table t("eta,F_over_dF,bd_over_dF,finite");
                std::vector<beam_depth_result> res(etas.size());
                std::vector<rect_array> arrays(etas.size());
                parallel_sweep(etas.size(), method == "exact" ? 1u : opt.threads,
                               [&](std::size_t i)
                               {
                                   arrays[i] = fam.make(etas[i]);
                                   const double f = bd_focus(cfg, arrays[i]);
                                   const double a3 = solve_a3db(etas[i]);
                                   res[i] = method == "exact" ? exact_bd(arrays[i], f, a3, quad, opt.threads)
                                                              : bd_rect(arrays[i], f, a3);
                               });
                for (std::size_t i = 0; i < etas.size(); ++i)
                {
                    const double d_f = arrays[i].fraunhofer_distance();
                    t.row(etas[i], res[i].focus_distance / d_f, res[i].depth / d_f, res[i].is_finite());
                }
                out.outputs.push_back({suffix_for(fam.label, families.size()), std::move(t)});
            }
            return out;
        }

        inline run_result bd_vs_phi(const json &cfg, const run_options &)
        {
            const auto families = rect_families(cfg);
            const auto etas = grid(field(cfg, "etas", ""), "etas", positive_reader());
            const auto phis = grid(field(cfg, "phis", ""), "phis", angle_reader());
            check_angles(phis, "phis");
            for (const auto &fam : families)
                for (double e : etas)
                    bd_focus(cfg, fam.make(e));

            run_result out;
            for (const auto &fam : families)
            {
                csv::table t("eta,phi,F_over_dF,bd_over_dF,finite");
                for (double e : etas)
                {
                    const auto arr = fam.make(e);
                    const double f = bd_focus(cfg, arr);
                    const double d_f = arr.fraunhofer_distance();
                    for (double phi : phis)
                    {
                        const auto proj = project_array(arr, phi);
                        const auto bd = bd_rect(proj, f);
                        t.row(e, phi, f / d_f, bd.depth / d_f, bd.is_finite());
                    }
                }
                out.outputs.push_back({suffix_for(fam.label, families.size()), std::move(t)});
            }
            return out;
        }

        inline run_result a3db_curve(const json &cfg, const run_options &)
        {
            const auto etas = grid(field(cfg, "etas", ""), "etas", positive_reader());
            csv::table t("eta,a3db,a3db_times_1_plus_eta2");
            for (double e : etas)
            {
                const double a = solve_a3db(e);
                t.row(e, a, a * (1.0 + e * e));
            }
            run_result out;
            out.outputs.push_back({"", std::move(t)});
            return out;
        }

        inline run_result finite_limit_curve(const json &cfg, const run_options &)
        {
            const auto families = rect_families(cfg);
            const auto etas = grid(field(cfg, "etas", ""), "etas", positive_reader());
            run_result out;
            for (const auto &fam : families)
            {
                csv::table t("eta,finite_limit_over_dF,finite_limit_m");
                for (double e : etas)
                {
                    const auto arr = fam.make(e);
                    const double lim = finite_bd_limit_rect(arr);
                    t.row(e, lim / arr.fraunhofer_distance(), lim);
                }
                out.outputs.push_back({suffix_for(fam.label, families.size()), std::move(t)});
            }
            return out;
        }

        inline run_result lobe_catalog(const json &cfg, const run_options &)
        {
            const auto c = circ_geometry(field(cfg, "geometry", ""), "geometry");
            const auto fc = focus_of(cfg, c.d_f);
            if (fc.at_infinity() || fc.azimuth != 0.0 || fc.elevation != 0.0)
                throw validation_error("lobe-catalog needs a finite broadside focus");
            const long long k_max = integer(field(cfg, "k_max", ""), "k_max");
            if (k_max < 1 || k_max > 1000)
                throw validation_error("'k_max' must be in [1, 1000]");
            csv::table t("k,kind,l,z_over_dF,gain_db");
            for (const auto &e : circ_lobe_catalog(c.circ, fc.distance, static_cast<int>(k_max)))
            {
                const char *kind = e.kind == lobe_kind::null ? "null" : "peak";
                t.row(e.k, kind, e.l, e.z_near / c.d_f, e.gain_db);
                t.row(e.k, kind, e.l, e.z_far / c.d_f, e.gain_db);
            }
            run_result out;
            out.outputs.push_back({"", std::move(t)});
            return out;
        }

        inline run_result distance_error(const json &cfg, const run_options &)
        {
            const auto arr = rect_geometry(field(cfg, "geometry", ""), "geometry").base();
            const double d = distance(field(cfg, "distance", ""), arr.fraunhofer_distance(), "distance");
            const double elevation = optional_field(cfg, "elevation") ? angle(cfg["elevation"], "elevation") : 0.0;
            const auto phis = grid(field(cfg, "phis", ""), "phis", angle_reader());
            check_angles(phis, "phis");
            csv::table t("phi,direct_error_m,indirect_error_m");
            for (double phi : phis)
            {
                const tx_geometry tx{d, phi, elevation};
                tx.validate();
                t.row(phi, mean_abs_distance_error(arr, tx, taylor_variant::direct),
                      mean_abs_distance_error(arr, tx, taylor_variant::indirect));
            }
            run_result out;
            out.outputs.push_back({"", std::move(t)});
            return out;
        }

        /// Exact off-broadside gain (focus steered toward the source) against the projected-array gain.
        inline run_result projection_error(const json &cfg, const run_options &opt)
        {
            const auto arr = rect_geometry(field(cfg, "geometry", ""), "geometry").base();
            const double d_f = arr.fraunhofer_distance();
            const auto phis = grid(field(cfg, "phis", ""), "phis", angle_reader());
            check_angles(phis, "phis");
            const auto distances = increasing_grid(field(cfg, "distances", ""), "distances", distance_reader(d_f));
            const auto base_focus = focus_of(cfg, d_f, focus_model::spherical);
            const auto quad = quadrature(cfg);
            const auto model = field_model_of(cfg);
            if (distances.front() < 1.2 * arr.aperture_length())
                throw validation_error("'distances' must start at or beyond 1.2 D_array (" +
                                       csv::format(1.2 * arr.aperture_length() / d_f) + " dF)");

            const std::size_t count = phis.size() * distances.size();
            std::vector<double> exact(count), proj(count);
            parallel_sweep(count, opt.threads,
                           [&](std::size_t i)
                           {
                               const tx_geometry tx{distances[i % distances.size()], phis[i / distances.size()], 0.0};
                               const auto fc = focus::toward(tx, base_focus.distance, base_focus.model);
                               exact[i] = exact_array_gain(arr, tx, fc, quad, model);
                               proj[i] = projected_gain_approx(arr, tx, fc, quad, model);
                           });
            csv::table t("phi,distance_over_dF,exact_gain,projected_gain,abs_error");
            for (std::size_t i = 0; i < count; ++i)
                t.row(phis[i / distances.size()], distances[i % distances.size()] / d_f, exact[i], proj[i],
                      std::abs(exact[i] - proj[i]));
            run_result out;
            out.outputs.push_back({"", std::move(t)});
            return out;
        }

        inline int users_of(const json &cfg)
        {
            const long long k = integer(field(cfg, "k_users", ""), "k_users");
            if (k < 1 || k > 10000)
                throw validation_error("'k_users' must be in [1, 10000]");
            return static_cast<int>(k);
        }

        inline long trials_of(const json &cfg)
        {
            const long long n = integer(field(cfg, "n_trials", ""), "n_trials");
            if (n < 1)
                throw validation_error("'n_trials' must be >= 1");
            return static_cast<long>(n);
        }

        inline run_result multiplex_plan(const json &cfg, const run_options &opt)
        {
            const auto arr = rect_geometry(field(cfg, "geometry", ""), "geometry").base();
            const double d_f = arr.fraunhofer_distance();
            const auto reg = region_of(cfg, d_f);
            const long long max_users = integer(field(cfg, "max_users", ""), "max_users");
            if (max_users < 0)
                throw validation_error("'max_users' must be >= 0");
            std::optional<std::vector<double>> profile;
            if (const json *p = optional_field(cfg, "profile"))
                profile = increasing_grid(*p, "profile", distance_reader(d_f));

            const auto plan = plan_focal_points(arr, reg.z_min, reg.z_max, static_cast<int>(max_users));
            run_result out;
            csv::table t("k,F_over_dF,zlo_over_dF,zhi_over_dF");
            for (std::size_t k = 0; k < plan.size(); ++k)
                t.row(static_cast<long>(k + 1), plan.focal_points[k] / d_f, plan.intervals[k].first / d_f,
                      plan.intervals[k].second / d_f);
            out.outputs.push_back({"", std::move(t)});
            if (profile)
            {
                csv::table gt("F_over_dF,distance_over_dF,gain");
                for (double f : plan.focal_points)
                {
                    profile_request req;
                    req.geometry = arr;
                    req.fc = focus::broadside(f);
                    req.distances = *profile;
                    req.threads = opt.threads;
                    for (const auto &s : sweep_gain_profile(req).samples)
                        gt.row(f / d_f, s.distance / d_f, s.gain);
                }
                out.outputs.push_back({"_gains", std::move(gt)});
            }
            return out;
        }

        struct rate_study
        {
            rect_array arr;
            region reg;
            channel_options channel;
            precoder_normalization norm;
            long n_trials = 1;
            std::uint64_t seed = 1;
            unsigned threads = 1;
        };

        inline const std::vector<std::string> &placement_names()
        {
            static const std::vector<std::string> names{"planned", "uniform", "random-inverse-distance",
                                                        "random-distance"};
            return names;
        }

        /// One results row: (k actually placed, mean, stderr, trials).
        struct rate_row
        {
            int k;
            double mean, std_error;
            long trials;
        };

        inline rate_row evaluate_placement(const rate_study &s, const std::string &placement_name, int k,
                                           double snr_db)
        {
            if (placement_name == "planned" || placement_name == "uniform")
            {
                std::vector<double> d;
                if (placement_name == "planned")
                    d = plan_focal_points(s.arr, s.reg.z_min, s.reg.z_max, k).focal_points;
                else
                    d = uniform_placement(s.reg.z_min, s.reg.z_max, k);
                if (d.empty())
                    throw validation_error("the planning region admits no focal point");
                return {static_cast<int>(d.size()), sum_rate_at(s.arr, d, snr_db, s.channel, s.norm), 0.0, 1};
            }
            monte_carlo_config mc;
            mc.k_users = k;
            mc.z_min = s.reg.z_min;
            mc.z_max = s.reg.z_max;
            mc.n_trials = s.n_trials;
            mc.snr_db = snr_db;
            mc.seed = s.seed;
            mc.where = placement_name == "random-distance" ? placement::uniform_distance
                                                           : placement::uniform_inverse_distance;
            mc.channel = s.channel;
            mc.channel.threads = 1;
            mc.norm = s.norm;
            mc.threads = s.threads;
            const auto r = monte_carlo_sum_rate(s.arr, mc);
            return {k, r.mean, r.std_error, r.n_trials};
        }

        inline rate_study rate_study_of(const json &cfg, const run_options &opt, const rect_array &arr,
                                        bool needs_trials)
        {
            rate_study s;
            s.arr = arr;
            s.reg = region_of(cfg, arr.fraunhofer_distance());
            s.channel = channel_of(cfg, 1);
            s.norm = normalization_of(cfg);
            s.n_trials = needs_trials ? trials_of(cfg) : 1;
            s.seed = seed_of(cfg, opt);
            s.threads = opt.threads;
            return s;
        }

        inline bool any_random(const std::vector<std::string> &placements)
        {
            return std::any_of(placements.begin(), placements.end(),
                               [](const std::string &p) { return p.rfind("random", 0) == 0; });
        }

        inline run_result sum_rate_vs_snr(const json &cfg, const run_options &opt)
        {
            const auto arr = rect_geometry(field(cfg, "geometry", ""), "geometry").base();
            const auto placements = string_list(cfg, "placements", placement_names());
            const auto s = rate_study_of(cfg, opt, arr, any_random(placements));
            const auto snrs = grid(field(cfg, "snr_db", ""), "snr_db",
                                   [](const json &j, const std::string &p) { return number(j, p); });
            const int k = users_of(cfg);
            csv::table t("snr_db,k_users,placement,mean_rate,stderr,n_trials,seed");
            for (double snr : snrs)
                for (const auto &p : placements)
                {
                    const auto r = evaluate_placement(s, p, k, snr);
                    t.row(snr, r.k, p, r.mean, r.std_error, r.trials, s.seed);
                }
            run_result out;
            out.outputs.push_back({"", std::move(t)});
            return out;
        }

        inline run_result sum_rate_vs_users(const json &cfg, const run_options &opt)
        {
            const auto arr = rect_geometry(field(cfg, "geometry", ""), "geometry").base();
            const auto placements = string_list(cfg, "placements", placement_names());
            const auto s = rate_study_of(cfg, opt, arr, any_random(placements));
            const double snr = number(field(cfg, "snr_db", ""), "snr_db");
            const auto ks = grid(field(cfg, "k_users", ""), "k_users",
                                 [](const json &j, const std::string &p)
                                 {
                                     const long long v = integer(j, p);
                                     if (v < 1 || v > 10000)
                                         throw validation_error("'" + p + "' must be in [1, 10000]");
                                     return static_cast<double>(v);
                                 });
            csv::table t("snr_db,k_users,placement,mean_rate,stderr,n_trials,seed");
            for (double kd : ks)
                for (const auto &p : placements)
                {
                    const auto r = evaluate_placement(s, p, static_cast<int>(kd), snr);
                    t.row(snr, r.k, p, r.mean, r.std_error, r.trials, s.seed);
                }
            run_result out;
            out.outputs.push_back({"", std::move(t)});
            return out;
        }

        /// Planned sum rate per eta; the region is read in units of the reference array (eta = reference_eta).
        inline run_result sum_rate_vs_eta(const json &cfg, const run_options &opt)
        {
            const auto fam = rect_geometry(field(cfg, "geometry", ""), "geometry");
            const auto etas = grid(field(cfg, "etas", ""), "etas", positive_reader());
            const double ref_eta = number_or(cfg, "reference_eta", "", 1.0);
            const auto reference = fam.make(ref_eta);
            const auto reg = region_of(cfg, reference.fraunhofer_distance());
            const double snr = number(field(cfg, "snr_db", ""), "snr_db");
            const auto channel = channel_of(cfg, 1);
            const auto norm = normalization_of(cfg);
            const long long max_users = optional_field(cfg, "max_users") ? integer(cfg["max_users"], "max_users") : 64;

            std::vector<std::pair<int, double>> res(etas.size());
            parallel_sweep(etas.size(), opt.threads,
                           [&](std::size_t i)
                           {
                               const auto arr = fam.make(etas[i]);
                               const auto plan =
                                   plan_focal_points(arr, reg.z_min, reg.z_max, static_cast<int>(max_users));
                               if (plan.size() == 0)
                                   throw validation_error("no focal point fits the region");
                               res[i] = {static_cast<int>(plan.size()),
                                         sum_rate_at(arr, plan.focal_points, snr, channel, norm)};
                           });
            csv::table t("eta,k_users,snr_db,sum_rate");
            for (std::size_t i = 0; i < etas.size(); ++i)
                t.row(etas[i], res[i].first, snr, res[i].second);
            run_result out;
            out.outputs.push_back({"", std::move(t)});
            return out;
        }

        /// Users share an azimuth; focal points are planned on the projected array and the channels are
        /// those of the original array toward the users.
        inline run_result sum_rate_vs_phi(const json &cfg, const run_options &opt)
        {
            const auto fam = rect_geometry(field(cfg, "geometry", ""), "geometry");
            const auto etas = grid(field(cfg, "etas", ""), "etas", positive_reader());
            const auto phis = grid(field(cfg, "phis", ""), "phis", angle_reader());
            check_angles(phis, "phis");
            const double ref_eta = number_or(cfg, "reference_eta", "", 1.0);
            const auto reg = region_of(cfg, fam.make(ref_eta).fraunhofer_distance());
            const double snr = number(field(cfg, "snr_db", ""), "snr_db");
            auto channel = channel_of(cfg, 1);
            const auto norm = normalization_of(cfg);
            const long long max_users = optional_field(cfg, "max_users") ? integer(cfg["max_users"], "max_users") : 64;

            const std::size_t count = etas.size() * phis.size();
            std::vector<std::pair<int, double>> res(count);
            parallel_sweep(count, opt.threads,
                           [&](std::size_t i)
                           {
                               const auto arr = fam.make(etas[i / phis.size()]);
                               const double phi = phis[i % phis.size()];
                               const auto proj = project_array(arr, phi);
                               const double z_max = std::min(reg.z_max, finite_bd_limit_rect(proj));
                               const double z_min = std::max(reg.z_min, proj.bjornson_distance());
                               const auto plan = plan_focal_points(proj, z_min, z_max, static_cast<int>(max_users));
                               if (plan.size() == 0)
                                   throw validation_error("no focal point fits the region");
                               std::vector<tx_geometry> users;
                               for (double f : plan.focal_points)
                                   users.push_back({f, phi, 0.0});
                               const auto h = build_channel_matrix(arr, users, channel);
                               const std::vector<double> powers(users.size(), db_to_linear(snr));
                               res[i] = {static_cast<int>(users.size()), sum_rate(h, mmse_precoder(h, norm), powers)};
                           });
            csv::table t("eta,phi,k_users,snr_db,sum_rate");
            for (std::size_t i = 0; i < count; ++i)
                t.row(etas[i / phis.size()], phis[i % phis.size()], res[i].first, snr, res[i].second);
            run_result out;
            out.outputs.push_back({"", std::move(t)});
            return out;
        }
    } // namespace detail

    // ---- presets and dispatch ----------------------------------------------------------------

    struct preset
    {
        std::string name;
        std::string experiment;
        std::string description;
        std::string config; // JSON
    };

    inline const std::vector<preset> &presets()
    {
        static const std::vector<preset> list = []
        {
            auto rect = [](const std::string &eta)
            {
                return R"({"n_per_side": 100, "eta": )" + eta +
                       R"(, "sizing": {"mode": "element_diagonal", "value": "0.25lambda"}, "carrier_hz": 3e9})";
            };
            const std::string mux =
                R"({"n_per_side": 200, "eta": 1, "sizing": {"mode": "element_diagonal", "value": "0.5lambda"}, "carrier_hz": 2.99792458e9})";
            const std::string mux_length =
                R"({"n_per_side": 200, "eta": 1, "sizing": {"mode": "aperture_length", "value": "100lambda"}, "carrier_hz": 2.99792458e9})";
            const std::string circ =
                R"({"shape": "circular", "radius": "12.5lambda", "carrier_hz": 3e9, "reference_element_diagonal": "0.25lambda"})";
            const std::string dual_sizing =
                R"("geometry": {"n_per_side": 100, "carrier_hz": 3e9}, "sizings": [{"mode": "aperture_area", "value": "312.5lambda2"}, {"mode": "aperture_length", "value": "25lambda"}])";
            const std::string eta_sweep = R"("etas": {"start": 0.1, "stop": 10, "points": 41, "spacing": "log"})";
            const std::string region = R"("region": {"z_min": "400dF", "z_max": "4000dF"})";

            return std::vector<preset>{
                {"fig2", "gain-profile", "exact vs closed-form gain, eta = 4, F = 1000 dF",
                 R"({"experiment": "gain-profile", "geometry": )" + rect("4") +
                     R"(, "methods": ["exact", "analytic"], "focus": "1000dF", "clip_reactive": true,
                        "distances": {"start": "40dF", "stop": "10000dF", "points": 200, "spacing": "log"}})"},
                {"fig3", "multiplex-plan", "non-overlapping 3 dB focal plan and its gain curves, 200 x 200 array",
                 R"({"experiment": "multiplex-plan", "geometry": )" + mux + ", " + region +
                     R"(, "max_users": 10, "profile": {"start": "200dF", "stop": "20000dF", "points": 400, "spacing": "log"}})"},
                {"fig4", "sum-rate-vs-snr", "planned vs uniform vs random placement of 5 users over SNR",
                 R"({"experiment": "sum-rate-vs-snr", "geometry": )" + mux + ", " + region +
                     R"(, "placements": ["planned", "uniform", "random-inverse-distance"], "k_users": 5,
                        "snr_db": {"start": 10, "stop": 30, "points": 5}, "n_trials": 2000, "seed": 1})"},
                {"fig5", "a3db-curve", "a3dB and a3dB (1 + eta^2) over eta",
                 R"({"experiment": "a3db-curve", )" + eta_sweep + "}"},
                {"fig6", "bd-vs-eta", "3 dB beam depth over eta at F = d_B, fixed area and fixed length",
                 R"({"experiment": "bd-vs-eta", )" + dual_sizing + ", " + eta_sweep +
                     R"(, "focus": "bjornson", "method": "closed-form"})"},
                {"fig8", "distance-error", "direct vs indirect Taylor distance error over azimuth, d = 2500 dF",
                 R"({"experiment": "distance-error", "geometry": )" + rect("1") +
                     R"(, "distance": "2500dF", "phis": {"start": "-3pi/8", "stop": "3pi/8", "points": 49}})"},
                {"fig9", "gain-profile", "off-broadside source at pi/16, exact vs closed-form gain, F = 1000 dF",
                 R"({"experiment": "gain-profile", "geometry": )" + rect("1") +
                     R"(, "methods": ["exact", "analytic"], "azimuth": "pi/16",
                        "focus": {"distance": "1000dF", "model": "fresnel"},
                        "distances": {"start": "400dF", "stop": "4000dF", "points": 100, "spacing": "log"}})"},
                {"fig10", "bd-vs-phi", "projected-array beam depth over azimuth for several eta",
                 R"({"experiment": "bd-vs-phi", )" + dual_sizing +
                     R"(, "etas": {"values": [0.1, 0.5, 1, 2, 10]}, "focus": "bjornson",
                        "phis": {"start": "-3pi/8", "stop": "3pi/8", "points": 25}})"},
                {"fig12a", "projection-error", "exact off-broadside vs projected-array gain over distance, phi = pi/4",
                 R"({"experiment": "projection-error", "geometry": )" + rect("1") +
                     R"(, "phis": {"values": ["pi/4"]}, "focus": "400dF",
                        "distances": {"start": "250dF", "stop": "4000dF", "points": 60, "spacing": "log"}})"},
                {"fig12b", "projection-error", "projected-array approximation error over azimuth, d = 1000 dF",
                 R"({"experiment": "projection-error", "geometry": )" + rect("1") +
                     R"(, "phis": {"start": 0, "stop": "3pi/8", "points": 13}, "focus": "400dF",
                        "distances": {"values": ["1000dF"]}})"},
                {"fig13", "sum-rate-vs-eta", "planned sum rate over eta at fixed aperture length",
                 R"({"experiment": "sum-rate-vs-eta", "geometry": )" + mux_length + ", " + region +
                     R"(, "etas": {"values": [0.1, 0.2, 0.5, 1, 2, 5, 10]}, "snr_db": 25})"},
                {"fig14", "circular-gain", "circular aperture, exact vs sinc^2 gain, F = d_B",
                 R"({"experiment": "circular-gain", "geometry": )" + circ +
                     R"(, "methods": ["exact", "analytic"], "focus": "400dF",
                        "distances": {"start": "400dF", "stop": "40000dF", "points": 200, "spacing": "log"}})"},
                {"fig15", "circular-gain", "circular aperture nulls and side lobes over distance, F = d_B",
                 R"({"experiment": "circular-gain", "geometry": )" + circ +
                     R"(, "methods": ["analytic"], "focus": "400dF",
                        "distances": {"start": "100dF", "stop": "100000dF", "points": 1000, "spacing": "log"}})"},
                {"table1", "lobe-catalog", "circular aperture nulls and lobe peaks, F = d_B",
                 R"({"experiment": "lobe-catalog", "geometry": )" + circ + R"(, "focus": "400dF", "k_max": 3})"},
                {"finite-limit", "finite-limit-curve", "finite beam-depth limit over eta, fixed area and fixed length",
                 R"({"experiment": "finite-limit-curve", )" + dual_sizing + ", " + eta_sweep + "}"},
                {"sumrate-users", "sum-rate-vs-users", "mean random-placement sum rate over the number of users",
                 R"({"experiment": "sum-rate-vs-users", "geometry": )" + mux + ", " + region +
                     R"(, "placements": ["random-inverse-distance", "random-distance"],
                        "k_users": {"start": 1, "stop": 8, "points": 8}, "snr_db": 25, "n_trials": 5000, "seed": 1})"},
                {"sumrate-phi", "sum-rate-vs-phi", "planned sum rate over azimuth for tall, square and wide arrays",
                 R"({"experiment": "sum-rate-vs-phi", "geometry": )" + mux_length + ", " + region +
                     R"(, "etas": {"values": [0.1, 1, 10]}, "phis": {"start": 0, "stop": "3pi/8", "points": 7},
                        "snr_db": 25})"},
            };
        }();
        return list;
    }

    inline const preset &find_preset(const std::string &name)
    {
        for (const auto &p : presets())
            if (p.name == name)
                return p;
        throw validation_error("unknown preset '" + name + "' (see `nearfield-bd presets`)");
    }

    inline json preset_config(const std::string &name) { return json::parse(find_preset(name).config); }

    using experiment_fn = run_result (*)(const json &, const run_options &);

    inline const std::map<std::string, experiment_fn> &experiment_table()
    {
        static const std::map<std::string, experiment_fn> table{
            {"gain-profile", [](const json &c, const run_options &o) { return detail::gain_profile_experiment(c, o, false); }},
            {"circular-gain", [](const json &c, const run_options &o) { return detail::gain_profile_experiment(c, o, true); }},
            {"bd-vs-eta", &detail::bd_vs_eta},
            {"bd-vs-phi", &detail::bd_vs_phi},
            {"a3db-curve", &detail::a3db_curve},
            {"finite-limit-curve", &detail::finite_limit_curve},
            {"lobe-catalog", &detail::lobe_catalog},
            {"distance-error", &detail::distance_error},
            {"projection-error", &detail::projection_error},
            {"multiplex-plan", &detail::multiplex_plan},
            {"sum-rate-vs-snr", &detail::sum_rate_vs_snr},
            {"sum-rate-vs-users", &detail::sum_rate_vs_users},
            {"sum-rate-vs-eta", &detail::sum_rate_vs_eta},
            {"sum-rate-vs-phi", &detail::sum_rate_vs_phi},
        };
        return table;
    }

    /// Runs a complete configuration (preset already merged in).
    inline run_result run(const json &config, const run_options &opt)
    {
        if (!config.is_object())
            throw validation_error("configuration must be a JSON object");
        const std::string name = detail::text(detail::field(config, "experiment", ""), "experiment");
        const auto &table = experiment_table();
        const auto it = table.find(name);
        if (it == table.end())
        {
            std::string names;
            for (const auto &[n, fn] : table)
                names += (names.empty() ? "" : ", ") + n;
            throw validation_error("'experiment' must be one of: " + names);
        }
        run_options resolved = opt;
        resolved.threads = resolve_threads(opt.threads);
        run_result r = it->second(config, resolved);
        r.experiment = name;
        return r;
    }

    /// Preset (if any) as the base; each top-level key of the user's configuration replaces the preset's.
    inline json merge_config(const std::optional<std::string> &preset_name, const json &user)
    {
        json base = preset_name ? preset_config(*preset_name) : json::object();
        if (!user.is_null())
        {
            if (!user.is_object())
                throw validation_error("configuration must be a JSON object");
            for (const auto &[key, value] : user.items())
                base[key] = value;
        }
        return base;
    }

    inline std::string comment_line(const std::string &experiment, const std::string &preset_name)
    {
        return "# nearfield-bd v" + std::string(version) + " experiment=" + experiment +
               " preset=" + (preset_name.empty() ? "custom" : preset_name);
    }

    /// Output paths: the main file at `path`, others at <stem><suffix><extension>.
    inline std::vector<std::string> output_paths(const run_result &r, const std::string &path)
    {
        const auto dot = path.find_last_of('.');
        const auto slash = path.find_last_of('/');
        const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
        const std::string stem = has_ext ? path.substr(0, dot) : path;
        const std::string ext = has_ext ? path.substr(dot) : std::string();
        std::vector<std::string> out;
        for (const auto &o : r.outputs)
            out.push_back(o.suffix.empty() ? path : stem + o.suffix + ext);
        return out;
    }

    inline std::vector<std::string> write_outputs(const run_result &r, const std::string &path,
                                                  const std::string &preset_name)
    {
        const auto paths = output_paths(r, path);
        const std::string comment = comment_line(r.experiment, preset_name);
        for (std::size_t i = 0; i < paths.size(); ++i)
        {
            std::ofstream f(paths[i], std::ios::binary | std::ios::trunc);
            if (!f)
                throw validation_error("cannot open output file '" + paths[i] + "'");
            r.outputs[i].table.write(f, comment);
            if (!f)
                throw validation_error("failed writing '" + paths[i] + "'");
        }
        return paths;
    }
} // namespace nfbd::experiments

#endif
