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

#ifndef NFBD_GAIN_HPP
#define NFBD_GAIN_HPP

#include "error.hpp"
#include "field.hpp"
#include "fresnel.hpp"
#include "geometry.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace nfbd
{
    /// |1/z - 1/F| = 1 / z_eff, zero at perfect focus and 1/z for a far-field filter.
    inline double inverse_effective_distance(double z, double focus_distance)
    {
        detail::require_positive(z, "distance");
        if (std::isnan(focus_distance) || focus_distance <= 0.0)
            throw validation_error("focus distance must be positive (or +inf)");
        return std::isinf(focus_distance) ? 1.0 / z : std::abs(1.0 / z - 1.0 / focus_distance);
    }

    /// z_eff = F z / |F - z|; +inf at perfect focus.
    inline double effective_distance(double z, double focus_distance)
    {
        const double inv = inverse_effective_distance(z, focus_distance);
        return inv == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / inv;
    }

    /// Broadside gain of the rectangular aperture under the Fresnel approximation.
    inline double analytic_gain_rect(double eta, double a)
    {
        detail::require_positive(eta, "eta");
        if (std::isnan(a) || a < 0.0)
            throw validation_error("a must be >= 0");
        if (a == 0.0)
            return 1.0;
        // Each axis contributes |C(x) + jS(x)|^2 / x^2, which tends to 1 as x -> 0.
        const auto axis = [](double x)
        {
            if (x == 0.0)
                return 1.0;
            const auto f = fresnel_cs(x);
            const double c = f.c / x, s = f.s / x;
            return c * c + s * s;
        };
        const double sa = std::sqrt(a);
        return axis(eta * sa) * axis(sa);
    }

    /// a = d_FA / (4 z_eff (1 + eta^2)).
    inline double a_parameter(const rect_array &arr, double z, double focus_distance)
    {
        return arr.fraunhofer_array_distance() * inverse_effective_distance(z, focus_distance) /
               (4.0 * (1.0 + arr.eta * arr.eta));
    }

    namespace detail
    {
        inline double fresnel_window(double centre, double offset)
        {
            const auto a = fresnel_cs(centre + offset);
            const auto b = fresnel_cs(centre - offset);
            const double c = a.c + b.c, s = a.s + b.s;
            return c * c + s * s;
        }
    } // namespace detail

    /// Gain for an off-broadside source; q couples to the width branch and q_tilde to the height branch.
    inline double analytic_gain_nonbroadside(double eta, double p, double q, double q_tilde)
    {
        detail::require_positive(eta, "eta");
        detail::require_positive(p, "p");
        detail::require_finite(q, "q");
        detail::require_finite(q_tilde, "q_tilde");
        const double scale = 4.0 * eta * p * p;
        return detail::fresnel_window(p, q_tilde) * detail::fresnel_window(eta * p, q) / (scale * scale);
    }

    struct nonbroadside_parameters
    {
        double p = 0.0;
        double q = 0.0;       // width (x) branch
        double q_tilde = 0.0; // height (y) branch
        double sx = 0.0;      // residual direction sines after steering
        double sy = 0.0;
    };

    /// p = (1/2) sqrt(d_FA / (d_eff (1 + eta^2))), q = s_x sqrt(2 d_eff / lambda), q~ = s_y sqrt(2 d_eff / lambda),
    /// with s_x = x_t/d - u_x and s_y = y_t/d - u_y the direction sines left after any steering of the filter.
    /// At perfect focus p = 0 and q is infinite; see analytic_gain_fresnel.
    inline nonbroadside_parameters nonbroadside_params(const rect_array &arr, const tx_geometry &tx, const focus &fc)
    {
        tx.validate();
        fc.validate();
        const double inv = inverse_effective_distance(tx.dist, fc.distance);
        nonbroadside_parameters r;
        r.sx = std::sin(tx.azimuth) * std::cos(tx.elevation) - std::sin(fc.azimuth) * std::cos(fc.elevation);
        r.sy = std::sin(tx.elevation) - std::sin(fc.elevation);
        r.p = 0.5 * std::sqrt(arr.fraunhofer_array_distance() * inv / (1.0 + arr.eta * arr.eta));
        const double root = inv == 0.0 ? std::numeric_limits<double>::infinity()
                                       : std::sqrt(2.0 / (arr.wavelength * inv));
        r.q = r.sx == 0.0 ? 0.0 : r.sx * root;
        r.q_tilde = r.sy == 0.0 ? 0.0 : r.sy * root;
        return r;
    }

    /// Fresnel-approximation gain of a rectangular array for any source direction and focus, dispatching to
    /// the broadside or off-broadside closed form. At perfect focus the off-broadside form tends to
    /// sinc^2(pi W s_x / lambda) sinc^2(pi H s_y / lambda).
    inline double analytic_gain_fresnel(const rect_array &arr, const tx_geometry &tx, const focus &fc)
    {
        const auto prm = nonbroadside_params(arr, tx, fc);
        if (prm.sx == 0.0 && prm.sy == 0.0)
            return analytic_gain_rect(arr.eta, prm.p * prm.p);
        if (prm.p == 0.0)
        {
            const double gx = sinc(std::numbers::pi * arr.aperture_width() * prm.sx / arr.wavelength);
            const double gy = sinc(std::numbers::pi * arr.aperture_height() * prm.sy / arr.wavelength);
            return gx * gx * gy * gy;
        }
        return analytic_gain_nonbroadside(arr.eta, prm.p, prm.q, prm.q_tilde);
    }

    /// Circular aperture gain sinc^2(pi l).
    inline double analytic_gain_circ(double l)
    {
        if (std::isnan(l) || l < 0.0)
            throw validation_error("l must be >= 0");
        const double s = sinc(std::numbers::pi * l);
        return s * s;
    }

    /// l = R^2 / (2 lambda z_eff).
    inline double l_parameter(const circ_array &circ, double z, double focus_distance)
    {
        return circ.radius * circ.radius * inverse_effective_distance(z, focus_distance) / (2.0 * circ.wavelength);
    }

    // ---- exact gains by quadrature ---------------------------------------------------------

    struct exact_gain_result
    {
        double gain = 0.0;
        double error_estimate = 0.0; // |G(order) - G(order/2)|, 0 without refinement
        int order = 0;               // points per axis per element of the returned value
    };

    namespace detail
    {
        inline void require_radiative(double dist, double aperture_length)
        {
            if (dist < 1.2 * aperture_length)
                throw validation_error("transmitter lies in the reactive near-field (d < 1.2 D_array)");
        }

        // Composite rule over the aperture axis: `count` cells of width `cell`, centred on the origin.
        inline void axis_nodes(int count, double cell, int order, std::vector<double> &pos, std::vector<double> &wt)
        {
            const auto &rule = gauss_legendre(order);
            pos.clear();
            wt.clear();
            pos.reserve(static_cast<std::size_t>(count) * order);
            wt.reserve(static_cast<std::size_t>(count) * order);
            const double mid = 0.5 * (count + 1);
            for (int n = 1; n <= count; ++n)
            {
                const double c = (n - mid) * cell;
                for (std::size_t i = 0; i < rule.size(); ++i)
                {
                    pos.push_back(c + 0.5 * cell * rule.nodes[i]);
                    wt.push_back(0.5 * cell * rule.weights[i]);
                }
            }
        }

        inline double rect_gain_at_order(const rect_array &arr, const tx_geometry &tx, const focus &fc,
                                         field_model model, int order, unsigned threads)
        {
            std::vector<double> xs, wx, ys, wy;
            axis_nodes(arr.n_per_side, arr.elem_w, order, xs, wx);
            axis_nodes(arr.n_per_side, arr.elem_h, order, ys, wy);
            const tx_cache t(tx);
            const focus_cache f(fc);
            const double k = wavenumber(arr.wavelength);

            std::vector<complex> row_num(xs.size());
            std::vector<double> row_den(xs.size());
            parallel_for(xs.size(), threads,
                         [&](std::size_t i)
                         {
                             const double x = xs[i];
                             complex num{};
                             double den = 0.0;
                             for (std::size_t j = 0; j < ys.size(); ++j)
                             {
                                 const double y = ys[j];
                                 const auto s = sample_field(model, t, k, x, y);
                                 const double phase = s.phase + f.phase(k, x, y);
                                 num += wy[j] * s.amplitude * complex(std::cos(phase), std::sin(phase));
                                 den += wy[j] * s.amplitude * s.amplitude;
                             }
                             row_num[i] = wx[i] * num;
                             row_den[i] = wx[i] * den;
                         });
            complex num{};
            double den = 0.0;
            for (std::size_t i = 0; i < xs.size(); ++i)
            {
                num += row_num[i];
                den += row_den[i];
            }
            if (!(den > 0.0))
                throw numerical_error("vanishing received power in gain quadrature");
            return std::norm(num) / (arr.aperture_area() * den);
        }
    } // namespace detail

    /// Normalized array gain |sum_nm int E * MF|^2 / (N A sum_nm int |E|^2), by tensor Gauss-Legendre
    /// per element. Each refinement pass doubles the order until the change drops below the tolerance.
    inline exact_gain_result exact_array_gain_detailed(const rect_array &arr, const tx_geometry &tx, const focus &fc,
                                                       const quadrature_spec &quad = {},
                                                       field_model model = field_model::exact,
                                                       unsigned threads = 1)
    {
        quad.validate();
        tx.validate();
        fc.validate();
        detail::require_radiative(tx.dist, arr.aperture_length());

        exact_gain_result r;
        r.order = quad.order;
        r.gain = detail::rect_gain_at_order(arr, tx, fc, model, r.order, threads);
        for (int pass = 0; pass < quad.refinement; ++pass)
        {
            const int next_order = 2 * r.order;
            const double next = detail::rect_gain_at_order(arr, tx, fc, model, next_order, threads);
            r.error_estimate = std::abs(next - r.gain);
            r.gain = next;
            r.order = next_order;
            if (r.error_estimate <= quad.tolerance * std::max(r.gain, 1e-300))
                break;
        }
        if (!std::isfinite(r.gain))
            throw numerical_error("non-finite gain from quadrature");
        return r;
    }

    inline double exact_array_gain(const rect_array &arr, const tx_geometry &tx, const focus &fc,
                                   const quadrature_spec &quad = {}, field_model model = field_model::exact,
                                   unsigned threads = 1)
    {
        return exact_array_gain_detailed(arr, tx, fc, quad, model, threads).gain;
    }

    /// Polar rule over the disk: composite Gauss-Legendre in r, trapezoid in the angle.
    /// Zero panel/point counts are chosen from the aperture size and steering.
    struct disk_quadrature
    {
        int radial_order = 8;
        int radial_panels = 0;
        int angular_points = 0;

        void validate() const
        {
            if (radial_order < 2 || radial_panels < 0 || angular_points < 0)
                throw validation_error("invalid disk quadrature settings");
        }
    };

    /// Normalized gain of the continuous circular aperture.
    inline double exact_circular_gain(const circ_array &circ, const tx_geometry &tx, const focus &fc,
                                      const disk_quadrature &quad = {}, field_model model = field_model::exact,
                                      unsigned threads = 1)
    {
        quad.validate();
        tx.validate();
        fc.validate();
        detail::require_radiative(tx.dist, 2.0 * circ.radius);

        const double k = wavenumber(circ.wavelength);
        const double kr = k * circ.radius;
        const double tilt = std::abs(std::sin(tx.azimuth)) + std::abs(std::sin(tx.elevation)) +
                            std::abs(std::sin(fc.azimuth)) + std::abs(std::sin(fc.elevation));
        const int panels = quad.radial_panels > 0 ? quad.radial_panels
                                                  : std::max(2, static_cast<int>(std::ceil(2.0 * circ.radius /
                                                                                           circ.wavelength)));
        const int angles = quad.angular_points > 0 ? quad.angular_points
                                                   : 64 + 2 * static_cast<int>(std::ceil(kr * tilt));

        const auto &rule = gauss_legendre(quad.radial_order);
        const double h = circ.radius / panels;
        std::vector<double> rs, wr;
        for (int p = 0; p < panels; ++p)
            for (std::size_t i = 0; i < rule.size(); ++i)
            {
                const double r = (p + 0.5) * h + 0.5 * h * rule.nodes[i];
                rs.push_back(r);
                wr.push_back(0.5 * h * rule.weights[i] * r);
            }
        const double dtheta = 2.0 * std::numbers::pi / angles;
        const detail::tx_cache t(tx);
        const detail::focus_cache f(fc);

        std::vector<complex> ring_num(rs.size());
        std::vector<double> ring_den(rs.size());
        parallel_for(rs.size(), threads,
                     [&](std::size_t i)
                     {
                         complex num{};
                         double den = 0.0;
                         for (int a = 0; a < angles; ++a)
                         {
                             const double th = a * dtheta;
                             const double x = rs[i] * std::cos(th), y = rs[i] * std::sin(th);
                             const auto s = detail::sample_field(model, t, k, x, y);
                             const double phase = s.phase + f.phase(k, x, y);
                             num += s.amplitude * complex(std::cos(phase), std::sin(phase));
                             den += s.amplitude * s.amplitude;
                         }
                         ring_num[i] = wr[i] * dtheta * num;
                         ring_den[i] = wr[i] * dtheta * den;
                     });
        complex num{};
        double den = 0.0;
        for (std::size_t i = 0; i < rs.size(); ++i)
        {
            num += ring_num[i];
            den += ring_den[i];
        }
        if (!(den > 0.0))
            throw numerical_error("vanishing received power in disk quadrature");
        return std::norm(num) / (circ.area() * den);
    }

    /// Off-broadside gain approximated by the broadside gain of the array projected at the azimuth,
    /// evaluated at the same distance and focus distance.
    inline double projected_gain_approx(const rect_array &arr, const tx_geometry &tx, const focus &fc,
                                        const quadrature_spec &quad = {}, field_model model = field_model::exact,
                                        unsigned threads = 1)
    {
        tx.validate();
        const rect_array proj = project_array(arr, tx.azimuth);
        return exact_array_gain(proj, tx_geometry::broadside(tx.dist), focus::broadside(fc.distance, fc.model), quad,
                                model, threads);
    }

    // ---- gain profiles ---------------------------------------------------------------------

    struct gain_sample
    {
        double distance = 0.0;
        double gain = 0.0;
    };

    struct gain_profile
    {
        double focus_distance = 0.0;
        std::vector<gain_sample> samples;
    };

    enum class gain_method
    {
        exact,
        analytic
    };

    using aperture = std::variant<rect_array, circ_array>;

    struct profile_request
    {
        gain_method method = gain_method::analytic;
        aperture geometry = rect_array{};
        double azimuth = 0.0;
        double elevation = 0.0;
        std::vector<double> distances; // strictly increasing, metres
        focus fc;
        field_model model = field_model::exact;
        quadrature_spec quad;
        disk_quadrature disk;
        unsigned threads = 1;
    };

    inline double aperture_length(const aperture &ap)
    {
        return std::visit(
            [](const auto &a) -> double
            {
                if constexpr (std::is_same_v<std::decay_t<decltype(a)>, rect_array>)
                    return a.aperture_length();
                else
                    return 2.0 * a.radius;
            },
            ap);
    }

    /// Gain at one distance along the request's direction.
    inline double profile_point(const profile_request &req, double dist)
    {
        const tx_geometry tx{dist, req.azimuth, req.elevation};
        if (const auto *rect = std::get_if<rect_array>(&req.geometry))
        {
            if (req.method == gain_method::exact)
                return exact_array_gain(*rect, tx, req.fc, req.quad, req.model);
            return analytic_gain_fresnel(*rect, tx, req.fc);
        }
        const auto &circ = std::get<circ_array>(req.geometry);
        if (req.method == gain_method::exact)
            return exact_circular_gain(circ, tx, req.fc, req.disk, req.model);
        if (!tx.is_broadside() || req.fc.azimuth != 0.0 || req.fc.elevation != 0.0)
            throw validation_error("the circular closed form covers broadside sources and foci only");
        return analytic_gain_circ(l_parameter(circ, dist, req.fc.distance));
    }

    /// Evaluates the gain at every distance of the request, in parallel over sweep points.
    inline gain_profile sweep_gain_profile(const profile_request &req)
    {
        req.fc.validate();
        if (req.distances.empty())
            throw validation_error("empty distance grid");
        for (std::size_t i = 0; i < req.distances.size(); ++i)
        {
            const double d = req.distances[i];
            if (!std::isfinite(d) || d <= 0.0)
                throw validation_error("distance at index " + std::to_string(i) + " must be positive and finite");
            if (i > 0 && !(d > req.distances[i - 1]))
                throw validation_error("distances must be strictly increasing (index " + std::to_string(i) + ")");
        }
        if (req.method == gain_method::exact && req.distances.front() < 1.2 * aperture_length(req.geometry))
            throw validation_error("distance at index 0 lies in the reactive near-field");

        gain_profile out;
        out.focus_distance = req.fc.distance;
        out.samples.resize(req.distances.size());
        parallel_sweep(req.distances.size(), req.threads,
                       [&](std::size_t i)
                       {
                           const double g = profile_point(req, req.distances[i]);
                           if (!std::isfinite(g))
                               throw numerical_error("non-finite gain");
                           out.samples[i] = {req.distances[i], g};
                       });
        return out;
    }
} // namespace nfbd

#endif
