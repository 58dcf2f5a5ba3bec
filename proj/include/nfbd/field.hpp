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

#ifndef NFBD_FIELD_HPP
#define NFBD_FIELD_HPP

#include "error.hpp"
#include "geometry.hpp"
#include "quadrature.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace nfbd
{
    using complex = std::complex<double>;

    // The field amplitude carries E0 = 1 and the 1/sqrt(4 pi) prefactor of the aperture model.
    inline const double inv_sqrt_4pi = 1.0 / std::sqrt(4.0 * std::numbers::pi);

    inline double wavenumber(double wavelength) { return 2.0 * std::numbers::pi / wavelength; }

    /// Which electric-field expression is integrated over the aperture.
    enum class field_model
    {
        exact,  // spherical wave with incidence/polarization amplitude factor
        fresnel // constant amplitude 1/(sqrt(4 pi) z), phase d + (x^2 + y^2 - 2(x x_t + y y_t)) / (2d)
    };

    /// How the continuous matched filter is formed for a focal point.
    enum class focus_model
    {
        fresnel,  // quadratic phase (x^2 + y^2)/(2F), plus a linear steering term when steered
        spherical // conjugate of the exact spherical phase from the focal point
    };

    /// Focal point at distance F along (azimuth, elevation); F = +inf focuses at infinity.
    struct focus
    {
        double distance = std::numeric_limits<double>::infinity();
        double azimuth = 0.0;
        double elevation = 0.0;
        focus_model model = focus_model::fresnel;

        static focus broadside(double f, focus_model m = focus_model::fresnel) { return {f, 0.0, 0.0, m}; }
        static focus toward(const tx_geometry &tx, double f, focus_model m = focus_model::spherical)
        {
            return {f, tx.azimuth, tx.elevation, m};
        }

        bool at_infinity() const { return std::isinf(distance); }

        void validate() const
        {
            if (std::isnan(distance) || distance <= 0.0)
                throw validation_error("focus distance must be positive (or +inf)");
            if (!(std::abs(azimuth) < std::numbers::pi / 2) || !(std::abs(elevation) < std::numbers::pi / 2))
                throw validation_error("focus azimuth/elevation must lie in (-pi/2, pi/2)");
        }
    };

    namespace detail
    {
        // x^2 + y^2 - 2 (x x_t + y y_t): equals r - d^2 where r is the squared distance to the transmitter.
        inline double offset_term(const tx_geometry &tx, double x, double y)
        {
            return x * x + y * y - 2.0 * (x * tx.x() + y * tx.y());
        }

        struct tx_cache
        {
            double xt, yt, z, d;
            explicit tx_cache(const tx_geometry &tx) : xt(tx.x()), yt(tx.y()), z(tx.z()), d(tx.dist) {}
        };

        struct focus_cache
        {
            double f, ux, uy, uz;
            bool infinite;
            focus_model model;
            explicit focus_cache(const focus &fc)
                : f(fc.distance), ux(std::sin(fc.azimuth) * std::cos(fc.elevation)), uy(std::sin(fc.elevation)),
                  uz(std::cos(fc.elevation) * std::cos(fc.azimuth)), infinite(fc.at_infinity()), model(fc.model)
            {
            }

            // Matched-filter phase relative to the array centre (zero at the origin).
            double phase(double k, double x, double y) const
            {
                const double steer = x * ux + y * uy;
                if (infinite)
                    return -k * steer;
                if (model == focus_model::fresnel)
                    return k * ((x * x + y * y) / (2.0 * f) - steer);
                // |p - f| - F without cancellation
                const double num = x * x + y * y - 2.0 * f * steer;
                const double dx = x - f * ux, dy = y - f * uy, dz = f * uz;
                return k * num / (std::sqrt(dx * dx + dy * dy + dz * dz) + f);
            }
        };

        struct field_sample
        {
            double amplitude;
            double phase; // relative to -k d, i.e. the full phase is phase - k d
        };

        inline field_sample exact_sample(const tx_cache &t, double k, double x, double y)
        {
            const double dx = x - t.xt, dy = y - t.yt;
            const double r = dx * dx + dy * dy + t.z * t.z; // squared distance
            if (!(r > 0.0))
                throw numerical_error("exact field evaluated at the transmitter position");
            const double dist = std::sqrt(r);
            const double amp = inv_sqrt_4pi * std::sqrt(t.z * (dx * dx + t.z * t.z)) / (r * std::sqrt(dist));
            const double rel = (x * x + y * y - 2.0 * (x * t.xt + y * t.yt)) / (dist + t.d); // dist - d
            return {amp, -k * rel};
        }

        inline field_sample fresnel_sample(const tx_cache &t, double k, double x, double y)
        {
            const double rel = (x * x + y * y - 2.0 * (x * t.xt + y * t.yt)) / (2.0 * t.d);
            return {inv_sqrt_4pi / t.z, -k * rel};
        }

        inline field_sample sample_field(field_model model, const tx_cache &t, double k, double x, double y)
        {
            return model == field_model::exact ? exact_sample(t, k, x, y) : fresnel_sample(t, k, x, y);
        }
    } // namespace detail

    /// Electric field at (x, y, 0) from an isotropic y-polarized source (E0 = 1). With r the squared
    /// distance, amplitude = sqrt(z((x - x_t)^2 + z^2)) / (sqrt(4 pi) r^(5/4)) and phase = -k sqrt(r).
    inline complex exact_field(const tx_geometry &tx, double wavelength, point2 p)
    {
        const detail::tx_cache t(tx);
        const double k = wavenumber(wavelength);
        const auto s = detail::exact_sample(t, k, p.x, p.y);
        return std::polar(s.amplitude, s.phase - k * t.d);
    }

    /// Fresnel approximation for a broadside source at distance z.
    inline complex fresnel_field_broadside(double z, double wavelength, point2 p)
    {
        detail::require_positive(z, "distance");
        const double k = wavenumber(wavelength);
        return std::polar(inv_sqrt_4pi / z, -k * (z + (p.x * p.x + p.y * p.y) / (2.0 * z)));
    }

    /// Fresnel approximation built on the expansion around d (not z), valid off broadside.
    inline complex fresnel_field_nonbroadside(const tx_geometry &tx, double wavelength, point2 p)
    {
        detail::require_positive(tx.dist, "transmitter distance");
        const double k = wavenumber(wavelength);
        const double d = tx.dist;
        return std::polar(inv_sqrt_4pi / tx.z(), -k * (d + detail::offset_term(tx, p.x, p.y) / (2.0 * d)));
    }

    /// Injected phase shift exp(+j k (x^2 + y^2) / (2F)) focusing a broadside beam at (0, 0, F).
    inline complex matched_filter_phase(double focus_distance, double wavelength, point2 p)
    {
        if (std::isnan(focus_distance) || focus_distance <= 0.0)
            throw validation_error("focus distance must be positive (or +inf)");
        if (std::isinf(focus_distance))
            return 1.0;
        const double k = wavenumber(wavelength);
        return std::polar(1.0, k * (p.x * p.x + p.y * p.y) / (2.0 * focus_distance));
    }

    /// General (possibly steered) matched filter, unit modulus, equal to 1 at the array centre.
    inline complex matched_filter(const focus &fc, double wavelength, point2 p)
    {
        fc.validate();
        const detail::focus_cache f(fc);
        return std::polar(1.0, f.phase(wavenumber(wavelength), p.x, p.y));
    }

    namespace detail
    {
        inline complex element_integral(field_model model, const tx_cache &t, double k, double x0, double x1,
                                        double y0, double y1, int order)
        {
            return integrate_gl_2d<complex>(
                [&](double x, double y)
                {
                    const auto s = sample_field(model, t, k, x, y);
                    return std::polar(s.amplitude, s.phase);
                },
                x0, x1, y0, y1, order);
        }

        inline complex adaptive_element_integral(field_model model, const tx_cache &t, double k, double x0,
                                                 double x1, double y0, double y1, const quadrature_spec &quad,
                                                 int depth)
        {
            const complex coarse = element_integral(model, t, k, x0, x1, y0, y1, quad.order);
            if (quad.refinement == 0)
                return coarse;
            complex fine = coarse;
            int order = quad.order;
            for (int pass = 0; pass < quad.refinement; ++pass)
            {
                order *= 2;
                const complex next = element_integral(model, t, k, x0, x1, y0, y1, order);
                const double est = std::abs(next - fine);
                fine = next;
                if (est <= quad.tolerance * std::abs(fine))
                    return fine;
            }
            if (depth >= quad.max_depth)
                return fine;
            const double xm = 0.5 * (x0 + x1), ym = 0.5 * (y0 + y1);
            return adaptive_element_integral(model, t, k, x0, xm, y0, ym, quad, depth + 1) +
                   adaptive_element_integral(model, t, k, xm, x1, y0, ym, quad, depth + 1) +
                   adaptive_element_integral(model, t, k, x0, xm, ym, y1, quad, depth + 1) +
                   adaptive_element_integral(model, t, k, xm, x1, ym, y1, quad, depth + 1);
        }
    } // namespace detail

    /// Channel response of element (n, m): h = (1/sqrt(A)) * integral of E over the element.
    /// Includes the absolute propagation phase, so responses of different users can be combined.
    inline complex element_channel(const rect_array &arr, int n, int m, const tx_geometry &tx,
                                   const quadrature_spec &quad = {}, field_model model = field_model::exact)
    {
        quad.validate();
        detail::require_positive(tx.dist, "transmitter distance");
        const point2 c = element_center(arr, n, m);
        const detail::tx_cache t(tx);
        const double k = wavenumber(arr.wavelength);
        const complex integral = detail::adaptive_element_integral(
            model, t, k, c.x - 0.5 * arr.elem_w, c.x + 0.5 * arr.elem_w, c.y - 0.5 * arr.elem_h,
            c.y + 0.5 * arr.elem_h, quad, 0);
        return integral * std::polar(1.0, -k * tx.dist) / std::sqrt(arr.element_area());
    }

    // ---- Euclidean distance and its first-order Taylor forms -------------------------------

    inline double distance_exact(const rect_array &arr, int n, int m, const tx_geometry &tx)
    {
        const point2 c = element_center(arr, n, m);
        const double dx = c.x - tx.x(), dy = c.y - tx.y(), z = tx.z();
        return std::sqrt(dx * dx + dy * dy + z * z);
    }

    /// Expansion around z: z (1 + ((x - x_t)^2 + (y - y_t)^2) / (2 z^2)).
    inline double distance_taylor_direct(const rect_array &arr, int n, int m, const tx_geometry &tx)
    {
        const point2 c = element_center(arr, n, m);
        const double dx = c.x - tx.x(), dy = c.y - tx.y(), z = tx.z();
        return z * (1.0 + (dx * dx + dy * dy) / (2.0 * z * z));
    }

    /// Expansion around d: d + (x^2 + y^2 - 2(x x_t + y y_t)) / (2d).
    inline double distance_taylor_indirect(const rect_array &arr, int n, int m, const tx_geometry &tx)
    {
        const point2 c = element_center(arr, n, m);
        return tx.dist + detail::offset_term(tx, c.x, c.y) / (2.0 * tx.dist);
    }

    enum class taylor_variant
    {
        direct,
        indirect
    };

    /// Mean over all elements of |exact distance - Taylor approximation|, in metres.
    inline double mean_abs_distance_error(const rect_array &arr, const tx_geometry &tx, taylor_variant variant)
    {
        detail::require_positive(tx.dist, "transmitter distance");
        double total = 0.0;
        for (int n = 1; n <= arr.n_per_side; ++n)
            for (int m = 1; m <= arr.n_per_side; ++m)
            {
                const double exact = distance_exact(arr, n, m, tx);
                const double approx = variant == taylor_variant::direct ? distance_taylor_direct(arr, n, m, tx)
                                                                         : distance_taylor_indirect(arr, n, m, tx);
                total += std::abs(exact - approx);
            }
        return total / static_cast<double>(arr.element_count());
    }
} // namespace nfbd

#endif
