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

#ifndef NFBD_GEOMETRY_HPP
#define NFBD_GEOMETRY_HPP

#include "error.hpp"

#include <cmath>
#include <numbers>
#include <type_traits>
#include <variant>

namespace nfbd
{
    inline constexpr double speed_of_light = 299792458.0; // m/s

    inline double wavelength_from_carrier(double carrier_hz)
    {
        detail::require_positive(carrier_hz, "carrier frequency");
        return speed_of_light / carrier_hz;
    }

    // How the element size of a rectangular array is pinned down.
    struct fixed_element_diagonal
    {
        double diagonal; // D, m
    };
    struct fixed_aperture_area
    {
        double area; // A_array = N w l, m^2
    };
    struct fixed_aperture_length
    {
        double length; // D_array = sqrt(N) D, m
    };
    using array_sizing = std::variant<fixed_element_diagonal, fixed_aperture_area, fixed_aperture_length>;

    /// Uniform planar array of n_per_side x n_per_side rectangular elements whose width is
    /// eta times their height. Elements tile the aperture without gaps.
    struct rect_array
    {
        int n_per_side = 1;
        double eta = 1.0;        // width-to-height ratio
        double elem_diag = 0.0;  // D
        double elem_h = 0.0;     // l = D / sqrt(1 + eta^2)
        double elem_w = 0.0;     // w = eta * l
        double wavelength = 0.0; // lambda

        long element_count() const { return static_cast<long>(n_per_side) * n_per_side; }
        double element_area() const { return elem_w * elem_h; }
        double aperture_length() const { return n_per_side * elem_diag; }
        double aperture_area() const { return element_count() * element_area(); }
        double aperture_width() const { return n_per_side * elem_w; }
        double aperture_height() const { return n_per_side * elem_h; }

        double fraunhofer_distance() const { return 2.0 * elem_diag * elem_diag / wavelength; }
        double fraunhofer_array_distance() const { return element_count() * fraunhofer_distance(); }
        double bjornson_distance() const { return 2.0 * elem_diag * n_per_side; }
    };

    struct array_distances
    {
        double d_f;      // element Fraunhofer distance 2 D^2 / lambda
        double d_fa;     // array Fraunhofer distance N d_f
        double d_b;      // Bjornson distance 2 D sqrt(N)
        double bd_limit; // focus beyond which the 3 dB beam depth is infinite
    };

    struct circ_array
    {
        double radius = 0.0;
        double wavelength = 0.0;

        double area() const { return std::numbers::pi * radius * radius; }
        // d_B of the rectangular aperture with the same aperture length 2R.
        double bjornson_distance() const { return 4.0 * radius; }
    };

    inline circ_array make_circ_array(double radius, double wavelength)
    {
        detail::require_positive(radius, "radius");
        detail::require_positive(wavelength, "wavelength");
        return {radius, wavelength};
    }

    /// Transmitter at distance d from the array centre, azimuth phi and elevation theta.
    struct tx_geometry
    {
        double dist = 0.0;
        double azimuth = 0.0;
        double elevation = 0.0;

        static tx_geometry broadside(double z) { return {z, 0.0, 0.0}; }

        double x() const { return dist * std::sin(azimuth) * std::cos(elevation); }
        double y() const { return dist * std::sin(elevation); }
        double z() const { return dist * std::cos(elevation) * std::cos(azimuth); }
        bool is_broadside() const { return azimuth == 0.0 && elevation == 0.0; }

        void validate() const
        {
            detail::require_positive(dist, "transmitter distance");
            if (!(std::abs(azimuth) < std::numbers::pi / 2) || !(std::abs(elevation) < std::numbers::pi / 2))
                throw validation_error("transmitter azimuth/elevation must lie in (-pi/2, pi/2)");
        }
    };

    struct point2
    {
        double x = 0.0;
        double y = 0.0;
    };

    inline rect_array make_rect_array(int n_per_side, double eta, const array_sizing &sizing, double wavelength)
    {
        if (n_per_side < 1)
            throw validation_error("n_per_side must be >= 1");
        detail::require_positive(eta, "eta");
        detail::require_positive(wavelength, "wavelength");

        const double n = n_per_side;
        const double shape = 1.0 + eta * eta;
        const double diag = std::visit(
            [&](const auto &s) -> double
            {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, fixed_element_diagonal>)
                {
                    detail::require_positive(s.diagonal, "element diagonal");
                    return s.diagonal;
                }
                else if constexpr (std::is_same_v<S, fixed_aperture_area>)
                {
                    // A_array = N eta D^2 / (1 + eta^2)
                    detail::require_positive(s.area, "aperture area");
                    return std::sqrt(s.area * shape / (eta * n * n));
                }
                else
                {
                    detail::require_positive(s.length, "aperture length");
                    return s.length / n;
                }
            },
            sizing);

        rect_array arr;
        arr.n_per_side = n_per_side;
        arr.eta = eta;
        arr.elem_diag = diag;
        arr.elem_h = diag / std::sqrt(shape);
        arr.elem_w = eta * arr.elem_h;
        arr.wavelength = wavelength;
        return arr;
    }

    /// Centre of element (n, m), 1-based: x_n = (n - (sqrt(N)+1)/2) w, y_m = (m - (sqrt(N)+1)/2) l.
    inline point2 element_center(const rect_array &arr, int n, int m)
    {
        if (n < 1 || n > arr.n_per_side || m < 1 || m > arr.n_per_side)
            throw validation_error("element index out of range");
        const double mid = 0.5 * (arr.n_per_side + 1);
        return {(n - mid) * arr.elem_w, (m - mid) * arr.elem_h};
    }

    inline array_distances characteristic_distances(const rect_array &arr, double a3db)
    {
        detail::require_positive(a3db, "a3db");
        const double d_fa = arr.fraunhofer_array_distance();
        return {arr.fraunhofer_distance(), d_fa, arr.bjornson_distance(),
                d_fa / (4.0 * a3db * (1.0 + arr.eta * arr.eta))};
    }

    /// Broadside-equivalent array seen from azimuth phi: widths shrink by cos(phi), heights stay.
    inline rect_array project_array(const rect_array &arr, double azimuth)
    {
        if (!(std::abs(azimuth) < std::numbers::pi / 2))
            throw validation_error("projection azimuth must lie in (-pi/2, pi/2)");
        if (azimuth == 0.0)
            return arr;
        rect_array p = arr;
        p.elem_w = arr.elem_w * std::cos(azimuth);
        if (!(p.elem_w > 0.0))
            throw validation_error("degenerate projection");
        p.eta = p.elem_w / p.elem_h;
        p.elem_diag = std::hypot(p.elem_w, p.elem_h);
        return p;
    }
} // namespace nfbd

#endif
