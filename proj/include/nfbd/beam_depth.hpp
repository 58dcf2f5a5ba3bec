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

#ifndef NFBD_BEAM_DEPTH_HPP
#define NFBD_BEAM_DEPTH_HPP

#include "error.hpp"
#include "fresnel.hpp"
#include "gain.hpp"
#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

namespace nfbd
{
    enum class depth_status
    {
        finite,
        infinite,
        undetermined // no half-power bracket found on a bounded grid
    };

    /// 3 dB interval around a focal point. For `infinite`, z_hi and depth are +inf.
    struct beam_depth_result
    {
        depth_status status = depth_status::undetermined;
        double focus_distance = 0.0;
        double z_lo = std::numeric_limits<double>::quiet_NaN();
        double z_hi = std::numeric_limits<double>::quiet_NaN();
        double depth = std::numeric_limits<double>::quiet_NaN();
        double finite_limit = std::numeric_limits<double>::quiet_NaN();
        bool outside_validity = false; // focus below the Bjornson distance

        bool is_finite() const { return status == depth_status::finite; }
        bool is_infinite() const { return status == depth_status::infinite; }
    };

    /// Smallest a > 0 with analytic_gain_rect(eta, a) = 1/2 (mainlobe half-power point).
    inline double solve_a3db(double eta, double tol = 1e-12)
    {
        detail::require_positive(eta, "eta");
        detail::require_positive(tol, "tolerance");
        auto excess = [eta](double a) { return analytic_gain_rect(eta, a) - 0.5; };

        // The half-power a scales like 1/eta^2 for wide elements; start well inside the mainlobe.
        double hi = 1e-3 / std::max(1.0, eta * eta);
        double lo = 0.0;
        int steps = 0;
        while (excess(hi) > 0.0)
        {
            lo = hi;
            hi *= 1.05;
            if (++steps > 2000)
                throw numerical_error("could not bracket the half-power point");
        }
        for (int iter = 0; iter < 200; ++iter)
        {
            const double mid = 0.5 * (lo + hi);
            const double e = excess(mid);
            if (e > 0.0)
                lo = mid;
            else
                hi = mid;
            if (hi - lo <= 1e-15 * hi && std::abs(e) <= tol)
                break;
        }
        const double root = 0.5 * (lo + hi);
        if (std::abs(excess(root)) > tol)
            throw numerical_error("half-power bisection did not reach the requested tolerance");
        return root;
    }

    /// Focus distance beyond which the 3 dB depth of a rectangular array is infinite.
    inline double finite_bd_limit_rect(const rect_array &arr, double a3db)
    {
        detail::require_positive(a3db, "a3db");
        return arr.fraunhofer_array_distance() / (4.0 * a3db * (1.0 + arr.eta * arr.eta));
    }

    inline double finite_bd_limit_rect(const rect_array &arr) { return finite_bd_limit_rect(arr, solve_a3db(arr.eta)); }

    /// Closed-form 3 dB interval of a rectangular array focused at F on broadside.
    inline beam_depth_result bd_rect(const rect_array &arr, double focus_distance, double a3db)
    {
        detail::require_positive(focus_distance, "focus distance");
        detail::require_positive(a3db, "a3db");
        const double d_fa = arr.fraunhofer_array_distance();
        const double c = 4.0 * focus_distance * a3db * (1.0 + arr.eta * arr.eta);

        beam_depth_result r;
        r.focus_distance = focus_distance;
        r.finite_limit = finite_bd_limit_rect(arr, a3db);
        r.outside_validity = focus_distance < arr.bjornson_distance();
        r.z_lo = d_fa * focus_distance / (d_fa + c);
        if (c >= d_fa)
        {
            r.status = depth_status::infinite;
            r.z_hi = r.depth = std::numeric_limits<double>::infinity();
            return r;
        }
        r.status = depth_status::finite;
        r.z_hi = d_fa * focus_distance / (d_fa - c);
        r.depth = 8.0 * d_fa * focus_distance * focus_distance * a3db * (1.0 + arr.eta * arr.eta) /
                  (d_fa * d_fa - c * c);
        return r;
    }

    inline beam_depth_result bd_rect(const rect_array &arr, double focus_distance)
    {
        return bd_rect(arr, focus_distance, solve_a3db(arr.eta));
    }

    /// Coefficient of the circular depth formula: twice the sinc^2 half-power argument over pi, to 3 digits.
    inline constexpr double circ_half_power_coefficient = 0.886;

    /// Same coefficient solved from sinc^2(x) = 1/2 (2 x / pi = 0.88589...).
    inline double circ_half_power_coefficient_solved() { return 2.0 * sinc_half_power_argument() / std::numbers::pi; }

    /// Closed-form 3 dB interval of a circular aperture focused at F on broadside.
    inline beam_depth_result bd_circ(const circ_array &circ, double focus_distance,
                                     double coefficient = circ_half_power_coefficient)
    {
        detail::require_positive(focus_distance, "focus distance");
        detail::require_positive(coefficient, "coefficient");
        const double r2 = circ.radius * circ.radius;
        const double c = coefficient * circ.wavelength * focus_distance;

        beam_depth_result r;
        r.focus_distance = focus_distance;
        r.finite_limit = r2 / (coefficient * circ.wavelength);
        r.outside_validity = focus_distance < circ.bjornson_distance();
        r.z_lo = r2 * focus_distance / (r2 + c);
        if (c >= r2)
        {
            r.status = depth_status::infinite;
            r.z_hi = r.depth = std::numeric_limits<double>::infinity();
            return r;
        }
        r.status = depth_status::finite;
        r.z_hi = r2 * focus_distance / (r2 - c);
        r.depth = 2.0 * coefficient * r2 * focus_distance * focus_distance * circ.wavelength / (r2 * r2 - c * c);
        return r;
    }

    namespace detail
    {
        struct crossing
        {
            bool found = false;
            std::size_t below = 0; // index of the sample below half power
            std::size_t above = 0; // neighbouring sample at or above half power
        };

        inline double interpolate_crossing(const gain_sample &a, const gain_sample &b, double level)
        {
            const double t = (a.gain - level) / (a.gain - b.gain);
            return a.distance + t * (b.distance - a.distance);
        }
    } // namespace detail

    /// Half-power interval read off a sampled profile. Without a gain callable the crossings are linearly
    /// interpolated between bracketing samples; with one they are bisected to `rel_tol`, and the peak
    /// level also takes the gain at the focus into account.
    /// When the upper side never drops below half power, the result is infinite only if the grid reaches
    /// 100 times `finite_limit`; otherwise it is undetermined.
    inline beam_depth_result numeric_bd(const gain_profile &profile, const std::function<double(double)> &gain_fn,
                                        double finite_limit, double rel_tol = 1e-4)
    {
        const auto &s = profile.samples;
        if (s.size() < 2)
            throw validation_error("profile needs at least two samples");
        const auto peak_it = std::max_element(s.begin(), s.end(),
                                              [](const gain_sample &a, const gain_sample &b) { return a.gain < b.gain; });
        const std::size_t peak = static_cast<std::size_t>(peak_it - s.begin());
        if (peak_it->gain < 0.9)
            throw validation_error("profile maximum must be >= 0.9");
        double peak_gain = peak_it->gain;
        const double f = profile.focus_distance;
        if (gain_fn && std::isfinite(f) && f > s.front().distance && f < s.back().distance)
            peak_gain = std::max(peak_gain, gain_fn(f));
        const double level = 0.5 * peak_gain;

        beam_depth_result r;
        r.focus_distance = profile.focus_distance;
        r.finite_limit = finite_limit;

        auto refine = [&](std::size_t a, std::size_t b) -> double
        {
            if (!gain_fn)
                return detail::interpolate_crossing(s[a], s[b], level);
            double in = s[a].distance, out = s[b].distance; // gain(in) >= level > gain(out)
            while (std::abs(out - in) > rel_tol * std::min(in, out))
            {
                const double mid = 0.5 * (in + out);
                if (gain_fn(mid) >= level)
                    in = mid;
                else
                    out = mid;
            }
            return 0.5 * (in + out);
        };

        std::optional<double> z_lo, z_hi;
        for (std::size_t i = peak; i-- > 0;)
            if (s[i].gain < level)
            {
                z_lo = refine(i + 1, i);
                break;
            }
        for (std::size_t i = peak + 1; i < s.size(); ++i)
            if (s[i].gain < level)
            {
                z_hi = refine(i - 1, i);
                break;
            }

        if (z_lo)
            r.z_lo = *z_lo;
        if (!z_hi)
        {
            const bool extends = std::isfinite(finite_limit) && finite_limit > 0.0 &&
                                 s.back().distance >= 100.0 * finite_limit;
            if (extends)
            {
                r.status = depth_status::infinite;
                r.z_hi = r.depth = std::numeric_limits<double>::infinity();
            }
            return r;
        }
        r.z_hi = *z_hi;
        if (!z_lo)
            return r;
        r.status = depth_status::finite;
        r.depth = r.z_hi - r.z_lo;
        return r;
    }

    inline beam_depth_result numeric_bd(const gain_profile &profile,
                                        double finite_limit = std::numeric_limits<double>::quiet_NaN())
    {
        return numeric_bd(profile, {}, finite_limit);
    }

    // ---- circular nulls and side lobes -----------------------------------------------------

    enum class lobe_kind
    {
        null,
        peak
    };

    struct lobe_entry
    {
        int k = 0;
        lobe_kind kind = lobe_kind::null;
        double l = 0.0;
        double z_eff = 0.0;  // R^2 / (2 lambda l)
        double z_near = 0.0; // solution below the focus
        double z_far = std::numeric_limits<double>::infinity(); // above the focus; +inf when none exists
        double gain_db = -std::numeric_limits<double>::infinity();
    };

    /// Maximum of sinc^2(pi l) on (k, k + 1) by golden-section search.
    inline double circ_lobe_peak(int k)
    {
        if (k < 1)
            throw validation_error("lobe index must be >= 1");
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = k, b = k + 1.0;
        double c = b - phi * (b - a), d = a + phi * (b - a);
        double fc = analytic_gain_circ(c), fd = analytic_gain_circ(d);
        while (b - a > 1e-12)
        {
            if (fc > fd)
            {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = analytic_gain_circ(c);
            }
            else
            {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = analytic_gain_circ(d);
            }
        }
        return 0.5 * (a + b);
    }

    /// Nulls at l = 1..k_max and the lobe peak following each null, sorted by l, with the distances
    /// on either side of the focus where they occur.
    inline std::vector<lobe_entry> circ_lobe_catalog(const circ_array &circ, double focus_distance, int k_max)
    {
        if (k_max < 1)
            throw validation_error("k_max must be >= 1");
        detail::require_positive(focus_distance, "focus distance");
        const double scale = circ.radius * circ.radius / (2.0 * circ.wavelength);
        const double inv_f = 1.0 / focus_distance;

        auto place = [&](lobe_entry e)
        {
            e.z_eff = scale / e.l;
            e.z_near = 1.0 / (inv_f + 1.0 / e.z_eff);
            const double far = inv_f - 1.0 / e.z_eff;
            e.z_far = far > 0.0 ? 1.0 / far : std::numeric_limits<double>::infinity();
            return e;
        };

        std::vector<lobe_entry> out;
        for (int k = 1; k <= k_max; ++k)
        {
            lobe_entry null_entry;
            null_entry.k = k;
            null_entry.kind = lobe_kind::null;
            null_entry.l = k;
            out.push_back(place(null_entry));

            lobe_entry peak_entry;
            peak_entry.k = k;
            peak_entry.kind = lobe_kind::peak;
            peak_entry.l = circ_lobe_peak(k);
            peak_entry.gain_db = 10.0 * std::log10(analytic_gain_circ(peak_entry.l));
            out.push_back(place(peak_entry));
        }
        return out;
    }
} // namespace nfbd

#endif
