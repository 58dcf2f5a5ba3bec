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

#ifndef NFBD_FRESNEL_HPP
#define NFBD_FRESNEL_HPP

#include <cmath>
#include <complex>
#include <numbers>

namespace nfbd
{
    struct fresnel_pair
    {
        double c; // C(x) = int_0^x cos(pi t^2 / 2) dt
        double s; // S(x) = int_0^x sin(pi t^2 / 2) dt
    };

    namespace detail
    {
        // Alternating power series, used for |x| <= 1.6 where the largest term stays below ~10.
        inline fresnel_pair fresnel_series(double x)
        {
            const double t = 0.5 * std::numbers::pi * x * x;
            const double t2 = t * t;
            double c_sum = 0.0, s_sum = 0.0;
            double c_term = x;     // (-1)^n t^(2n) x / (2n)!
            double s_term = x * t; // (-1)^n t^(2n+1) x / (2n+1)!
            for (int n = 0; n < 60; ++n)
            {
                const double c_add = c_term / (4 * n + 1);
                const double s_add = s_term / (4 * n + 3);
                c_sum += c_add;
                s_sum += s_add;
                if (std::abs(c_add) < 1e-17 * std::abs(c_sum) && std::abs(s_add) < 1e-17 * std::abs(s_sum))
                    break;
                c_term *= -t2 / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
                s_term *= -t2 / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
            }
            return {c_sum, s_sum};
        }

        // C + iS = (1+i)/2 * (1 - e^{i pi x^2/2} h(x)), where h is the complementary error
        // function continued fraction evaluated with the modified Lentz method. x > 0.
        inline fresnel_pair fresnel_continued_fraction(double x)
        {
            using cplx = std::complex<double>;
            constexpr double tiny = 1e-300;
            constexpr double big = 1e300;
            const double pix2 = std::numbers::pi * x * x;

            cplx b(1.0, -pix2);
            cplx cc = big;
            cplx d = 1.0 / b;
            cplx h = d;
            double n = -1.0;
            for (int k = 2; k < 500; ++k)
            {
                n += 2.0;
                const double a = -n * (n + 1.0);
                b += 4.0;
                d = 1.0 / (a * d + b);
                cc = b + a / cc;
                if (std::abs(cc) < tiny)
                    cc = tiny;
                const cplx del = cc * d;
                h *= del;
                if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < 1e-16)
                    break;
            }
            h *= cplx(x, -x);
            const double half_phase = 0.5 * pix2;
            const cplx cs = cplx(0.5, 0.5) * (1.0 - cplx(std::cos(half_phase), std::sin(half_phase)) * h);
            return {cs.real(), cs.imag()};
        }
    } // namespace detail

    /// Fresnel integrals C(x) and S(x) evaluated together (they share all the work).
    inline fresnel_pair fresnel_cs(double x)
    {
        const double ax = std::abs(x);
        fresnel_pair r = ax <= 1.6 ? detail::fresnel_series(ax) : detail::fresnel_continued_fraction(ax);
        if (x < 0.0)
        {
            r.c = -r.c;
            r.s = -r.s;
        }
        return r;
    }

    inline double fresnel_c(double x) { return fresnel_cs(x).c; }
    inline double fresnel_s(double x) { return fresnel_cs(x).s; }

    /// Unnormalized sinc, sin(x)/x with sinc(0) = 1.
    inline double sinc(double x)
    {
        if (std::abs(x) < 1e-4)
        {
            const double x2 = x * x;
            return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
        }
        return std::sin(x) / x;
    }

    /// Argument x in (0, pi) with sinc^2(x) = 1/2, by bisection to 1e-13.
    inline double sinc_half_power_argument()
    {
        static const double value = []
        {
            double lo = 0.5, hi = 2.5; // sinc^2 decreasing on [0, pi]
            while (hi - lo > 1e-13)
            {
                const double mid = 0.5 * (lo + hi);
                const double s = sinc(mid);
                (s * s > 0.5 ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }();
        return value;
    }
} // namespace nfbd

#endif
