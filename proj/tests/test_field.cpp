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

#include "nfbd/field.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace nfbd;

namespace
{
    const double lambda = wavelength_from_carrier(3e9);
    const double k0 = 2 * std::numbers::pi / lambda;

    rect_array square(int n = 100) { return make_rect_array(n, 1.0, fixed_element_diagonal{lambda / 4}, lambda); }

    double wrap(double a) { return std::remainder(a, 2 * std::numbers::pi); }

    // Dipole amplitude ratio corner/centre for a broadside source, written out directly.
    double corner_amplitude_ratio(double z, double x, double y)
    {
        const double r = x * x + y * y + z * z;
        return std::sqrt(z * (x * x + z * z)) / std::pow(r, 1.25) * z;
    }
} // namespace

TEST(ExactField, OnAxis)
{
    const double z = 3.7;
    const auto e = exact_field(tx_geometry::broadside(z), lambda, {0, 0});
    EXPECT_NEAR(std::abs(e), 1.0 / (z * std::sqrt(4 * std::numbers::pi)), 1e-15);
    EXPECT_NEAR(wrap(std::arg(e) + k0 * z), 0.0, 1e-9);
}

TEST(ExactField, PhaseIsEuclideanDistance)
{
    const tx_geometry tx{2.0, 0.4, -0.1};
    const point2 p{0.03, -0.05};
    const double dist = std::sqrt(std::pow(p.x - tx.x(), 2) + std::pow(p.y - tx.y(), 2) + tx.z() * tx.z());
    EXPECT_NEAR(wrap(std::arg(exact_field(tx, lambda, p)) + k0 * dist), 0.0, 1e-9);
}

TEST(ExactField, SymmetricInY)
{
    const tx_geometry tx{1.5, 0.3, 0.0};
    for (double y : {0.01, 0.07})
        EXPECT_NEAR(std::abs(exact_field(tx, lambda, {0.02, y})), std::abs(exact_field(tx, lambda, {0.02, -y})),
                    1e-15);
}

TEST(ExactField, SingularAtSource)
{
    const tx_geometry tx{1.0, 0.0, 0.0};
    auto t = tx;
    t.dist = 0.0;
    EXPECT_THROW(exact_field(t, lambda, {0, 0}), numerical_error);
    EXPECT_GT(std::abs(exact_field(tx, lambda, {0.1, 0.1})), 0.0);
}

TEST(ExactField, AmplitudeTaperAtBjornsonDistance)
{
    // At d_B the corner of the aperture sees a visible amplitude taper (about 6 %), matching the
    // closed form; the taper falls below 1 % by 3 d_B.
    const auto arr = square();
    const double hx = 0.5 * arr.aperture_width(), hy = 0.5 * arr.aperture_height();
    for (double mult : {1.0, 2.0, 3.0, 4.0})
    {
        const double z = mult * arr.bjornson_distance();
        const auto tx = tx_geometry::broadside(z);
        const double ratio = std::abs(exact_field(tx, lambda, {hx, hy})) / std::abs(exact_field(tx, lambda, {0, 0}));
        EXPECT_NEAR(ratio, corner_amplitude_ratio(z, hx, hy), 1e-12);
        if (mult >= 3.0)
        {
            EXPECT_GT(ratio, 0.99);
        }
    }
}

TEST(FresnelField, CentreMatchesExact)
{
    const double z = 2.3;
    const auto e = exact_field(tx_geometry::broadside(z), lambda, {0, 0});
    const auto f = fresnel_field_broadside(z, lambda, {0, 0});
    EXPECT_NEAR(std::abs(e - f), 0.0, 1e-12 * std::abs(e));
}

TEST(FresnelField, ConstantAmplitude)
{
    const double z = 1.1;
    for (double x : {0.0, 0.1, 0.5})
        EXPECT_DOUBLE_EQ(std::abs(fresnel_field_broadside(z, lambda, {x, -x})), 1.0 / (std::sqrt(4 * std::numbers::pi) * z));
}

TEST(FresnelField, HalfWavePoint)
{
    const double z = 4.0;
    const double rho = std::sqrt(lambda * z);
    const auto ratio = fresnel_field_broadside(z, lambda, {rho * 0.6, rho * 0.8}) / fresnel_field_broadside(z, lambda, {0, 0});
    EXPECT_NEAR(std::abs(wrap(std::arg(ratio))), std::numbers::pi, 1e-9);
}

TEST(FresnelField, DistanceErrorWithinThresholdInsideCone)
{
    // Relative path-length error of the second-order expansion stays below 3.5e-3 for (x^2+y^2)/z^2 <= 0.1745.
    const double z = 1.0;
    for (double t = 0.0; t <= 0.1745; t += 0.005)
    {
        const double rho = z * std::sqrt(t);
        const double exact = std::sqrt(z * z + rho * rho);
        const double approx = z + rho * rho / (2 * z);
        EXPECT_LE(std::abs(exact - approx), 3.5e-3 * exact) << "t=" << t;
    }
}

TEST(FresnelField, ConsistentWithExactAwayFromAperture)
{
    // Pointwise agreement to 5e-3 needs z >= 4 d_B on the square preset; at d_B the corner phase gap
    // is about 0.16 rad.
    const auto arr = square();
    for (double mult : {1.0, 4.0, 8.0})
    {
        const double z = mult * arr.bjornson_distance();
        double worst = 0.0, amp_lo = 2.0;
        for (double fx = -0.5; fx <= 0.5; fx += 0.125)
            for (double fy = -0.5; fy <= 0.5; fy += 0.125)
            {
                const point2 p{fx * arr.aperture_width(), fy * arr.aperture_height()};
                const auto e = exact_field(tx_geometry::broadside(z), lambda, p);
                const auto f = fresnel_field_broadside(z, lambda, p);
                worst = std::max(worst, std::abs(e - f) / std::abs(e));
                amp_lo = std::min(amp_lo, std::abs(e) / std::abs(f));
                const double r = p.x * p.x + p.y * p.y;
                const double gap = k0 * (std::sqrt(z * z + r) - z - r / (2 * z));
                EXPECT_NEAR(std::abs(wrap(std::arg(e / f))), std::abs(gap), 1e-9);
            }
        if (mult == 1.0)
        {
            EXPECT_GT(worst, 0.1);
            EXPECT_LT(worst, 0.2);
        }
        else
        {
            EXPECT_LT(worst, 5e-3);
            EXPECT_GE(amp_lo, 0.99);
        }
    }
}

TEST(FresnelNonBroadside, ReducesToBroadside)
{
    const double z = 2.0;
    for (double x : {0.0, 0.05, -0.2})
    {
        const auto a = fresnel_field_nonbroadside(tx_geometry::broadside(z), lambda, {x, 0.1});
        const auto b = fresnel_field_broadside(z, lambda, {x, 0.1});
        EXPECT_NEAR(std::abs(a - b), 0.0, 1e-15 * std::abs(b) + 1e-15);
    }
}

TEST(FresnelNonBroadside, CentrePhaseAndTiltSlope)
{
    const tx_geometry tx{3.0, 0.5, 0.2};
    const auto c = fresnel_field_nonbroadside(tx, lambda, {0, 0});
    EXPECT_NEAR(wrap(std::arg(c) + k0 * tx.dist), 0.0, 1e-9);

    // Path length d + (x^2 - 2 x x_t)/(2d) decreases along x with slope sin(phi) cos(theta); the phase
    // -k * path therefore rises with slope k sin(phi) cos(theta).
    const double h = 1e-6;
    const double slope =
        wrap(std::arg(fresnel_field_nonbroadside(tx, lambda, {h, 0}) / fresnel_field_nonbroadside(tx, lambda, {-h, 0}))) /
        (2 * h);
    EXPECT_NEAR(slope, k0 * std::sin(tx.azimuth) * std::cos(tx.elevation), 1e-4 * k0);
}

TEST(MatchedFilter, Basics)
{
    EXPECT_EQ(matched_filter_phase(1.0, lambda, {0, 0}), complex(1.0, 0.0));
    EXPECT_EQ(matched_filter_phase(std::numeric_limits<double>::infinity(), lambda, {0.3, 0.2}), complex(1.0, 0.0));
    EXPECT_NEAR(std::abs(matched_filter_phase(0.7, lambda, {0.3, -0.2})), 1.0, 1e-15);
    EXPECT_THROW(matched_filter_phase(0.0, lambda, {0, 0}), validation_error);
    EXPECT_THROW(matched_filter_phase(-2.0, lambda, {0, 0}), validation_error);
}

TEST(MatchedFilter, PerfectFocusCancelsQuadraticPhase)
{
    const double z = 1.7;
    const auto ref = fresnel_field_broadside(z, lambda, {0, 0});
    for (double x : {0.02, 0.1, -0.3})
    {
        const point2 p{x, 0.5 * x};
        const auto prod = fresnel_field_broadside(z, lambda, p) * matched_filter_phase(z, lambda, p);
        EXPECT_NEAR(std::abs(prod - ref), 0.0, 1e-9 * std::abs(ref));
        EXPECT_NEAR(std::abs(matched_filter(focus::broadside(z), lambda, p) - matched_filter_phase(z, lambda, p)), 0.0,
                    1e-12);
    }
}

TEST(MatchedFilter, SphericalSteeredConjugatesExactPhase)
{
    const tx_geometry tx{2.5, 0.4, 0.1};
    const auto fc = focus::toward(tx, tx.dist, focus_model::spherical);
    const auto ref = exact_field(tx, lambda, {0, 0});
    for (double x : {0.05, -0.2})
    {
        const point2 p{x, -0.3 * x};
        const auto prod = exact_field(tx, lambda, p) * matched_filter(fc, lambda, p);
        EXPECT_NEAR(wrap(std::arg(prod / ref)), 0.0, 1e-8);
    }
}

TEST(ElementChannel, Additivity)
{
    // One element covering the aperture equals the sum of the four quarter elements.
    const double diag = 0.2;
    const auto big = make_rect_array(1, 1.3, fixed_element_diagonal{diag}, lambda);
    const auto small = make_rect_array(2, 1.3, fixed_element_diagonal{diag / 2}, lambda);
    const tx_geometry tx{1.0, 0.2, 0.1};
    const auto whole = element_channel(big, 1, 1, tx) * std::sqrt(big.element_area());
    complex parts{};
    for (int n = 1; n <= 2; ++n)
        for (int m = 1; m <= 2; ++m)
            parts += element_channel(small, n, m, tx) * std::sqrt(small.element_area());
    EXPECT_NEAR(std::abs(whole - parts), 0.0, 1e-9 * std::abs(whole));
}

TEST(ElementChannel, PlaneWaveLimit)
{
    const auto arr = square(10);
    const auto tx = tx_geometry::broadside(1e5);
    const auto h = element_channel(arr, 3, 7, tx);
    const auto e = exact_field(tx, lambda, element_center(arr, 3, 7));
    EXPECT_NEAR(std::abs(h), std::sqrt(arr.element_area()) * std::abs(e), 1e-6 * std::abs(h));
}

TEST(ElementChannel, MatchesBruteForceMidpoint)
{
    const auto arr = square();
    const auto tx = tx_geometry::broadside(arr.bjornson_distance());
    const auto h = element_channel(arr, 50, 50, tx, quadrature_spec{32, 0});
    const auto c = element_center(arr, 50, 50);
    const int s = 400;
    complex sum{};
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j)
            sum += exact_field(tx, lambda,
                               {c.x + (i + 0.5 - 0.5 * s) * arr.elem_w / s, c.y + (j + 0.5 - 0.5 * s) * arr.elem_h / s});
    const auto brute = sum * (arr.element_area() / (s * s)) / std::sqrt(arr.element_area());
    EXPECT_NEAR(std::abs(h - brute), 0.0, 1e-6 * std::abs(brute));
}

TEST(ElementChannel, ConvergesUnderOrderDoubling)
{
    const auto arr = square();
    for (const tx_geometry tx : {tx_geometry::broadside(arr.bjornson_distance()), tx_geometry{3 * arr.bjornson_distance(), 0.6, 0.0}})
    {
        const auto h4 = element_channel(arr, 1, 1, tx, quadrature_spec{4, 0});
        const auto h8 = element_channel(arr, 1, 1, tx, quadrature_spec{8, 0});
        const auto h16 = element_channel(arr, 1, 1, tx, quadrature_spec{16, 0});
        const double e1 = std::abs(h8 - h4), e2 = std::abs(h16 - h8);
        EXPECT_LT(e2, 1e-8 * std::abs(h16));
        EXPECT_LE(e2, e1);
        const auto def = element_channel(arr, 1, 1, tx);
        EXPECT_LT(std::abs(def - h16), 1e-8 * std::abs(h16));
    }
}

TEST(Distance, CentreElementAndCorner)
{
    const auto arr = make_rect_array(9, 1.0, fixed_element_diagonal{lambda / 4}, lambda);
    const auto tx = tx_geometry::broadside(5.0);
    EXPECT_DOUBLE_EQ(distance_exact(arr, 5, 5, tx), 5.0);
    EXPECT_DOUBLE_EQ(distance_taylor_direct(arr, 5, 5, tx), 5.0);
    EXPECT_DOUBLE_EQ(distance_taylor_indirect(arr, 5, 5, tx), 5.0);

    const tx_geometry off{5.0, 0.3, 0.0};
    const auto c = element_center(arr, 1, 1);
    const double expect = std::sqrt(std::pow(c.x - off.x(), 2) + std::pow(c.y - off.y(), 2) + off.z() * off.z());
    EXPECT_DOUBLE_EQ(distance_exact(arr, 1, 1, off), expect);
}

TEST(Distance, IndirectReducesToDirectAtBroadside)
{
    const auto arr = square(20);
    const auto tx = tx_geometry::broadside(2.0);
    for (int n : {1, 7, 20})
        EXPECT_NEAR(distance_taylor_indirect(arr, n, 3, tx), distance_taylor_direct(arr, n, 3, tx), 1e-14);
    EXPECT_DOUBLE_EQ(mean_abs_distance_error(arr, tx, taylor_variant::direct),
                     mean_abs_distance_error(arr, tx, taylor_variant::indirect));
}

TEST(Distance, SingleElement)
{
    const auto arr = make_rect_array(1, 1.0, fixed_element_diagonal{0.1}, lambda);
    const tx_geometry tx{1.0, 0.7, 0.0};
    EXPECT_DOUBLE_EQ(mean_abs_distance_error(arr, tx, taylor_variant::direct),
                     std::abs(distance_exact(arr, 1, 1, tx) - distance_taylor_direct(arr, 1, 1, tx)));
}

TEST(Distance, IndirectBeatsDirectOffBroadside)
{
    const auto arr = square();
    const double d = 2500 * arr.fraunhofer_distance();
    const double pi = std::numbers::pi;
    const tx_geometry at45{d, pi / 4, 0.0};
    EXPECT_GT(mean_abs_distance_error(arr, at45, taylor_variant::direct),
              500 * mean_abs_distance_error(arr, at45, taylor_variant::indirect));
    for (int i = 0; i <= 24; ++i)
    {
        const tx_geometry tx{d, i * (3 * pi / 8) / 24, 0.0};
        const double direct = mean_abs_distance_error(arr, tx, taylor_variant::direct);
        const double indirect = mean_abs_distance_error(arr, tx, taylor_variant::indirect);
        EXPECT_GE(direct, 0.0);
        EXPECT_LE(indirect, direct + 1e-12) << "phi index " << i;
    }
}
