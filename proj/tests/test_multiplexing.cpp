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

#include "nfbd/multiplexing.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace nfbd;

namespace
{
    const double lambda = speed_of_light / 2.99792458e9;

    // Two-hundred-element-per-side array with half-wavelength elements.
    rect_array mux_array() { return make_rect_array(200, 1.0, fixed_element_diagonal{lambda / 2}, lambda); }

    Eigen::MatrixXcd random_channels(int n, int k, unsigned seed)
    {
        std::srand(seed);
        return Eigen::MatrixXcd::Random(n, k);
    }
} // namespace

TEST(Plan, ReciprocalFocalPointsFallInDistinctIntervals)
{
    const auto arr = mux_array();
    const double d_fa = arr.fraunhofer_array_distance();
    const auto plan = plan_focal_points(arr, arr.bjornson_distance(), finite_bd_limit_rect(arr), 10);
    ASSERT_GE(plan.focal_points.size(), 5u);
    std::vector<int> owner;
    for (double denom : {20.0, 40.0, 60.0, 80.0, 100.0})
    {
        const double f = d_fa / denom;
        int hit = -1;
        for (std::size_t i = 0; i < plan.intervals.size(); ++i)
            if (f >= plan.intervals[i].first && f <= plan.intervals[i].second)
                hit = static_cast<int>(i);
        ASSERT_GE(hit, 0) << "F = d_FA/" << denom;
        for (int o : owner)
            EXPECT_NE(o, hit);
        owner.push_back(hit);
    }
}

TEST(Plan, IntervalsDisjointAndContainFocus)
{
    for (double eta : {0.2, 1.0, 5.0})
    {
        const auto arr = make_rect_array(200, eta, fixed_aperture_length{100 * lambda}, lambda);
        const auto plan = plan_focal_points(arr, arr.bjornson_distance(), finite_bd_limit_rect(arr), 50);
        ASSERT_FALSE(plan.focal_points.empty());
        for (std::size_t i = 0; i < plan.intervals.size(); ++i)
        {
            EXPECT_GE(plan.focal_points[i], plan.intervals[i].first);
            EXPECT_LE(plan.focal_points[i], plan.intervals[i].second);
            EXPECT_GE(plan.focal_points[i], arr.bjornson_distance() * (1 - 1e-12));
            if (i + 1 < plan.intervals.size())
            {
                EXPECT_LE(plan.intervals[i].second, plan.intervals[i + 1].first * (1 + 1e-12));
            }
        }
        EXPECT_LE(plan.intervals.back().second, finite_bd_limit_rect(arr) * (1 + 1e-9));
    }
}

TEST(Plan, DegenerateRegionsAndLimits)
{
    const auto arr = mux_array();
    const double lo = arr.bjornson_distance(), hi = finite_bd_limit_rect(arr);
    EXPECT_TRUE(plan_focal_points(arr, lo, lo, 5).focal_points.empty());
    EXPECT_TRUE(plan_focal_points(arr, lo, hi, 0).focal_points.empty());

    const auto one = plan_focal_points(arr, lo, hi, 1);
    ASSERT_EQ(one.focal_points.size(), 1u);
    const auto all = plan_focal_points(arr, lo, hi, 100);
    EXPECT_DOUBLE_EQ(one.focal_points[0], all.focal_points.back());
    EXPECT_NEAR(one.intervals[0].second, hi, 1e-9 * hi);

    EXPECT_THROW(plan_focal_points(arr, 0.5 * lo, hi, 3), validation_error);
    EXPECT_THROW(plan_focal_points(arr, lo, 2 * hi, 3), validation_error);
}

TEST(Channel, ColumnsFollowRowMajorElementOrder)
{
    const auto arr = make_rect_array(8, 1.5, fixed_element_diagonal{lambda / 2}, lambda);
    const tx_geometry user{20 * lambda, 0.2, 0.1};
    channel_options opts;
    opts.scaling = channel_scaling::physical;
    const auto h = build_channel_matrix(arr, {user}, opts);
    ASSERT_EQ(h.rows(), 64);
    const double root_a = std::sqrt(arr.element_area());
    for (int n : {1, 4, 8})
        for (int m : {1, 5})
        {
            const auto expect = root_a * fresnel_field_nonbroadside(user, lambda, element_center(arr, n, m));
            EXPECT_NEAR(std::abs(h((n - 1) * 8 + (m - 1), 0) - expect), 0.0, 1e-12 * std::abs(expect));
        }
}

TEST(Channel, ModelsAgreeFarFromAperture)
{
    const auto arr = make_rect_array(10, 1.0, fixed_element_diagonal{lambda / 2}, lambda);
    const std::vector<tx_geometry> users{tx_geometry::broadside(200 * lambda), tx_geometry{300 * lambda, 0.1, 0.0}};
    channel_options opts;
    const auto fresnel = build_channel_matrix(arr, users, opts);
    opts.model = channel_model::exact_midpoint;
    const auto exact = build_channel_matrix(arr, users, opts);
    opts.model = channel_model::exact_quadrature;
    const auto quad = build_channel_matrix(arr, users, opts);
    EXPECT_LT((fresnel - exact).norm() / exact.norm(), 0.05);
    EXPECT_LT((quad - exact).norm() / exact.norm(), 0.05);
    for (int k = 0; k < 2; ++k)
        EXPECT_GT(exact.col(k).norm(), 0.0);
}

TEST(Channel, IdenticalUsersGiveIdenticalColumns)
{
    const auto arr = make_rect_array(12, 1.0, fixed_element_diagonal{lambda / 2}, lambda);
    const auto u = tx_geometry::broadside(50 * lambda);
    const auto h = build_channel_matrix(arr, {u, u});
    EXPECT_EQ((h.col(0) - h.col(1)).norm(), 0.0);
}

TEST(Channel, RejectsReactiveUsers)
{
    const auto arr = make_rect_array(12, 1.0, fixed_element_diagonal{lambda / 2}, lambda);
    EXPECT_THROW(build_channel_matrix(arr, {tx_geometry::broadside(arr.aperture_length())}), validation_error);
}

TEST(Channel, PlannedUsersGiveFullRankGram)
{
    const auto arr = mux_array();
    const auto plan = plan_focal_points(arr, arr.bjornson_distance(), finite_bd_limit_rect(arr), 5);
    std::vector<tx_geometry> users;
    for (double f : plan.focal_points)
        users.push_back(tx_geometry::broadside(f));
    const auto h = build_channel_matrix(arr, users);
    const Eigen::MatrixXcd g = h.adjoint() * h;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
    const auto ev = es.eigenvalues();
    EXPECT_GT(ev.minCoeff(), 0.0);
    EXPECT_LT(ev.maxCoeff() / ev.minCoeff(), 1e6);
}

TEST(Gram, MatchesExplicitProduct)
{
    const auto arr = make_rect_array(40, 1.0, fixed_element_diagonal{lambda / 2}, lambda);
    const std::vector<double> d{30 * lambda, 45 * lambda, 90 * lambda};
    std::vector<tx_geometry> users;
    for (double x : d)
        users.push_back(tx_geometry::broadside(x));
    const auto h = build_channel_matrix(arr, users);
    const Eigen::MatrixXcd g = h.adjoint() * h;
    EXPECT_LT((fresnel_gram(arr, d) - g).norm(), 1e-9 * g.norm());
}

TEST(Precoder, SingleUserClosedForm)
{
    const auto h = random_channels(16, 1, 3);
    const auto p = mmse_precoder(h, precoder_normalization::channel_frobenius);
    const double n2 = h.squaredNorm();
    EXPECT_NEAR(p.alpha, 1 / std::sqrt(n2), 1e-14);
    EXPECT_LT((p.w - p.alpha * h / (n2 + 1)).norm(), 1e-12);

    const auto q = mmse_precoder(h);
    EXPECT_NEAR(q.w.norm(), 1.0, 1e-12);
    EXPECT_LT((q.w - h / h.norm()).norm(), 1e-12);
}

TEST(Precoder, OrthogonalColumnsReduceToMatchedFilter)
{
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(6, 3);
    const double g = 2.5;
    for (int k = 0; k < 3; ++k)
        h(2 * k, k) = complex(0.6 * g, 0.8 * g);
    const auto p = mmse_precoder(h, precoder_normalization::channel_frobenius);
    for (int k = 0; k < 3; ++k)
        EXPECT_LT((p.w.col(k) - p.alpha * h.col(k) / (g * g + 1)).norm(), 1e-14);
}

TEST(Precoder, Validation)
{
    EXPECT_THROW(mmse_precoder(Eigen::MatrixXcd::Zero(2, 3)), validation_error);
    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Ones(3, 1);
    bad(1, 0) = complex(std::nan(""), 0);
    EXPECT_THROW(mmse_precoder(bad), validation_error);
}

TEST(Precoder, ChannelScalingFollowsFormula)
{
    const auto h = random_channels(20, 3, 9);
    const double c = 3.0;
    const auto p1 = mmse_precoder(h, precoder_normalization::channel_frobenius);
    const auto p2 = mmse_precoder(c * h, precoder_normalization::channel_frobenius);
    EXPECT_NEAR(p2.alpha, p1.alpha / c, 1e-14);
    // W(cH) = (alpha/c) c H (c^2 H^H H + I)^-1
    const Eigen::MatrixXcd m = c * c * h.adjoint() * h + Eigen::MatrixXcd::Identity(3, 3);
    EXPECT_LT((p2.w - p1.alpha * h * m.inverse()).norm(), 1e-12);
}

TEST(SumRate, SingleUser)
{
    const auto h = random_channels(10, 1, 5);
    const auto p = mmse_precoder(h);
    EXPECT_NEAR(sum_rate(h, p, {1e-12}), 0.0, 1e-10);
    const double pw = 7.0;
    EXPECT_NEAR(sum_rate(h, p, {pw}), std::log2(1 + pw * std::norm((h.adjoint() * p.w)(0, 0))), 1e-12);
}

TEST(SumRate, SinrInvariantUnderJointPowerAndNoiseScaling)
{
    // Scaling every power by c^2 with the noise scaled alike leaves each SINR unchanged.
    const auto h = random_channels(12, 3, 21);
    const auto p = mmse_precoder(h, precoder_normalization::channel_frobenius);
    const Eigen::MatrixXcd hw = h.adjoint() * p.w;
    const std::vector<double> pw{1.0, 2.0, 0.5};
    const double c2 = 9.0;
    for (int k = 0; k < 3; ++k)
    {
        double i1 = 0, i2 = 0;
        for (int j = 0; j < 3; ++j)
            if (j != k)
            {
                i1 += pw[j] * std::norm(hw(k, j));
                i2 += c2 * pw[j] * std::norm(hw(k, j));
            }
        const double s1 = pw[k] * std::norm(hw(k, k)) / (i1 + 1.0);
        const double s2 = c2 * pw[k] * std::norm(hw(k, k)) / (i2 + c2);
        EXPECT_NEAR(s1, s2, 1e-12 * s1);
    }
}

TEST(SumRate, NonNegativeAndValidated)
{
    const auto h = random_channels(10, 2, 8);
    const auto p = mmse_precoder(h);
    EXPECT_GE(sum_rate(h, p, {0.0, 0.0}), 0.0);
    EXPECT_THROW(sum_rate(h, p, {1.0}), validation_error);
    EXPECT_THROW(sum_rate(h, p, {1.0, -1.0}), validation_error);
}

TEST(SumRate, GramPathMatchesExplicitPath)
{
    const auto arr = make_rect_array(60, 1.0, fixed_element_diagonal{lambda / 2}, lambda);
    const std::vector<double> d{50 * lambda, 80 * lambda, 140 * lambda, 300 * lambda};
    std::vector<tx_geometry> users;
    for (double x : d)
        users.push_back(tx_geometry::broadside(x));
    const auto h = build_channel_matrix(arr, users);
    const std::vector<double> pw(4, db_to_linear(20));
    for (auto norm : {precoder_normalization::transmit_power, precoder_normalization::channel_frobenius})
        EXPECT_NEAR(sum_rate_from_gram(fresnel_gram(arr, d), pw, norm), sum_rate(h, mmse_precoder(h, norm), pw), 1e-9);
    channel_options explicit_path;
    explicit_path.model = channel_model::exact_midpoint;
    EXPECT_NEAR(sum_rate_at(arr, d, 20), sum_rate(h, mmse_precoder(h), pw), 1e-9);
    EXPECT_GT(sum_rate_at(arr, d, 20, explicit_path), 0.0);
}

TEST(SumRate, PlannedFiveUsersOnMultiplexingGeometry)
{
    const auto arr = mux_array();
    const auto plan = plan_focal_points(arr, arr.bjornson_distance(), finite_bd_limit_rect(arr), 5);
    ASSERT_EQ(plan.focal_points.size(), 5u);
    const double rate = sum_rate_at(arr, plan.focal_points, 25);
    EXPECT_NEAR(rate, 105.2, 0.1 * 105.2);

    // Per-user SINRs within 3 dB of each other.
    const auto g = fresnel_gram(arr, plan.focal_points);
    const Eigen::MatrixXcd m = g + Eigen::MatrixXcd::Identity(5, 5);
    const Eigen::MatrixXcd inv = m.inverse();
    const Eigen::MatrixXcd hw = g * inv / std::sqrt((inv * g * inv).trace().real());
    const double p = db_to_linear(25);
    double lo = 1e300, hi = 0;
    for (int k = 0; k < 5; ++k)
    {
        double interference = 0;
        for (int j = 0; j < 5; ++j)
            if (j != k)
                interference += p * std::norm(hw(k, j));
        const double sinr = p * std::norm(hw(k, k)) / (interference + 1);
        lo = std::min(lo, sinr);
        hi = std::max(hi, sinr);
    }
    EXPECT_LT(10 * std::log10(hi / lo), 3.0);
}

TEST(SumRate, PlannedBeatsUniformAtHighSnr)
{
    const auto arr = mux_array();
    const double lo = arr.bjornson_distance(), hi = finite_bd_limit_rect(arr);
    const auto plan = plan_focal_points(arr, lo, hi, 5);
    for (double snr : {20.0, 25.0, 30.0})
        EXPECT_GE(sum_rate_at(arr, plan.focal_points, snr), sum_rate_at(arr, uniform_placement(lo, hi, 5), snr));
}

TEST(SumRate, ThinAndWideArraysSupportAtLeastSquareRates)
{
    auto planned = [](double eta)
    {
        const auto arr = make_rect_array(200, eta, fixed_aperture_length{100 * lambda}, lambda);
        const auto plan = plan_focal_points(arr, 400 * arr.fraunhofer_distance(), 4000 * arr.fraunhofer_distance(), 50);
        return std::pair{plan.focal_points.size(), sum_rate_at(arr, plan.focal_points, 25)};
    };
    const auto square = planned(1.0);
    for (double eta : {0.1, 10.0})
    {
        const auto other = planned(eta);
        EXPECT_GE(other.first, square.first) << eta;
        EXPECT_GE(other.second, square.second) << eta;
    }
}

TEST(MonteCarlo, DeterministicAndThreadIndependent)
{
    const auto arr = mux_array();
    monte_carlo_config cfg;
    cfg.k_users = 3;
    cfg.z_min = arr.bjornson_distance();
    cfg.z_max = finite_bd_limit_rect(arr);
    cfg.n_trials = 1;
    cfg.seed = 42;
    const auto a = monte_carlo_sum_rate(arr, cfg);
    const auto b = monte_carlo_sum_rate(arr, cfg);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.std_error, 0.0);
    EXPECT_EQ(a.max, a.mean);

    cfg.n_trials = 64;
    const auto one = monte_carlo_sum_rate(arr, cfg);
    cfg.threads = 4;
    const auto four = monte_carlo_sum_rate(arr, cfg);
    EXPECT_EQ(one.mean, four.mean);
    EXPECT_EQ(one.std_error, four.std_error);
    EXPECT_NEAR(one.ci95_half_width, 1.96 * one.std_error, 1e-15);
    cfg.seed = 43;
    EXPECT_NE(monte_carlo_sum_rate(arr, cfg).mean, one.mean);
}

TEST(MonteCarlo, RandomDrawsNeverBeatPlanByMuch)
{
    const auto arr = mux_array();
    const double lo = arr.bjornson_distance(), hi = finite_bd_limit_rect(arr);
    const double planned = sum_rate_at(arr, plan_focal_points(arr, lo, hi, 5).focal_points, 25);
    monte_carlo_config cfg;
    cfg.k_users = 5;
    cfg.z_min = lo;
    cfg.z_max = hi;
    cfg.n_trials = 10000;
    cfg.seed = 7;
    cfg.threads = 0;
    for (auto where : {placement::uniform_inverse_distance, placement::uniform_distance})
    {
        cfg.where = where;
        const auto r = monte_carlo_sum_rate(arr, cfg);
        EXPECT_LE(r.max, planned * 1.01);
        EXPECT_LT(r.mean, planned);
    }
}

TEST(MonteCarlo, Validation)
{
    const auto arr = mux_array();
    monte_carlo_config cfg;
    cfg.z_min = 2.0;
    cfg.z_max = 1.0;
    EXPECT_THROW(monte_carlo_sum_rate(arr, cfg), validation_error);
    cfg.z_max = 3.0;
    cfg.n_trials = 0;
    EXPECT_THROW(monte_carlo_sum_rate(arr, cfg), validation_error);
}

TEST(UniformPlacement, Spacing)
{
    EXPECT_EQ(uniform_placement(1.0, 3.0, 1), std::vector<double>{2.0});
    const auto p = uniform_placement(1.0, 3.0, 3);
    EXPECT_EQ(p, (std::vector<double>{1.0, 2.0, 3.0}));
    EXPECT_THROW(uniform_placement(1.0, 3.0, 0), validation_error);
}

TEST(Rng, UnitUniformRange)
{
    std::mt19937_64 rng(1);
    for (int i = 0; i < 1000; ++i)
    {
        const double u = unit_uniform(rng);
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
}
