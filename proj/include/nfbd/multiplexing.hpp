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

#ifndef NFBD_MULTIPLEXING_HPP
#define NFBD_MULTIPLEXING_HPP

#include "beam_depth.hpp"
#include "error.hpp"
#include "field.hpp"
#include "geometry.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace nfbd
{
    /// Focal points whose 3 dB intervals do not overlap, sorted by increasing distance.
    struct placement_plan
    {
        std::vector<double> focal_points;
        std::vector<std::pair<double, double>> intervals; // (z_lo, z_hi)

        std::size_t size() const { return focal_points.size(); }
    };

    /// Greedy plan from the far end of [z_min, z_max] inwards. The first focus is the largest whose upper
    /// 3 dB edge stays within z_max; each next one is the largest whose upper edge does not pass the previous
    /// lower edge. Stops when the focus would fall below z_min or max_users is reached.
    inline placement_plan plan_focal_points(const rect_array &arr, double z_min, double z_max, int max_users,
                                            double a3db)
    {
        detail::require_positive(z_min, "z_min");
        detail::require_positive(z_max, "z_max");
        detail::require_positive(a3db, "a3db");
        if (max_users < 0)
            throw validation_error("max_users must be >= 0");
        const double slack = 1e-12;
        if (z_min < arr.bjornson_distance() * (1.0 - slack))
            throw validation_error("plan region must start at or beyond the Bjornson distance");
        if (z_max > finite_bd_limit_rect(arr, a3db) * (1.0 + slack))
            throw validation_error("plan region must end at or before the finite beam-depth limit");

        placement_plan plan;
        if (z_max <= z_min || max_users == 0)
            return plan;

        // In u = d_FA / z every 3 dB interval has the same half-width c.
        const double d_fa = arr.fraunhofer_array_distance();
        const double c = 4.0 * a3db * (1.0 + arr.eta * arr.eta);
        const double u_stop = d_fa / z_min * (1.0 + slack);
        for (double u = d_fa / z_max + c; u <= u_stop && static_cast<int>(plan.size()) < max_users; u += 2.0 * c)
        {
            const double f = d_fa / u;
            const auto bd = bd_rect(arr, f, a3db);
            plan.focal_points.push_back(f);
            plan.intervals.emplace_back(bd.z_lo, bd.z_hi);
        }
        std::reverse(plan.focal_points.begin(), plan.focal_points.end());
        std::reverse(plan.intervals.begin(), plan.intervals.end());
        return plan;
    }

    inline placement_plan plan_focal_points(const rect_array &arr, double z_min, double z_max, int max_users)
    {
        return plan_focal_points(arr, z_min, z_max, max_users, solve_a3db(arr.eta));
    }

    // ---- channels ----------------------------------------------------------------------------

    enum class channel_model
    {
        fresnel_midpoint, // Fresnel field at each element centre times sqrt(A)
        exact_midpoint,   // exact field at each element centre times sqrt(A)
        exact_quadrature  // element integral of the exact field
    };

    enum class channel_scaling
    {
        path_loss_normalized, // column k scaled by sqrt(4 pi) d_k / sqrt(A), so |h| is about 1
        physical              // element responses as integrated, E0 = 1
    };

    struct channel_options
    {
        channel_model model = channel_model::fresnel_midpoint;
        channel_scaling scaling = channel_scaling::path_loss_normalized;
        quadrature_spec quad;
        unsigned threads = 1;
    };

    /// N x K channel matrix; rows follow the element order (n, m) with m fastest.
    inline Eigen::MatrixXcd build_channel_matrix(const rect_array &arr, const std::vector<tx_geometry> &users,
                                                 const channel_options &opts = {})
    {
        if (users.empty())
            throw validation_error("at least one user is required");
        const auto side = arr.n_per_side;
        const double root_a = std::sqrt(arr.element_area());
        for (std::size_t k = 0; k < users.size(); ++k)
        {
            try
            {
                users[k].validate();
                detail::require_radiative(users[k].dist, arr.aperture_length());
            }
            catch (const validation_error &e)
            {
                throw validation_error("user " + std::to_string(k) + ": " + e.what());
            }
        }

        Eigen::MatrixXcd h(arr.element_count(), static_cast<Eigen::Index>(users.size()));
        parallel_for(users.size(), opts.threads,
                     [&](std::size_t k)
                     {
                         const auto &tx = users[k];
                         const double scale = opts.scaling == channel_scaling::path_loss_normalized
                                                  ? std::sqrt(4.0 * std::numbers::pi) * tx.dist / root_a
                                                  : 1.0;
                         for (int n = 1; n <= side; ++n)
                             for (int m = 1; m <= side; ++m)
                             {
                                 complex v;
                                 switch (opts.model)
                                 {
                                 case channel_model::fresnel_midpoint:
                                     v = root_a * fresnel_field_nonbroadside(tx, arr.wavelength, element_center(arr, n, m));
                                     break;
                                 case channel_model::exact_midpoint:
                                     v = root_a * exact_field(tx, arr.wavelength, element_center(arr, n, m));
                                     break;
                                 default:
                                     v = element_channel(arr, n, m, tx, opts.quad, field_model::exact);
                                     break;
                                 }
                                 h(static_cast<Eigen::Index>(n - 1) * side + (m - 1), static_cast<Eigen::Index>(k)) =
                                     scale * v;
                             }
                     });
        if (!h.allFinite())
            throw numerical_error("non-finite channel entries");
        return h;
    }

    /// Gram matrix H^H H of path-loss-normalized Fresnel midpoint channels for broadside users. The sum over
    /// the grid factorizes into an x sum and a y sum, so the cost is O(K^2 sqrt(N)).
    inline Eigen::MatrixXcd fresnel_gram(const rect_array &arr, const std::vector<double> &distances)
    {
        const auto count = static_cast<Eigen::Index>(distances.size());
        for (double d : distances)
        {
            detail::require_positive(d, "user distance");
            detail::require_radiative(d, arr.aperture_length());
        }
        const double k = wavenumber(arr.wavelength);
        const double mid = 0.5 * (arr.n_per_side + 1);
        Eigen::MatrixXcd g(count, count);
        for (Eigen::Index i = 0; i < count; ++i)
        {
            g(i, i) = static_cast<double>(arr.element_count());
            for (Eigen::Index j = i + 1; j < count; ++j)
            {
                const double di = distances[static_cast<std::size_t>(i)];
                const double dj = distances[static_cast<std::size_t>(j)];
                const double curv = 0.5 * k * (1.0 / di - 1.0 / dj);
                complex sx{}, sy{};
                for (int n = 1; n <= arr.n_per_side; ++n)
                {
                    const double x = (n - mid) * arr.elem_w;
                    const double y = (n - mid) * arr.elem_h;
                    sx += std::polar(1.0, curv * x * x);
                    sy += std::polar(1.0, curv * y * y);
                }
                g(i, j) = std::polar(1.0, k * (di - dj)) * sx * sy;
                g(j, i) = std::conj(g(i, j));
            }
        }
        return g;
    }

    // ---- precoding and rates -----------------------------------------------------------------

    enum class precoder_normalization
    {
        transmit_power,   // alpha = 1 / ||H (H^H H + I)^-1||_F, unit total transmit power
        channel_frobenius // alpha = 1 / ||H||_F
    };

    struct precoder
    {
        Eigen::MatrixXcd w;
        double alpha = 0.0;
    };

    /// W = alpha H (H^H H + I)^-1 through a K x K Cholesky solve.
    inline precoder mmse_precoder(const Eigen::MatrixXcd &h,
                                  precoder_normalization norm = precoder_normalization::transmit_power)
    {
        if (h.cols() < 1 || h.rows() < h.cols())
            throw validation_error("channel matrix must be N x K with 1 <= K <= N");
        if (!h.allFinite())
            throw validation_error("channel matrix has non-finite entries");
        const Eigen::Index k = h.cols();
        const Eigen::MatrixXcd m = h.adjoint() * h + Eigen::MatrixXcd::Identity(k, k);
        const Eigen::LLT<Eigen::MatrixXcd> llt(m);
        if (llt.info() != Eigen::Success)
            throw numerical_error("H^H H + I is not positive definite");
        precoder p;
        p.w = llt.solve(h.adjoint()).adjoint(); // H M^-1 with M Hermitian
        const double scale = norm == precoder_normalization::transmit_power ? p.w.norm() : h.norm();
        if (!(scale > 0.0))
            throw numerical_error("zero precoder normalization");
        p.alpha = 1.0 / scale;
        p.w *= p.alpha;
        return p;
    }

    /// sum_k log2(1 + p_k |h_k^H w_k|^2 / (sum_{j != k} p_j |h_k^H w_j|^2 + 1)) from the K x K matrix H^H W.
    inline double sum_rate_from_products(const Eigen::MatrixXcd &hw, const std::vector<double> &powers)
    {
        if (hw.rows() != hw.cols() || static_cast<std::size_t>(hw.cols()) != powers.size())
            throw validation_error("dimension mismatch between channels, precoders and powers");
        for (double p : powers)
            if (!std::isfinite(p) || p < 0.0)
                throw validation_error("powers must be finite and >= 0");
        double rate = 0.0;
        for (Eigen::Index k = 0; k < hw.rows(); ++k)
        {
            double interference = 0.0;
            for (Eigen::Index j = 0; j < hw.cols(); ++j)
                if (j != k)
                    interference += powers[static_cast<std::size_t>(j)] * std::norm(hw(k, j));
            rate += std::log2(1.0 + powers[static_cast<std::size_t>(k)] * std::norm(hw(k, k)) / (interference + 1.0));
        }
        return rate;
    }

    inline double sum_rate(const Eigen::MatrixXcd &h, const precoder &w, const std::vector<double> &powers)
    {
        if (h.rows() != w.w.rows() || h.cols() != w.w.cols())
            throw validation_error("channel and precoder shapes differ");
        return sum_rate_from_products(h.adjoint() * w.w, powers);
    }

    /// Same sum rate as mmse_precoder + sum_rate, computed from G = H^H H alone:
    /// H^H W = alpha G (G + I)^-1 and ||H (G + I)^-1||_F^2 = tr((G + I)^-1 G (G + I)^-1).
    inline double sum_rate_from_gram(const Eigen::MatrixXcd &gram, const std::vector<double> &powers,
                                     precoder_normalization norm = precoder_normalization::transmit_power)
    {
        const Eigen::Index k = gram.rows();
        if (gram.cols() != k || k < 1)
            throw validation_error("Gram matrix must be square and non-empty");
        const Eigen::MatrixXcd m = gram + Eigen::MatrixXcd::Identity(k, k);
        const Eigen::LLT<Eigen::MatrixXcd> llt(m);
        if (llt.info() != Eigen::Success)
            throw numerical_error("G + I is not positive definite");
        const Eigen::MatrixXcd inv = llt.solve(Eigen::MatrixXcd::Identity(k, k));
        const Eigen::MatrixXcd hw = gram * inv;
        const double norm_sq = norm == precoder_normalization::transmit_power ? (inv * gram * inv).trace().real()
                                                                               : gram.trace().real();
        if (!(norm_sq > 0.0))
            throw numerical_error("zero precoder normalization");
        return sum_rate_from_products(hw / std::sqrt(norm_sq), powers);
    }

    inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

    /// Sum rate for broadside users at the given distances with equal power snr (linear) per user.
    inline double sum_rate_at(const rect_array &arr, const std::vector<double> &distances, double snr_db,
                              const channel_options &opts = {},
                              precoder_normalization norm = precoder_normalization::transmit_power)
    {
        if (distances.empty())
            throw validation_error("at least one user is required");
        const std::vector<double> powers(distances.size(), db_to_linear(snr_db));
        if (opts.model == channel_model::fresnel_midpoint && opts.scaling == channel_scaling::path_loss_normalized)
            return sum_rate_from_gram(fresnel_gram(arr, distances), powers, norm);
        std::vector<tx_geometry> users;
        for (double d : distances)
            users.push_back(tx_geometry::broadside(d));
        const auto h = build_channel_matrix(arr, users, opts);
        return sum_rate(h, mmse_precoder(h, norm), powers);
    }

    // ---- Monte Carlo placement study ---------------------------------------------------------

    enum class placement
    {
        uniform_inverse_distance, // 1/z uniform: constant 3 dB interval width
        uniform_distance          // z uniform
    };

    struct monte_carlo_config
    {
        int k_users = 1;
        double z_min = 0.0;
        double z_max = 0.0;
        long n_trials = 1;
        double snr_db = 25.0;
        std::uint64_t seed = 1;
        placement where = placement::uniform_inverse_distance;
        channel_options channel;
        precoder_normalization norm = precoder_normalization::transmit_power;
        unsigned threads = 1;
    };

    struct monte_carlo_result
    {
        double mean = 0.0;
        double std_error = 0.0;
        double ci95_half_width = 0.0;
        double max = 0.0;
        long n_trials = 0;
    };

    /// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
    inline double unit_uniform(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

    /// Draws every placement up front from one seeded stream, evaluates trials in parallel and reduces in
    /// trial order, so results do not depend on the thread count.
    inline monte_carlo_result monte_carlo_sum_rate(const rect_array &arr, const monte_carlo_config &cfg)
    {
        if (cfg.k_users < 1)
            throw validation_error("k_users must be >= 1");
        if (cfg.n_trials < 1)
            throw validation_error("n_trials must be >= 1");
        detail::require_positive(cfg.z_min, "z_min");
        detail::require_positive(cfg.z_max, "z_max");
        if (!(cfg.z_max > cfg.z_min))
            throw validation_error("z_max must exceed z_min");
        detail::require_finite(cfg.snr_db, "snr_db");

        std::mt19937_64 rng(cfg.seed);
        const std::size_t k = static_cast<std::size_t>(cfg.k_users);
        std::vector<double> positions(static_cast<std::size_t>(cfg.n_trials) * k);
        for (auto &z : positions)
        {
            const double u = unit_uniform(rng);
            if (cfg.where == placement::uniform_distance)
                z = cfg.z_min + u * (cfg.z_max - cfg.z_min);
            else
                z = 1.0 / (1.0 / cfg.z_max + u * (1.0 / cfg.z_min - 1.0 / cfg.z_max));
        }

        std::vector<double> rates(static_cast<std::size_t>(cfg.n_trials));
        parallel_for(rates.size(), cfg.threads,
                     [&](std::size_t t)
                     {
                         const std::vector<double> d(positions.begin() + static_cast<std::ptrdiff_t>(t * k),
                                                     positions.begin() + static_cast<std::ptrdiff_t>((t + 1) * k));
                         rates[t] = sum_rate_at(arr, d, cfg.snr_db, cfg.channel, cfg.norm);
                     });

        monte_carlo_result r;
        r.n_trials = cfg.n_trials;
        double sum = 0.0;
        r.max = -std::numeric_limits<double>::infinity();
        for (double x : rates)
        {
            sum += x;
            r.max = std::max(r.max, x);
        }
        r.mean = sum / static_cast<double>(rates.size());
        if (rates.size() > 1)
        {
            double ss = 0.0;
            for (double x : rates)
                ss += (x - r.mean) * (x - r.mean);
            r.std_error = std::sqrt(ss / static_cast<double>(rates.size() - 1) / static_cast<double>(rates.size()));
        }
        r.ci95_half_width = 1.96 * r.std_error;
        return r;
    }

    /// K distances equally spaced over [z_min, z_max] (a single user sits at the midpoint).
    inline std::vector<double> uniform_placement(double z_min, double z_max, int k)
    {
        if (k < 1)
            throw validation_error("k must be >= 1");
        if (k == 1)
            return {0.5 * (z_min + z_max)};
        std::vector<double> out(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i)
            out[static_cast<std::size_t>(i)] = z_min + (z_max - z_min) * i / (k - 1);
        return out;
    }
} // namespace nfbd

#endif
