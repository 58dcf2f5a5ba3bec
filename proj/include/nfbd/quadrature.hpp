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

#ifndef NFBD_QUADRATURE_HPP
#define NFBD_QUADRATURE_HPP

#include "error.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

namespace nfbd
{
    /// Gauss-Legendre nodes and weights on [-1, 1].
    struct gauss_legendre_rule
    {
        std::vector<double> nodes;
        std::vector<double> weights;

        std::size_t size() const { return nodes.size(); }
    };

    namespace detail
    {
        inline gauss_legendre_rule compute_gauss_legendre(int order)
        {
            gauss_legendre_rule rule;
            rule.nodes.resize(order);
            rule.weights.resize(order);
            const int half = (order + 1) / 2;
            for (int i = 0; i < half; ++i)
            {
                // Tricomi initial guess, then Newton on P_n.
                double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
                double dp = 0.0;
                for (int iter = 0; iter < 100; ++iter)
                {
                    double p0 = 1.0, p1 = x;
                    for (int k = 2; k <= order; ++k)
                    {
                        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                        p0 = p1;
                        p1 = p2;
                    }
                    if (order == 1)
                        p0 = 1.0;
                    dp = order * (x * p1 - p0) / (x * x - 1.0);
                    const double dx = p1 / dp;
                    x -= dx;
                    if (std::abs(dx) < 1e-16)
                        break;
                }
                // recompute derivative at the converged node
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= order; ++k)
                {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = order * (x * p1 - p0) / (x * x - 1.0);
                const double w = 2.0 / ((1.0 - x * x) * dp * dp);
                rule.nodes[i] = -x;
                rule.nodes[order - 1 - i] = x;
                rule.weights[i] = w;
                rule.weights[order - 1 - i] = w;
            }
            if (order % 2 == 1)
                rule.nodes[order / 2] = 0.0;
            return rule;
        }
    } // namespace detail

    /// Cached rule of the given order (>= 1). Thread-safe; the returned reference stays valid.
    inline const gauss_legendre_rule &gauss_legendre(int order)
    {
        if (order < 1 || order > 4096)
            throw validation_error("Gauss-Legendre order must be in [1, 4096]");
        static std::mutex mutex;
        static std::map<int, std::unique_ptr<gauss_legendre_rule>> cache;
        std::lock_guard<std::mutex> lock(mutex);
        auto &slot = cache[order];
        if (!slot)
            slot = std::make_unique<gauss_legendre_rule>(detail::compute_gauss_legendre(order));
        return *slot;
    }

    /// Points per axis per element and the number of order-doubling passes used for error estimates.
    struct quadrature_spec
    {
        int order = 8;
        int refinement = 1;
        double tolerance = 1e-8; // relative; triggers adaptive subdivision when exceeded
        int max_depth = 4;       // subdivision levels for adaptive element integration

        void validate() const
        {
            if (order < 2)
                throw validation_error("quadrature order must be >= 2");
            if (refinement < 0 || max_depth < 0)
                throw validation_error("quadrature refinement/max_depth must be >= 0");
            if (!(tolerance > 0.0))
                throw validation_error("quadrature tolerance must be positive");
        }
    };

    /// Composite Gauss-Legendre integral of f over [a, b] split into `panels` equal pieces.
    template <typename Value, typename Function>
    Value integrate_gl(Function &&f, double a, double b, int order, int panels = 1)
    {
        const auto &rule = gauss_legendre(order);
        const double h = (b - a) / panels;
        Value total{};
        for (int p = 0; p < panels; ++p)
        {
            const double mid = a + (p + 0.5) * h;
            Value part{};
            for (std::size_t i = 0; i < rule.size(); ++i)
                part += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
            total += 0.5 * h * part;
        }
        return total;
    }

    /// Tensor-product Gauss-Legendre integral of f(x, y) over [x0, x1] x [y0, y1].
    template <typename Value, typename Function>
    Value integrate_gl_2d(Function &&f, double x0, double x1, double y0, double y1, int order)
    {
        const auto &rule = gauss_legendre(order);
        const double hx = 0.5 * (x1 - x0), cx = 0.5 * (x1 + x0);
        const double hy = 0.5 * (y1 - y0), cy = 0.5 * (y1 + y0);
        Value total{};
        for (std::size_t i = 0; i < rule.size(); ++i)
        {
            const double x = cx + hx * rule.nodes[i];
            Value row{};
            for (std::size_t j = 0; j < rule.size(); ++j)
                row += rule.weights[j] * f(x, cy + hy * rule.nodes[j]);
            total += rule.weights[i] * row;
        }
        return hx * hy * total;
    }
} // namespace nfbd

#endif
