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

#ifndef NFBD_ERROR_HPP
#define NFBD_ERROR_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nfbd
{
    class error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Invalid input: non-positive sizes, out-of-range indices, reactive near-field, bad config.
    class validation_error : public error
    {
    public:
        using error::error;
    };

    // A computation that cannot produce a finite result (singular field, failed bracket, ...).
    class numerical_error : public error
    {
    public:
        using error::error;
    };

    /// Failures collected over a sweep; each entry carries the sweep index.
    class sweep_error : public numerical_error
    {
    public:
        explicit sweep_error(std::vector<std::pair<std::size_t, std::string>> failures)
            : numerical_error(describe(failures)), failures_(std::move(failures))
        {
        }

        const std::vector<std::pair<std::size_t, std::string>> &failures() const { return failures_; }

    private:
        static std::string describe(const std::vector<std::pair<std::size_t, std::string>> &f)
        {
            std::string msg = std::to_string(f.size()) + " sweep point(s) failed";
            for (const auto &[index, what] : f)
                msg += "; index " + std::to_string(index) + ": " + what;
            return msg;
        }

        std::vector<std::pair<std::size_t, std::string>> failures_;
    };

    namespace detail
    {
        inline void require_positive(double value, const char *what)
        {
            if (!std::isfinite(value) || value <= 0.0)
                throw validation_error(std::string(what) + " must be positive and finite");
        }

        inline void require_finite(double value, const char *what)
        {
            if (!std::isfinite(value))
                throw validation_error(std::string(what) + " must be finite");
        }
    } // namespace detail
} // namespace nfbd

#endif
