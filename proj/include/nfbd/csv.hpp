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

#ifndef NFBD_CSV_HPP
#define NFBD_CSV_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace nfbd::csv
{
    /// Shortest round-trip representation, independent of the global locale.
    inline std::string format(double v)
    {
        if (std::isnan(v))
            return "nan";
        if (std::isinf(v))
            return v > 0 ? "inf" : "-inf";
        char buf[64];
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    }

    inline std::string format(long long v) { return std::to_string(v); }
    inline std::string format(int v) { return std::to_string(v); }
    inline std::string format(long v) { return std::to_string(v); }
    inline std::string format(std::uint64_t v) { return std::to_string(v); }
    inline std::string format(std::string_view v) { return std::string(v); }
    inline std::string format(const char *v) { return std::string(v); }
    inline std::string format(bool v) { return v ? "1" : "0"; }

    /// Rows are buffered so a failed computation never leaves a partial file behind.
    class table
    {
    public:
        explicit table(std::string header) : header_(std::move(header)) {}

        template <typename... Fields>
        void row(const Fields &...fields)
        {
            std::string line;
            bool first = true;
            ((line += (first ? "" : ","), line += format(fields), first = false), ...);
            rows_.push_back(std::move(line));
        }

        const std::string &header() const { return header_; }
        const std::vector<std::string> &rows() const { return rows_; }

        void write(std::ostream &out, std::string_view comment) const
        {
            out << comment << '\n' << header_ << '\n';
            for (const auto &r : rows_)
                out << r << '\n';
        }

    private:
        std::string header_;
        std::vector<std::string> rows_;
    };
} // namespace nfbd::csv

#endif
