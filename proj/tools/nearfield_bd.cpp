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

// nearfield-bd: run near-field gain / beam-depth / multiplexing experiments and write CSV.

#include "nfbd/experiments.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

namespace
{
    namespace ex = nfbd::experiments;

    enum exit_code
    {
        ok = 0,
        validation_failure = 2,
        numerical_failure = 3
    };

    unsigned threads_from_env()
    {
        const char *env = std::getenv("NEARFIELD_BD_THREADS");
        if (!env || !*env)
            return 0;
        try
        {
            std::size_t used = 0;
            const long v = std::stol(env, &used);
            if (used != std::string(env).size() || v < 0)
                throw std::invalid_argument(env);
            return static_cast<unsigned>(v);
        }
        catch (const std::exception &)
        {
            throw nfbd::validation_error("NEARFIELD_BD_THREADS must be a non-negative integer");
        }
    }

    ex::json read_config(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw nfbd::validation_error("cannot read config '" + path + "'");
        try
        {
            return ex::json::parse(in);
        }
        catch (const ex::json::exception &e)
        {
            throw nfbd::validation_error("config '" + path + "' is not valid JSON: " + e.what());
        }
    }

    void print_presets()
    {
        std::size_t width = 6;
        for (const auto &p : ex::presets())
            width = std::max(width, p.name.size());
        std::cout << std::left << std::setw(static_cast<int>(width) + 2) << "preset" << std::setw(20) << "experiment"
                  << "description\n";
        for (const auto &p : ex::presets())
            std::cout << std::setw(static_cast<int>(width) + 2) << p.name << std::setw(20) << p.experiment
                      << p.description << '\n';
    }

    struct run_args
    {
        std::string config;
        std::string preset;
        std::string out;
        std::optional<unsigned> threads;
        std::optional<std::uint64_t> seed;
    };

    int run(const run_args &a)
    {
        if (a.config.empty() && a.preset.empty())
            throw nfbd::validation_error("give --config, --preset or both");
        const ex::json user = a.config.empty() ? ex::json() : read_config(a.config);
        const ex::json cfg =
            ex::merge_config(a.preset.empty() ? std::nullopt : std::optional<std::string>(a.preset), user);

        ex::run_options opt;
        opt.threads = a.threads ? *a.threads : threads_from_env();
        opt.seed = a.seed;
        opt.preset = a.preset;

        std::string out = a.out;
        if (out.empty())
        {
            if (const auto *o = ex::detail::optional_field(cfg, "output"))
                out = ex::detail::text(*o, "output");
            else
                out = (a.preset.empty() ? ex::detail::text(ex::detail::field(cfg, "experiment", ""), "experiment")
                                        : a.preset) +
                      ".csv";
        }

        const auto result = ex::run(cfg, opt);
        for (const auto &path : ex::write_outputs(result, out, a.preset))
            std::cerr << "wrote " << path << '\n';
        return ok;
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"near-field array gain, beam depth and distance-domain multiplexing experiments"};
    app.require_subcommand(1);

    run_args args;
    auto *run_cmd = app.add_subcommand("run", "run an experiment and write CSV");
    run_cmd->add_option("--config", args.config, "JSON experiment configuration");
    run_cmd->add_option("--preset", args.preset, "named preset used as the base configuration");
    run_cmd->add_option("--out", args.out, "output CSV path");
    run_cmd->add_option("--threads", args.threads, "worker threads (0: all cores)");
    run_cmd->add_option("--seed", args.seed, "random seed for Monte Carlo placements");

    app.add_subcommand("presets", "list the built-in presets");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return validation_failure;
    }

    try
    {
        if (app.got_subcommand("presets"))
        {
            print_presets();
            return ok;
        }
        return run(args);
    }
    catch (const nfbd::sweep_error &e)
    {
        for (const auto &[index, what] : e.failures())
            std::cerr << "error: sweep index " << index << ": " << what << '\n';
        return numerical_failure;
    }
    catch (const nfbd::numerical_error &e)
    {
        std::cerr << "error: numerical failure: " << e.what() << '\n';
        return numerical_failure;
    }
    catch (const nfbd::validation_error &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return validation_failure;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return validation_failure;
    }
}
