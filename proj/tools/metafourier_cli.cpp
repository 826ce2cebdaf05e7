// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The metafourier Authors
//
// Command line front end for scenario files.
//
//   metafourier run <config> [--out DIR]   run, export grids and summary
//   metafourier validate <config>          list every reason the config would be rejected
//   metafourier oracle-diff <config>       print the oracle errors of each stage
//
// Exit codes: 0 success, 2 tolerance violation, 3 config/geometry/sampling error, 4 I/O error.

#include "metafourier/scenario.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <iostream>

namespace
{
    constexpr int exit_ok = 0;
    constexpr int exit_tolerance = 2;
    constexpr int exit_config = 3;
    constexpr int exit_io = 4;

    int exit_code(metafourier::ErrorCode code)
    {
        return code == metafourier::ErrorCode::io ? exit_io : exit_config;
    }

    int cmd_run(const std::string &path, const std::string &out)
    {
        metafourier::ScenarioConfig config = metafourier::load_config(path);
        if (!out.empty())
            config.output_directory = out;
        const metafourier::RunResult result = metafourier::run(config);
        const auto &s = result.summary;
        for (const auto &[stage, seconds] : s.timings)
            fmt::print(stderr, "  {:<12} {:8.3f} s\n", stage, seconds);
        for (const auto &[key, value] : s.values)
            if (key.rfind("power.", 0) == 0 || key.rfind("ratio.", 0) == 0 || key.rfind("oracle.", 0) == 0 ||
                key == "modes.N")
                fmt::print("{} = {:.10g}\n", key, value);
        fmt::print("wrote {} files to {}\n", s.files.size(), config.output_directory.string());
        for (const auto &v : s.violations)
            fmt::print(stderr, "tolerance: {}\n", v);
        return s.violations.empty() ? exit_ok : exit_tolerance;
    }

    int cmd_validate(const std::string &path)
    {
        const metafourier::ScenarioConfig config = metafourier::load_config(path);
        const auto diagnostics = metafourier::validate(config);
        if (diagnostics.empty())
        {
            fmt::print("{}: ok\n", path);
            return exit_ok;
        }
        for (const auto &d : diagnostics)
            fmt::print(stderr, "{}\n", d.message);
        return exit_code(diagnostics.front().code);
    }

    int cmd_oracle_diff(const std::string &path)
    {
        const metafourier::ScenarioConfig config = metafourier::load_config(path);
        for (const auto &[key, value] : metafourier::oracle_diff(config))
            fmt::print("{} = {:.6e}\n", key, value);
        return exit_ok;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Metasurface Fourier-transform link simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    auto *run = app.add_subcommand("run", "Run a scenario and export its stages");
    run->add_option("config", config_path, "Scenario INI file")->required();
    run->add_option("--out", out_dir, "Output directory (overrides [output] directory)");

    auto *validate = app.add_subcommand("validate", "Check a scenario without running it");
    validate->add_option("config", config_path, "Scenario INI file")->required();

    auto *diff = app.add_subcommand("oracle-diff", "Relative L2 error of each stage against the oracle");
    diff->add_option("config", config_path, "Scenario INI file")->required();

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (run->parsed())
            return cmd_run(config_path, out_dir);
        if (validate->parsed())
            return cmd_validate(config_path);
        return cmd_oracle_diff(config_path);
    }
    catch (const metafourier::Error &e)
    {
        fmt::print(stderr, "error: {}\n", e.what());
        return exit_code(e.code());
    }
    catch (const std::exception &e)
    {
        fmt::print(stderr, "error: {}\n", e.what());
        return exit_config;
    }
}
