// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The metafourier Authors
//
// Configuration-driven experiment runner.
//
// A scenario describes one link (two or three surfaces, aligned or not), the source signal, one
// grid per surface and the checks to apply. run() synthesizes the source, applies the phase
// profiles, propagates in the field domain, converts back to signals and compares every stage with
// the closed-form oracle. Config files use INI syntax; see README.md for the schema and
// scenarios/ for the bundled experiments.

#pragma once

#include "metafourier/analytics.hpp"
#include "metafourier/error.hpp"
#include "metafourier/field.hpp"
#include "metafourier/geometry.hpp"
#include "metafourier/propagate.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace metafourier
{
    // One declared check on a summary value
    struct Tolerance
    {
        enum class Kind
        {
            within, // |value - expected| <= tolerance
            below,  // value < bound
            above   // value > bound
        };

        Kind kind = Kind::within;
        double expected = 0.0; // expected value or bound
        double tolerance = 0.0;

        bool accepts(double value) const;
        std::string describe() const;

        // Parses "expected tolerance", "< bound" or "> bound"
        static Tolerance parse(const std::string &text);
    };

    struct ScenarioConfig
    {
        std::string name = "scenario";
        LinkTopology topology = LinkTopology::two_aligned;
        double wavelength = 0.01;
        double distance1 = 10.0; // R (two-surface) or R1
        double distance2 = 0.0;  // R2 (three-surface)

        // Frames (origin ignored; placed along the link axes). Omitted frames are canonical.
        SurfaceFrame tx, ris, rx;
        Vector3 axis1 = Vector3::UnitZ(); // Tx -> Rx or Tx -> RIS
        Vector3 axis2 = Vector3::UnitZ(); // RIS -> Rx

        SignalSpec signal = SignalSpec::rect(0.2, 0.2);

        // Keys: "source" (S'1, unaligned only), "tx", "ris" (three-surface), "rx", "image" (S'3)
        std::map<std::string, GridSpec> grids;

        Backend backend = Backend::separable_sheared_dft;
        bool enforce_validity = true;

        std::optional<double> gamma, gamma1, gamma2;
        bool blob_analysis = false; // per-quadrant moments of every stage
        double blob_window = 0.0;   // half-width of the per-blob window; 0 = whole quadrant

        std::filesystem::path output_directory = ".";
        bool export_profiles = true;
        bool wrap_phase = false;

        std::vector<std::pair<std::string, Tolerance>> tolerances;
    };

    struct Diagnostic
    {
        ErrorCode code;
        std::string message;
    };

    struct RunSummary
    {
        std::map<std::string, double> values;              // deterministic key order
        std::map<std::string, std::string> labels;          // scenario name, topology, backend
        std::vector<std::pair<std::string, double>> timings; // wall-clock seconds per stage
        std::vector<std::string> violations;                 // failed tolerance checks
        std::vector<std::filesystem::path> files;            // exported artifacts

        double at(const std::string &key) const;
    };

    struct RunOptions
    {
        bool write_files = true;  // export grids, profiles, summary and timing
        bool keep_fields = false; // return the stage fields in RunResult::fields
    };

    struct RunResult
    {
        RunSummary summary;
        std::map<std::string, ComplexField> fields; // stage label -> field (if kept)
    };

    // Parses an INI scenario; throws a schema error naming the section and key
    ScenarioConfig parse_config(std::istream &is, const std::string &origin = "<stream>");
    ScenarioConfig load_config(const std::filesystem::path &path);

    // Every reason run() would reject the config; empty iff run() proceeds
    std::vector<Diagnostic> validate(const ScenarioConfig &config);

    // Runs the scenario. Throws the first diagnostic of validate() as an Error, and io errors from
    // the export. Violated tolerances are reported in the summary, not thrown.
    RunResult run(const ScenarioConfig &config, const RunOptions &options = {});

    // Summary entries starting with "oracle." of a run without file export
    std::map<std::string, double> oracle_diff(const ScenarioConfig &config);

    // Flat key=value text; byte-identical for identical inputs
    void write_summary(std::ostream &os, const RunSummary &summary);
    void write_summary(const std::filesystem::path &path, const RunSummary &summary);

    // Parses a summary file back into key -> value (labels are skipped)
    std::map<std::string, double> read_summary(const std::filesystem::path &path);

    // File stem used for a stage label, e.g. "S'1" -> "S1p"
    std::string stage_file_stem(const std::string &stage);
}
