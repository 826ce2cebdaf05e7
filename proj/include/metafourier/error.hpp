// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The metafourier Authors
//
// Error type shared by all modules. Every failure carries a machine-readable
// code so that the CLI and the Python layer can map it to exit statuses and
// exception classes without parsing message text.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace metafourier
{
    enum class ErrorCode
    {
        validation,    // Malformed vectors or frames (non-unit, non-orthogonal, left-handed)
        resolution,    // Grid does not resolve the smallest signal feature
        sampling,      // Propagation anti-aliasing rule or Fresnel validity violated
        conditioning,  // Near-singular coordinate map
        grid_mismatch, // Operands sampled on different grids
        cost_guard,    // Request exceeds the configured computational budget
        schema,        // Missing or malformed configuration entries
        io             // File system or parse failure
    };

    // Stable lower-case name of an error code, e.g. "sampling"
    std::string_view to_string(ErrorCode code) noexcept;

    class Error : public std::runtime_error
    {
    public:
        Error(ErrorCode code, const std::string &message)
            : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

        ErrorCode code() const noexcept { return code_; }

    private:
        ErrorCode code_;
    };
}
