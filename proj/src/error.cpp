// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The metafourier Authors

#include "metafourier/error.hpp"

namespace metafourier
{
    std::string_view to_string(ErrorCode code) noexcept
    {
        switch (code)
        {
        case ErrorCode::validation:
            return "validation";
        case ErrorCode::resolution:
            return "resolution";
        case ErrorCode::sampling:
            return "sampling";
        case ErrorCode::conditioning:
            return "conditioning";
        case ErrorCode::grid_mismatch:
            return "grid_mismatch";
        case ErrorCode::cost_guard:
            return "cost_guard";
        case ErrorCode::schema:
            return "schema";
        case ErrorCode::io:
            return "io";
        }
        return "unknown";
    }
}
