// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The metafourier Authors
//
// Text exchange format for sampled grids.
//
//      # nx=256, ny=256, dx=0.005, dy=0.005, cx=0, cy=0, stage=S1
//      x,y,re,im
//      -0.6375,-0.6375,0,0
//      ...
//
// One header line with the grid metadata, one column line, then one row per node in row-major
// order (x fastest). Numbers are written with 17 significant digits, so a written file re-reads to
// the identical doubles. Phase profiles use the same layout with columns x,y,theta.

#pragma once

#include "metafourier/field.hpp"
#include "metafourier/metasurface.hpp"

#include <filesystem>
#include <iosfwd>

namespace metafourier
{
    void write_grid_csv(std::ostream &os, const ComplexField &f);
    void write_grid_csv(const std::filesystem::path &path, const ComplexField &f);

    // Throws an io error naming the offending line for malformed input
    ComplexField read_grid_csv(std::istream &is);
    ComplexField read_grid_csv(const std::filesystem::path &path);

    // Writes x,y,theta; wrap = true reduces the phases to (-pi, pi]
    void write_profile_csv(std::ostream &os, const PhaseProfile &p, bool wrap = false);
    void write_profile_csv(const std::filesystem::path &path, const PhaseProfile &p, bool wrap = false);
}
