// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The metafourier Authors
//
// Phase profiles that convert between the field variables (F, G) radiated or received by a
// metasurface and the signal variables (S) related by a pure Fourier kernel.
//
// Transmit side of a leg with source cosines (a_rx, a_ry) and distance R:
//      theta_tx(x, y) = -k (a_rx x + a_ry y) + k / (2R) [x^2 + y^2 - (a_rx x + a_ry y)^2]
// Receive side with destination cosines (a_ru, a_rv):
//      theta_rx(u, v) = +k (a_ru u + a_rv v) + k / (2R) [u^2 + v^2 - (a_ru u + a_rv v)^2]
// A relay surface receives leg 1 and transmits leg 2, so its profile is the sum of both.
// Phases are stored unwrapped; wrapping to (-pi, pi] is an export option.

#pragma once

#include "metafourier/field.hpp"
#include "metafourier/geometry.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace metafourier
{
    enum class PhaseRecipe
    {
        tx_aligned,
        rx_aligned,
        tx_unaligned,
        rx_unaligned,
        ris_aligned,
        ris_unaligned
    };

    enum class SurfaceRole
    {
        tx,
        rx
    };

    std::string_view to_string(PhaseRecipe recipe) noexcept;

    struct PhaseProfile
    {
        GridSpec grid;
        std::vector<double> theta; // radians per node, row-major, unwrapped
        PhaseRecipe recipe = PhaseRecipe::tx_aligned;
        double wavenumber = 0.0;   // k in rad/m
        double distance1 = 0.0;    // R (two-surface) or R1 (relay)
        double distance2 = 0.0;    // R2 (relay only)
        DirectionCosines cosines1; // leg cosines (leg 1 for a relay)
        DirectionCosines cosines2; // leg 2 cosines (relay only)

        double at(std::size_t i, std::size_t j) const { return theta[j * grid.nx + i]; }
    };

    // Transmit-side phase of one leg at a point
    double tx_phase(const DirectionCosines &cosines, double k, double distance, double x, double y);

    // Receive-side phase of one leg at a point
    double rx_phase(const DirectionCosines &cosines, double k, double distance, double u, double v);

    // Profile of the transmitting or the receiving surface of a two-surface leg
    PhaseProfile phase_two_surface(SurfaceRole role, const DirectionCosines &cosines, double k, double distance,
                                   const GridSpec &grid);

    // Relay profile: receive phase of leg 1 plus transmit phase of leg 2, both on the relay frame
    PhaseProfile phase_ris(const DirectionCosines &leg1, const DirectionCosines &leg2, double k, double distance1,
                           double distance2, const GridSpec &grid);

    // Wraps a phase to (-pi, pi]
    double wrap_phase(double theta);
}
