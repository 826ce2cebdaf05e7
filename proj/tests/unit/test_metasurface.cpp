// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The metafourier Authors

#include "metafourier/error.hpp"
#include "metafourier/metasurface.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace metafourier;

namespace
{
    const double pi = std::numbers::pi;
    const double k = 2.0 * pi / 0.01;
    const double h = 1.0 / std::sqrt(2.0);

    // Legs of the 45-degree relay: t = (h, 0, h), r = (-h, 0, h), RIS p = -z, q = y
    struct Relay
    {
        DirectionCosines leg1, leg2;
        Relay()
        {
            const SurfaceFrame tx;
            const SurfaceFrame ris = SurfaceFrame::from_axes(10.0 * Vector3(h, 0, h), -Vector3::UnitZ(), Vector3::UnitY());
            const SurfaceFrame rx = SurfaceFrame::from_axes(ris.origin + 5.0 * Vector3(-h, 0, h), Vector3(h, h, 0), Vector3(-h, h, 0));
            leg1 = direction_cosines(tx, ris, LinkAxis::between(tx, ris));
            leg2 = direction_cosines(ris, rx, LinkAxis::between(ris, rx));
        }
    };
}

TEST(Metasurface, AlignedQuadraticPhase)
{
    const DirectionCosines a = DirectionCosines::aligned();
    EXPECT_NEAR(tx_phase(a, k, 10.0, 0.2, 0.2), 2.51327412, 1e-8);
    EXPECT_NEAR(rx_phase(a, k, 10.0, 0.2, 0.2), 2.51327412, 1e-8);
    EXPECT_DOUBLE_EQ(tx_phase(a, k, 10.0, 0.0, 0.0), 0.0);
}

TEST(Metasurface, UnalignedLinearRamp)
{
    // Tilted axis: the linear part steers toward the axis with opposite signs on Tx and Rx
    DirectionCosines c;
    c.axis_source = {0.1, 0.0, std::sqrt(1.0 - 0.01)};
    c.axis_destination = {0.2, 0.0, std::sqrt(1.0 - 0.04)};
    const double x = 0.05;
    const double quad_tx = k / 20.0 * (x * x - (0.1 * x) * (0.1 * x));
    const double quad_rx = k / 20.0 * (x * x - (0.2 * x) * (0.2 * x));
    EXPECT_NEAR(tx_phase(c, k, 10.0, x, 0.0), -k * 0.1 * x + quad_tx, 1e-10);
    EXPECT_NEAR(rx_phase(c, k, 10.0, x, 0.0), k * 0.2 * x + quad_rx, 1e-10);
}

TEST(Metasurface, RelayPhaseAligned)
{
    const GridSpec g = GridSpec{3, 2, 0.5, 1.0, 0.0, 0.5};
    const PhaseProfile p = phase_ris(DirectionCosines::aligned(), DirectionCosines::aligned(), k, 10.0, 5.0, g);
    EXPECT_EQ(p.recipe, PhaseRecipe::ris_aligned);
    EXPECT_NEAR(p.at(2, 0), 23.5619449, 1e-7);
    EXPECT_NEAR(p.at(1, 0), 0.0, 1e-15);
}

TEST(Metasurface, RelayPhaseUnaligned)
{
    const Relay r;
    const GridSpec g = GridSpec{3, 2, 0.1, 1.0, 0.0, 0.5};
    const PhaseProfile p = phase_ris(r.leg1, r.leg2, k, 10.0, 5.0, g);
    EXPECT_EQ(p.recipe, PhaseRecipe::ris_unaligned);
    // Linear ramps of both legs cancel; the quadratic terms remain
    EXPECT_NEAR(p.at(2, 0), 0.471238898, 1e-8);
}

TEST(Metasurface, ProfileMatchesPointwiseRecipe)
{
    const Relay r;
    const GridSpec g = GridSpec::covering(16, 0.5);
    const PhaseProfile tx = phase_two_surface(SurfaceRole::tx, r.leg1, k, 10.0, g);
    const PhaseProfile rx = phase_two_surface(SurfaceRole::rx, r.leg1, k, 10.0, g);
    EXPECT_EQ(tx.recipe, PhaseRecipe::tx_unaligned);
    EXPECT_EQ(rx.recipe, PhaseRecipe::rx_unaligned);
    EXPECT_DOUBLE_EQ(tx.at(4, 9), tx_phase(r.leg1, k, 10.0, g.x(4), g.y(9)));
    EXPECT_DOUBLE_EQ(rx.at(4, 9), rx_phase(r.leg1, k, 10.0, g.x(4), g.y(9)));
    EXPECT_EQ(phase_two_surface(SurfaceRole::tx, DirectionCosines::aligned(), k, 10.0, g).recipe, PhaseRecipe::tx_aligned);
}

TEST(Metasurface, WrapPhase)
{
    EXPECT_NEAR(wrap_phase(3.0 * pi), pi, 1e-12);
    EXPECT_NEAR(wrap_phase(-pi), pi, 1e-12);
    EXPECT_NEAR(wrap_phase(0.5), 0.5, 1e-15);
    EXPECT_NEAR(wrap_phase(-7.0), -7.0 + 2.0 * pi, 1e-12);
}
