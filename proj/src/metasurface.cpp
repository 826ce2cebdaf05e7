// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The metafourier Authors

#include "metafourier/metasurface.hpp"
#include "metafourier/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace metafourier
{
    namespace
    {
        void require_positive(double value, const char *name)
        {
            if (!(value > 0.0) || !std::isfinite(value))
                throw Error(ErrorCode::validation, fmt::format("{} must be positive (got {})", name, value));
        }

        // Linear steering plus the quadratic focusing term left after removing the projected part
        double leg_phase(double c1, double c2, double sign, double k, double distance, double s, double t)
        {
            const double projected = c1 * s + c2 * t;
            return sign * k * projected + 0.5 * k / distance * (s * s + t * t - projected * projected);
        }

        template <typename Fn>
        PhaseProfile sample(const GridSpec &grid, Fn &&fn)
        {
            grid.validate();
            PhaseProfile p;
            p.grid = grid;
            p.theta.resize(grid.size());
            for (std::size_t j = 0; j < grid.ny; ++j)
                for (std::size_t i = 0; i < grid.nx; ++i)
                    p.theta[j * grid.nx + i] = fn(grid.x(i), grid.y(j));
            return p;
        }
    }

    std::string_view to_string(PhaseRecipe recipe) noexcept
    {
        switch (recipe)
        {
        case PhaseRecipe::tx_aligned:
            return "tx_aligned";
        case PhaseRecipe::rx_aligned:
            return "rx_aligned";
        case PhaseRecipe::tx_unaligned:
            return "tx_unaligned";
        case PhaseRecipe::rx_unaligned:
            return "rx_unaligned";
        case PhaseRecipe::ris_aligned:
            return "ris_aligned";
        case PhaseRecipe::ris_unaligned:
            return "ris_unaligned";
        }
        return "unknown";
    }

    double tx_phase(const DirectionCosines &c, double k, double distance, double x, double y)
    {
        return leg_phase(c.a_rx(), c.a_ry(), -1.0, k, distance, x, y);
    }

    double rx_phase(const DirectionCosines &c, double k, double distance, double u, double v)
    {
        return leg_phase(c.a_ru(), c.a_rv(), 1.0, k, distance, u, v);
    }

    PhaseProfile phase_two_surface(SurfaceRole role, const DirectionCosines &cosines, double k, double distance,
                                   const GridSpec &grid)
    {
        require_positive(k, "wavenumber");
        require_positive(distance, "distance");

        PhaseProfile p = role == SurfaceRole::tx
                             ? sample(grid, [&](double x, double y)
                                      { return tx_phase(cosines, k, distance, x, y); })
                             : sample(grid, [&](double u, double v)
                                      { return rx_phase(cosines, k, distance, u, v); });
        const bool aligned = cosines.is_aligned();
        if (role == SurfaceRole::tx)
            p.recipe = aligned ? PhaseRecipe::tx_aligned : PhaseRecipe::tx_unaligned;
        else
            p.recipe = aligned ? PhaseRecipe::rx_aligned : PhaseRecipe::rx_unaligned;
        p.wavenumber = k;
        p.distance1 = distance;
        p.cosines1 = cosines;
        return p;
    }

    PhaseProfile phase_ris(const DirectionCosines &leg1, const DirectionCosines &leg2, double k, double distance1,
                           double distance2, const GridSpec &grid)
    {
        require_positive(k, "wavenumber");
        require_positive(distance1, "distance1");
        require_positive(distance2, "distance2");

        // The relay is the destination of leg 1 and the source of leg 2
        PhaseProfile p = sample(grid, [&](double s, double t)
                                { return rx_phase(leg1, k, distance1, s, t) + tx_phase(leg2, k, distance2, s, t); });
        p.recipe = leg1.is_aligned() && leg2.is_aligned() ? PhaseRecipe::ris_aligned : PhaseRecipe::ris_unaligned;
        p.wavenumber = k;
        p.distance1 = distance1;
        p.distance2 = distance2;
        p.cosines1 = leg1;
        p.cosines2 = leg2;
        return p;
    }

    double wrap_phase(double theta)
    {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        double w = std::remainder(theta, two_pi); // in [-pi, pi]
        if (w <= -std::numbers::pi)
            w += two_pi;
        return w;
    }
}
