// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The metafourier Authors

#include "metafourier/analytics.hpp"
#include "metafourier/error.hpp"
#include "metafourier/propagate.hpp"
#include "metafourier/summation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace metafourier
{
    namespace
    {
        double require(const std::optional<double> &value, const char *name, ModeTopology topology)
        {
            if (!value)
                throw Error(ErrorCode::schema, fmt::format("mode_count({}) requires '{}'", to_string(topology), name));
            if (!std::isfinite(*value) || !(*value > 0.0))
                throw Error(ErrorCode::validation, fmt::format("mode_count: '{}' must be positive (got {})", name, *value));
            return *value;
        }

        double require_det(const std::optional<double> &value, const char *name, ModeTopology topology)
        {
            const double d = require(value, name, topology);
            if (d > 1.0)
                throw Error(ErrorCode::validation, fmt::format("mode_count: '{}' must lie in [0, 1] (got {})", name, d));
            return d;
        }

        double gamma_or_default(const std::optional<double> &value, const char *name)
        {
            const double g = value.value_or(default_gamma);
            if (!std::isfinite(g) || !(g > 0.0))
                throw Error(ErrorCode::validation, fmt::format("mode_count: '{}' must be positive (got {})", name, g));
            return g;
        }

        void require_unit_interval(double det, const char *name)
        {
            if (!(det >= 0.0 && det <= 1.0))
                throw Error(ErrorCode::validation, fmt::format("{} must lie in [0, 1] (got {})", name, det));
        }
    }

    std::string_view to_string(ModeTopology topology) noexcept
    {
        switch (topology)
        {
        case ModeTopology::two_aligned:
            return "two_aligned";
        case ModeTopology::two_unaligned:
            return "two_unaligned";
        case ModeTopology::three_rect:
            return "three_rect";
        case ModeTopology::three_gauss:
            return "three_gauss";
        case ModeTopology::three_rect_unaligned:
            return "three_rect_unaligned";
        case ModeTopology::three_gauss_unaligned:
            return "three_gauss_unaligned";
        }
        return "unknown";
    }

    double mode_count(const ModeCountSpec &s, ModeTopology topology)
    {
        switch (topology)
        {
        case ModeTopology::two_aligned:
        case ModeTopology::two_unaligned:
        {
            const double m_tx = require(s.m_tx, "m_tx", topology);
            const double m_rx = require(s.m_rx, "m_rx", topology);
            const double lr = require(s.wavelength, "wavelength", topology) * require(s.distance, "distance", topology);
            // Product of the apertures in units of the Fresnel area lambda R; this order keeps
            // round numbers such as 1 m^2 / 0.1 m^2 exact
            const double n = (m_tx / lr) * (m_rx / lr);
            return topology == ModeTopology::two_aligned ? n : n * require_det(s.det, "det", topology);
        }
        case ModeTopology::three_rect:
        case ModeTopology::three_gauss:
        case ModeTopology::three_rect_unaligned:
        case ModeTopology::three_gauss_unaligned:
        {
            const bool unaligned = topology == ModeTopology::three_rect_unaligned ||
                                   topology == ModeTopology::three_gauss_unaligned;
            const bool gauss = topology == ModeTopology::three_gauss || topology == ModeTopology::three_gauss_unaligned;

            const double m_tx = require(s.m_tx, "m_tx", topology);
            const double m_ris = require(s.m_ris, "m_ris", topology);
            const double m_rx = require(s.m_rx, "m_rx", topology);
            const double lambda = require(s.wavelength, "wavelength", topology);
            const double lr1 = lambda * require(s.distance1, "distance1", topology);
            const double lr2 = lambda * require(s.distance2, "distance2", topology);

            double leg1 = (m_tx / lr1) * (m_ris / lr1);
            double leg2 = (m_ris / lr2) * (m_rx / lr2);
            if (unaligned)
            {
                leg1 *= require_det(s.det1, "det1", topology);
                leg2 *= require_det(s.det2, "det2", topology);
            }

            double concentration = 0.0;
            if (gauss)
                concentration = gamma_or_default(s.gamma1, "gamma1") * gamma_or_default(s.gamma2, "gamma2");
            else
                concentration = gamma_or_default(s.gamma, "gamma");
            return std::min(leg1, leg2) / (concentration * concentration);
        }
        }
        throw Error(ErrorCode::schema, "unknown mode-count topology");
    }

    LinkTopology parse_link_topology(std::string_view name)
    {
        for (LinkTopology t : {LinkTopology::two_aligned, LinkTopology::two_unaligned, LinkTopology::three_aligned,
                               LinkTopology::three_unaligned})
            if (name == to_string(t))
                return t;
        throw Error(ErrorCode::schema, fmt::format("unknown topology '{}'", name));
    }

    std::string_view to_string(LinkTopology topology) noexcept
    {
        switch (topology)
        {
        case LinkTopology::two_aligned:
            return "two_aligned";
        case LinkTopology::two_unaligned:
            return "two_unaligned";
        case LinkTopology::three_aligned:
            return "three_aligned";
        case LinkTopology::three_unaligned:
            return "three_unaligned";
        }
        return "unknown";
    }

    bool is_three_surface(LinkTopology topology) noexcept
    {
        return topology == LinkTopology::three_aligned || topology == LinkTopology::three_unaligned;
    }

    PowerRatios predicted_power_ratio(LinkTopology topology, double det1, double det2)
    {
        require_unit_interval(det1, "det1");
        require_unit_interval(det2, "det2");
        switch (topology)
        {
        case LinkTopology::two_aligned:
            return PowerRatios{1.0, std::nullopt};
        case LinkTopology::two_unaligned:
            return PowerRatios{det1, std::nullopt};
        case LinkTopology::three_aligned:
            return PowerRatios{1.0, 1.0};
        case LinkTopology::three_unaligned:
            return PowerRatios{det1, det1 * det2};
        }
        return PowerRatios{};
    }

    ComplexField normalized_coords(const ComplexField &s, double wavelength, double distance, LinkSide side)
    {
        s.validate();
        const double lr = wavelength * distance;
        if (!(lr > 0.0) || !std::isfinite(lr))
            throw Error(ErrorCode::validation, fmt::format("normalized_coords: lambda R must be positive (got {})", lr));

        const double scale = std::sqrt(lr);
        const GridSpec &g = s.grid;
        GridSpec ng{g.nx, g.ny, g.dx / scale, g.dy / scale, g.cx / scale, g.cy / scale};

        Complex factor = scale;
        if (side == LinkSide::receive)
            factor *= 1.0 / link_prefactor(wavelength, distance) / lr; // -j e^{+jkR}

        ComplexField out(ng, s.stage + "'");
        for (std::size_t n = 0; n < s.samples.size(); ++n)
            out.samples[n] = factor * s.samples[n];
        return out;
    }

    ComplexField unit_fourier_transform(const ComplexField &in, const GridSpec &out_grid)
    {
        in.validate();
        out_grid.validate();
        const GridSpec &g = in.grid;
        constexpr double two_pi = 2.0 * std::numbers::pi;
        ComplexField out(out_grid, in.stage);
        for (std::size_t q = 0; q < out_grid.size(); ++q)
        {
            const double u = out_grid.x(q % out_grid.nx), v = out_grid.y(q / out_grid.nx);
            out.samples[q] = g.cell_area() * pairwise_sum<Complex>(0, g.size(), [&](std::size_t p)
                                                                   { return in.samples[p] * std::polar(1.0, two_pi * (g.x(p % g.nx) * u + g.y(p / g.nx) * v)); });
        }
        return out;
    }
}
