// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The metafourier Authors

#include "metafourier/field.hpp"
#include "metafourier/error.hpp"
#include "metafourier/metasurface.hpp"
#include "metafourier/summation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace metafourier
{
    namespace
    {
        bool close(double a, double b)
        {
            return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
        }

        // Rect indicator per dimension: 1 inside, 1/2 on the boundary, 0 outside
        double box(double t, double half_width)
        {
            const double d = std::abs(t) - half_width;
            if (std::abs(d) <= 1e-9 * half_width)
                return 0.5;
            return d < 0.0 ? 1.0 : 0.0;
        }

        // Smallest feature of every leaf signal along the signal's own x and y axes
        void smallest_features(const SignalSpec &spec, double &fx, double &fy)
        {
            std::visit(
                [&](const auto &s)
                {
                    using S = std::decay_t<decltype(s)>;
                    if constexpr (std::is_same_v<S, RectSignal>)
                    {
                        fx = std::min(fx, s.lx);
                        fy = std::min(fy, s.ly);
                    }
                    else if constexpr (std::is_same_v<S, GaussianSignal>)
                    {
                        fx = std::min(fx, s.sigma_x);
                        fy = std::min(fy, s.sigma_y);
                    }
                    else
                    {
                        for (const auto &term : s)
                            smallest_features(term.signal, fx, fy);
                    }
                },
                spec.shape);
        }
    }

    void check_resolution(const SignalSpec &spec, const GridSpec &grid, const Matrix2 &to_signal)
    {
        double fx = INFINITY, fy = INFINITY;
        smallest_features(spec, fx, fy);

        // One grid step moves the sampled point by this much along each signal axis
        const double hx = std::max(std::abs(to_signal(0, 0)) * grid.dx, std::abs(to_signal(0, 1)) * grid.dy);
        const double hy = std::max(std::abs(to_signal(1, 0)) * grid.dx, std::abs(to_signal(1, 1)) * grid.dy);

        if (fx / hx < min_samples_per_feature)
            throw Error(ErrorCode::resolution,
                        fmt::format("{:.3g} samples across the smallest x feature ({:.6g} m); at least {} "
                                    "required, i.e. dx <= {:.6g} m",
                                    fx / hx, fx, min_samples_per_feature, grid.dx * (fx / hx) / min_samples_per_feature));
        if (fy / hy < min_samples_per_feature)
            throw Error(ErrorCode::resolution,
                        fmt::format("{:.3g} samples across the smallest y feature ({:.6g} m); at least {} "
                                    "required, i.e. dy <= {:.6g} m",
                                    fy / hy, fy, min_samples_per_feature, grid.dy * (fy / hy) / min_samples_per_feature));
    }

    namespace
    {
        void require_same_grid(const GridSpec &a, const GridSpec &b, const char *what)
        {
            if (!a.matches(b))
                throw Error(ErrorCode::grid_mismatch,
                            fmt::format("{}: grids differ ({}x{} @ {}x{} vs {}x{} @ {}x{})", what, a.nx, a.ny, a.dx,
                                        a.dy, b.nx, b.ny, b.dx, b.dy));
        }

        ComplexField phase_multiply(const ComplexField &f, const PhaseProfile &theta, double sign)
        {
            require_same_grid(f.grid, theta.grid, "apply_phase");
            if (theta.theta.size() != f.samples.size())
                throw Error(ErrorCode::grid_mismatch, "apply_phase: profile and field sample counts differ");
            ComplexField out(f.grid, f.stage);
            for (std::size_t n = 0; n < f.samples.size(); ++n)
                out.samples[n] = f.samples[n] * std::polar(1.0, sign * theta.theta[n]);
            return out;
        }
    }

    // ---------------------------------------------------------------------------------------------
    // GridSpec, ComplexField

    GridSpec GridSpec::square(std::size_t n, double spacing, double cx, double cy)
    {
        GridSpec g{n, n, spacing, spacing, cx, cy};
        g.validate();
        return g;
    }

    GridSpec GridSpec::covering(std::size_t n, double half_width, double cx, double cy)
    {
        return square(n, 2.0 * half_width / static_cast<double>(n), cx, cy);
    }

    void GridSpec::validate() const
    {
        if (nx < 2 || ny < 2)
            throw Error(ErrorCode::validation, fmt::format("grid needs at least 2 samples per axis (got {}x{})", nx, ny));
        if (!(dx > 0.0) || !(dy > 0.0) || !std::isfinite(dx) || !std::isfinite(dy))
            throw Error(ErrorCode::validation, fmt::format("grid spacing must be positive (got {}, {})", dx, dy));
        if (!std::isfinite(cx) || !std::isfinite(cy))
            throw Error(ErrorCode::validation, "grid center must be finite");
    }

    bool GridSpec::matches(const GridSpec &o) const
    {
        return nx == o.nx && ny == o.ny && close(dx, o.dx) && close(dy, o.dy) && close(cx, o.cx) && close(cy, o.cy);
    }

    ComplexField::ComplexField(const GridSpec &g, std::string s)
        : grid(g), samples(g.size(), Complex(0.0, 0.0)), stage(std::move(s))
    {
        grid.validate();
    }

    ComplexField::ComplexField(const GridSpec &g, std::vector<Complex> v, std::string s)
        : grid(g), samples(std::move(v)), stage(std::move(s))
    {
        validate();
    }

    void ComplexField::validate() const
    {
        grid.validate();
        if (samples.size() != grid.size())
            throw Error(ErrorCode::validation,
                        fmt::format("field has {} samples but the grid has {} nodes", samples.size(), grid.size()));
        for (const auto &s : samples)
            if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
                throw Error(ErrorCode::validation, "field contains non-finite samples");
    }

    // ---------------------------------------------------------------------------------------------
    // Signals

    SignalSpec SignalSpec::rect(double lx, double ly, double x0, double y0)
    {
        SignalSpec s{RectSignal{lx, ly, x0, y0}};
        s.validate();
        return s;
    }

    SignalSpec SignalSpec::gaussian(double sigma_x, double sigma_y, double x0, double y0)
    {
        SignalSpec s{GaussianSignal{sigma_x, sigma_y, x0, y0}};
        s.validate();
        return s;
    }

    SignalSpec SignalSpec::superposition(std::vector<WeightedSignal> terms)
    {
        SignalSpec s{std::move(terms)};
        s.validate();
        return s;
    }

    void SignalSpec::validate() const
    {
        std::visit(
            [](const auto &s)
            {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, RectSignal>)
                {
                    if (!(s.lx > 0.0) || !(s.ly > 0.0) || !std::isfinite(s.lx) || !std::isfinite(s.ly))
                        throw Error(ErrorCode::validation, "rect widths must be positive");
                    if (!std::isfinite(s.x0) || !std::isfinite(s.y0))
                        throw Error(ErrorCode::validation, "rect center must be finite");
                }
                else if constexpr (std::is_same_v<S, GaussianSignal>)
                {
                    if (!(s.sigma_x > 0.0) || !(s.sigma_y > 0.0) || !std::isfinite(s.sigma_x) || !std::isfinite(s.sigma_y))
                        throw Error(ErrorCode::validation, "gaussian widths must be positive");
                    if (!std::isfinite(s.x0) || !std::isfinite(s.y0))
                        throw Error(ErrorCode::validation, "gaussian mean must be finite");
                }
                else
                {
                    if (s.empty())
                        throw Error(ErrorCode::validation, "superposition needs at least one term");
                    for (const auto &term : s)
                    {
                        if (!std::isfinite(term.weight))
                            throw Error(ErrorCode::validation, "superposition weights must be finite");
                        term.signal.validate();
                    }
                }
            },
            shape);
    }

    double evaluate(const SignalSpec &spec, double x, double y)
    {
        return std::visit(
            [x, y](const auto &s) -> double
            {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, RectSignal>)
                {
                    return box(x - s.x0, 0.5 * s.lx) * box(y - s.y0, 0.5 * s.ly) / std::sqrt(s.lx * s.ly);
                }
                else if constexpr (std::is_same_v<S, GaussianSignal>)
                {
                    const double tx = (x - s.x0) / s.sigma_x, ty = (y - s.y0) / s.sigma_y;
                    return std::exp(-0.25 * (tx * tx + ty * ty)) / std::sqrt(2.0 * std::numbers::pi * s.sigma_x * s.sigma_y);
                }
                else
                {
                    double acc = 0.0;
                    for (const auto &term : s)
                        acc += term.weight * evaluate(term.signal, x, y);
                    return acc;
                }
            },
            spec.shape);
    }

    ComplexField synthesize(const SignalSpec &spec, const GridSpec &grid, std::string stage)
    {
        return synthesize_mapped(spec, grid, Matrix2::Identity(), 1.0, std::move(stage));
    }

    ComplexField synthesize_mapped(const SignalSpec &spec, const GridSpec &grid, const Matrix2 &to_signal,
                                   double factor, std::string stage)
    {
        spec.validate();
        grid.validate();
        if (!to_signal.allFinite() || !std::isfinite(factor))
            throw Error(ErrorCode::validation, "coordinate map and factor must be finite");
        if (std::abs(to_signal.determinant()) <= degenerate_det_threshold)
            throw Error(ErrorCode::conditioning, "coordinate map is near-singular");
        check_resolution(spec, grid, to_signal);

        ComplexField f(grid, std::move(stage));
        for (std::size_t j = 0; j < grid.ny; ++j)
            for (std::size_t i = 0; i < grid.nx; ++i)
            {
                const Vector2 p = to_signal * Vector2(grid.x(i), grid.y(j));
                f.at(i, j) = factor * evaluate(spec, p.x(), p.y());
            }
        return f;
    }

    double total_power(const ComplexField &f)
    {
        const double sum = pairwise_sum<double>(0, f.samples.size(), [&](std::size_t n)
                                                { return std::norm(f.samples[n]); });
        return sum * f.grid.cell_area();
    }

    ComplexField apply_phase(const ComplexField &f, const PhaseProfile &theta)
    {
        return phase_multiply(f, theta, 1.0);
    }

    ComplexField remove_phase(const ComplexField &f, const PhaseProfile &theta)
    {
        return phase_multiply(f, theta, -1.0);
    }

    Complex interpolate(const ComplexField &f, double x, double y)
    {
        const GridSpec &g = f.grid;
        const double fi = (x - g.x(0)) / g.dx;
        const double fj = (y - g.y(0)) / g.dy;
        const double max_i = static_cast<double>(g.nx - 1), max_j = static_cast<double>(g.ny - 1);

        // Reads within rounding of the outermost node are clamped onto it
        constexpr double slack = 1e-9;
        if (!(fi >= -slack && fi <= max_i + slack && fj >= -slack && fj <= max_j + slack))
            return Complex(0.0, 0.0);

        const double ci = std::clamp(fi, 0.0, max_i), cj = std::clamp(fj, 0.0, max_j);
        const std::size_t i0 = std::min(static_cast<std::size_t>(ci), g.nx - 2);
        const std::size_t j0 = std::min(static_cast<std::size_t>(cj), g.ny - 2);
        const double ti = ci - static_cast<double>(i0), tj = cj - static_cast<double>(j0);

        return (1.0 - tj) * ((1.0 - ti) * f.at(i0, j0) + ti * f.at(i0 + 1, j0)) +
               tj * ((1.0 - ti) * f.at(i0, j0 + 1) + ti * f.at(i0 + 1, j0 + 1));
    }

    ComplexField resample_affine(const ComplexField &f, const Matrix2 &map, double factor, const GridSpec &out_grid)
    {
        out_grid.validate();
        if (!map.allFinite() || !std::isfinite(factor))
            throw Error(ErrorCode::validation, "resample_affine: map and factor must be finite");
        const double det = map.determinant();
        if (std::abs(det) <= degenerate_det_threshold)
            throw Error(ErrorCode::conditioning,
                        fmt::format("resample_affine: |det map| = {:.3e} <= {:.0e}; inverse is ill-conditioned",
                                    std::abs(det), degenerate_det_threshold));

        const Matrix2 inverse = map.inverse();
        ComplexField out(out_grid, f.stage);
        for (std::size_t j = 0; j < out_grid.ny; ++j)
            for (std::size_t i = 0; i < out_grid.nx; ++i)
            {
                const Vector2 p = inverse * Vector2(out_grid.x(i), out_grid.y(j));
                out.at(i, j) = factor * interpolate(f, p.x(), p.y());
            }
        return out;
    }

    PowerMoments power_moments(const ComplexField &f)
    {
        return power_moments(f, -INFINITY, INFINITY, -INFINITY, INFINITY);
    }

    PowerMoments power_moments(const ComplexField &f, double x_min, double x_max, double y_min, double y_max)
    {
        const GridSpec &g = f.grid;

        // Moments about the grid center keep the accumulated terms well scaled
        auto weight = [&](std::size_t n) -> double
        {
            const double x = g.x(n % g.nx), y = g.y(n / g.nx);
            return (x >= x_min && x <= x_max && y >= y_min && y <= y_max) ? std::norm(f.samples[n]) : 0.0;
        };
        auto moment = [&](auto &&fn)
        { return pairwise_sum<double>(0, f.samples.size(), [&](std::size_t n)
                                      { return weight(n) * fn(g.x(n % g.nx) - g.cx, g.y(n / g.nx) - g.cy); }); };

        const double m0 = moment([](double, double)
                                 { return 1.0; });
        if (!(m0 > 0.0))
            throw Error(ErrorCode::validation, "power_moments: field has zero power in the evaluated region");

        const double mx = moment([](double x, double)
                                 { return x; }) / m0;
        const double my = moment([](double, double y)
                                 { return y; }) / m0;
        const double vx = moment([mx](double x, double)
                                 { return (x - mx) * (x - mx); }) / m0;
        const double vy = moment([my](double, double y)
                                 { return (y - my) * (y - my); }) / m0;

        PowerMoments m;
        m.power = m0 * g.cell_area();
        m.cx = g.cx + mx;
        m.cy = g.cy + my;
        m.sx = std::sqrt(vx);
        m.sy = std::sqrt(vy);
        return m;
    }

    double relative_l2(const ComplexField &a, const ComplexField &b)
    {
        require_same_grid(a.grid, b.grid, "relative_l2");
        const double num = pairwise_sum<double>(0, a.samples.size(), [&](std::size_t n)
                                                { return std::norm(a.samples[n] - b.samples[n]); });
        const double den = pairwise_sum<double>(0, b.samples.size(), [&](std::size_t n)
                                                { return std::norm(b.samples[n]); });
        if (!(den > 0.0))
            throw Error(ErrorCode::validation, "relative_l2: reference field is zero");
        return std::sqrt(num / den);
    }
}
