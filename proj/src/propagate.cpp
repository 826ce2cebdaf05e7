// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The metafourier Authors

#include "metafourier/propagate.hpp"
#include "metafourier/error.hpp"
#include "metafourier/metasurface.hpp"
#include "metafourier/summation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>
#include <vector>

namespace metafourier
{
    namespace
    {
        constexpr Complex j_unit{0.0, 1.0};

        // Sheared grids are sampled this many times finer than the mapped input spacing
        constexpr double shear_oversampling = 2.0;

        std::vector<double> nodes_x(const GridSpec &g)
        {
            std::vector<double> v(g.nx);
            for (std::size_t i = 0; i < g.nx; ++i)
                v[i] = g.x(i);
            return v;
        }

        std::vector<double> nodes_y(const GridSpec &g)
        {
            std::vector<double> v(g.ny);
            for (std::size_t j = 0; j < g.ny; ++j)
                v[j] = g.y(j);
            return v;
        }

        // kernel[m * n_in + i] = exp(j alpha s_i t_m)
        std::vector<Complex> kernel_1d(const std::vector<double> &in, const std::vector<double> &out, double alpha)
        {
            std::vector<Complex> k(in.size() * out.size());
            for (std::size_t m = 0; m < out.size(); ++m)
                for (std::size_t i = 0; i < in.size(); ++i)
                    k[m * in.size() + i] = std::polar(1.0, alpha * in[i] * out[m]);
            return k;
        }

        // Σ S(x, y) exp(j alpha (x u + y v)) dx dy as two 1-D passes
        ComplexField separable_transform(const ComplexField &in, double alpha, const GridSpec &out_grid)
        {
            const GridSpec &g = in.grid;
            const std::size_t nx = g.nx, ny = g.ny, mu = out_grid.nx, mv = out_grid.ny;
            const std::vector<Complex> kx = kernel_1d(nodes_x(g), nodes_x(out_grid), alpha);
            const std::vector<Complex> ky = kernel_1d(nodes_y(g), nodes_y(out_grid), alpha);

            // Pass 1 along x: partial[m * ny + j] = Σ_i S(i, j) kx(m, i)
            std::vector<Complex> partial(mu * ny);
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t mj = 0; mj < static_cast<std::ptrdiff_t>(mu * ny); ++mj)
            {
                const std::size_t m = static_cast<std::size_t>(mj) / ny, j = static_cast<std::size_t>(mj) % ny;
                const Complex *row = &in.samples[j * nx];
                const Complex *ker = &kx[m * nx];
                partial[static_cast<std::size_t>(mj)] = pairwise_sum<Complex>(0, nx, [&](std::size_t i)
                                                                              { return row[i] * ker[i]; });
            }

            // Pass 2 along y: out(m, n) = Σ_j partial(m, j) ky(n, j)
            ComplexField out(out_grid, in.stage);
            const double area = g.cell_area();
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t nm = 0; nm < static_cast<std::ptrdiff_t>(mu * mv); ++nm)
            {
                const std::size_t n = static_cast<std::size_t>(nm) / mu, m = static_cast<std::size_t>(nm) % mu;
                const Complex *col = &partial[m * ny];
                const Complex *ker = &ky[n * ny];
                out.samples[static_cast<std::size_t>(nm)] =
                    area * pairwise_sum<Complex>(0, ny, [&](std::size_t j)
                                                 { return col[j] * ker[j]; });
            }
            return out;
        }

        // Σ S(x) exp(j alpha x^T B u) dx dy evaluated node by node
        ComplexField direct_transform(const ComplexField &in, double alpha, const Matrix2 &b, const GridSpec &out_grid)
        {
            const GridSpec &g = in.grid;
            const std::vector<double> xs = nodes_x(g), ys = nodes_y(g);
            ComplexField out(out_grid, in.stage);
            const double area = g.cell_area();
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t q = 0; q < static_cast<std::ptrdiff_t>(out_grid.size()); ++q)
            {
                const std::size_t m = static_cast<std::size_t>(q) % out_grid.nx, n = static_cast<std::size_t>(q) / out_grid.nx;
                const Vector2 bu = b * Vector2(out_grid.x(m), out_grid.y(n));
                out.samples[static_cast<std::size_t>(q)] =
                    area * pairwise_sum<Complex>(0, g.size(), [&](std::size_t p)
                                                 {
                                                     const double x = xs[p % g.nx], y = ys[p / g.nx];
                                                     return in.samples[p] * std::polar(1.0, alpha * (x * bu.x() + y * bu.y())); });
            }
            return out;
        }

        // Second-order path difference d - R of the Fresnel expansion
        double fresnel_path(const DirectionCosines &c, double r, double x, double y, double u, double v)
        {
            const double src = c.a_rx() * x + c.a_ry() * y;
            const double dst = c.a_ru() * u + c.a_rv() * v;
            const double cross = c.cross[0][0] * x * u + c.cross[0][1] * x * v + c.cross[1][0] * y * u + c.cross[1][1] * y * v;
            const double q = x * x + y * y + u * u + v * v - 2.0 * cross;
            const double l = dst - src;
            return l + (q - l * l) / (2.0 * r);
        }

        // Exact path difference d - R and distance d, free of cancellation for d close to R
        void exact_path(const DirectionCosines &c, double r, double x, double y, double u, double v, double &delta,
                        double &d)
        {
            const double src = c.a_rx() * x + c.a_ry() * y;
            const double dst = c.a_ru() * u + c.a_rv() * v;
            const double cross = c.cross[0][0] * x * u + c.cross[0][1] * x * v + c.cross[1][0] * y * u + c.cross[1][1] * y * v;
            const double excess = 2.0 * r * (dst - src) + x * x + y * y + u * u + v * v - 2.0 * cross; // d^2 - R^2
            d = std::sqrt(r * r + excess);
            delta = excess / (d + r);
        }

        // Σ F(x) exp(-jk (d - R)) [/ d] dx dy node by node, without prefactors
        template <typename PathFn>
        ComplexField kernel_sum(const ComplexField &in, const GridSpec &out_grid, PathFn &&path)
        {
            const GridSpec &g = in.grid;
            const std::vector<double> xs = nodes_x(g), ys = nodes_y(g);
            ComplexField out(out_grid, in.stage);
            const double area = g.cell_area();
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t q = 0; q < static_cast<std::ptrdiff_t>(out_grid.size()); ++q)
            {
                const double u = out_grid.x(static_cast<std::size_t>(q) % out_grid.nx);
                const double v = out_grid.y(static_cast<std::size_t>(q) / out_grid.nx);
                out.samples[static_cast<std::size_t>(q)] =
                    area * pairwise_sum<Complex>(0, g.size(), [&](std::size_t p)
                                                 { return in.samples[p] * path(xs[p % g.nx], ys[p / g.nx], u, v); });
            }
            return out;
        }

        ComplexField conjugated(ComplexField f)
        {
            for (auto &s : f.samples)
                s = std::conj(s);
            return f;
        }

        ComplexField scaled(ComplexField f, Complex factor)
        {
            for (auto &s : f.samples)
                s *= factor;
            return f;
        }

        // Grid of the sheared coordinates x' = t x covering the support of the input
        GridSpec sheared_grid(const ComplexField &in, const Matrix2 &t, double wavelength, double distance,
                              const GridSpec &out_grid)
        {
            const GridSpec &g = in.grid;
            if (std::abs(t(0, 1)) < frame_tolerance && std::abs(t(1, 0)) < frame_tolerance)
            {
                // Diagonal shear: the mapped nodes form a grid themselves, so no interpolation is needed
                GridSpec s{g.nx, g.ny, std::abs(t(0, 0)) * g.dx, std::abs(t(1, 1)) * g.dy, t(0, 0) * g.cx, t(1, 1) * g.cy};
                if (s.dx <= max_input_spacing(wavelength, distance, s.reach_x(), out_grid.reach_x()) &&
                    s.dy <= max_input_spacing(wavelength, distance, s.reach_y(), out_grid.reach_y()))
                    return s;
            }

            // Bounding box of the nonzero samples, widened by one cell
            std::size_t i_lo = g.nx, i_hi = 0, j_lo = g.ny, j_hi = 0;
            for (std::size_t j = 0; j < g.ny; ++j)
                for (std::size_t i = 0; i < g.nx; ++i)
                    if (in.at(i, j) != Complex(0.0, 0.0))
                    {
                        i_lo = std::min(i_lo, i), i_hi = std::max(i_hi, i);
                        j_lo = std::min(j_lo, j), j_hi = std::max(j_hi, j);
                    }
            if (i_lo > i_hi)
                i_lo = 0, i_hi = g.nx - 1, j_lo = 0, j_hi = g.ny - 1;

            const double x_lo = g.x(i_lo) - g.dx, x_hi = g.x(i_hi) + g.dx;
            const double y_lo = g.y(j_lo) - g.dy, y_hi = g.y(j_hi) + g.dy;
            double u_lo = INFINITY, u_hi = -INFINITY, v_lo = INFINITY, v_hi = -INFINITY;
            for (double x : {x_lo, x_hi})
                for (double y : {y_lo, y_hi})
                {
                    const Vector2 p = t * Vector2(x, y);
                    u_lo = std::min(u_lo, p.x()), u_hi = std::max(u_hi, p.x());
                    v_lo = std::min(v_lo, p.y()), v_hi = std::max(v_hi, p.y());
                }

            const double cx = 0.5 * (u_lo + u_hi), cy = 0.5 * (v_lo + v_hi);
            const double half_x = 0.5 * (u_hi - u_lo), half_y = 0.5 * (v_hi - v_lo);
            double dx = std::max(std::abs(t(0, 0)) * g.dx, std::abs(t(0, 1)) * g.dy) / shear_oversampling;
            double dy = std::max(std::abs(t(1, 0)) * g.dx, std::abs(t(1, 1)) * g.dy) / shear_oversampling;
            dx = std::min(dx, 0.999 * max_input_spacing(wavelength, distance, std::abs(cx) + half_x, out_grid.reach_x()));
            dy = std::min(dy, 0.999 * max_input_spacing(wavelength, distance, std::abs(cy) + half_y, out_grid.reach_y()));
            const auto nx = static_cast<std::size_t>(std::ceil(2.0 * half_x / dx)) + 1;
            const auto ny = static_cast<std::size_t>(std::ceil(2.0 * half_y / dy)) + 1;
            return GridSpec{std::max<std::size_t>(nx, 2), std::max<std::size_t>(ny, 2), dx, dy, cx, cy};
        }

        // Signal-domain Fourier-kernel integral without the link prefactor
        ComplexField signal_integral(const ComplexField &in, double alpha, const ShearMatrix &shear,
                                     const GridSpec &out_grid, Backend backend, double wavelength, double distance)
        {
            if (backend == Backend::direct_quadrature)
                return direct_transform(in, alpha, shear.coupling, out_grid);

            if (shear.is_identity())
                return separable_transform(in, alpha, out_grid);

            // x' = T x with T = B^T turns x^T B u into x' . u; dx dy = dx' dy' / |det T|
            const Matrix2 t = shear.input_shear();
            const GridSpec s_grid = sheared_grid(in, t, wavelength, distance, out_grid);
            const ComplexField sheared = resample_affine(in, t, 1.0, s_grid);
            return scaled(separable_transform(sheared, alpha, out_grid), 1.0 / shear.det);
        }

        void check_fresnel_backend(const ComplexField &input, const PropagationSpec &spec, const GridSpec &out_grid)
        {
            check_sampling(input.grid, out_grid, spec.wavelength, spec.distance());
            if (spec.enforce_validity && spec.backend != Backend::exact_kernel)
                check_fresnel_validity(input.grid, out_grid, spec.distance());
            if (spec.backend == Backend::exact_kernel &&
                (input.grid.size() > exact_kernel_max_nodes || out_grid.size() > exact_kernel_max_nodes))
                throw Error(ErrorCode::cost_guard,
                            fmt::format("exact_kernel is limited to {} nodes per grid (got {} and {})",
                                        exact_kernel_max_nodes, input.grid.size(), out_grid.size()));
        }

        // Exact spherical-wave field propagation including all prefactors
        ComplexField exact_field(const ComplexField &in, const PropagationSpec &spec, const GridSpec &out_grid)
        {
            const double k = spec.wavenumber(), r = spec.distance();
            const DirectionCosines &c = spec.cosines;
            ComplexField out = kernel_sum(in, out_grid, [&](double x, double y, double u, double v)
                                          {
                                              double delta = 0.0, d = 0.0;
                                              exact_path(c, r, x, y, u, v, delta, d);
                                              return std::polar(r / d, -k * delta); });
            return scaled(std::move(out), link_prefactor(spec.wavelength, r) * spec.obliquity());
        }

        ComplexField field_forward(const ComplexField &input, const PropagationSpec &spec, const GridSpec &out_grid);

        ComplexField signal_forward(const ComplexField &input, const PropagationSpec &spec, const ShearMatrix &shear,
                                    const GridSpec &out_grid)
        {
            const double k = spec.wavenumber(), r = spec.distance();
            if (spec.backend == Backend::exact_kernel)
            {
                // Through the field domain: transmit mask, exact propagation, receive mask
                const PhaseProfile tx = phase_two_surface(SurfaceRole::tx, spec.cosines, k, r, input.grid);
                const PhaseProfile rx = phase_two_surface(SurfaceRole::rx, spec.cosines, k, r, out_grid);
                return apply_phase(exact_field(apply_phase(input, tx), spec, out_grid), rx);
            }
            const ComplexField integral =
                signal_integral(input, k / r, shear, out_grid, spec.backend, spec.wavelength, r);
            return scaled(integral, link_prefactor(spec.wavelength, r) * spec.obliquity());
        }

        ComplexField field_forward(const ComplexField &input, const PropagationSpec &spec, const GridSpec &out_grid)
        {
            const double k = spec.wavenumber(), r = spec.distance();
            switch (spec.backend)
            {
            case Backend::exact_kernel:
                return exact_field(input, spec, out_grid);
            case Backend::direct_quadrature:
            {
                const DirectionCosines &c = spec.cosines;
                ComplexField out = kernel_sum(input, out_grid, [&](double x, double y, double u, double v)
                                              { return std::polar(1.0, -k * fresnel_path(c, r, x, y, u, v)); });
                return scaled(std::move(out), link_prefactor(spec.wavelength, r) * spec.obliquity());
            }
            case Backend::separable_sheared_dft:
            default:
            {
                // The quadratic kernel factors into transmit mask x Fourier kernel x receive mask
                const PhaseProfile tx = phase_two_surface(SurfaceRole::tx, spec.cosines, k, r, input.grid);
                const PhaseProfile rx = phase_two_surface(SurfaceRole::rx, spec.cosines, k, r, out_grid);
                const ComplexField s_out = signal_forward(remove_phase(input, tx), spec, shear_matrix(spec.cosines), out_grid);
                return remove_phase(s_out, rx);
            }
            }
        }
    }

    std::string_view to_string(Backend backend) noexcept
    {
        switch (backend)
        {
        case Backend::direct_quadrature:
            return "direct_quadrature";
        case Backend::separable_sheared_dft:
            return "separable_sheared_dft";
        case Backend::exact_kernel:
            return "exact_kernel";
        }
        return "unknown";
    }

    Backend parse_backend(std::string_view name)
    {
        for (Backend b : {Backend::direct_quadrature, Backend::separable_sheared_dft, Backend::exact_kernel})
            if (name == to_string(b))
                return b;
        throw Error(ErrorCode::schema, fmt::format("unknown backend '{}'", name));
    }

    double PropagationSpec::wavenumber() const
    {
        return 2.0 * std::numbers::pi / wavelength;
    }

    void PropagationSpec::validate() const
    {
        if (!(wavelength > 0.0) || !std::isfinite(wavelength))
            throw Error(ErrorCode::validation, fmt::format("wavelength must be positive (got {})", wavelength));
        axis.validate();
        if (std::abs(obliquity()) > 1.0 + frame_tolerance)
            throw Error(ErrorCode::validation, fmt::format("|obliquity| = {} exceeds 1", std::abs(obliquity())));
    }

    PropagationSpec PropagationSpec::aligned(double wavelength, double distance, Backend backend)
    {
        PropagationSpec s;
        s.wavelength = wavelength;
        s.axis = LinkAxis{Vector3::UnitZ(), distance};
        s.cosines = DirectionCosines::aligned();
        s.backend = backend;
        s.validate();
        return s;
    }

    PropagationSpec PropagationSpec::between(const SurfaceFrame &source, const SurfaceFrame &destination,
                                             double wavelength, Backend backend)
    {
        PropagationSpec s;
        s.wavelength = wavelength;
        s.axis = LinkAxis::between(source, destination);
        s.cosines = direction_cosines(source, destination, s.axis);
        s.backend = backend;
        s.validate();
        return s;
    }

    Complex link_prefactor(double wavelength, double distance)
    {
        // e^{-jkR} with kR reduced exactly: kR = 2 pi (R / lambda)
        const double cycles = std::fmod(distance / wavelength, 1.0);
        return j_unit * std::polar(1.0, -2.0 * std::numbers::pi * cycles) / (wavelength * distance);
    }

    double max_input_spacing(double wavelength, double distance, double input_half, double output_half)
    {
        return wavelength * distance / (2.0 * (input_half + output_half));
    }

    void check_sampling(const GridSpec &input, const GridSpec &output, double wavelength, double distance)
    {
        const double max_dx = max_input_spacing(wavelength, distance, input.reach_x(), output.reach_x());
        const double max_dy = max_input_spacing(wavelength, distance, input.reach_y(), output.reach_y());
        if (input.dx > max_dx * (1.0 + 1e-12) || input.dy > max_dy * (1.0 + 1e-12))
            throw Error(ErrorCode::sampling,
                        fmt::format("input spacing ({:.6g}, {:.6g}) m aliases the Fresnel kernel; required "
                                    "dx <= {:.6g} m, dy <= {:.6g} m (lambda R / (2 (X_half + U_half)))",
                                    input.dx, input.dy, max_dx, max_dy));
    }

    double fresnel_ratio(const GridSpec &input, const GridSpec &output, double distance)
    {
        return std::max(input.reach_x() + output.reach_x(), input.reach_y() + output.reach_y()) / distance;
    }

    void check_fresnel_validity(const GridSpec &input, const GridSpec &output, double distance)
    {
        const double ratio = fresnel_ratio(input, output, distance);
        if (ratio >= fresnel_ratio_limit)
            throw Error(ErrorCode::sampling,
                        fmt::format("apertures leave the Fresnel regime: max |x - u| / R = {:.4g} >= {}", ratio,
                                    fresnel_ratio_limit));
    }

    ComplexField propagate_field(const ComplexField &input, const PropagationSpec &spec, const GridSpec &out_grid,
                                 std::string stage)
    {
        spec.validate();
        input.validate();
        out_grid.validate();
        check_fresnel_backend(input, spec, out_grid);

        ComplexField out = spec.conjugate ? conjugated(field_forward(conjugated(input), spec, out_grid))
                                          : field_forward(input, spec, out_grid);
        out.stage = std::move(stage);
        return out;
    }

    ComplexField propagate_signal(const ComplexField &input, const PropagationSpec &spec, const ShearMatrix &shear,
                                  const GridSpec &out_grid, std::string stage)
    {
        spec.validate();
        input.validate();
        out_grid.validate();
        if (shear.degenerate)
            throw Error(ErrorCode::conditioning,
                        fmt::format("shear determinant {:.3e} < {:.0e}; the link is near-degenerate", shear.det,
                                    degenerate_det_threshold));
        check_fresnel_backend(input, spec, out_grid);

        ComplexField out = spec.conjugate ? conjugated(signal_forward(conjugated(input), spec, shear, out_grid))
                                          : signal_forward(input, spec, shear, out_grid);
        out.stage = std::move(stage);
        return out;
    }

    GridSpec reciprocal_grid(const GridSpec &input, double wavelength, double distance)
    {
        input.validate();
        GridSpec g{input.nx, input.ny, wavelength * distance / input.extent_x(),
                   wavelength * distance / input.extent_y(), 0.0, 0.0};
        g.validate();
        return g;
    }

    DoubleTransform double_transform(const ComplexField &source, double distance1, double distance2,
                                     const PropagationSpec &spec)
    {
        source.validate();
        if (!spec.cosines.is_aligned())
            throw Error(ErrorCode::validation, "double transform requires an aligned link");
        if (!(distance1 > 0.0) || !(distance2 > 0.0))
            throw Error(ErrorCode::validation, "double transform distances must be positive");
        if (spec.backend == Backend::exact_kernel || spec.conjugate)
            throw Error(ErrorCode::validation, "double transform is defined for the forward Fresnel backends only");

        const double lambda = spec.wavelength, m = distance2 / distance1;
        const GridSpec &g = source.grid;
        const GridSpec relay_grid = reciprocal_grid(g, lambda, distance1);
        const GridSpec image_grid{g.nx, g.ny, m * g.dx, m * g.dy, -m * g.cx, -m * g.cy};

        // Signal-domain Nyquist rule on node extents; the reciprocal grid satisfies it by construction
        for (const auto &[in, out, r] : {std::tuple{g, relay_grid, distance1}, std::tuple{relay_grid, image_grid, distance2}})
        {
            const double max_dx = lambda * r / (2.0 * out.node_half_x()), max_dy = lambda * r / (2.0 * out.node_half_y());
            if (in.dx > max_dx * (1.0 + 1e-12) || in.dy > max_dy * (1.0 + 1e-12))
                throw Error(ErrorCode::sampling,
                            fmt::format("double transform: spacing ({:.6g}, {:.6g}) m exceeds lambda R / (2 U_half) "
                                        "= ({:.6g}, {:.6g}) m",
                                        in.dx, in.dy, max_dx, max_dy));
        }

        const ShearMatrix identity = ShearMatrix::identity();
        DoubleTransform t;
        t.relay = scaled(signal_integral(source, spec.wavenumber() / distance1, identity, relay_grid, spec.backend, lambda, distance1),
                         link_prefactor(lambda, distance1));
        t.relay.stage = "S2";
        t.image = scaled(signal_integral(t.relay, spec.wavenumber() / distance2, identity, image_grid, spec.backend, lambda, distance2),
                         link_prefactor(lambda, distance2));
        t.image.stage = "S3";
        return t;
    }

    ComplexField roundtrip_double_ft(const ComplexField &source, double distance1, double distance2,
                                     const PropagationSpec &spec)
    {
        return double_transform(source, distance1, distance2, spec).image;
    }
}
