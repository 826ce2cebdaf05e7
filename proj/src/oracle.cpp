// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The metafourier Authors

#include "metafourier/oracle.hpp"
#include "metafourier/error.hpp"
#include "metafourier/propagate.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

namespace metafourier::oracle
{
    namespace
    {
        constexpr double pi = std::numbers::pi;

        // -(R1 / R2) e^{-jk (R1 + R2)}; the phase is reduced exactly modulo 2 pi
        Complex double_ft_prefactor(double wavelength, double distance1, double distance2)
        {
            const double cycles = std::fmod(distance1 / wavelength, 1.0) + std::fmod(distance2 / wavelength, 1.0);
            return -(distance1 / distance2) * std::polar(1.0, -2.0 * pi * cycles);
        }

        // Oracles assume the geometric parameters are sane; they are not validated per point
        void require_positive(double wavelength, double distance)
        {
            if (!(wavelength > 0.0) || !(distance > 0.0))
                throw Error(ErrorCode::validation, "oracle: wavelength and distance must be positive");
        }
    }

    double sinc(double t)
    {
        const double x = pi * t;
        if (std::abs(x) < 1e-8)
            return 1.0 - x * x / 6.0;
        return std::sin(x) / x;
    }

    Complex rect_ft(const RectSignal &rect, double wavelength, double distance, double u, double v)
    {
        require_positive(wavelength, distance);
        const double lr = wavelength * distance;
        const double beta = 2.0 * pi / lr;
        return link_prefactor(wavelength, distance) * std::sqrt(rect.lx * rect.ly) *
               std::polar(1.0, beta * (u * rect.x0 + v * rect.y0)) * sinc(rect.lx * u / lr) * sinc(rect.ly * v / lr);
    }

    Complex rect_double_ft(const RectSignal &rect, double wavelength, double distance1, double distance2, double u,
                           double v)
    {
        require_positive(wavelength, distance1);
        require_positive(wavelength, distance2);
        const double m = distance1 / distance2;
        return double_ft_prefactor(wavelength, distance1, distance2) * evaluate(SignalSpec{rect}, -m * u, -m * v);
    }

    Complex gauss_ft(const GaussianSignal &g, double wavelength, double distance, double u, double v)
    {
        require_positive(wavelength, distance);
        const double beta = 2.0 * pi / (wavelength * distance);
        const double amplitude = 4.0 * pi * g.sigma_x * g.sigma_y / std::sqrt(2.0 * pi * g.sigma_x * g.sigma_y);
        const double envelope = std::exp(-beta * beta * (g.sigma_x * g.sigma_x * u * u + g.sigma_y * g.sigma_y * v * v));
        return link_prefactor(wavelength, distance) * amplitude * envelope *
               std::polar(1.0, beta * (u * g.x0 + v * g.y0));
    }

    Complex gauss_double_ft(const GaussianSignal &g, double wavelength, double distance1, double distance2, double u,
                            double v)
    {
        require_positive(wavelength, distance1);
        require_positive(wavelength, distance2);
        const double m = distance1 / distance2;
        return double_ft_prefactor(wavelength, distance1, distance2) * evaluate(SignalSpec{g}, -m * u, -m * v);
    }

    Complex signal_ft(const SignalSpec &spec, double wavelength, double distance, double u, double v)
    {
        return std::visit(
            [&](const auto &s) -> Complex
            {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, RectSignal>)
                    return rect_ft(s, wavelength, distance, u, v);
                else if constexpr (std::is_same_v<S, GaussianSignal>)
                    return gauss_ft(s, wavelength, distance, u, v);
                else
                {
                    Complex acc = 0.0;
                    for (const auto &term : s)
                        acc += term.weight * signal_ft(term.signal, wavelength, distance, u, v);
                    return acc;
                }
            },
            spec.shape);
    }

    Complex signal_double_ft(const SignalSpec &spec, double wavelength, double distance1, double distance2, double u,
                             double v)
    {
        require_positive(wavelength, distance1);
        require_positive(wavelength, distance2);
        const double m = distance1 / distance2;
        return double_ft_prefactor(wavelength, distance1, distance2) * evaluate(spec, -m * u, -m * v);
    }

    double sinc_power_capture(double a)
    {
        if (std::isnan(a) || a < 0.0)
            throw Error(ErrorCode::validation, "sinc_power_capture: half width must be >= 0");
        if (std::isinf(a))
            return 1.0;

        // Integrate lobe by lobe (between consecutive zeros) so each panel is smooth
        using quadrature = boost::math::quadrature::gauss_kronrod<double, 31>;
        auto f = [](double t)
        { const double s = sinc(t); return s * s; };
        double total = 0.0;
        for (double lo = 0.0; lo < a; lo += 1.0)
        {
            const double hi = std::min(lo + 1.0, a);
            total += quadrature::integrate(f, lo, hi, 15, 1e-14);
        }
        return 2.0 * total;
    }
}
