// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The metafourier Authors
//
// Closed-form reference solutions of the aligned signal-domain transforms. All oracles are
// pointwise evaluators so they can be sampled on any grid without interpolation.
//
// Single transform (distance R, beta = 2 pi / (lambda R)):
//      S2(u) = j e^{-jkR} / (lambda R) ∬ S1(x) e^{j beta (x u + y v)} dx dy
// Double transform (R1 then R2):
//      S3(u) = -(R1 / R2) e^{-jk (R1 + R2)} S1(-(R1 / R2) u)

#pragma once

#include "metafourier/field.hpp"

namespace metafourier::oracle
{
    // sinc(t) = sin(pi t) / (pi t)
    double sinc(double t);

    // Transform of a unit-power rect at (u, v)
    Complex rect_ft(const RectSignal &rect, double wavelength, double distance, double u, double v);

    // Inverted, magnified image of a rect after two transforms
    Complex rect_double_ft(const RectSignal &rect, double wavelength, double distance1, double distance2, double u,
                           double v);

    // Transform of a unit-power Gaussian at (u, v)
    Complex gauss_ft(const GaussianSignal &gauss, double wavelength, double distance, double u, double v);

    // Image of a Gaussian after two transforms
    Complex gauss_double_ft(const GaussianSignal &gauss, double wavelength, double distance1, double distance2,
                            double u, double v);

    // Transform of any signal, summing weighted rect/Gaussian terms by linearity
    Complex signal_ft(const SignalSpec &spec, double wavelength, double distance, double u, double v);

    // Double transform of any signal
    Complex signal_double_ft(const SignalSpec &spec, double wavelength, double distance1, double distance2, double u,
                             double v);

    // ∫_{-a}^{a} sinc^2(t) dt by adaptive Gauss-Kronrod quadrature (absolute accuracy 1e-10).
    // For a = +inf returns 1. Throws a validation error for negative or NaN a.
    double sinc_power_capture(double half_width_in_zero_units);

    // Samples an oracle on a grid into a field
    template <typename Fn>
    ComplexField sample(const GridSpec &grid, Fn &&fn, std::string stage = "oracle")
    {
        ComplexField f(grid, std::move(stage));
        for (std::size_t j = 0; j < grid.ny; ++j)
            for (std::size_t i = 0; i < grid.nx; ++i)
                f.at(i, j) = fn(grid.x(i), grid.y(j));
        return f;
    }
}
