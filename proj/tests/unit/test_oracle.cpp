// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The metafourier Authors
//
// The oracles are checked against independent references first: the sine integral from GSL, brute
// force quadrature of the transform integral, and hand-evaluated spot values.

#include "metafourier/error.hpp"
#include "metafourier/oracle.hpp"
#include "metafourier/propagate.hpp"

#include <gsl/gsl_sf_expint.h>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace metafourier;

namespace
{
    const double pi = std::numbers::pi;

    // ∫_{-a}^{a} sinc^2 = (2 / pi) (Si(2 pi a) - sin^2(pi a) / (pi a))
    double capture_reference(double a)
    {
        const double s = std::sin(pi * a);
        return 2.0 / pi * (gsl_sf_Si(2.0 * pi * a) - s * s / (pi * a));
    }

    // Midpoint rule of pref ∬ S(x) e^{j 2 pi (x u + y v) / (lambda R)} over [-w, w]^2
    Complex brute_force_ft(const SignalSpec &spec, double lambda, double r, double u, double v, double w, int n)
    {
        const double d = 2.0 * w / n, lr = lambda * r;
        Complex acc = 0.0;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
            {
                const double x = -w + (i + 0.5) * d, y = -w + (j + 0.5) * d;
                acc += evaluate(spec, x, y) * std::polar(1.0, 2.0 * pi * (x * u + y * v) / lr);
            }
        return link_prefactor(lambda, r) * acc * d * d;
    }
}

TEST(Oracle, SincCaptureMatchesSineIntegral)
{
    for (double a : {0.25, 0.5, 1.0, 1.7, 2.5, 4.0, 10.0, 20.0})
        EXPECT_NEAR(oracle::sinc_power_capture(a), capture_reference(a), 1e-10) << "a = " << a;
}

TEST(Oracle, SincCaptureSpotValues)
{
    EXPECT_NEAR(oracle::sinc_power_capture(1.0), 0.90282333, 1e-8);
    const double c = oracle::sinc_power_capture(2.5);
    EXPECT_NEAR(c * c, 0.91998288, 1e-8);
    EXPECT_DOUBLE_EQ(oracle::sinc_power_capture(0.0), 0.0);
    EXPECT_DOUBLE_EQ(oracle::sinc_power_capture(INFINITY), 1.0);
    EXPECT_THROW(oracle::sinc_power_capture(-1.0), Error);
}

TEST(Oracle, SincCaptureIsMonotone)
{
    double last = 0.0;
    for (double a = 0.1; a < 30.0; a += 0.37)
    {
        const double c = oracle::sinc_power_capture(a);
        EXPECT_GT(c, last);
        EXPECT_LT(c, 1.0);
        last = c;
    }
}

TEST(Oracle, RectTransformSpotValues)
{
    const RectSignal rect{0.2, 0.2, 0.0, 0.0};
    EXPECT_NEAR(std::abs(oracle::rect_ft(rect, 0.01, 10.0, 0.0, 0.0)), 2.0, 1e-14);
    EXPECT_NEAR(std::abs(oracle::rect_ft(rect, 0.01, 10.0, 0.5, 0.0)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(oracle::rect_ft(rect, 0.01, 10.0, 0.0, -0.5)), 0.0, 1e-14);

    // Offset source: phase ramp (k / R) x0 in u
    const RectSignal shifted{0.2, 0.2, 0.2, 0.0};
    const Complex a = oracle::rect_ft(shifted, 0.01, 10.0, 0.0, 0.0);
    const Complex b = oracle::rect_ft(shifted, 0.01, 10.0, 1e-3, 0.0);
    EXPECT_NEAR(std::arg(b / a) / 1e-3, 12.566370614, 1e-5);
}

TEST(Oracle, RectTransformMatchesQuadrature)
{
    const SignalSpec rect = SignalSpec::rect(0.2, 0.1, 0.03, -0.02);
    for (const auto &[u, v] : {std::pair{0.0, 0.0}, {0.21, -0.4}, {-0.7, 0.9}})
    {
        const Complex ref = brute_force_ft(rect, 0.01, 10.0, u, v, 0.25, 1000);
        const Complex got = oracle::signal_ft(rect, 0.01, 10.0, u, v);
        EXPECT_LT(std::abs(got - ref), 2e-3 * std::abs(oracle::signal_ft(rect, 0.01, 10.0, 0, 0)));
    }
}

TEST(Oracle, GaussTransformMatchesQuadrature)
{
    const SignalSpec g = SignalSpec::gaussian(0.05, 0.03, 0.1, 0.05);
    for (const auto &[u, v] : {std::pair{0.0, 0.0}, {0.1, -0.2}, {-0.3, 0.25}})
    {
        const Complex ref = brute_force_ft(g, 0.01, 10.0, u, v, 0.6, 600);
        EXPECT_LT(std::abs(oracle::signal_ft(g, 0.01, 10.0, u, v) - ref), 1e-9) << u << "," << v;
    }
}

TEST(Oracle, GaussTransformSpotValues)
{
    const GaussianSignal g{0.05, 0.05, 0.0, 0.0};
    EXPECT_NEAR(std::norm(oracle::gauss_ft(g, 0.01, 10.0, 0.0, 0.0)), 6.28318531, 1e-7);

    // |S2|^2 ∝ exp(-2 beta^2 sigma^2 u^2): standard deviation lambda R / (4 pi sigma)
    const double std_u = 0.1 / (4.0 * pi * 0.05);
    EXPECT_NEAR(std_u, 0.159154943, 1e-9);
    const double ratio = std::norm(oracle::gauss_ft(g, 0.01, 10.0, std_u, 0.0)) / std::norm(oracle::gauss_ft(g, 0.01, 10.0, 0.0, 0.0));
    EXPECT_NEAR(ratio, std::exp(-0.5), 1e-12);
}

TEST(Oracle, DoubleTransformImage)
{
    const RectSignal rect{0.2, 0.2, 0.2, 0.2};
    // Image of half size at (-0.1, -0.1), peak |S3|^2 = (R1 / R2)^2 / (Lx Ly)
    EXPECT_NEAR(std::norm(oracle::rect_double_ft(rect, 0.01, 10.0, 5.0, -0.1, -0.1)), 100.0, 1e-10);
    EXPECT_DOUBLE_EQ(std::abs(oracle::rect_double_ft(rect, 0.01, 10.0, 5.0, -0.151, -0.1)), 0.0);
    EXPECT_GT(std::abs(oracle::rect_double_ft(rect, 0.01, 10.0, 5.0, -0.149, -0.1)), 0.0);

    const GaussianSignal g{0.05, 0.05, 0.2, -0.2};
    const auto image = oracle::sample(GridSpec::covering(200, 0.5), [&](double u, double v)
                                      { return oracle::gauss_double_ft(g, 0.01, 10.0, 5.0, u, v); });
    const PowerMoments m = power_moments(image);
    EXPECT_NEAR(m.power, 1.0, 1e-9);
    EXPECT_NEAR(m.cx, -0.1, 1e-9);
    EXPECT_NEAR(m.cy, 0.1, 1e-9);
    EXPECT_NEAR(m.sx, 0.025, 1e-6);
}

TEST(Oracle, SuperpositionIsLinear)
{
    const SignalSpec a = SignalSpec::gaussian(0.05, 0.05, 0.2, 0.2);
    const SignalSpec b = SignalSpec::rect(0.2, 0.2, -0.1, 0.0);
    const SignalSpec sum = SignalSpec::superposition({{0.3, a}, {-0.7, b}});
    const Complex expect = 0.3 * oracle::signal_ft(a, 0.01, 10.0, 0.1, 0.2) - 0.7 * oracle::signal_ft(b, 0.01, 10.0, 0.1, 0.2);
    EXPECT_LT(std::abs(oracle::signal_ft(sum, 0.01, 10.0, 0.1, 0.2) - expect), 1e-13);
}

TEST(Oracle, FieldsHaveUnitPower)
{
    const GridSpec rx = GridSpec::covering(400, 1.0);
    const auto f = oracle::sample(rx, [](double u, double v)
                                  { return oracle::signal_ft(SignalSpec::gaussian(0.05, 0.05), 0.01, 10.0, u, v); });
    EXPECT_NEAR(total_power(f), 1.0, 1e-6);
}
