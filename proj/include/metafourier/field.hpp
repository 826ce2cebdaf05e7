// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The metafourier Authors
//
// Sampled complex fields on uniform grids and the analytic source signals.
//
// Grid nodes are cell centered: x_i = cx + (i - (nx - 1) / 2) dx, i = 0 .. nx-1, so the aperture
// [cx - nx dx / 2, cx + nx dx / 2] is tiled exactly by nx cells. Samples are stored row-major with
// x running fastest: samples[j * nx + i] is the value at (x_i, y_j). Amplitudes use continuous
// normalization (units 1/m), so the Riemann sum of |S|^2 dx dy is the dimensionless power.

#pragma once

#include "metafourier/geometry.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace metafourier
{
    using Complex = std::complex<double>;

    // Minimum number of samples across the smallest signal feature
    inline constexpr double min_samples_per_feature = 8.0;

    struct GridSpec
    {
        std::size_t nx = 2, ny = 2; // sample counts
        double dx = 1.0, dy = 1.0;  // spacing in meters
        double cx = 0.0, cy = 0.0;  // aperture center in meters

        // Grid with n x n nodes of the given spacing
        static GridSpec square(std::size_t n, double spacing, double cx = 0.0, double cy = 0.0);

        // Grid with n x n cells tiling [c - half_width, c + half_width]
        static GridSpec covering(std::size_t n, double half_width, double cx = 0.0, double cy = 0.0);

        double x(std::size_t i) const { return cx + (static_cast<double>(i) - 0.5 * static_cast<double>(nx - 1)) * dx; }
        double y(std::size_t j) const { return cy + (static_cast<double>(j) - 0.5 * static_cast<double>(ny - 1)) * dy; }

        std::size_t size() const { return nx * ny; }
        double cell_area() const { return dx * dy; }
        double extent_x() const { return static_cast<double>(nx) * dx; } // A
        double extent_y() const { return static_cast<double>(ny) * dy; } // B
        double area() const { return extent_x() * extent_y(); }          // M

        // Distance from the center to the outermost node
        double node_half_x() const { return 0.5 * static_cast<double>(nx - 1) * dx; }
        double node_half_y() const { return 0.5 * static_cast<double>(ny - 1) * dy; }

        // Largest |x| and |y| over all nodes (includes the center offset)
        double reach_x() const { return std::abs(cx) + node_half_x(); }
        double reach_y() const { return std::abs(cy) + node_half_y(); }

        // Throws a validation error naming the violated invariant
        void validate() const;

        // Same node set within a relative tolerance of 1e-12
        bool matches(const GridSpec &other) const;
    };

    struct ComplexField
    {
        GridSpec grid;
        std::vector<Complex> samples; // row-major, x fastest
        std::string stage;            // S1, F1, F2, G2, S2, G3, S3, S'1, S'3, ...

        ComplexField() = default;
        ComplexField(const GridSpec &grid, std::string stage);
        ComplexField(const GridSpec &grid, std::vector<Complex> samples, std::string stage);

        Complex &at(std::size_t i, std::size_t j) { return samples[j * grid.nx + i]; }
        const Complex &at(std::size_t i, std::size_t j) const { return samples[j * grid.nx + i]; }

        // Throws if the sample count does not match the grid or a sample is not finite
        void validate() const;
    };

    struct RectSignal
    {
        double lx = 1.0, ly = 1.0; // widths in meters
        double x0 = 0.0, y0 = 0.0; // center in meters
    };

    struct GaussianSignal
    {
        double sigma_x = 1.0, sigma_y = 1.0; // standard deviations of |S|^2 in meters
        double x0 = 0.0, y0 = 0.0;           // mean in meters
    };

    struct WeightedSignal;

    // Rect, Gaussian, or a weighted superposition of signals
    struct SignalSpec
    {
        std::variant<RectSignal, GaussianSignal, std::vector<WeightedSignal>> shape;

        static SignalSpec rect(double lx, double ly, double x0 = 0.0, double y0 = 0.0);
        static SignalSpec gaussian(double sigma_x, double sigma_y, double x0 = 0.0, double y0 = 0.0);
        static SignalSpec superposition(std::vector<WeightedSignal> terms);

        // Throws a validation error for non-positive widths or non-finite weights
        void validate() const;
    };

    struct WeightedSignal
    {
        double weight = 1.0;
        SignalSpec signal;
    };

    // Analytic amplitude at one point. Rect boundaries take half amplitude per dimension.
    double evaluate(const SignalSpec &spec, double x, double y);

    // Throws a resolution error unless every feature of the signal spans at least
    // min_samples_per_feature steps of the grid mapped through to_signal
    void check_resolution(const SignalSpec &spec, const GridSpec &grid, const Matrix2 &to_signal = Matrix2::Identity());

    // Samples the signal on the grid; throws a resolution error if it is under-resolved
    ComplexField synthesize(const SignalSpec &spec, const GridSpec &grid, std::string stage = "S1");

    // Samples factor * spec(to_signal * x) on the grid. This builds a sheared image of a signal
    // without interpolation; the resolution rule is checked in the signal's own coordinates.
    ComplexField synthesize_mapped(const SignalSpec &spec, const GridSpec &grid, const Matrix2 &to_signal,
                                   double factor, std::string stage = "S1");

    // Riemann sum of |s|^2 dx dy with pairwise accumulation
    double total_power(const ComplexField &f);

    struct PhaseProfile;

    // Multiplies every sample by exp(j theta); throws a grid_mismatch error for foreign grids
    ComplexField apply_phase(const ComplexField &f, const PhaseProfile &theta);

    // Multiplies every sample by exp(-j theta), undoing apply_phase
    ComplexField remove_phase(const ComplexField &f, const PhaseProfile &theta);

    // output(x') = factor * input(map^-1 x') by bilinear interpolation, 0 outside the input grid.
    // Throws a conditioning error if |det map| <= 1e-6.
    ComplexField resample_affine(const ComplexField &f, const Matrix2 &map, double factor, const GridSpec &out_grid);

    // Bilinear interpolation of the field at one point, 0 outside the grid
    Complex interpolate(const ComplexField &f, double x, double y);

    struct PowerMoments
    {
        double power = 0.0;      // Σ |s|^2 dx dy over the evaluated nodes
        double cx = 0.0, cy = 0.0; // centroid in meters
        double sx = 0.0, sy = 0.0; // standard deviation in meters
    };

    // First and second moments of |s|^2 treated as a density; throws if the field is zero
    PowerMoments power_moments(const ComplexField &f);

    // Same, restricted to nodes inside [x_min, x_max] x [y_min, y_max]
    PowerMoments power_moments(const ComplexField &f, double x_min, double x_max, double y_min, double y_max);

    // ‖a - b‖ / ‖b‖ over all nodes; throws a grid_mismatch error for different grids
    double relative_l2(const ComplexField &a, const ComplexField &b);
}
