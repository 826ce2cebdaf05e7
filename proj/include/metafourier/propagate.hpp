// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The metafourier Authors
//
// Fresnel propagation between two surfaces, in the field domain and in the signal domain.
//
// Field domain (F on the source surface, F_out on the destination surface):
//      F_out(u) = j e^{-jkR} / (lambda R) * a_rz a_rw * ∬ F(x) e^{-jk (d(x, u) - R)} dx dy
// where d - R is expanded to second order. Removing the transmit and receive phase profiles turns
// the kernel into the bilinear Fourier kernel of the signal domain:
//      S_out(u) = j e^{-jkR} / (lambda R) * a_rz a_rw * ∬ S(x) e^{j (k / R) x^T B u} dx dy
// with B the coupling matrix of the leg (see geometry.hpp).
//
// Backends
//   direct_quadrature      O(N^4) Riemann sum of the full kernel; reference for the others
//   separable_sheared_dft  input shear x' = B^T x (exact for identity and diagonal B, bilinear
//                          resampling otherwise) followed by two separable 1-D kernel passes, O(N^3)
//   exact_kernel           spherical-wave kernel e^{-jkd} / d without the Fresnel expansion;
//                          validation only, limited to 128^2 nodes per grid
//
// Every output node is accumulated with the same fixed-order pairwise sum; the optional OpenMP
// loops only distribute output nodes, so results do not depend on the thread count.

#pragma once

#include "metafourier/field.hpp"
#include "metafourier/geometry.hpp"

#include <cstddef>
#include <string>
#include <string_view>

namespace metafourier
{
    enum class Backend
    {
        direct_quadrature,
        separable_sheared_dft,
        exact_kernel
    };

    std::string_view to_string(Backend backend) noexcept;

    // Parses "direct_quadrature", "separable_sheared_dft" or "exact_kernel"; throws a schema error otherwise
    Backend parse_backend(std::string_view name);

    // Largest admissible (|x| + |u|) / R per axis for the Fresnel backends
    inline constexpr double fresnel_ratio_limit = 0.2;

    // Cost guard of the exact kernel: nodes per grid
    inline constexpr std::size_t exact_kernel_max_nodes = 128 * 128;

    struct PropagationSpec
    {
        double wavelength = 0.01; // lambda in meters
        LinkAxis axis;            // direction and center distance R
        DirectionCosines cosines; // cosines of this leg
        Backend backend = Backend::separable_sheared_dft;
        bool enforce_validity = true; // reject apertures outside the Fresnel regime
        bool conjugate = false;       // use the conjugate kernel (adjoint, for back-propagation)

        double wavenumber() const;
        double distance() const { return axis.distance; }
        double obliquity() const { return cosines.obliquity(); }

        // Throws a validation error naming the violated invariant
        void validate() const;

        // Spec of a leg between two facing, parallel surfaces
        static PropagationSpec aligned(double wavelength, double distance,
                                       Backend backend = Backend::separable_sheared_dft);

        // Spec of a leg between two frames; the axis joins the frame origins
        static PropagationSpec between(const SurfaceFrame &source, const SurfaceFrame &destination,
                                       double wavelength, Backend backend = Backend::separable_sheared_dft);
    };

    // Constant link prefactor j e^{-jkR} / (lambda R); the phase is reduced exactly modulo 2 pi
    Complex link_prefactor(double wavelength, double distance);

    // Largest input spacing allowed by the anti-aliasing rule, lambda R / (2 (X_half + U_half))
    double max_input_spacing(double wavelength, double distance, double input_half, double output_half);

    // Throws a sampling error containing the required spacing if the input grid violates the rule
    void check_sampling(const GridSpec &input, const GridSpec &output, double wavelength, double distance);

    // max over axes of (reach_in + reach_out) / R computed on node extents
    double fresnel_ratio(const GridSpec &input, const GridSpec &output, double distance);

    // Throws a sampling error if fresnel_ratio >= fresnel_ratio_limit
    void check_fresnel_validity(const GridSpec &input, const GridSpec &output, double distance);

    // Field-domain propagation
    ComplexField propagate_field(const ComplexField &input, const PropagationSpec &spec, const GridSpec &out_grid,
                                 std::string stage = "F_out");

    // Signal-domain propagation with the coupling matrix T of the leg
    ComplexField propagate_signal(const ComplexField &input, const PropagationSpec &spec, const ShearMatrix &shear,
                                  const GridSpec &out_grid, std::string stage = "S_out");

    // Relay grid for which the discrete double transform is an exact inversion:
    // same node count, spacing lambda R / (n d), centered at the origin
    GridSpec reciprocal_grid(const GridSpec &input, double wavelength, double distance);

    struct DoubleTransform
    {
        ComplexField relay; // S2 on the reciprocal relay grid
        ComplexField image; // S3 on the magnified output grid
    };

    // Aligned source -> relay -> receiver transform. The output grid has spacing (R2 / R1) d and is
    // centered on the predicted image of the input center.
    DoubleTransform double_transform(const ComplexField &source, double distance1, double distance2,
                                     const PropagationSpec &spec);

    // Image S3 of the aligned double transform (see double_transform)
    ComplexField roundtrip_double_ft(const ComplexField &source, double distance1, double distance2,
                                     const PropagationSpec &spec);
}
