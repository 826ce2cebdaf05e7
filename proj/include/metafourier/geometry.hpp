// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The metafourier Authors
//
// Surface frames, link axes, direction cosines and the misalignment shear matrix.
//
// A link connects a source surface (axes x, y, normal z) with a destination surface (axes u, v,
// normal w) along the unit direction r pointing from the source center to the destination center.
// Under the Fresnel expansion the cross term of the path length reduces to the bilinear form
//      x^T B u,   with  B(i,j) = s_i . d_j - (r . s_i)(r . d_j)
// where s = (x, y) and d = (u, v) are the in-plane axes. The input-side shear that renders the
// kernel a plain Fourier kernel is T = B^T (x' = T x), the output-side shear is B itself. Both have
// the same determinant, whose absolute value equals |a_rz * a_rw| for any orthonormal frame pair.

#pragma once

#include <Eigen/Dense>

#include <array>

namespace metafourier
{
    using Vector3 = Eigen::Vector3d;
    using Matrix2 = Eigen::Matrix2d;
    using Vector2 = Eigen::Vector2d;

    // Tolerance for unit length, orthogonality and handedness checks
    inline constexpr double frame_tolerance = 1e-12;

    // Shear determinants below this value are flagged as degenerate
    inline constexpr double degenerate_det_threshold = 1e-6;

    // Throws a validation error if |‖v‖ - 1| >= frame_tolerance
    void require_unit(const Vector3 &v, const char *name);

    // Metasurface frame: origin in meters, orthonormal right-handed axes
    struct SurfaceFrame
    {
        Vector3 origin = Vector3::Zero();
        Vector3 axis_a = Vector3::UnitX();
        Vector3 axis_b = Vector3::UnitY();
        Vector3 normal = Vector3::UnitZ();

        // Builds a frame from its in-plane axes; the normal is axis_a x axis_b
        static SurfaceFrame from_axes(const Vector3 &origin, const Vector3 &axis_a, const Vector3 &axis_b);

        // Builds a frame from all three axes and validates them (left-handed sets are rejected)
        static SurfaceFrame from_axes(const Vector3 &origin, const Vector3 &axis_a, const Vector3 &axis_b,
                                      const Vector3 &normal);

        // Throws a validation error naming the violated invariant
        void validate() const;
    };

    // Link axis: unit direction from source center to destination center and the center distance
    struct LinkAxis
    {
        Vector3 direction = Vector3::UnitZ();
        double distance = 1.0;

        // Axis connecting two frame origins (throws if the origins coincide)
        static LinkAxis between(const SurfaceFrame &source, const SurfaceFrame &destination);

        void validate() const;
    };

    // All inner products needed by the Fresnel expansion of one link leg
    struct DirectionCosines
    {
        std::array<double, 3> axis_source{0.0, 0.0, 1.0};      // r . (x, y, z)  ->  a_rx, a_ry, a_rz
        std::array<double, 3> axis_destination{0.0, 0.0, 1.0}; // r . (u, v, w)  ->  a_ru, a_rv, a_rw
        std::array<std::array<double, 2>, 2> cross{{{1.0, 0.0}, {0.0, 1.0}}}; // cross[i][j] = s_i . d_j

        double a_rx() const { return axis_source[0]; }
        double a_ry() const { return axis_source[1]; }
        double a_rz() const { return axis_source[2]; }
        double a_ru() const { return axis_destination[0]; }
        double a_rv() const { return axis_destination[1]; }
        double a_rw() const { return axis_destination[2]; }

        // Plane-to-plane obliquity factor a_rz * a_rw
        double obliquity() const { return axis_source[2] * axis_destination[2]; }

        // True if the linear terms vanish and the in-plane axes are pairwise identical
        bool is_aligned(double tolerance = frame_tolerance) const;

        // Cosines of the same leg traversed from destination to source
        DirectionCosines reversed() const;

        // Cosines of two parallel, facing surfaces on a common normal axis
        static DirectionCosines aligned();
    };

    // Misalignment coupling matrix of one link leg
    struct ShearMatrix
    {
        Matrix2 coupling = Matrix2::Identity(); // B(i,j) = b_{s_i d_j}
        double det = 1.0;                       // |det B|
        bool degenerate = false;                // det < degenerate_det_threshold

        double b11() const { return coupling(0, 0); }
        double b12() const { return coupling(0, 1); }
        double b21() const { return coupling(1, 0); }
        double b22() const { return coupling(1, 1); }

        // Shear of the source coordinates, x' = T x (T = B^T)
        Matrix2 input_shear() const { return coupling.transpose(); }

        // Shear of the destination coordinates, u' = B u
        Matrix2 output_shear() const { return coupling; }

        bool is_identity(double tolerance = frame_tolerance) const;
        bool is_diagonal(double tolerance = frame_tolerance) const;

        static ShearMatrix identity() { return ShearMatrix{}; }
    };

    // Result of the determinant identity check
    struct DetIdentityReport
    {
        double det = 0.0;               // |det T|
        double obliquity_product = 0.0; // |a_rz * a_rw|
        double abs_diff = 0.0;
    };

    // Computes all pairwise dot products between the axis and the two frames
    DirectionCosines direction_cosines(const SurfaceFrame &source, const SurfaceFrame &destination,
                                       const LinkAxis &axis);

    // Builds the coupling matrix B(i,j) = a_{s_i d_j} - a_{r s_i} a_{r d_j} and its determinant
    ShearMatrix shear_matrix(const DirectionCosines &cosines);

    // Evaluates both sides of ‖T‖ = |a_rz a_rw|; never throws on a mismatch
    DetIdentityReport verify_det_identity(const SurfaceFrame &source, const SurfaceFrame &destination,
                                          const LinkAxis &axis);
}
