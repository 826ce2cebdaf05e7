// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The metafourier Authors

#include "metafourier/geometry.hpp"
#include "metafourier/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace metafourier
{
    void require_unit(const Vector3 &v, const char *name)
    {
        if (!v.allFinite())
            throw Error(ErrorCode::validation, fmt::format("{} has non-finite components", name));
        const double deviation = std::abs(v.norm() - 1.0);
        if (deviation >= frame_tolerance)
            throw Error(ErrorCode::validation,
                        fmt::format("{} is not a unit vector (| |v| - 1 | = {:.3e})", name, deviation));
    }

    SurfaceFrame SurfaceFrame::from_axes(const Vector3 &origin, const Vector3 &axis_a, const Vector3 &axis_b)
    {
        SurfaceFrame frame{origin, axis_a, axis_b, axis_a.cross(axis_b)};
        frame.validate();
        return frame;
    }

    SurfaceFrame SurfaceFrame::from_axes(const Vector3 &origin, const Vector3 &axis_a, const Vector3 &axis_b,
                                         const Vector3 &normal)
    {
        SurfaceFrame frame{origin, axis_a, axis_b, normal};
        frame.validate();
        return frame;
    }

    void SurfaceFrame::validate() const
    {
        if (!origin.allFinite())
            throw Error(ErrorCode::validation, "frame origin has non-finite components");
        require_unit(axis_a, "axis_a");
        require_unit(axis_b, "axis_b");

        const double dot_ab = axis_a.dot(axis_b);
        if (std::abs(dot_ab) >= frame_tolerance)
            throw Error(ErrorCode::validation,
                        fmt::format("axis_a and axis_b are not orthogonal (a.b = {:.3e})", dot_ab));
        require_unit(normal, "normal");

        const double mismatch = (axis_a.cross(axis_b) - normal).norm();
        if (mismatch >= frame_tolerance)
        {
            if ((axis_a.cross(axis_b) + normal).norm() < frame_tolerance)
                throw Error(ErrorCode::validation, "frame is left-handed (normal = -(axis_a x axis_b))");
            throw Error(ErrorCode::validation,
                        fmt::format("normal != axis_a x axis_b (deviation {:.3e})", mismatch));
        }
    }

    LinkAxis LinkAxis::between(const SurfaceFrame &source, const SurfaceFrame &destination)
    {
        const Vector3 delta = destination.origin - source.origin;
        const double distance = delta.norm();
        if (!(distance > 0.0) || !std::isfinite(distance))
            throw Error(ErrorCode::validation, "frame origins coincide; link distance must be positive");
        return LinkAxis{delta / distance, distance};
    }

    void LinkAxis::validate() const
    {
        require_unit(direction, "link direction");
        if (!(distance > 0.0) || !std::isfinite(distance))
            throw Error(ErrorCode::validation, fmt::format("link distance must be positive (got {})", distance));
    }

    bool DirectionCosines::is_aligned(double tolerance) const
    {
        return std::abs(axis_source[0]) < tolerance && std::abs(axis_source[1]) < tolerance &&
               std::abs(axis_destination[0]) < tolerance && std::abs(axis_destination[1]) < tolerance &&
               std::abs(cross[0][0] - 1.0) < tolerance && std::abs(cross[1][1] - 1.0) < tolerance &&
               std::abs(cross[0][1]) < tolerance && std::abs(cross[1][0]) < tolerance;
    }

    DirectionCosines DirectionCosines::reversed() const
    {
        // Traversing the leg backwards flips the axis and swaps the roles of the two frames
        DirectionCosines r;
        for (int i = 0; i < 3; ++i)
        {
            r.axis_source[i] = -axis_destination[i];
            r.axis_destination[i] = -axis_source[i];
        }
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                r.cross[i][j] = cross[j][i];
        return r;
    }

    DirectionCosines DirectionCosines::aligned()
    {
        return DirectionCosines{};
    }

    bool ShearMatrix::is_identity(double tolerance) const
    {
        return (coupling - Matrix2::Identity()).cwiseAbs().maxCoeff() < tolerance;
    }

    bool ShearMatrix::is_diagonal(double tolerance) const
    {
        return std::abs(coupling(0, 1)) < tolerance && std::abs(coupling(1, 0)) < tolerance;
    }

    DirectionCosines direction_cosines(const SurfaceFrame &source, const SurfaceFrame &destination,
                                       const LinkAxis &axis)
    {
        source.validate();
        destination.validate();
        axis.validate();

        const Vector3 &r = axis.direction;
        const std::array<const Vector3 *, 2> s{&source.axis_a, &source.axis_b};
        const std::array<const Vector3 *, 2> d{&destination.axis_a, &destination.axis_b};

        DirectionCosines c;
        c.axis_source = {r.dot(source.axis_a), r.dot(source.axis_b), r.dot(source.normal)};
        c.axis_destination = {r.dot(destination.axis_a), r.dot(destination.axis_b), r.dot(destination.normal)};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                c.cross[i][j] = s[i]->dot(*d[j]);
        return c;
    }

    ShearMatrix shear_matrix(const DirectionCosines &c)
    {
        ShearMatrix t;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                t.coupling(i, j) = c.cross[i][j] - c.axis_source[i] * c.axis_destination[j];
        t.det = std::abs(t.coupling(0, 0) * t.coupling(1, 1) - t.coupling(0, 1) * t.coupling(1, 0));
        t.degenerate = t.det < degenerate_det_threshold;
        return t;
    }

    DetIdentityReport verify_det_identity(const SurfaceFrame &source, const SurfaceFrame &destination,
                                          const LinkAxis &axis)
    {
        const DirectionCosines c = direction_cosines(source, destination, axis);
        const ShearMatrix t = shear_matrix(c);
        DetIdentityReport report;
        report.det = t.det;
        report.obliquity_product = std::abs(c.obliquity());
        report.abs_diff = std::abs(report.det - report.obliquity_product);
        return report;
    }
}
