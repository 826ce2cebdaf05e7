// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The metafourier Authors
//
// Closed-form predictions that do not depend on numerical propagation: mode counts, stage power
// ratios and the normalized coordinates in which the link is a unit Fourier transform.

#pragma once

#include "metafourier/field.hpp"

#include <optional>
#include <string_view>

namespace metafourier
{
    enum class ModeTopology
    {
        two_aligned,
        two_unaligned,
        three_rect,
        three_gauss,
        three_rect_unaligned,
        three_gauss_unaligned
    };

    std::string_view to_string(ModeTopology topology) noexcept;

    // Inputs of the mode-count formulas; only the fields used by a topology must be set
    struct ModeCountSpec
    {
        std::optional<double> m_tx, m_ris, m_rx;           // aperture areas in m^2
        std::optional<double> wavelength;                  // m
        std::optional<double> distance;                    // R (two-surface) in m
        std::optional<double> distance1, distance2;        // R1, R2 (three-surface) in m
        std::optional<double> det, det1, det2;             // ‖T‖, ‖T1‖, ‖T2‖
        std::optional<double> gamma, gamma1, gamma2;        // concentration factors
    };

    // Default concentration factor for gamma, gamma1, gamma2 when not configured
    inline constexpr double default_gamma = 2.0;

    // Number of spatial modes; throws a schema error naming the first missing field
    //   two_aligned            M_TX M_RX / (lambda R)^2
    //   two_unaligned          ‖T‖ M_TX M_RX / (lambda R)^2
    //   three_rect             min(M_TX M_RIS / (lambda R1)^2, M_RIS M_RX / (lambda R2)^2) / gamma^2
    //   three_gauss            same with 1 / (gamma1 gamma2)^2
    //   *_unaligned            leg 1 term scaled by ‖T1‖, leg 2 term by ‖T2‖
    double mode_count(const ModeCountSpec &spec, ModeTopology topology);

    enum class LinkTopology
    {
        two_aligned,
        two_unaligned,
        three_aligned,
        three_unaligned
    };

    // Parses "two_aligned", "two_unaligned", "three_aligned" or "three_unaligned"
    LinkTopology parse_link_topology(std::string_view name);
    std::string_view to_string(LinkTopology topology) noexcept;

    bool is_three_surface(LinkTopology topology) noexcept;

    // Predicted power ratios P(S2) / P(S1) and, for three-surface links, P(S3) / P(S1)
    struct PowerRatios
    {
        double stage2 = 1.0;
        std::optional<double> stage3;
    };

    // det1 = ‖T‖ (two-surface) or ‖T1‖, det2 = ‖T2‖; dets must lie in [0, 1]
    PowerRatios predicted_power_ratio(LinkTopology topology, double det1 = 1.0, double det2 = 1.0);

    // Measured stage powers of one run next to the predictions
    struct PowerReport
    {
        std::optional<double> s1, s2, s3, s1_source, s3_image;
        PowerRatios predicted;
    };

    // Which side of the link a normalized field lives on
    enum class LinkSide
    {
        transmit,
        receive
    };

    // Rescales coordinates to x' = x / sqrt(lambda R) and amplitudes to S' = sqrt(lambda R) S, so the
    // power is unchanged. On the receive side the constant j e^{-jkR} is removed as well, so that
    // S'_out(u') = ∬ S'_in(x') e^{j 2 pi (x' u' + y' v')} dx' dy' holds for an aligned link.
    ComplexField normalized_coords(const ComplexField &s, double wavelength, double distance,
                                   LinkSide side = LinkSide::transmit);

    // Σ S'(x') e^{j 2 pi (x' u' + y' v')} dx' dy' on normalized grids
    ComplexField unit_fourier_transform(const ComplexField &normalized, const GridSpec &out_grid);
}
