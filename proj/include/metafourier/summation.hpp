// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The metafourier Authors
//
// Fixed-order pairwise (tree) summation. The split points depend only on the range length, so a
// given range is always accumulated in the same order regardless of threading. The rounding error
// grows as O(log n) instead of O(n) for the naive loop.

#pragma once

#include <cstddef>

namespace metafourier
{
    // Ranges up to this length are summed sequentially at the leaves of the tree
    inline constexpr std::size_t pairwise_block = 16;

    // Returns term(begin) + ... + term(end - 1)
    template <typename T, typename Term>
    T pairwise_sum(std::size_t begin, std::size_t end, const Term &term)
    {
        const std::size_t n = end - begin;
        if (n <= pairwise_block)
        {
            T acc{};
            for (std::size_t i = begin; i < end; ++i)
                acc += term(i);
            return acc;
        }
        const std::size_t mid = begin + n / 2;
        return pairwise_sum<T>(begin, mid, term) + pairwise_sum<T>(mid, end, term);
    }
}
