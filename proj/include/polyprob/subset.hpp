#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace polyprob {

/// Index subsets of {0,...,n-1} as bit masks; bit j stands for half-space j.
using Mask = std::uint32_t;

inline int subset_size(Mask m) { return std::popcount(m); }

inline bool subset_contains(Mask m, int j) { return (m >> j) & 1u; }

/// Position of element j within the ascending enumeration of m (j must be in m).
inline int subset_rank(Mask m, int j) { return std::popcount(m & ((Mask{1} << j) - 1u)); }

/// Order used everywhere for face lists: by cardinality, then lexicographic on
/// the ascending index sequences.  {} sorts first.
inline bool subset_less(Mask a, Mask b)
{
    const int ca = std::popcount(a), cb = std::popcount(b);
    if (ca != cb) return ca < cb;
    if (a == b) return false;
    // The first differing element is the lowest bit of a^b; the set holding it
    // is lexicographically smaller.
    const Mask low = (a ^ b) & (~(a ^ b) + 1u);
    return (a & low) != 0u;
}

inline Mask mask_of(const std::vector<int>& indices)
{
    Mask m = 0;
    for (int j : indices) m |= Mask{1} << j;
    return m;
}

inline std::vector<int> subset_indices(Mask m)
{
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(std::popcount(m)));
    while (m) {
        out.push_back(std::countr_zero(m));
        m &= m - 1u;
    }
    return out;
}

/// "{0,2}" style rendering (0-based half-space indices), used by debug dumps.
inline std::string subset_str(Mask m)
{
    std::string s = "{";
    bool first = true;
    for (int j : subset_indices(m)) {
        if (!first) s += ",";
        s += std::to_string(j);
        first = false;
    }
    return s + "}";
}

} // namespace polyprob
