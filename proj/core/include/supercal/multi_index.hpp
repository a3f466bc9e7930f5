#pragma once

#include "supercal/errors.hpp"

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace supercal {

// Strictly increasing index sets in {1,...,n} are stored as bitmasks (bit i-1 set
// means index i is present). Mask order equals lexicographic order on the sorted
// index lists, so iteration over a sorted key container is canonical.
using Mask = std::uint32_t;

inline int mask_size(Mask m) { return std::popcount(m); }

inline Mask mask_from_indices(const std::vector<int>& idx, int n) {
    Mask m = 0;
    int prev = 0;
    for (int i : idx) {
        if (i < 1 || i > n) throw InvalidArgument("multi-index entry out of range 1..n");
        if (i <= prev) throw InvalidArgument("multi-index must be strictly increasing");
        m |= Mask(1) << (i - 1);
        prev = i;
    }
    return m;
}

inline std::vector<int> mask_to_indices(Mask m) {
    std::vector<int> idx;
    for (int i = 0; m != 0; ++i, m >>= 1)
        if (m & 1) idx.push_back(i + 1);
    return idx;
}

// Parity of the merge of two disjoint increasing words A, B into one increasing word:
// counts pairs (a, b), a in A, b in B, with a > b. Returns +1 or -1.
inline int merge_sign(Mask a, Mask b) {
    int inversions = 0;
    for (Mask rest = b; rest != 0; rest &= rest - 1) {
        int bit = std::countr_zero(rest);
        inversions += std::popcount(a >> (bit + 1));
    }
    return (inversions & 1) ? -1 : +1;
}

// Validated strictly increasing multi-index, the user-facing counterpart of Mask.
struct MultiIndex {
    int n = 0;
    Mask mask = 0;

    MultiIndex() = default;
    MultiIndex(int n_, std::vector<int> indices) : n(n_), mask(mask_from_indices(indices, n_)) {}

    int size() const { return mask_size(mask); }
    std::vector<int> indices() const { return mask_to_indices(mask); }
};

// One canonical basis monomial dx_K ^ dxi_L; K and L each strictly increasing, all
// dx factors before all dxi factors.
struct BasisElement {
    Mask k = 0; // dx block
    Mask l = 0; // dxi block
};

using BasisKey = std::uint64_t;

inline BasisKey basis_key(Mask k, Mask l) { return (BasisKey(k) << 32) | BasisKey(l); }
inline Mask key_k(BasisKey key) { return Mask(key >> 32); }
inline Mask key_l(BasisKey key) { return Mask(key & 0xffffffffu); }

// Sign produced when concatenating canonical words (K1,L1) and (K2,L2) and
// resorting to canonical order: the dx-block of the second word moves left past the
// dxi-block of the first, then both blocks merge.
inline int wedge_sign(Mask k1, Mask l1, Mask k2, Mask l2) {
    int s = merge_sign(k1, k2) * merge_sign(l1, l2);
    if ((mask_size(k2) * mask_size(l1)) & 1) s = -s;
    return s;
}

} // namespace supercal
