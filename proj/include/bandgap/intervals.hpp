#pragma once

#include <algorithm>
#include <vector>

namespace bandgap {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool operator==(const Interval&) const = default;
};

/// Maximal open intervals of (start, cap) not covered by any of `covered`,
/// dropping pieces no longer than `tolerance`. `start` is normally the
/// bottom of the spectrum so that every reported interval lies above it.
inline std::vector<Interval> complement(std::vector<Interval> covered, double start, double cap,
                                        double tolerance) {
    std::sort(covered.begin(), covered.end(), [](const Interval& x, const Interval& y) {
        return x.lo < y.lo || (x.lo == y.lo && x.hi < y.hi);
    });
    std::vector<Interval> holes;
    double reach = start;
    for (const auto& iv : covered) {
        if (reach >= cap) break;
        if (iv.lo > reach) {
            const double top = std::min(iv.lo, cap);
            if (top - reach > tolerance) holes.push_back({reach, top});
        }
        reach = std::max(reach, iv.hi);
    }
    if (cap - reach > tolerance) holes.push_back({reach, cap});
    return holes;
}

} // namespace bandgap
