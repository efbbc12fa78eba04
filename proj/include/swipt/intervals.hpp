#pragma once

#include "swipt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

namespace swipt {

struct Segment {
    int end;      // 1-based slot index closing the segment
    double level; // constant power over the segment
};

namespace detail {

// Staircase of running-average minima over weighted items. Item k carries
// energy inc[k] and spans len[k] slots; ends are returned as item indices (1-based).
inline std::vector<Segment> staircase(const std::vector<double>& inc, const std::vector<int>& len) {
    const int K = static_cast<int>(inc.size());
    std::vector<Segment> out;
    int start = 0;
    while (start < K) {
        double sum = 0, best = 0;
        long span = 0;
        int arg = -1;
        for (int k = start; k < K; ++k) {
            sum += inc[k];
            span += len[k];
            double avg = sum / static_cast<double>(span);
            // ties resolve to the largest index
            if (arg < 0 || avg <= best + 1e-12 * std::max(std::abs(best), 1e-300)) {
                if (arg < 0 || avg < best) best = avg;
                arg = k;
            }
        }
        out.push_back({arg + 1, std::max(best, 0.0)});
        start = arg + 1;
    }
    return out;
}

} // namespace detail

/// Power-changing slots of one BS and the constant level before each.
inline std::vector<Segment> changing_slots(const std::vector<double>& e) {
    if (e.empty()) throw std::invalid_argument("changing_slots: empty profile");
    for (double v : e)
        if (!(v >= 0)) throw std::invalid_argument("changing_slots: negative or NaN harvest");
    return detail::staircase(e, std::vector<int>(e.size(), 1));
}

struct IntervalPartition {
    std::vector<int> boundaries; // n_1 < ... < n_M = N, 1-based
    std::vector<int> lengths;    // I_m
    std::vector<std::vector<int>> per_bs_changing_slots;

    int M() const { return static_cast<int>(boundaries.size()); }
    int start(int m) const { return m == 0 ? 0 : boundaries[m - 1]; } // 0-based first slot
};

inline IntervalPartition merge(const std::vector<std::vector<int>>& per_bs, int N) {
    std::set<int> all;
    for (const auto& v : per_bs)
        for (int n : v) {
            if (n < 1 || n > N) throw std::invalid_argument("merge: boundary outside 1..N");
            all.insert(n);
        }
    all.insert(N);
    IntervalPartition p;
    p.per_bs_changing_slots = per_bs;
    int prev = 0;
    for (int n : all) {
        p.boundaries.push_back(n);
        p.lengths.push_back(n - prev);
        prev = n;
    }
    return p;
}

/// Partition from an arbitrary sorted boundary set (used when refining).
inline IntervalPartition partition_from_boundaries(const std::vector<int>& b, int N) {
    return merge({b}, N);
}

inline IntervalPartition partition_of(const RMat& E) {
    const int L = static_cast<int>(E.rows());
    const int N = static_cast<int>(E.cols());
    std::vector<std::vector<int>> per;
    for (int l = 0; l < L; ++l) {
        std::vector<double> e(N);
        for (int n = 0; n < N; ++n) e[n] = E(l, n);
        std::vector<int> ends;
        for (const auto& s : changing_slots(e)) ends.push_back(s.end);
        per.push_back(ends);
    }
    return merge(per, N);
}

/// Cumulative harvest of each BS at each interval end (L x M).
inline RMat cumulative_caps(const RMat& E, const IntervalPartition& p) {
    RMat C(E.rows(), p.M());
    for (int l = 0; l < E.rows(); ++l) {
        double acc = 0;
        int n = 0;
        for (int m = 0; m < p.M(); ++m) {
            for (; n < p.boundaries[m]; ++n) acc += E(l, n);
            C(l, m) = acc;
        }
    }
    return C;
}

} // namespace swipt
