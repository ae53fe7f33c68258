#pragma once

// Independent reference implementations used only to check the library.
// Everything here is deliberately naive: direct summation, dynamic
// programming, exhaustive enumeration.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "ergo/common.hpp"
#include "ergo/core.hpp"

namespace oracle {

/// A_n(F,T,x) by direct O(n) orbit summation.
inline double naive_mean(const ergo::FiniteSystem& system, const ergo::Observable& f,
                         ergo::Index x, ergo::Index n) {
    double sum = 0.0;
    ergo::Index cur = x;
    for (ergo::Index i = 0; i < n; ++i) {
        sum += f[cur];
        cur = system.perm[cur];
    }
    return sum / static_cast<double>(n);
}

/// Maximum number of disjoint ordered pairs (a,b), a<b, |s_a - s_b| >= eps,
/// by O(n^2) dynamic programming over suffixes.
inline ergo::Index dp_fluctuation_count(std::span<const double> s, double eps) {
    const std::size_t n = s.size();
    std::vector<ergo::Index> best(n + 2, 0);
    for (std::size_t i = n; i-- > 0;) {
        best[i] = best[i + 1];
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::fabs(s[i] - s[j]) >= eps)
                best[i] = std::max(best[i], 1 + best[j + 1]);
    }
    return best[0];
}

/// Maximum number of within-delta assignments over all M! permutations.
inline ergo::Index brute_force_max_matched(std::span<const double> points,
                                           std::span<const double> images,
                                           double delta, const ergo::Metric& metric) {
    std::vector<ergo::Index> perm(points.size());
    std::iota(perm.begin(), perm.end(), ergo::Index{0});
    ergo::Index best = 0;
    do {
        ergo::Index hits = 0;
        for (ergo::Index i = 0; i < points.size(); ++i)
            if (metric(images[i], points[perm[i]]) < delta) ++hits;
        best = std::max(best, hits);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

/// Composite Simpson quadrature on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int panels = 512) {
    const double h = (b - a) / (2.0 * panels);
    double sum = f(a) + f(b);
    for (int i = 1; i < 2 * panels; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

/// Maximum bipartite matching size by recursive Kuhn over explicit
/// adjacency lists built by full pairwise distance checks. Quadratic and
/// slow, independent of the production matcher's sweep/window machinery.
inline ergo::Index kuhn_max_matching(std::span<const double> points,
                                     std::span<const double> images, double delta,
                                     const ergo::Metric& metric) {
    const ergo::Index m = points.size();
    std::vector<std::vector<ergo::Index>> adjacency(m);
    for (ergo::Index s = 0; s < m; ++s)
        for (ergo::Index t = 0; t < m; ++t)
            if (metric(images[s], points[t]) < delta) adjacency[s].push_back(t);

    constexpr ergo::Index kFree = static_cast<ergo::Index>(-1);
    std::vector<ergo::Index> owner(m, kFree);
    std::vector<bool> visited(m);
    std::function<bool(ergo::Index)> augment = [&](ergo::Index s) {
        for (ergo::Index t : adjacency[s]) {
            if (visited[t]) continue;
            visited[t] = true;
            if (owner[t] == kFree || augment(owner[t])) {
                owner[t] = s;
                return true;
            }
        }
        return false;
    };
    ergo::Index matched = 0;
    for (ergo::Index s = 0; s < m; ++s) {
        visited.assign(m, false);
        if (augment(s)) ++matched;
    }
    return matched;
}

/// Seeded permutation of {0..m-1} by Fisher-Yates on the library RNG.
inline ergo::Perm random_permutation(ergo::Index m, std::uint64_t seed) {
    ergo::Perm perm(m);
    std::iota(perm.begin(), perm.end(), ergo::Index{0});
    ergo::Rng rng(seed);
    for (ergo::Index i = m; i > 1; --i)
        std::swap(perm[i - 1], perm[ergo::uniform_below(rng, i)]);
    return perm;
}

/// Observable with independent uniform values in [-1, 1].
inline ergo::Observable random_observable(ergo::Index m, std::uint64_t seed) {
    std::vector<double> values(m);
    ergo::Rng rng(seed);
    for (double& v : values) v = 2.0 * ergo::uniform_unit(rng) - 1.0;
    return ergo::Observable(std::move(values));
}

}  // namespace oracle
