#pragma once

#include <functional>
#include <string>

#include "ergo/core.hpp"

namespace ergo {

/// A measure-preserving transformation of the ambient space, given as an
/// evaluable map. `continuity_note` documents where the map is continuous.
struct MapSpec {
    std::function<double(double)> evaluator;
    std::string continuity_note;
    bool invertible = true;
};

struct MatchResult {
    Perm perm;
    double matched_fraction = 0.0;
    double delta = 0.0;
    Index matched_count = 0;
};

/// Builds a permutation of the grid assigning each point y a grid point
/// within delta of images[y] for as many y as possible (maximum bipartite
/// matching on the proximity graph). Unmatched sources are paired with
/// unmatched targets in index order to complete the bijection.
/// matched_fraction counts the points whose final assignment lies strictly
/// within delta of their image, which equals the maximum matching size.
MatchResult match_permutation(std::span<const double> points,
                              std::span<const double> images, double delta,
                              const Metric& metric = {MetricKind::circle, {}});

struct TransitivizeResult {
    Perm perm;
    Index mismatch_count = 0;
};

/// Concatenates the disjoint cycles (sorted by non-increasing length) into
/// a single M-cycle. Changes the image of at most one point per cycle;
/// mismatch_count is the number of points whose image moved.
TransitivizeResult transitivize(const Perm& perm);

struct PeriodizeResult {
    std::vector<Index> kept;  // retained original indices, ascending
    Perm perm;                // permutation over ranks of `kept`
    Index trimmed_count = 0;
};

/// Deletes the trailing (length mod n) elements of each cycle and splits
/// the remainder into cycles of length exactly n.
PeriodizeResult periodize(const Perm& perm, Index n);

/// Fraction of points y with rho(T(y), tau(y)) > epsilon -- the per-system
/// term of the approximation-quality limit.
double approx_error(const FiniteSystem& system, const MapSpec& map, double epsilon);

struct BuildLog {
    double delta = 0.0;
    double matched_fraction = 0.0;
    Index matched_count = 0;
    Index cycle_count = 0;     // cycles of the matched permutation
    Index mismatch_count = 0;  // images moved by transitivization
    bool transitivized = false;
};

struct ApproximateResult {
    FiniteSystem system;
    BuildLog log;
};

/// Full pipeline: evaluate images, match, optionally transitivize.
ApproximateResult approximate_system(const MapSpec& map, std::vector<double> points,
                                     double delta, bool transitive,
                                     MetricKind metric = MetricKind::circle);

}  // namespace ergo
