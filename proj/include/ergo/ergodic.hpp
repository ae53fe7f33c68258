#pragma once

#include <utility>
#include <vector>

#include "ergo/core.hpp"

namespace ergo {

/// Birkhoff mean queries A_n(F,T,x) in O(1) per (x,n) after O(M) setup:
/// each orbit carries a compensated prefix-sum array over two copies of
/// the cycle, so any window reduces to full loops plus one wrapped slice.
/// Immutable after construction; safe to query concurrently.
class MeanCalculator {
public:
    MeanCalculator(const FiniteSystem& system, const Observable& f);

    /// A_n(F,T,x) = (1/n) sum_{i<n} F(T^i x). n may exceed the orbit length
    /// and the system size. Throws on n = 0 or x out of range.
    double mean(Index x, Index n) const;

    /// Orbit length of x.
    Index orbit_length(Index x) const { return cycle_length_[cycle_of_[x]]; }

    Index size() const { return cycle_of_.size(); }

private:
    std::vector<Index> cycle_of_;        // point -> cycle id
    std::vector<Index> position_;        // point -> offset within its cycle
    std::vector<Index> cycle_length_;    // cycle id -> length
    std::vector<Index> prefix_start_;    // cycle id -> offset into prefix_
    std::vector<double> prefix_;         // doubled prefix sums, per cycle
    std::vector<double> cycle_sum_;      // cycle id -> sum over one loop
};

/// One-shot A_n(F,T,x); builds the prefix array for x's orbit only.
double ergodic_mean(const FiniteSystem& system, const Observable& f, Index x, Index n);

/// Sampled ergodic means along one orbit; plotted as (n/M, A_n).
struct MeanProfile {
    Index base_index = 0;
    Index system_size = 0;
    std::vector<std::pair<Index, double>> samples;  // (n, A_n), n increasing
};

MeanProfile mean_curve(const FiniteSystem& system, const Observable& f, Index x,
                       std::span<const Index> n_grid);

/// Outcome of the plateau scan: the largest window bound L (on a doubling
/// grid from n_min) at which at least (1-delta) of the sampled points keep
/// their means within epsilon, with the fraction actually covered there.
struct StabilizationResult {
    Index plateau_length = 0;
    double covered_fraction = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
    Index n_min = 0;
    bool found = false;  // false when even the degenerate scan is empty
};

StabilizationResult stabilization_scan(const FiniteSystem& system, const Observable& f,
                                       double epsilon, double delta, Index n_min,
                                       std::span<const Index> sample);

/// Maximum k admitting indices n_1<...<n_2k with |s(n_{2i-1})-s(n_{2i})|
/// >= epsilon for each pair. Greedy extremum sweep, linear time.
Index fluctuation_count(std::span<const double> sequence, double epsilon);

/// Per-point maximal epsilon-fluctuation counts of the mean sequences
/// {A_n}_{n=1..horizon}, plus the occupancy curve
/// occupancy[k] = |{points with count <= k}| / sample size.
struct FluctuationReport {
    double epsilon = 0.0;
    Index horizon = 0;
    std::vector<Index> points;
    std::vector<Index> counts;       // parallel to points
    std::vector<double> occupancy;   // index k = fluctuation bound

    /// Smallest k whose occupancy reaches the given level.
    Index occupancy_threshold(double level) const;
};

/// Per-point analyses are independent; `threads` > 1 splits the sample
/// across workers. The merged output is ordered by sample position and
/// identical for every thread count.
FluctuationReport fluctuation_report(const FiniteSystem& system, const Observable& f,
                                     double epsilon, Index horizon,
                                     std::span<const Index> sample, Index threads = 1);

/// (1/M) sum over |F(y)| > threshold of |F(y)| -- the finite
/// uniform-integrability diagnostic.
double tail_mass(const Observable& f, double threshold);

/// max over the sample of |A_K - A_L|.
double mean_gap(const FiniteSystem& system, const Observable& f, Index k, Index l,
                std::span<const Index> sample);

/// A_{floor(a*M)}(F,T,x): the finite evaluation of the functional l_a.
/// For a = 1 on transitive systems this is the global average.
double limit_functional(const FiniteSystem& system, const Observable& f, Index x,
                        double a);

}  // namespace ergo
