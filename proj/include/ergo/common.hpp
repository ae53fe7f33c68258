#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace ergo {

using Index = std::size_t;
using Perm = std::vector<Index>;

/// Thrown when a constructive operation (e.g. grid building) cannot
/// complete; the message names the offending input.
class ConstructionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Kahan-compensated sum. Error stays O(eps * sum|x|) independent of length,
/// which keeps the full-cycle identities below 1e-12 at M = 1e5.
double kahan_sum(std::span<const double> values);

/// Kahan-compensated running accumulator, used to build prefix-sum arrays.
class KahanAccumulator {
public:
    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

enum class MetricKind { circle, euclidean_interval, symbolic, abstract };

/// Window geometry of a symbolic system: alphabet size m and radius N
/// (windows live on positions -N..N, length 2N+1).
struct SymbolicShape {
    int alphabet = 2;
    int radius = 0;
    int window_length() const { return 2 * radius + 1; }
};

/// rho(x,y) = min(|x-y|, 1-|x-y|) after reduction mod 1.
double circle_distance(double a, double b);

/// Distance between two symbolic points given as base-m window codes:
/// 2^(-r) where r is the smallest |position| at which the windows
/// (zero-padded outside) disagree. 0 for equal codes.
double symbolic_distance(double code_a, double code_b, const SymbolicShape& shape);

/// Point-to-point distance in the ambient space. Coordinates are plain
/// reals for circle/interval metrics and window codes for symbolic ones.
struct Metric {
    MetricKind kind = MetricKind::euclidean_interval;
    SymbolicShape shape{};

    double operator()(double a, double b) const;
};

/// x reduced into [0, 1).
double wrap_unit(double x);

// --- deterministic randomness -------------------------------------------
//
// mt19937_64 output is fully specified by the standard; the helpers below
// avoid std::uniform_*_distribution, whose results are
// implementation-defined, so identical seeds give identical artifacts on
// any platform.

using Rng = std::mt19937_64;

/// Uniform draw from [0, 1) with 53 random bits.
double uniform_unit(Rng& rng);

/// Uniform draw from {0, ..., bound-1}; bound must be positive.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

/// `count` distinct indices from {0..population-1}, ascending. Returns all
/// of them when count >= population.
std::vector<Index> sample_indices(Index population, Index count, std::uint64_t seed);

}  // namespace ergo
