#include "ergo/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace ergo {

double kahan_sum(std::span<const double> values) {
    KahanAccumulator acc;
    for (double v : values) acc.add(v);
    return acc.value();
}

double wrap_unit(double x) {
    double r = x - std::floor(x);
    if (r >= 1.0) r -= 1.0;  // guards x = -tiny, where floor rounding yields 1.0
    return r;
}

double circle_distance(double a, double b) {
    double d = std::fabs(wrap_unit(a) - wrap_unit(b));
    return std::min(d, 1.0 - d);
}

double symbolic_distance(double code_a, double code_b, const SymbolicShape& shape) {
    auto a = static_cast<std::uint64_t>(code_a);
    auto b = static_cast<std::uint64_t>(code_b);
    if (a == b) return 0.0;
    const int len = shape.window_length();
    const int m = shape.alphabet;
    int best = shape.radius + 1;
    for (int slot = 0; slot < len; ++slot) {
        int da = static_cast<int>(a % m);
        int db = static_cast<int>(b % m);
        a /= m;
        b /= m;
        if (da != db) best = std::min(best, std::abs(slot - shape.radius));
    }
    if (best > shape.radius) return 0.0;  // codes differ only in non-window bits
    return std::ldexp(1.0, -best);
}

double Metric::operator()(double a, double b) const {
    switch (kind) {
        case MetricKind::circle:
            return circle_distance(a, b);
        case MetricKind::euclidean_interval:
            return std::fabs(a - b);
        case MetricKind::symbolic:
            return symbolic_distance(a, b, shape);
        case MetricKind::abstract:
            break;
    }
    throw std::domain_error("abstract systems carry no metric");
}

double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
    // rejection sampling keeps the draw exactly uniform
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

std::vector<Index> sample_indices(Index population, Index count, std::uint64_t seed) {
    std::vector<Index> all(population);
    for (Index i = 0; i < population; ++i) all[i] = i;
    if (count >= population) return all;

    Rng rng(seed);
    // partial Fisher-Yates: the first `count` slots end up a uniform sample
    for (Index i = 0; i < count; ++i) {
        Index j = i + static_cast<Index>(uniform_below(rng, population - i));
        std::swap(all[i], all[j]);
    }
    all.resize(count);
    std::sort(all.begin(), all.end());
    return all;
}

}  // namespace ergo
