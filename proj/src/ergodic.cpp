#include "ergo/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace ergo {

MeanCalculator::MeanCalculator(const FiniteSystem& system, const Observable& f) {
    if (f.size() != system.size())
        throw std::invalid_argument("observable size differs from system size");
    const Index m = system.size();
    CycleDecomposition dec = cycle_decompose(system.perm);

    cycle_of_.resize(m);
    position_.resize(m);
    cycle_length_.reserve(dec.cycle_count());
    prefix_start_.reserve(dec.cycle_count());
    cycle_sum_.reserve(dec.cycle_count());
    prefix_.reserve(2 * m + dec.cycle_count());

    for (Index c = 0; c < dec.cycle_count(); ++c) {
        const auto& cycle = dec.cycles[c];
        const Index p = cycle.size();
        cycle_length_.push_back(p);
        prefix_start_.push_back(prefix_.size());
        KahanAccumulator acc;
        prefix_.push_back(0.0);
        for (Index round = 0; round < 2; ++round)
            for (Index j = 0; j < p; ++j) {
                Index point = cycle[j];
                if (round == 0) {
                    cycle_of_[point] = c;
                    position_[point] = j;
                }
                acc.add(f[point]);
                prefix_.push_back(acc.value());
            }
        cycle_sum_.push_back(prefix_[prefix_start_[c] + p]);
    }
}

double MeanCalculator::mean(Index x, Index n) const {
    if (n == 0) throw std::invalid_argument("ergodic mean needs n >= 1");
    if (x >= cycle_of_.size()) throw std::invalid_argument("ergodic mean: index out of range");
    const Index c = cycle_of_[x];
    const Index p = cycle_length_[c];
    const double* prefix = prefix_.data() + prefix_start_[c];
    const Index pos = position_[x];
    const Index loops = n / p;
    const Index rest = n % p;
    double total = static_cast<double>(loops) * cycle_sum_[c] +
                   (prefix[pos + rest] - prefix[pos]);
    return total / static_cast<double>(n);
}

double ergodic_mean(const FiniteSystem& system, const Observable& f, Index x, Index n) {
    if (n == 0) throw std::invalid_argument("ergodic mean needs n >= 1");
    if (x >= system.size()) throw std::invalid_argument("ergodic mean: index out of range");
    if (f.size() != system.size())
        throw std::invalid_argument("observable size differs from system size");

    // walk x's orbit once; a second lap of prefix values covers the wrap
    std::vector<double> prefix{0.0};
    KahanAccumulator acc;
    Index p = 0;
    for (Index round = 0; round < 2; ++round) {
        Index cur = x;
        do {
            acc.add(f[cur]);
            prefix.push_back(acc.value());
            cur = system.perm[cur];
            if (round == 0) ++p;
        } while (cur != x);
    }
    const Index loops = n / p;
    const Index rest = n % p;
    double total = static_cast<double>(loops) * prefix[p] + prefix[rest];
    return total / static_cast<double>(n);
}

MeanProfile mean_curve(const FiniteSystem& system, const Observable& f, Index x,
                       std::span<const Index> n_grid) {
    if (n_grid.empty()) throw std::invalid_argument("mean_curve: empty n grid");
    MeanCalculator calc(system, f);
    MeanProfile profile;
    profile.base_index = x;
    profile.system_size = system.size();
    profile.samples.reserve(n_grid.size());
    Index last = 0;
    for (Index n : n_grid) {
        if (n <= last && !profile.samples.empty())
            throw std::invalid_argument("mean_curve: n grid must be strictly increasing");
        profile.samples.emplace_back(n, calc.mean(x, n));
        last = n;
    }
    return profile;
}

StabilizationResult stabilization_scan(const FiniteSystem& system, const Observable& f,
                                       double epsilon, double delta, Index n_min,
                                       std::span<const Index> sample) {
    if (epsilon <= 0.0) throw std::invalid_argument("stabilization_scan: epsilon > 0");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("stabilization_scan: need 0 < delta < 1");
    if (n_min == 0) throw std::invalid_argument("stabilization_scan: n_min >= 1");

    StabilizationResult result;
    result.epsilon = epsilon;
    result.delta = delta;
    result.n_min = n_min;
    result.plateau_length = n_min - 1;
    if (sample.empty() || n_min > system.size()) return result;

    MeanCalculator calc(system, f);
    const Index horizon = system.size();
    std::vector<double> lo(sample.size()), hi(sample.size());
    for (Index i = 0; i < sample.size(); ++i) {
        double a = calc.mean(sample[i], n_min);
        lo[i] = hi[i] = a;
    }

    Index checkpoint = n_min;
    Index n = n_min;
    while (true) {
        // extend the per-point running envelopes up to the next checkpoint
        while (n < checkpoint) {
            ++n;
            for (Index i = 0; i < sample.size(); ++i) {
                double a = calc.mean(sample[i], n);
                lo[i] = std::min(lo[i], a);
                hi[i] = std::max(hi[i], a);
            }
        }
        Index covered = 0;
        for (Index i = 0; i < sample.size(); ++i)
            if (hi[i] - lo[i] <= epsilon) ++covered;
        double fraction = static_cast<double>(covered) / static_cast<double>(sample.size());
        if (fraction < 1.0 - delta) break;
        result.plateau_length = checkpoint;
        result.covered_fraction = fraction;
        result.found = true;
        if (checkpoint >= horizon) break;
        checkpoint = std::min(horizon, checkpoint * 2);
    }
    return result;
}

Index fluctuation_count(std::span<const double> sequence, double epsilon) {
    if (epsilon <= 0.0) throw std::invalid_argument("fluctuation_count: epsilon > 0");
    Index count = 0;
    bool fresh = true;
    double lo = 0.0, hi = 0.0;
    for (double s : sequence) {
        if (fresh) {
            lo = hi = s;
            fresh = false;
            continue;
        }
        lo = std::min(lo, s);
        hi = std::max(hi, s);
        if (hi - lo >= epsilon) {
            ++count;
            fresh = true;  // a pair consumed indices up to here; restart after it
        }
    }
    return count;
}

Index FluctuationReport::occupancy_threshold(double level) const {
    for (Index k = 0; k < occupancy.size(); ++k)
        if (occupancy[k] >= level) return k;
    return occupancy.empty() ? 0 : occupancy.size() - 1;
}

FluctuationReport fluctuation_report(const FiniteSystem& system, const Observable& f,
                                     double epsilon, Index horizon,
                                     std::span<const Index> sample, Index threads) {
    if (horizon == 0) throw std::invalid_argument("fluctuation_report: horizon >= 1");
    MeanCalculator calc(system, f);
    FluctuationReport report;
    report.epsilon = epsilon;
    report.horizon = horizon;
    report.points.assign(sample.begin(), sample.end());
    report.counts.resize(sample.size());

    auto count_range = [&](Index begin, Index end) {
        std::vector<double> means(horizon);
        for (Index i = begin; i < end; ++i) {
            for (Index n = 1; n <= horizon; ++n) means[n - 1] = calc.mean(sample[i], n);
            report.counts[i] = fluctuation_count(means, epsilon);
        }
    };
    if (threads <= 1 || sample.size() < 2) {
        count_range(0, sample.size());
    } else {
        threads = std::min<Index>(threads, sample.size());
        std::vector<std::thread> pool;
        const Index chunk = (sample.size() + threads - 1) / threads;
        for (Index t = 0; t < threads; ++t) {
            Index begin = t * chunk;
            Index end = std::min(sample.size(), begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(count_range, begin, end);
        }
        for (auto& worker : pool) worker.join();
    }
    Index max_count = 0;
    for (Index c : report.counts) max_count = std::max(max_count, c);
    report.occupancy.assign(max_count + 1, 0.0);
    for (Index c : report.counts) report.occupancy[c] += 1.0;
    double cumulative = 0.0;
    for (double& o : report.occupancy) {
        cumulative += o;
        o = sample.empty() ? 1.0 : cumulative / static_cast<double>(sample.size());
    }
    return report;
}

double tail_mass(const Observable& f, double threshold) {
    if (threshold < 0.0) throw std::invalid_argument("tail_mass: threshold >= 0");
    if (f.values.empty()) throw std::invalid_argument("tail_mass: empty observable");
    KahanAccumulator acc;
    for (double v : f.values) {
        double mag = std::fabs(v);
        if (mag > threshold) acc.add(mag);
    }
    return acc.value() / static_cast<double>(f.size());
}

double mean_gap(const FiniteSystem& system, const Observable& f, Index k, Index l,
                std::span<const Index> sample) {
    if (k == 0 || l == 0) throw std::invalid_argument("mean_gap: window lengths >= 1");
    MeanCalculator calc(system, f);
    double gap = 0.0;
    for (Index x : sample)
        gap = std::max(gap, std::fabs(calc.mean(x, k) - calc.mean(x, l)));
    return gap;
}

double limit_functional(const FiniteSystem& system, const Observable& f, Index x,
                        double a) {
    if (a <= 0.0)
        throw std::invalid_argument("limit_functional: a must be positive");
    const Index n = static_cast<Index>(std::floor(a * static_cast<double>(system.size())));
    if (n == 0)
        throw std::invalid_argument("limit_functional: floor(a*M) must be at least 1");
    return ergodic_mean(system, f, x, n);
}

}  // namespace ergo
