#include "ergo/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ergo {

void validate_permutation(const Perm& perm) {
    const Index m = perm.size();
    std::vector<bool> seen(m, false);
    for (Index i = 0; i < m; ++i) {
        Index img = perm[i];
        if (img >= m)
            throw std::invalid_argument("permutation image out of range at index " +
                                        std::to_string(i));
        if (seen[img])
            throw std::invalid_argument("duplicate permutation image " +
                                        std::to_string(img));
        seen[img] = true;
    }
}

FiniteSystem::FiniteSystem(Perm p, std::vector<double> coords, MetricKind kind,
                           SymbolicShape shape)
    : perm(std::move(p)), embedding(std::move(coords)), metric(kind), symbolic(shape) {
    validate_permutation(perm);
    if (!embedding.empty() && embedding.size() != perm.size())
        throw std::invalid_argument("embedding length differs from system size");
    if (metric == MetricKind::circle) {
        for (double c : embedding)
            if (!(c >= 0.0 && c < 1.0))
                throw std::invalid_argument("circle coordinates must lie in [0,1)");
    }
    if (metric != MetricKind::abstract && embedding.empty())
        throw std::invalid_argument("metric system requires an embedding");
}

Observable::Observable(std::vector<double> v) : values(std::move(v)) {
    for (double x : values)
        if (!std::isfinite(x))
            throw std::invalid_argument("observable values must be finite");
}

CycleDecomposition cycle_decompose(const Perm& perm) {
    validate_permutation(perm);
    const Index m = perm.size();
    CycleDecomposition dec;
    std::vector<bool> visited(m, false);
    for (Index start = 0; start < m; ++start) {
        if (visited[start]) continue;
        std::vector<Index> cycle;
        Index cur = start;
        do {
            visited[cur] = true;
            cycle.push_back(cur);
            cur = perm[cur];
        } while (cur != start);
        dec.cycles.push_back(std::move(cycle));
    }
    // non-increasing length; ties by smallest contained index, which is the
    // leading element since every cycle starts at its smallest member
    std::stable_sort(dec.cycles.begin(), dec.cycles.end(),
                     [](const std::vector<Index>& a, const std::vector<Index>& b) {
                         if (a.size() != b.size()) return a.size() > b.size();
                         return a.front() < b.front();
                     });
    for (const auto& c : dec.cycles) dec.length_counts[c.size()] += 1;
    return dec;
}

Index period(const Perm& perm, Index x) {
    if (x >= perm.size()) throw std::invalid_argument("period: index out of range");
    Index p = 1;
    for (Index cur = perm[x]; cur != x; cur = perm[cur]) ++p;
    return p;
}

bool is_transitive(const Perm& perm) {
    if (perm.empty()) return false;
    return period(perm, 0) == perm.size();
}

double global_average(const Observable& f) {
    if (f.values.empty()) throw std::invalid_argument("average of empty observable");
    return kahan_sum(f.values) / static_cast<double>(f.values.size());
}

double orbit_average(const FiniteSystem& system, const Observable& f, Index x) {
    if (x >= system.size()) throw std::invalid_argument("orbit_average: index out of range");
    if (f.size() != system.size())
        throw std::invalid_argument("observable size differs from system size");
    KahanAccumulator acc;
    Index count = 0;
    Index cur = x;
    do {
        acc.add(f[cur]);
        ++count;
        cur = system.perm[cur];
    } while (cur != x);
    return acc.value() / static_cast<double>(count);
}

}  // namespace ergo
