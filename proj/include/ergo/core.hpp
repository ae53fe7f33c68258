#pragma once

#include <map>
#include <optional>
#include <vector>

#include "ergo/common.hpp"

namespace ergo {

/// Throws std::invalid_argument unless perm is a bijection of {0..M-1}.
void validate_permutation(const Perm& perm);

/// A finite point set with an internal permutation and an optional
/// embedding into an ambient metric space. Points are integer indices;
/// ambient coordinates live in the parallel `embedding` array so the
/// permutation algebra stays exact. Immutable after construction.
struct FiniteSystem {
    Perm perm;
    std::vector<double> embedding;  // empty for abstract systems
    MetricKind metric = MetricKind::abstract;
    SymbolicShape symbolic{};       // meaningful only for symbolic systems

    FiniteSystem() = default;
    FiniteSystem(Perm p, std::vector<double> coords, MetricKind kind,
                 SymbolicShape shape = {});

    Index size() const { return perm.size(); }
    bool has_embedding() const { return !embedding.empty(); }
    double coordinate(Index i) const { return embedding[i]; }
    Metric ambient_metric() const { return Metric{metric, symbolic}; }
};

/// A real-valued function on the points of a finite system.
struct Observable {
    std::vector<double> values;

    Observable() = default;
    explicit Observable(std::vector<double> v);

    Index size() const { return values.size(); }
    double operator[](Index i) const { return values[i]; }
};

/// Disjoint-cycle representation of a permutation. Cycles are sorted by
/// non-increasing length, ties broken by smallest contained index, and
/// each cycle starts at its smallest element; this canonical order is
/// what transitivization and periodization splice along.
struct CycleDecomposition {
    std::vector<std::vector<Index>> cycles;
    std::map<Index, Index> length_counts;  // n -> a_n

    Index cycle_count() const { return cycles.size(); }
};

CycleDecomposition cycle_decompose(const Perm& perm);

/// Orbit size of x under perm.
Index period(const Perm& perm, Index x);

/// True iff the permutation is a single cycle of full length.
bool is_transitive(const Perm& perm);

/// Av(F) = (1/M) sum F(y), compensated.
double global_average(const Observable& f);

/// Mean of F over the orbit of x; equals global_average for transitive
/// permutations.
double orbit_average(const FiniteSystem& system, const Observable& f, Index x);

}  // namespace ergo
