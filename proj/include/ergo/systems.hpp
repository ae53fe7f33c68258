#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ergo/core.hpp"

namespace ergo {

/// Grid {k/M} with the shift k -> k+N mod M. Transitive iff gcd(N,M)=1.
FiniteSystem rotation_system(Index m, Index n);

/// Continued-fraction convergent N/M of alpha with the largest M <= m_max.
/// Returns (N, M) with gcd(N, M) = 1 and |alpha - N/M| < 1/M^2.
std::pair<Index, Index> convergent(double alpha, Index m_max);

/// Cyclic sequence of length m^n over {0..m-1} in which every length-n
/// word appears exactly once.
struct DeBruijnSequence {
    int alphabet = 2;
    int order = 1;
    std::vector<int> symbols;

    Index length() const { return symbols.size(); }
};

/// Lexicographically least (m,n)-de Bruijn sequence, by Lyndon-word
/// concatenation. Deterministic, O(m^n).
DeBruijnSequence de_bruijn(int m, int n);

/// Base-m little-endian code of a window over positions -N..N
/// (array slot j holds the symbol at position j-N).
Index encode_window(std::span<const int> window, int alphabet);
std::vector<int> decode_window(Index code, const SymbolicShape& shape);

/// All m^(2N+1) symbol windows with the cyclic coordinate shift. Every
/// point is (2N+1)-periodic, so the permutation is far from transitive.
FiniteSystem bernoulli_block_system(int m, int n_radius);

/// Transitive shift approximation: windows are walked along a de Bruijn
/// sequence, mapping the window at position i to the window at i+1.
/// A single M-cycle that agrees with the coordinate shift on all window
/// slots but the last.
FiniteSystem bernoulli_debruijn_system(int m, int n_radius);

// --- built-in observables -------------------------------------------------

/// F(k) = M * delta_{0k}: integrable but not uniformly integrable.
Observable delta_observable(Index m);

/// 0/1 block function: with M = RK + S, value 1 on blocks [mK, (m+1)K) for
/// even m < R, 0 elsewhere. K should stay <= M/4 for the block structure to
/// be meaningful; larger K appends a note to `warnings` if given.
Observable block_observable(Index m, Index k, std::vector<std::string>* warnings = nullptr);

/// F(k) = k/M.
Observable coordinate_observable(Index m);

/// Indicator of the windows extending the pattern (position -> symbol,
/// positions within -N..N). Symbolic systems only.
Observable cylinder_observable(const FiniteSystem& system,
                               const std::map<int, int>& pattern);

/// f sampled at the grid coordinates. Requires an embedding.
Observable continuous_observable(const FiniteSystem& system,
                                 const std::function<double(double)>& f);

/// The limit profile of ergodic means of F(k)=k/M under the one-step
/// rotation: psi_a(t) = t + a/2 on [0, 1-a], bending linearly down to keep
/// the total integral 1/2 on (1-a, 1]. Defined for 0 < a <= 1, 0 <= t <= 1.
double psi(double a, double t);

}  // namespace ergo
