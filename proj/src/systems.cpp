#include "ergo/systems.hpp"

#include <cmath>

namespace ergo {

FiniteSystem rotation_system(Index m, Index n) {
    if (m == 0) throw std::invalid_argument("rotation_system: M must be positive");
    if (n >= m) throw std::invalid_argument("rotation_system: need 0 <= N < M");
    Perm perm(m);
    std::vector<double> coords(m);
    for (Index k = 0; k < m; ++k) {
        perm[k] = (k + n) % m;
        coords[k] = static_cast<double>(k) / static_cast<double>(m);
    }
    return FiniteSystem(std::move(perm), std::move(coords), MetricKind::circle);
}

std::pair<Index, Index> convergent(double alpha, Index m_max) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("convergent: alpha must lie in (0,1)");
    if (m_max < 2) throw std::invalid_argument("convergent: M_max must be at least 2");

    // h/k via the standard recurrence; stop when the denominator would
    // exceed m_max or the remainder is exhausted by double precision
    long long h_prev = 1, h = 0;  // h_{-1}, h_0
    long long k_prev = 0, k = 1;  // k_{-1}, k_0
    long long best_n = 0, best_m = 1;
    double x = alpha;
    for (int iter = 0; iter < 64; ++iter) {
        double inv = 1.0 / x;
        double a_floor = std::floor(inv);
        if (a_floor < 1.0 || a_floor > 9.0e18) break;
        long long a = static_cast<long long>(a_floor);
        long long h_next = a * h + h_prev;
        long long k_next = a * k + k_prev;
        if (k_next > static_cast<long long>(m_max)) break;
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
        if (h >= 1) {
            best_n = h;
            best_m = k;
        }
        double frac = inv - a_floor;
        if (frac < 1e-15) break;
        x = frac;
    }
    if (best_n == 0)
        throw std::invalid_argument("convergent: no convergent with positive numerator fits");
    return {static_cast<Index>(best_n), static_cast<Index>(best_m)};
}

namespace {

// FKM: concatenate, in lexicographic order, the Lyndon words over
// {0..m-1} whose length divides n. Recursion depth is n+1.
void fkm_extend(int t, int p, int n, int m, std::vector<int>& word,
                std::vector<int>& out) {
    if (t > n) {
        if (n % p == 0) out.insert(out.end(), word.begin() + 1, word.begin() + 1 + p);
        return;
    }
    word[t] = word[t - p];
    fkm_extend(t + 1, p, n, m, word, out);
    for (int j = word[t - p] + 1; j < m; ++j) {
        word[t] = j;
        fkm_extend(t + 1, t, n, m, word, out);
    }
}

Index checked_power(int m, int n) {
    Index result = 1;
    for (int i = 0; i < n; ++i) {
        result *= static_cast<Index>(m);
        if (result > (Index{1} << 22))
            throw std::length_error("symbolic space exceeds the memory budget");
    }
    return result;
}

}  // namespace

DeBruijnSequence de_bruijn(int m, int n) {
    if (m < 2) throw std::invalid_argument("de_bruijn: alphabet size must be >= 2");
    if (n < 1) throw std::invalid_argument("de_bruijn: order must be >= 1");
    Index len = checked_power(m, n);
    DeBruijnSequence seq;
    seq.alphabet = m;
    seq.order = n;
    seq.symbols.reserve(len);
    std::vector<int> word(static_cast<Index>(n) + 1, 0);
    fkm_extend(1, 1, n, m, word, seq.symbols);
    return seq;
}

Index encode_window(std::span<const int> window, int alphabet) {
    Index code = 0;
    Index base = 1;
    for (int sym : window) {
        code += static_cast<Index>(sym) * base;
        base *= static_cast<Index>(alphabet);
    }
    return code;
}

std::vector<int> decode_window(Index code, const SymbolicShape& shape) {
    std::vector<int> window(shape.window_length());
    for (int& slot : window) {
        slot = static_cast<int>(code % shape.alphabet);
        code /= shape.alphabet;
    }
    return window;
}

FiniteSystem bernoulli_block_system(int m, int n_radius) {
    if (m < 2) throw std::invalid_argument("bernoulli_block_system: alphabet >= 2");
    if (n_radius < 0) throw std::invalid_argument("bernoulli_block_system: N >= 0");
    SymbolicShape shape{m, n_radius};
    const int len = shape.window_length();
    const Index size = checked_power(m, len);

    Perm perm(size);
    std::vector<double> coords(size);
    std::vector<int> window(len), shifted(len);
    for (Index code = 0; code < size; ++code) {
        window = decode_window(code, shape);
        for (int j = 0; j < len; ++j) shifted[j] = window[(j + 1) % len];
        perm[code] = encode_window(shifted, m);
        coords[code] = static_cast<double>(code);
    }
    return FiniteSystem(std::move(perm), std::move(coords), MetricKind::symbolic, shape);
}

FiniteSystem bernoulli_debruijn_system(int m, int n_radius) {
    if (m < 2) throw std::invalid_argument("bernoulli_debruijn_system: alphabet >= 2");
    if (n_radius < 0) throw std::invalid_argument("bernoulli_debruijn_system: N >= 0");
    SymbolicShape shape{m, n_radius};
    const int len = shape.window_length();
    DeBruijnSequence seq = de_bruijn(m, len);
    const Index size = seq.length();

    // code of the circular window starting at each sequence position
    std::vector<Index> window_code(size);
    std::vector<int> window(len);
    for (Index i = 0; i < size; ++i) {
        for (int j = 0; j < len; ++j) window[j] = seq.symbols[(i + j) % size];
        window_code[i] = encode_window(window, m);
    }

    Perm perm(size);
    std::vector<double> coords(size);
    for (Index i = 0; i < size; ++i) {
        perm[window_code[i]] = window_code[(i + 1) % size];
        coords[window_code[i]] = static_cast<double>(window_code[i]);
    }
    return FiniteSystem(std::move(perm), std::move(coords), MetricKind::symbolic, shape);
}

Observable delta_observable(Index m) {
    if (m == 0) throw std::invalid_argument("delta_observable: M must be positive");
    std::vector<double> values(m, 0.0);
    values[0] = static_cast<double>(m);
    return Observable(std::move(values));
}

Observable block_observable(Index m, Index k, std::vector<std::string>* warnings) {
    if (m == 0) throw std::invalid_argument("block_observable: M must be positive");
    if (k == 0 || k >= m)
        throw std::invalid_argument("block_observable: need 0 < K < M");
    if (k > m / 4 && warnings)
        warnings->push_back("block_observable: K > M/4 leaves fewer than four blocks");
    const Index r = m / k;
    std::vector<double> values(m, 0.0);
    for (Index block = 0; block < r; block += 2)
        for (Index i = block * k; i < (block + 1) * k; ++i) values[i] = 1.0;
    return Observable(std::move(values));
}

Observable coordinate_observable(Index m) {
    if (m == 0) throw std::invalid_argument("coordinate_observable: M must be positive");
    std::vector<double> values(m);
    for (Index i = 0; i < m; ++i)
        values[i] = static_cast<double>(i) / static_cast<double>(m);
    return Observable(std::move(values));
}

Observable cylinder_observable(const FiniteSystem& system,
                               const std::map<int, int>& pattern) {
    if (system.metric != MetricKind::symbolic)
        throw std::domain_error("cylinder_observable: symbolic systems only");
    const SymbolicShape& shape = system.symbolic;
    for (const auto& [pos, sym] : pattern) {
        if (pos < -shape.radius || pos > shape.radius)
            throw std::invalid_argument("cylinder pattern position outside the window");
        if (sym < 0 || sym >= shape.alphabet)
            throw std::invalid_argument("cylinder pattern symbol outside the alphabet");
    }
    std::vector<double> values(system.size(), 0.0);
    for (Index code = 0; code < system.size(); ++code) {
        std::vector<int> window = decode_window(code, shape);
        bool matches = true;
        for (const auto& [pos, sym] : pattern)
            if (window[pos + shape.radius] != sym) {
                matches = false;
                break;
            }
        if (matches) values[code] = 1.0;
    }
    return Observable(std::move(values));
}

Observable continuous_observable(const FiniteSystem& system,
                                 const std::function<double(double)>& f) {
    if (!system.has_embedding())
        throw std::domain_error("continuous_observable: system carries no embedding");
    std::vector<double> values(system.size());
    for (Index i = 0; i < system.size(); ++i) values[i] = f(system.coordinate(i));
    return Observable(std::move(values));
}

double psi(double a, double t) {
    if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("psi: need 0 < a <= 1");
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("psi: need 0 <= t <= 1");
    if (t <= 1.0 - a) return t + 0.5 * a;
    return t + 0.5 * a - 1.0 + (1.0 - t) / a;
}

}  // namespace ergo
