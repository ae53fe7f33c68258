#include "ergo/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace ergo {

namespace {

long long checked_mul(long long a, long long b) {
    long long out;
    if (__builtin_mul_overflow(a, b, &out))
        throw std::invalid_argument("rational arithmetic overflow");
    return out;
}

}  // namespace

Rational::Rational(long long n, long long d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

Rational operator+(Rational a, Rational b) {
    long long g = std::gcd(a.den, b.den);
    long long scale_a = b.den / g;
    long long scale_b = a.den / g;
    long long num = checked_mul(a.num, scale_a) + checked_mul(b.num, scale_b);
    long long den = checked_mul(a.den, scale_a);
    return Rational(num, den);
}

DiracMixture::DiracMixture(std::vector<DiracAtom> a) : atoms(std::move(a)) {
    if (atoms.empty()) throw std::invalid_argument("mixture needs at least one atom");
    Rational total(0, 1);
    for (const auto& atom : atoms) {
        if (atom.numerator <= 0 || atom.denominator <= 0)
            throw std::invalid_argument("mixture weights must be positive");
        total = total + Rational(atom.numerator, atom.denominator);
    }
    if (!(total == Rational(1, 1)))
        throw std::invalid_argument("mixture weights must sum to exactly 1");
}

long long DiracMixture::common_denominator() const {
    long long l = 1;
    for (const auto& atom : atoms)
        l = checked_mul(l / std::gcd(l, atom.denominator), atom.denominator);
    return l;
}

long long DiracMixture::multiplicity(Index j) const {
    const auto& atom = atoms.at(j);
    return checked_mul(atom.numerator, common_denominator() / atom.denominator);
}

double TestSuite::max_lipschitz() const {
    double lip = 0.0;
    for (const auto& f : functions) lip = std::max(lip, f.lipschitz);
    return lip;
}

TestFunction make_test_function(const std::string& name, double param) {
    constexpr double two_pi = 6.283185307179586476925286766559;
    if (name == "identity")
        return {"identity", [](double x) { return x; }, 1.0, 0.5};
    if (name == "square")
        return {"square", [](double x) { return x * x; }, 2.0, 1.0 / 3.0};
    if (name == "cos2pi")
        return {"cos2pi", [=](double x) { return std::cos(two_pi * x); }, two_pi, 0.0};
    if (name == "sin2pi")
        return {"sin2pi", [=](double x) { return std::sin(two_pi * x); }, two_pi, 0.0};
    if (name == "constant")
        return {"constant", [param](double) { return param; }, 0.0, param};
    throw std::invalid_argument("unknown test function: " + name);
}

double empirical_integral(std::span<const double> points, const TestFunction& f) {
    if (points.empty()) throw std::invalid_argument("empirical integral over empty set");
    KahanAccumulator acc;
    for (double y : points) acc.add(f.eval(y));
    return acc.value() / static_cast<double>(points.size());
}

double weakstar_gap(std::span<const double> points, const TestSuite& suite) {
    if (suite.functions.empty())
        throw std::invalid_argument("weakstar_gap: empty test suite");
    double gap = 0.0;
    for (const auto& f : suite.functions) {
        if (!f.reference_integral)
            throw std::domain_error("test function '" + f.name +
                                    "' lacks a reference integral");
        gap = std::max(gap, std::fabs(empirical_integral(points, f) - *f.reference_integral));
    }
    return gap;
}

std::vector<double> uniform_grid(Index m) {
    if (m == 0) throw std::invalid_argument("uniform_grid: M must be positive");
    std::vector<double> grid(m);
    for (Index k = 0; k < m; ++k) grid[k] = static_cast<double>(k) / static_cast<double>(m);
    return grid;
}

std::vector<double> build_grid(const DiracMixture& target, const TestSuite& suite,
                               double epsilon,
                               const std::function<bool(double)>& allowed,
                               std::uint64_t seed, MetricKind metric) {
    if (epsilon <= 0.0) throw std::invalid_argument("build_grid: epsilon must be positive");
    if (metric != MetricKind::circle && metric != MetricKind::euclidean_interval)
        throw std::invalid_argument("build_grid supports circle and interval metrics");
    Metric rho{metric, {}};

    // sigma keeps the atom balls disjoint and the suite oscillation under
    // epsilon on each ball; the 0.999 factor keeps both inequalities strict
    double sigma = 0.5;
    const auto& atoms = target.atoms;
    for (Index i = 0; i < atoms.size(); ++i)
        for (Index j = i + 1; j < atoms.size(); ++j)
            sigma = std::min(sigma, 0.5 * rho(atoms[i].point, atoms[j].point));
    double lip = suite.max_lipschitz();
    if (lip > 0.0) sigma = std::min(sigma, epsilon / lip);
    sigma *= 0.999;
    if (sigma <= 0.0)
        throw ConstructionError("build_grid: coincident atoms leave no placement radius");

    const long long denom = target.common_denominator();
    std::vector<double> grid;
    grid.reserve(static_cast<Index>(denom));
    std::set<double> used;
    Rng rng(seed);
    constexpr double inv_phi = 0.61803398874989484820;  // golden-ratio offsets

    for (Index a = 0; a < atoms.size(); ++a) {
        const auto& atom = atoms[a];
        long long multiplicity = target.multiplicity(a);
        double phase = uniform_unit(rng);
        long long placed = 0;
        long long budget = 10000 * multiplicity + 10000;
        for (long long t = 0; placed < multiplicity && budget > 0; ++t, --budget) {
            double u = phase + static_cast<double>(t) * inv_phi;
            u -= std::floor(u);
            double candidate = atom.point + sigma * (2.0 * u - 1.0);
            if (metric == MetricKind::circle) {
                candidate = wrap_unit(candidate);
            } else if (candidate < 0.0 || candidate > 1.0) {
                continue;
            }
            if (!allowed(candidate)) continue;
            if (!used.insert(candidate).second) continue;
            grid.push_back(candidate);
            ++placed;
        }
        if (placed < multiplicity)
            throw ConstructionError(
                "build_grid: allowed set too sparse near atom " + std::to_string(a) +
                " at coordinate " + std::to_string(atom.point));
    }
    return grid;
}

}  // namespace ergo
