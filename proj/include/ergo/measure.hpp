#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ergo/common.hpp"

namespace ergo {

/// Exact rational, always normalized with positive denominator.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d);

    friend Rational operator+(Rational a, Rational b);
    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Weight kept as the written numerator/denominator pair: the denominators
/// fix the grid size, so 3/3 means three points where 1/1 means one.
struct DiracAtom {
    double point = 0.0;
    long long numerator = 1;
    long long denominator = 1;
};

/// Rational convex combination of Dirac measures; weights are positive and
/// sum to exactly 1 in rational arithmetic.
struct DiracMixture {
    std::vector<DiracAtom> atoms;

    DiracMixture() = default;
    explicit DiracMixture(std::vector<DiracAtom> a);

    /// Least common denominator of the weights as written: the grid size
    /// that realizes every weight as an integer multiplicity.
    long long common_denominator() const;

    /// Number of grid points atom j receives out of common_denominator().
    long long multiplicity(Index j) const;
};

/// An evaluable continuous test function with a declared Lipschitz modulus
/// of continuity, plus the analytic value of its integral against the
/// reference measure when known.
struct TestFunction {
    std::string name;
    std::function<double(double)> eval;
    double lipschitz = 0.0;
    std::optional<double> reference_integral;
};

struct TestSuite {
    std::vector<TestFunction> functions;

    double max_lipschitz() const;
};

/// Registered test functions, addressable from JSON configs:
///   identity, square, cos2pi, sin2pi, constant{value}.
/// Reference integrals are against Lebesgue measure on [0,1].
TestFunction make_test_function(const std::string& name, double param = 0.0);

/// (1/|Y|) sum f(y) -- the integral of f against the empirical measure.
double empirical_integral(std::span<const double> points, const TestFunction& f);

/// max_i |empirical_integral(Y, f_i) - integral(f_i)|. Every suite function
/// must carry a reference integral.
double weakstar_gap(std::span<const double> points, const TestSuite& suite);

/// The grid {0, 1/M, ..., (M-1)/M}.
std::vector<double> uniform_grid(Index m);

/// Builds a finite set realizing the mixture to weak-* accuracy epsilon
/// against the suite: n_j points are placed within sigma of atom j, inside
/// the `allowed` set, where sigma is computed from the atom separation and
/// the suite's Lipschitz constants. Placement uses seeded low-discrepancy
/// offsets, so runs reproduce exactly. Throws ConstructionError naming the
/// atom if the allowed set is too sparse at sampling resolution.
std::vector<double> build_grid(const DiracMixture& target, const TestSuite& suite,
                               double epsilon,
                               const std::function<bool(double)>& allowed,
                               std::uint64_t seed,
                               MetricKind metric = MetricKind::euclidean_interval);

}  // namespace ergo
