#include <doctest.h>

#include <cmath>
#include <thread>

#include "ergo/ergodic.hpp"
#include "ergo/systems.hpp"
#include "oracles.hpp"

using namespace ergo;

TEST_CASE("ergodic_mean basics") {
    auto system = rotation_system(64, 1);
    auto f = oracle::random_observable(64, 3);

    SUBCASE("n = 1 returns the value at the point") {
        for (Index x : {Index{0}, Index{13}, Index{63}})
            CHECK(ergodic_mean(system, f, x, 1) == doctest::Approx(f[x]));
    }
    SUBCASE("n = M on a transitive system is the global average") {
        double av = global_average(f);
        for (Index x : {Index{0}, Index{20}, Index{63}})
            CHECK(ergodic_mean(system, f, x, 64) == doctest::Approx(av).epsilon(1e-13));
    }
    SUBCASE("n = 0 is rejected") {
        CHECK_THROWS_AS(ergodic_mean(system, f, 0, 0), std::invalid_argument);
    }
}

TEST_CASE("delta observable means follow the closed form") {
    const Index m = 8, k_window = 4;
    auto system = rotation_system(m, 1);
    auto f = delta_observable(m);
    // A_K(F,T,k) = M/K for k > M-K (and k = 0), else 0
    CHECK(ergodic_mean(system, f, 6, k_window) == doctest::Approx(2.0));
    CHECK(ergodic_mean(system, f, 2, k_window) == doctest::Approx(0.0));
    CHECK(ergodic_mean(system, f, 0, k_window) == doctest::Approx(2.0));
}

TEST_CASE("prefix-sum means equal naive summation") {
    SUBCASE("random permutation system, spot grid") {
        FiniteSystem system(oracle::random_permutation(500, 9), {}, MetricKind::abstract);
        auto f = oracle::random_observable(500, 10);
        MeanCalculator calc(system, f);
        for (Index x : sample_indices(500, 25, 1))
            for (Index n : {Index{1}, Index{2}, Index{3}, Index{17}, Index{100},
                            Index{499}, Index{500}, Index{501}, Index{1234}})
                CHECK(calc.mean(x, n) ==
                      doctest::Approx(oracle::naive_mean(system, f, x, n)).epsilon(1e-10));
    }
    SUBCASE("transitive system at size 10^4") {
        auto system = rotation_system(10000, 7);
        auto f = oracle::random_observable(10000, 11);
        MeanCalculator calc(system, f);
        for (Index x : sample_indices(10000, 20, 2))
            for (Index n : {Index{1}, Index{99}, Index{5000}, Index{9999}, Index{10000},
                            Index{20001}})
                CHECK(calc.mean(x, n) ==
                      doctest::Approx(oracle::naive_mean(system, f, x, n)).epsilon(1e-10));
    }
    SUBCASE("one-shot ergodic_mean agrees with the calculator") {
        FiniteSystem system(oracle::random_permutation(200, 4), {}, MetricKind::abstract);
        auto f = oracle::random_observable(200, 5);
        MeanCalculator calc(system, f);
        for (Index x : sample_indices(200, 10, 3))
            for (Index n : {Index{1}, Index{7}, Index{200}, Index{350}})
                CHECK(ergodic_mean(system, f, x, n) == doctest::Approx(calc.mean(x, n)));
    }
}

TEST_CASE("mean_curve matches the psi profile on the coordinate observable") {
    const Index m = 10000;
    auto system = rotation_system(m, 1);
    auto f = coordinate_observable(m);
    for (double a : {0.25, 0.5, 1.0}) {
        const Index n = static_cast<Index>(a * m);
        for (Index x : sample_indices(m, 50, 17)) {
            double mean = ergodic_mean(system, f, x, n);
            double reference = psi(a, double(x) / double(m));
            CHECK(std::fabs(mean - reference) <= 10.0 / double(m));
        }
    }
}

TEST_CASE("mean_curve on a constant observable is flat") {
    auto system = rotation_system(100, 3);
    Observable c(std::vector<double>(100, 2.25));
    std::vector<Index> grid{1, 2, 5, 10, 50, 100, 150};
    auto profile = mean_curve(system, c, 7, grid);
    REQUIRE(profile.samples.size() == grid.size());
    for (const auto& [n, v] : profile.samples) CHECK(v == doctest::Approx(2.25));
}

TEST_CASE("mean_curve on the odd half-shift approaches the two-point average") {
    const Index m = 100001;
    auto system = rotation_system(m, (m - 1) / 2);
    auto f = coordinate_observable(m);  // lifting of f(t) = t
    const Index n = 1000;
    Index checked = 0;
    for (Index x : sample_indices(m, 200, 23)) {
        double t = double(x) / double(m);
        // the two-point closed form holds away from the wrap bands at 0, 1/2
        if (circle_distance(t, 0.0) < 0.006 || circle_distance(t, 0.5) < 0.006) continue;
        double target = 0.5 * (t + wrap_unit(t + 0.5));
        CHECK(std::fabs(ergodic_mean(system, f, x, n) - target) <= 0.02);
        ++checked;
    }
    CHECK(checked >= 150);
}

TEST_CASE("stabilization_scan") {
    SUBCASE("constant observable plateaus to the full horizon") {
        auto system = rotation_system(512, 1);
        Observable c(std::vector<double>(512, 1.0));
        auto sample = sample_indices(512, 64, 5);
        auto result = stabilization_scan(system, c, 0.01, 0.05, 16, sample);
        CHECK(result.found);
        CHECK(result.plateau_length == 512);
        CHECK(result.covered_fraction == doctest::Approx(1.0));
    }
    SUBCASE("block observable stalls below K") {
        const Index m = 100000, k_block = 1000;
        auto system = rotation_system(m, 1);
        auto g = block_observable(m, k_block);
        auto sample = sample_indices(m, 256, 0);
        auto result = stabilization_scan(system, g, 0.1, 0.05, 16, sample);
        CHECK(result.found);
        CHECK(result.plateau_length < k_block / 2);
        CHECK(result.covered_fraction >= 0.95);

        // directly confirm the plateau does not extend to L = K: too many
        // points drift by order one within [16, K]
        MeanCalculator calc(system, g);
        Index moved = 0;
        for (Index x : sample) {
            double lo = 1e300, hi = -1e300;
            for (Index n = 16; n <= k_block; n *= 2) {
                double a = calc.mean(x, n);
                lo = std::min(lo, a);
                hi = std::max(hi, a);
            }
            if (hi - lo > 0.1) ++moved;
        }
        CHECK(double(moved) / double(sample.size()) > 0.05);
    }
    SUBCASE("irrational rotation plateaus to M with the space average") {
        auto [n_rot, m] = convergent((std::sqrt(5.0) - 1.0) / 2.0, 3000);
        auto system = rotation_system(m, n_rot);
        auto f = continuous_observable(system, [](double t) { return t; });
        auto sample = sample_indices(m, 64, 9);
        // discrepancy of the golden rotation keeps the means within 0.02 of
        // the space average from n = 64 on, so the plateau runs to M
        auto result = stabilization_scan(system, f, 0.05, 0.05, 64, sample);
        CHECK(result.found);
        CHECK(result.plateau_length == m);
        for (Index x : sample_indices(m, 10, 10))
            CHECK(std::fabs(ergodic_mean(system, f, x, m) - 0.5) <= 0.01);
    }
    SUBCASE("degenerate scan reports the flag value") {
        auto system = rotation_system(8, 1);
        Observable c(std::vector<double>(8, 0.0));
        auto sample = sample_indices(8, 8, 0);
        auto result = stabilization_scan(system, c, 0.1, 0.5, 9, sample);
        CHECK_FALSE(result.found);
        CHECK(result.plateau_length == 8);
    }
}

TEST_CASE("fluctuation_count") {
    SUBCASE("stated examples") {
        std::vector<double> constant(10, 3.0);
        CHECK(fluctuation_count(constant, 0.5) == 0);
        std::vector<double> zigzag{0, 1, 0, 1};
        CHECK(fluctuation_count(zigzag, 0.5) == 2);
        std::vector<double> shallow{0, 0.3, 0};
        CHECK(fluctuation_count(shallow, 0.5) == 0);
    }
    SUBCASE("equals the DP oracle exhaustively on 3-letter sequences") {
        const double values[3] = {0.0, 0.5, 1.0};
        for (int len = 1; len <= 9; ++len) {
            int total = 1;
            for (int i = 0; i < len; ++i) total *= 3;
            std::vector<double> seq(len);
            for (int word = 0; word < total; ++word) {
                int w = word;
                for (int i = 0; i < len; ++i) {
                    seq[i] = values[w % 3];
                    w /= 3;
                }
                for (double eps : {0.5, 0.75})
                    CHECK(fluctuation_count(seq, eps) ==
                          oracle::dp_fluctuation_count(seq, eps));
            }
        }
    }
    SUBCASE("equals the DP oracle on random sequences") {
        Rng rng(31);
        for (int trial = 0; trial < 2000; ++trial) {
            Index len = 1 + uniform_below(rng, 20);
            std::vector<double> seq(len);
            for (double& s : seq) s = uniform_unit(rng);
            double eps = 0.05 + 0.9 * uniform_unit(rng);
            CHECK(fluctuation_count(seq, eps) == oracle::dp_fluctuation_count(seq, eps));
        }
    }
    SUBCASE("epsilon must be positive") {
        std::vector<double> seq{0.0, 1.0};
        CHECK_THROWS_AS(fluctuation_count(seq, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(fluctuation_count(seq, -0.1), std::invalid_argument);
    }
    SUBCASE("monotone in epsilon and invariant under constant shifts") {
        Rng rng(33);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<double> seq(15);
            for (double& s : seq) s = uniform_unit(rng);
            Index previous = 100;
            for (double eps : {0.05, 0.1, 0.2, 0.4, 0.8}) {
                Index count = fluctuation_count(seq, eps);
                CHECK(count <= previous);
                previous = count;
                std::vector<double> shifted(seq);
                for (double& s : shifted) s += 5.0;
                CHECK(fluctuation_count(shifted, eps) == count);
            }
        }
    }
}

TEST_CASE("fluctuation_report") {
    SUBCASE("constant observable has zero fluctuations everywhere") {
        auto system = rotation_system(256, 1);
        Observable c(std::vector<double>(256, 1.5));
        auto sample = sample_indices(256, 32, 7);
        auto report = fluctuation_report(system, c, 0.25, 256, sample);
        for (Index count : report.counts) CHECK(count == 0);
        REQUIRE(report.occupancy.size() == 1);
        CHECK(report.occupancy[0] == doctest::Approx(1.0));
        CHECK(report.occupancy_threshold(0.99) == 0);
    }
    SUBCASE("delta observable fluctuates near the spike") {
        const Index m = 1024, k_window = 256;
        auto system = rotation_system(m, 1);
        auto f = delta_observable(m);
        // points just below M-K watch the mean jump from 0 to M/L once the
        // window reaches the spike
        std::vector<Index> pts{m - k_window - 1, m - k_window - 2};
        auto report = fluctuation_report(system, f, 0.5, m, pts);
        for (Index count : report.counts) CHECK(count >= 1);
    }
    SUBCASE("occupancy is non-decreasing and ends at 1") {
        auto system = rotation_system(987, 610);
        auto f = continuous_observable(system, [](double t) { return t; });
        auto sample = sample_indices(987, 64, 13);
        auto report = fluctuation_report(system, f, 0.01, 987, sample);
        double previous = 0.0;
        for (double o : report.occupancy) {
            CHECK(o >= previous);
            previous = o;
        }
        CHECK(report.occupancy.back() == doctest::Approx(1.0));
    }
}

TEST_CASE("tail_mass") {
    SUBCASE("bounded observable above its maximum") {
        auto f = oracle::random_observable(100, 21);
        CHECK(tail_mass(f, 1.0) == doctest::Approx(0.0));
    }
    SUBCASE("delta observable keeps mass 1 below M") {
        auto f = delta_observable(512);
        for (double threshold : {0.0, 1.0, 100.0, 511.0})
            CHECK(tail_mass(f, threshold) == doctest::Approx(1.0));
        CHECK(tail_mass(f, 512.0) == doctest::Approx(0.0));
    }
    SUBCASE("coordinate observable at threshold one half") {
        auto f = coordinate_observable(4);
        CHECK(tail_mass(f, 0.5) == doctest::Approx(0.1875));
    }
    SUBCASE("tail at zero is the mean magnitude; monotone in threshold") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            auto f = oracle::random_observable(200, seed);
            std::vector<double> magnitudes;
            for (double v : f.values) magnitudes.push_back(std::fabs(v));
            CHECK(tail_mass(f, 0.0) ==
                  doctest::Approx(global_average(Observable(magnitudes))).epsilon(1e-13));
            double previous = tail_mass(f, 0.0);
            for (double threshold : {0.1, 0.3, 0.6, 0.9}) {
                double mass = tail_mass(f, threshold);
                CHECK(mass <= previous + 1e-15);
                previous = mass;
            }
        }
    }
}

TEST_CASE("mean_gap") {
    auto system = rotation_system(10000, 1);
    auto sample = sample_indices(10000, 100, 19);

    SUBCASE("K = L gives zero") {
        auto f = oracle::random_observable(10000, 2);
        CHECK(mean_gap(system, f, 3000, 3000, sample) == doctest::Approx(0.0));
    }
    SUBCASE("nearby windows on a bounded observable") {
        auto f = oracle::random_observable(10000, 3);
        CHECK(mean_gap(system, f, 3000, 3003, sample) <= 0.01);
    }
    SUBCASE("delta observable keeps the gap at M/L between the fronts") {
        const Index m = 1024, k_short = 256, l_long = 512;
        auto rot = rotation_system(m, 1);
        auto f = delta_observable(m);
        std::vector<Index> between;
        for (Index x = m - l_long + 1; x < m - k_short; ++x) between.push_back(x);
        double gap = mean_gap(rot, f, k_short, l_long, between);
        CHECK(gap == doctest::Approx(double(m) / double(l_long)));
    }
}

TEST_CASE("mean-of-means and shift identities") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Index m = 64 + 13 * seed;
        FiniteSystem system(oracle::random_permutation(m, seed), {}, MetricKind::abstract);
        auto f = oracle::random_observable(m, seed + 100);
        MeanCalculator calc(system, f);
        double av_abs = tail_mass(f, 0.0);  // = Av(|F|)
        double max_abs = 0.0;
        for (double v : f.values) max_abs = std::max(max_abs, std::fabs(v));

        std::vector<double> composed(m);
        for (Index y = 0; y < m; ++y) composed[y] = f[system.perm[y]];
        Observable f_after_t(composed);

        for (Index n : {Index{2}, Index{17}, m / 2}) {
            // Av(|A_n|) <= Av(|F|)
            std::vector<double> abs_means(m);
            for (Index x = 0; x < m; ++x) abs_means[x] = std::fabs(calc.mean(x, n));
            CHECK(global_average(Observable(abs_means)) <= av_abs + 1e-12);

            for (Index x = 0; x < m; ++x) {
                // exact route: A_n(F.T, T, x) = A_n(F, T, Tx) term by term
                CHECK(oracle::naive_mean(system, f_after_t, x, n) ==
                      oracle::naive_mean(system, f, system.perm[x], n));
                // bound: |A_n(Tx) - A_n(x)| <= 2 max|F| / n
                CHECK(std::fabs(calc.mean(system.perm[x], n) - calc.mean(x, n)) <=
                      2.0 * max_abs / double(n) + 1e-12);
            }
        }
    }
}

TEST_CASE("mean queries are safe and deterministic under concurrency") {
    auto system = rotation_system(5000, 7);
    auto f = oracle::random_observable(5000, 55);
    MeanCalculator calc(system, f);

    std::vector<double> serial(5000);
    for (Index x = 0; x < 5000; ++x) serial[x] = calc.mean(x, 123 + x % 77);

    std::vector<double> parallel(5000);
    std::vector<std::thread> pool;
    for (Index t = 0; t < 8; ++t)
        pool.emplace_back([&, t] {
            for (Index x = t; x < 5000; x += 8) parallel[x] = calc.mean(x, 123 + x % 77);
        });
    for (auto& worker : pool) worker.join();
    CHECK(parallel == serial);

    auto sample = sample_indices(5000, 64, 3);
    auto single = fluctuation_report(system, f, 0.02, 5000, sample, 1);
    auto threaded = fluctuation_report(system, f, 0.02, 5000, sample, 4);
    CHECK(single.counts == threaded.counts);
    CHECK(single.occupancy == threaded.occupancy);
}

TEST_CASE("limit_functional") {
    auto system = rotation_system(1000, 1);
    auto f = coordinate_observable(1000);

    SUBCASE("a = 1 on a transitive system is the global average") {
        CHECK(limit_functional(system, f, 123, 1.0) ==
              doctest::Approx(global_average(f)).epsilon(1e-12));
    }
    SUBCASE("matches psi on the coordinate observable") {
        for (double a : {0.25, 0.5, 0.75})
            for (Index x : {Index{100}, Index{500}, Index{900}})
                CHECK(std::fabs(limit_functional(system, f, x, a) -
                                psi(a, double(x) / 1000.0)) <= 0.01);
    }
    SUBCASE("argument validation") {
        CHECK_THROWS_AS(limit_functional(system, f, 0, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(limit_functional(system, f, 0, -0.5), std::invalid_argument);
        CHECK_THROWS_AS(limit_functional(system, f, 0, 1e-9), std::invalid_argument);
    }
}
