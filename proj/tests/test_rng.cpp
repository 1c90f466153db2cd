#include "doctest.h"

#include "mimoae/errors.hpp"
#include "mimoae/rng.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

using namespace mimoae;

TEST_CASE("same seed and stream reproduce the sequence") {
    RngStream a(42, 7);
    RngStream b(42, 7);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("streams and seeds decorrelate") {
    RngStream a(42, 0);
    RngStream b(42, 1);
    RngStream c(43, 0);
    int equal_ab = 0, equal_ac = 0;
    for (int i = 0; i < 1000; ++i) {
        std::uint64_t va = a.next_u64();
        equal_ab += (va == b.next_u64());
        equal_ac += (va == c.next_u64());
    }
    CHECK(equal_ab == 0);
    CHECK(equal_ac == 0);
}

TEST_CASE("uniform01 range and moments") {
    RngStream s(1, 0);
    const int n = 1000000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double u = s.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sum2 += u * u;
    }
    double mean = sum / n;
    double var = sum2 / n - mean * mean;
    // sd of the mean is 1/sqrt(12 n)
    CHECK(std::abs(mean - 0.5) < 3.0 / std::sqrt(12.0 * n));
    CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.01));
}

TEST_CASE("normal moments") {
    RngStream s(2, 0);
    const int n = 1000000;
    double sum = 0.0, sum2 = 0.0, sum4 = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = s.normal();
        sum += x;
        sum2 += x * x;
        sum4 += x * x * x * x;
    }
    CHECK(std::abs(sum / n) < 3.0 / std::sqrt(double(n)));
    CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(sum4 / n == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("complex gaussian is circular with unit total variance") {
    RngStream s(3, 0);
    const int n = 500000;
    std::complex<double> mean(0.0, 0.0);
    double e2 = 0.0;
    std::complex<double> pseudo(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
        std::complex<double> z = s.complex_gaussian();
        mean += z;
        e2 += std::norm(z);
        pseudo += z * z;
    }
    CHECK(std::abs(mean) / double(n) < 4.0 / std::sqrt(double(n)));
    CHECK(e2 / n == doctest::Approx(1.0).epsilon(0.01));
    // circularity: E[z^2] = 0
    CHECK(std::abs(pseudo) / double(n) < 4.0 / std::sqrt(double(n)));
}

TEST_CASE("uniform_int covers the range uniformly") {
    RngStream s(4, 0);
    const std::size_t m = 7;
    const int n = 70000;
    std::vector<int> counts(m, 0);
    for (int i = 0; i < n; ++i) {
        std::size_t k = s.uniform_int(m);
        REQUIRE(k < m);
        ++counts[k];
    }
    double expect = double(n) / m;
    double sd = std::sqrt(expect * (1.0 - 1.0 / m));
    for (std::size_t k = 0; k < m; ++k)
        CHECK(std::abs(counts[k] - expect) < 5.0 * sd);
}

TEST_CASE("uniform_int edge cases") {
    RngStream s(5, 0);
    CHECK(s.uniform_int(1) == 0);
    CHECK_THROWS_AS(s.uniform_int(0), InvalidInputError);
}

TEST_CASE("accessors report the identity") {
    RngStream s(99, 1234567);
    CHECK(s.seed() == 99);
    CHECK(s.stream_index() == 1234567);
}
