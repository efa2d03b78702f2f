#include <doctest.h>

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "nids/common.hpp"
#include "nids/kernels.hpp"
#include "nids/rng.hpp"

using namespace nids;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double scale = 10.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = (rng.uniform() * 2.0 - 1.0) * scale;
    return v;
}

bool bits_equal(double a, double b) {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

} // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar dot matches a plain 4-lane reference") {
    const auto& k = kern::scalar_backend();
    std::vector<double> a{1, 2, 3, 4, 5};
    std::vector<double> b{10, 20, 30, 40, 50};
    CHECK(k.dot(a.data(), b.data(), 5) == doctest::Approx(550.0));
    CHECK(k.dot(a.data(), b.data(), 0) == 0.0);
    CHECK(k.sum(a.data(), 5) == doctest::Approx(15.0));
}

TEST_CASE("avx2 backend is bit-identical to the scalar reference") {
    const kern::Backend* avx2 = kern::avx2_backend();
    if (!avx2) return; // not available on this machine; scalar is the only backend
    const auto& sc = kern::scalar_backend();

    Rng rng(20240811);
    // Sizes straddle the 4-lane boundary and the tail cases.
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 15u, 16u, 17u, 63u, 64u, 67u, 1000u}) {
        std::vector<double> a = random_vec(rng, n);
        std::vector<double> b = random_vec(rng, n);
        CHECK(bits_equal(sc.dot(a.data(), b.data(), n), avx2->dot(a.data(), b.data(), n)));
        CHECK(bits_equal(sc.sum(a.data(), n), avx2->sum(a.data(), n)));
        CHECK(bits_equal(sc.sumsq_centered(a.data(), n, 0.37),
                         avx2->sumsq_centered(a.data(), n, 0.37)));

        std::vector<double> mean = random_vec(rng, n, 1.0);
        std::vector<double> hiv = random_vec(rng, n, 0.0);
        std::vector<double> ln = random_vec(rng, n, 1.0);
        for (auto& v : hiv) v = rng.uniform() + 0.1;
        CHECK(bits_equal(
            sc.gaussian_loglik(a.data(), mean.data(), hiv.data(), ln.data(), n),
            avx2->gaussian_loglik(a.data(), mean.data(), hiv.data(), ln.data(), n)));

        std::vector<double> y1 = b;
        std::vector<double> y2 = b;
        sc.axpy(1.75, a.data(), y1.data(), n);
        avx2->axpy(1.75, a.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(bits_equal(y1[i], y2[i]));

        std::vector<double> acc1 = b;
        std::vector<double> acc2 = b;
        sc.vadd(acc1.data(), a.data(), n);
        avx2->vadd(acc2.data(), a.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(bits_equal(acc1[i], acc2[i]));

        acc1 = b;
        acc2 = b;
        sc.accum_sq_diff(acc1.data(), a.data(), mean.data(), n);
        avx2->accum_sq_diff(acc2.data(), a.data(), mean.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(bits_equal(acc1[i], acc2[i]));

        std::vector<double> out1(n);
        std::vector<double> out2(n);
        std::vector<double> inv = hiv;
        sc.standardize_row(a.data(), mean.data(), inv.data(), out1.data(), n);
        avx2->standardize_row(a.data(), mean.data(), inv.data(), out2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(bits_equal(out1[i], out2[i]));
    }
}

TEST_CASE("matvec multiplies rows via dot") {
    // W = [[1,2],[3,4]], b = [1,-1], x = [1,1] -> [4, 6]
    std::vector<double> w{1, 2, 3, 4};
    std::vector<double> bias{1, -1};
    std::vector<double> x{1, 1};
    std::vector<double> out(2);
    kern::matvec(w.data(), bias.data(), x.data(), out.data(), 2, 2);
    CHECK(out[0] == doctest::Approx(4.0));
    CHECK(out[1] == doctest::Approx(6.0));
}

TEST_CASE("force_backend selects and rejects") {
    CHECK_THROWS_AS(kern::force_backend("no_such_backend"), Error);
    kern::force_backend("scalar");
    CHECK(std::string(kern::active().name) == "scalar");
    if (kern::avx2_backend()) {
        kern::force_backend("avx2");
        CHECK(std::string(kern::active().name) == "avx2");
    }
}

} // TEST_SUITE
