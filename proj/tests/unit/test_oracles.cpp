#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

TEST_CASE("semicircle Stieltjes transform closed form")
{
    CHECK(std::abs(oracle::semicircle_m({0.0, 2.0}) - std::complex<double>(0.0, std::sqrt(2.0) - 1.0)) < 1e-14);
    CHECK(oracle::semicircle_m({2.5, 0.0}).real() == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(oracle::semicircle_m({3.0, 0.0}).real() == doctest::Approx((-3.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-14));
    // m solves m^2 + z m + 1 = 0
    for (double re : {-1.5, 0.3, 2.7})
        for (double im : {0.05, 1.0}) {
            const std::complex<double> z(re, im), m = oracle::semicircle_m(z);
            CHECK(std::abs(m * m + z * m + 1.0) < 1e-13);
            CHECK(m.imag() > 0.0);
        }
}

TEST_CASE("semicircle log potential: closed form vs quadrature")
{
    for (double x : {2.0, 2.3, 3.0, 5.0})
        CHECK(oracle::semicircle_log_potential(x) ==
              doctest::Approx(oracle::semicircle_log_potential_quadrature(x, 400)).epsilon(1e-9));
    CHECK(oracle::semicircle_log_potential(2.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("GOE rate: quadrature vs closed form")
{
    for (double x : {2.01, 2.2, 2.5, 3.0, 4.0})
        CHECK(oracle::goe_rate_quadrature(x) == doctest::Approx(oracle::goe_rate_closed(x)).epsilon(1e-12));
    CHECK(oracle::goe_rate_quadrature(3.0) == doctest::Approx(0.71463).epsilon(1e-5));
    CHECK(oracle::goe_rate_quadrature(2.0) == 0.0);
}

TEST_CASE("BBP closed form")
{
    CHECK(oracle::bbp_outlier(1.0) == 2.5);
    CHECK(oracle::bbp_outlier(0.75) == doctest::Approx(1.5 + 2.0 / 3.0));
    CHECK(oracle::bbp_outlier(0.4) == 2.0);
}

TEST_CASE("Wishart profile density normalization")
{
    for (int N : {10, 100}) {
        oracle::WishartProfileDensity d(N);
        CHECK(d.normalizer() == doctest::Approx(d.normalizer_closed()).epsilon(1e-8));
        CHECK(d.box_probability(0.0, 1.0, -0.5, 0.5) == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("spherical rank-one integral vs Monte Carlo")
{
    const std::vector<double> c{1.0, 0.0, 0.0, 0.0, 0.0};
    for (int beta : {1, 2}) {
        const double exact = oracle::spherical_rank_one(2.0, 5, beta);
        const double mc = oracle::spherical_integral_mc(c, 2.0, beta, 400000, 11);
        CHECK(mc == doctest::Approx(exact).epsilon(5e-3));
    }
    CHECK(oracle::spherical_rank_one(0.0, 7, 1) == 1.0);
}
