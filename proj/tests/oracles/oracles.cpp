#include "oracles.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>

#include <cmath>
#include <numbers>
#include <random>

namespace oracle {

std::complex<double> semicircle_m(std::complex<double> z)
{
    std::complex<double> r = std::sqrt(z * z - 4.0);
    std::complex<double> m = (-z + r) / 2.0;
    if (z.imag() > 0.0 && m.imag() < 0.0) m = (-z - r) / 2.0;
    if (z.imag() == 0.0 && z.real() > 2.0) m = (-z.real() + std::sqrt(z.real() * z.real() - 4.0)) / 2.0;
    return m;
}

double semicircle_density(double x)
{
    if (std::abs(x) >= 2.0) return 0.0;
    return std::sqrt(4.0 - x * x) / (2.0 * std::numbers::pi);
}

double semicircle_log_potential(double x)
{
    const double g = (x - std::sqrt(x * x - 4.0)) / 2.0;
    return g * g / 2.0 - std::log(g);
}

double semicircle_log_potential_quadrature(double x, int panels)
{
    // y = 2 cos(pi s), dy density = (2/pi) sin^2(pi s) ds
    using gl = boost::math::quadrature::gauss<double, 20>;
    double acc = 0.0;
    const double h = 1.0 / panels;
    for (int i = 0; i < panels; ++i) {
        auto f = [x](double s) {
            const double y = 2.0 * std::cos(std::numbers::pi * s);
            const double sn = std::sin(std::numbers::pi * s);
            return std::log(std::abs(x - y)) * 2.0 * sn * sn;
        };
        acc += gl::integrate(f, i * h, (i + 1) * h);
    }
    return acc;
}

double goe_rate_quadrature(double x)
{
    if (x <= 2.0) return 0.0;
    using gl = boost::math::quadrature::gauss<double, 30>;
    auto f = [](double u) { return 2.0 * u * u * std::sqrt(4.0 + u * u); };
    return 0.5 * gl::integrate(f, 0.0, std::sqrt(x - 2.0));
}

double goe_rate_closed(double x)
{
    const double r = std::sqrt(x * x - 4.0);
    return x * r / 4.0 - std::log((x + r) / 2.0);
}

double bbp_outlier(double theta)
{
    const double t2 = 2.0 * theta;
    return t2 > 1.0 ? t2 + 1.0 / t2 : 2.0;
}

WishartProfileDensity::WishartProfileDensity(int N) : expo_((N - 3) / 2.0), z_(1.0)
{
    // q = sqrt(p(1-p)) v on p in (0,1), v in (-1,1); composite Gauss-Legendre in both.
    using gl = boost::math::quadrature::gauss<double, 30>;
    const int panels = 40;
    double acc = 0.0;
    for (int i = 0; i < panels; ++i) {
        auto fp = [&](double p) {
            const double w = std::sqrt(p * (1.0 - p));
            double inner = 0.0;
            for (int j = 0; j < panels; ++j) {
                auto fv = [&](double v) { return std::pow(p * (1.0 - p) * (1.0 - v * v), expo_) * w; };
                inner += gl::integrate(fv, -1.0 + 2.0 * j / panels, -1.0 + 2.0 * (j + 1) / panels);
            }
            return inner;
        };
        acc += gl::integrate(fp, double(i) / panels, double(i + 1) / panels);
    }
    z_ = acc;
}

double WishartProfileDensity::normalizer_closed() const
{
    // int (p(1-p))^{e+1/2} dp * int (1-v^2)^e dv
    const double e = expo_;
    return boost::math::beta(e + 1.5, e + 1.5) * boost::math::beta(0.5, e + 1.0);
}

double WishartProfileDensity::operator()(double p, double q) const
{
    const double det = p * (1.0 - p) - q * q;
    if (det <= 0.0) return 0.0;
    return std::pow(det, expo_) / z_;
}

double WishartProfileDensity::box_probability(double p0, double p1, double q0, double q1) const
{
    using gl = boost::math::quadrature::gauss<double, 20>;
    constexpr int panels = 8;
    const double hp = (p1 - p0) / panels, hq = (q1 - q0) / panels;
    double acc = 0.0;
    for (int i = 0; i < panels; ++i)
        for (int j = 0; j < panels; ++j) {
            const double qa = q0 + j * hq;
            auto fp = [&](double p) {
                return gl::integrate([&](double q) { return (*this)(p, q); }, qa, qa + hq);
            };
            acc += gl::integrate(fp, p0 + i * hp, p0 + (i + 1) * hp);
        }
    return acc;
}

double spherical_rank_one(double t, int n, int beta)
{
    const double a = beta / 2.0;
    return boost::math::hypergeometric_1F1(a, a * n, t);
}

double spherical_integral_mc(const std::vector<double>& c, double t, int beta, int samples, unsigned seed)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    double acc = 0.0;
    for (int s = 0; s < samples; ++s) {
        double norm2 = 0.0, q = 0.0;
        for (double ci : c) {
            double m2 = 0.0;
            for (int r = 0; r < beta; ++r) {
                const double g = nd(gen);
                m2 += g * g;
            }
            norm2 += m2;
            q += ci * m2;
        }
        acc += std::exp(t * q / norm2);
    }
    return acc / samples;
}

}  // namespace oracle
