#include "kronldp/spherical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kronldp {

double log_spherical_integral(const std::vector<double>& lambda, double t, int beta)
{
    if (lambda.empty()) throw std::invalid_argument("log_spherical_integral: empty spectrum");
    if (beta != 1 && beta != 2) throw std::invalid_argument("log_spherical_integral: beta must be 1 or 2");
    if (t == 0.0) return 0.0;
    const auto [mn_it, mx_it] = std::minmax_element(lambda.begin(), lambda.end());
    // <u, D u> = c + <u, (D - c) u> on the sphere; shift so the series has positive terms
    const double c = t > 0.0 ? *mn_it : *mx_it;
    const double spread = *mx_it - *mn_it;
    if (spread == 0.0) return t * c;
    const double ts = std::abs(t) * spread;
    const std::size_t n = lambda.size();
    const double alpha = 0.5 * beta * n;

    // e_k = ts^k b_k / (alpha)_k with k b_k = (beta/2) sum_m p_m b_{k-m}, p_m = sum_i mu_i^m,
    // mu_i = |lambda_i - c| / spread in [0, 1]
    std::vector<double> mu(n);
    for (std::size_t i = 0; i < n; ++i) mu[i] = std::abs(lambda[i] - c) / spread;
    std::vector<double> pw(mu), p{0.0}, e{1.0};
    double log_scale = 0.0;
    double sum = 1.0;
    const std::size_t k_max = static_cast<std::size_t>(4.0 * ts + 50.0 * std::sqrt(ts) + 200.0);
    for (std::size_t k = 1; k <= k_max; ++k) {
        double pk = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            pk += pw[i];
            pw[i] *= mu[i];
        }
        p.push_back(pk);
        double acc = 0.0, r = 1.0;
        for (std::size_t m = 1; m <= k; ++m) {
            r *= ts / (alpha + double(k - m));
            acc += p[m] * r * e[k - m];
            if (r == 0.0) break;
        }
        const double ek = 0.5 * beta * acc / double(k);
        e.push_back(ek);
        sum += ek;
        if (sum > 1e250) {
            for (auto& v : e) v *= 1e-250;
            sum *= 1e-250;
            log_scale += 250.0 * std::log(10.0);
        }
        if (double(k) > ts && ek < 1e-17 * sum) break;
    }
    return t * c + log_scale + std::log(sum);
}

}  // namespace kronldp
