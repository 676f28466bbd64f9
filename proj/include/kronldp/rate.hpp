#pragma once

#include "kronldp/linalg.hpp"
#include "kronldp/mde.hpp"

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace kronldp {

struct RateBreakdown {
    double theta = 0.0;
    double x = 0.0;
    CMat psi;
    double J = 0.0;
    double K = 0.0;
    CMat varphi;
    CMat phi_hat;
    double F = 0.0;
    int beta = 1;
};

struct OptConfig {
    int starts = 8;                 // multi-start count, at least 8
    double eps0 = 0.0;              // 0: half of Tr[(Id/L) S(Id/L)]
    double stabilization_tol = 1e-4;
    int max_ladder = 12;
    int coarse_points = 64;
    int max_evals = 1200;           // Nelder-Mead budget per start
    double simplex_step = 0.3;
    double penalty = 1.0;           // weight on the relative constraint violation
    std::uint64_t seed = 0x5eed;
    std::vector<CMat> warm_starts;  // profiles tried in addition to the default starts
};

struct RateResult {
    double x = 0.0;
    double value = 0.0;
    double theta_star = 0.0;
    CMat psi_star;
    double epsilon_used = 0.0;
    bool stability_flag = false;
    std::vector<double> eps_ladder;
    std::vector<double> ladder_values;
    int evaluations = 0;
    std::string diagnostics;
};

// J, K, phi, F and the inf-sup rate function for one limit measure.
// Thread-safe: the per-x cache is guarded.
class RateModel {
public:
    explicit RateModel(const LimitingMeasure& mu);

    const LimitingMeasure& measure() const { return mu_; }

    double j_value(double x, double theta) const;
    double k_value(double theta, const CMat& psi, int beta) const;
    // (varphi, phi_hat)
    std::pair<CMat, CMat> phi_maps(double theta, double x, const CMat& psi) const;
    double f_value(double theta, double x, const CMat& psi, int beta) const;
    RateBreakdown breakdown(double theta, double x, const CMat& psi, int beta) const;

    double b0() const;
    // Tr[psi S(psi)]
    double coupling(const CMat& psi) const;
    // L^2 Tr[psi S(psi)] / 4
    double a_const(const CMat& psi) const;
    double theta_cap(double M_cap, double eta, double eps) const;

    // (theta_star, F_star) over [-m(x)/2, Theta(x+1, (r+x)/2, eps)].
    std::pair<double, double> sup_theta(double x, const CMat& psi, int beta, double eps,
                                        int coarse_points = 64) const;

    RateResult rate_function(double x, int beta, const OptConfig& cfg = {}) const;
    std::vector<RateResult> rate_curve(const std::vector<double>& xs, int beta, const OptConfig& cfg = {}) const;

    // m(x) and M(x) at a point right of the support (cached).
    double m_at(double x) const;
    double log_potential_at(double x) const;

private:
    struct Point {
        double m = 0.0;
        CMat M;
        double logpot = 0.0;
        bool has_logpot = false;
    };
    Point point(double x, bool need_logpot) const;

    const LimitingMeasure& mu_;
    mutable std::mutex mtx_;
    mutable std::map<double, Point> cache_;
};

}  // namespace kronldp
