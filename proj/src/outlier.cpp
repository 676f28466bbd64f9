#include "kronldp/outlier.hpp"

#include "kronldp/errors.hpp"
#include "kronldp/rate.hpp"
#include "kronldp/structure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace kronldp {

std::string to_string(OutlierMethod m)
{
    switch (m) {
    case OutlierMethod::DetRoot: return "det-root";
    case OutlierMethod::LambdaRoot: return "lambda-root";
    default: return "none";
    }
}

namespace {

double unit_of(const LimitingMeasure& mu) { return std::max(1.0, std::abs(mu.r_inf())); }

void require_outside(const LimitingMeasure& mu, double z)
{
    if (!(z > mu.r_inf() + LimitingMeasure::kGuard * unit_of(mu)))
        throw std::domain_error("outlier: z must exceed r_inf");
}

bool is_pd(const CMat& psi) { return min_eigenvalue(hermitian_part(psi)) > 1e-14; }

}  // namespace

double outlier_det(const StructureSet& s, double theta, const CMat& psi, const CMat& M)
{
    const int n = s.L * s.L;
    if (s.k == 0) return 1.0;
    CMat T = CMat::Identity(n, n) + 2.0 * theta * s_tilt(s) * kron(M, psi);
    return Eigen::PartialPivLU<CMat>(T).determinant().real();
}

double outlier_det(const LimitingMeasure& mu, double theta, const CMat& psi, double z)
{
    require_outside(mu, z);
    return outlier_det(mu.structure(), theta, psi, mu.stieltjes_real(z).M);
}

double lambda_sym(const StructureSet& s, double theta, const CMat& psi, const CMat& M)
{
    if (!is_pd(psi)) throw std::invalid_argument("lambda_sym: psi must be positive definite");
    if (s.k == 0) return 0.0;
    const CMat R = psd_sqrt(kron(hermitian_part(-M), 2.0 * theta * hermitian_part(psi)));
    return max_eigenvalue(hermitian_part(R * s_tilt(s) * R));
}

double lambda_sym(const LimitingMeasure& mu, double theta, double z, const CMat& psi)
{
    require_outside(mu, z);
    return lambda_sym(mu.structure(), theta, psi, mu.stieltjes_real(z).M);
}

OutlierSolve largest_outlier(const LimitingMeasure& mu, double theta, const CMat& psi, const OutlierOptions& opt)
{
    if (!(theta > 0.0)) throw std::invalid_argument("largest_outlier: theta must be positive");
    const StructureSet& s = mu.structure();
    const double r = mu.r_inf();
    OutlierSolve out;
    out.theta = theta;
    out.psi = psi;
    out.Z = r;
    // ||M(z)|| <= 1/(z - r) keeps 2 theta S (M (x) psi) a contraction above r + c1 theta.
    out.c0 = r + 0.01;
    out.c1 = 2.0 * op_norm(s_tilt(s)) * op_norm(psi);
    if (s.k == 0) return out;

    const bool use_lambda = opt.prefer_lambda && is_pd(psi);
    const OutlierMethod method = use_lambda ? OutlierMethod::LambdaRoot : OutlierMethod::DetRoot;
    auto g = [&](const CMat& M) {
        return use_lambda ? 1.0 - lambda_sym(s, theta, psi, M) : outlier_det(s, theta, psi, M);
    };

    const double lo = LimitingMeasure::kGuard * unit_of(mu);
    const double hi = out.c0 + out.c1 * theta - r;
    const int n = std::max(opt.grid, 8);
    const double ratio = std::pow(lo / hi, 1.0 / (n - 1));
    double z_prev = r + hi;
    auto p_prev = mu.stieltjes_real(z_prev);
    double g_prev = g(p_prev.M);
    double d = hi;
    for (int i = 1; i < n; ++i) {
        d = i == n - 1 ? lo : d * ratio;
        const double z = r + d;
        auto p = mu.stieltjes_real(z, &p_prev.M);
        const double gz = g(p.M);
        if ((gz > 0.0) != (g_prev > 0.0) || gz == 0.0) {
            double a = z, b = z_prev;
            CMat Mb = p_prev.M;
            const double ga = gz;
            while (b - a > opt.tol * std::max(1.0, std::abs(b))) {
                const double mid = 0.5 * (a + b);
                if (mid <= a || mid >= b) break;
                auto pm = mu.stieltjes_real(mid, &Mb);
                const double gm = g(pm.M);
                if ((gm > 0.0) == (ga > 0.0) && gm != 0.0) a = mid;
                else {
                    b = mid;
                    Mb = pm.M;
                }
            }
            out.Z = 0.5 * (a + b);
            out.bracket = {a, b};
            out.method = method;
            out.has_outlier = true;
            out.residual = std::abs(outlier_det(s, theta, psi, mu.stieltjes_real(out.Z).M));
            return out;
        }
        z_prev = z;
        p_prev = std::move(p);
        g_prev = gz;
    }
    out.bracket = {r, r + hi};
    return out;
}

TiltSolve tilt_for_target(const LimitingMeasure& mu, double x, const CMat& psi, const TiltOptions& opt)
{
    if (!is_pd(psi)) throw std::invalid_argument("tilt_for_target: psi must be positive definite");
    require_outside(mu, x);
    RateModel rm(mu);
    const double theta0 = -rm.m_at(x) / 2.0;
    auto z_of = [&](double th, CMat* ph) {
        CMat phi = rm.phi_maps(th, x, psi).second;
        if (ph) *ph = phi;
        return largest_outlier(mu, th, phi, opt.outlier).Z;
    };

    TiltSolve out;
    std::ostringstream tr;
    double th_prev = theta0;
    double z_prev = z_of(theta0, &out.phi_hat);
    tr << theta0 << ":" << z_prev << " ";
    if (z_prev >= x) {
        out.theta = theta0;
        out.Z = z_prev;
        out.residual = z_prev - x;
        out.trace = tr.str();
        return out;
    }
    const double th_max = theta0 * opt.theta_max_factor;
    for (double th = theta0 * opt.growth; th <= th_max; th *= opt.growth) {
        ++out.scan_steps;
        const double z = z_of(th, nullptr);
        tr << th << ":" << z << " ";
        if (z >= x) {
            double a = th_prev, b = th;
            while (b - a > opt.tol * b) {
                const double mid = 0.5 * (a + b);
                if (mid <= a || mid >= b) break;
                if (z_of(mid, nullptr) < x) a = mid;
                else b = mid;
            }
            out.theta = b;
            out.Z = z_of(b, &out.phi_hat);
            out.residual = out.Z - x;
            out.trace = tr.str();
            return out;
        }
        th_prev = th;
    }
    throw NumericalError("tilt_for_target: no bracket below theta_max; scan " + tr.str());
}

}  // namespace kronldp
