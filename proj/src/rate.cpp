#include "kronldp/rate.hpp"

#include "kronldp/errors.hpp"
#include "kronldp/nelder_mead.hpp"
#include "kronldp/profile.hpp"
#include "kronldp/rng.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace kronldp {

RateModel::RateModel(const LimitingMeasure& mu) : mu_(mu) {}

RateModel::Point RateModel::point(double x, bool need_logpot) const
{
    {
        std::lock_guard<std::mutex> lock(mtx_);
        auto it = cache_.find(x);
        if (it != cache_.end() && (it->second.has_logpot || !need_logpot)) return it->second;
    }
    Point p;
    auto rp = mu_.stieltjes_real(x);
    p.m = rp.m;
    p.M = rp.M;
    if (need_logpot) {
        p.logpot = mu_.log_potential(x);
        p.has_logpot = true;
    }
    std::lock_guard<std::mutex> lock(mtx_);
    auto& slot = cache_[x];
    if (!slot.has_logpot) slot = p;
    return slot;
}

double RateModel::m_at(double x) const { return point(x, false).m; }
double RateModel::log_potential_at(double x) const { return point(x, true).logpot; }

double RateModel::j_value(double x, double theta) const
{
    if (!(theta > 0.0)) throw std::invalid_argument("j_value: theta must be positive");
    const Point px = point(x, false);
    const double two_theta = 2.0 * theta;
    const double base = -0.5 * (1.0 + std::log(two_theta));
    if (two_theta < -px.m) {
        const double t = mu_.inverse_neg_stieltjes(two_theta);
        return theta * t + base - 0.5 * point(t, true).logpot;
    }
    return theta * x + base - 0.5 * point(x, true).logpot;
}

double RateModel::k_value(double theta, const CMat& psi, int beta) const
{
    const StructureSet& s = mu_.structure();
    const int L = s.L;
    if (psi.rows() != L || psi.cols() != L) throw std::invalid_argument("k_value: psi must be L x L");
    const CMat pt = beta == 1 ? CMat(psi.transpose()) : CMat(psi.adjoint());
    const CMat a0t = beta == 1 ? CMat(s.A0.transpose()) : CMat(s.A0.adjoint());
    const double ld = log_det_hpd(psi);
    if (!std::isfinite(ld)) return -std::numeric_limits<double>::infinity();
    const double quad = (pt * apply_S(s, pt)).trace().real();
    const double lin = (a0t * psi).trace().real();
    return double(L) * L * theta * theta * quad + L * theta * lin + 0.5 * (ld + L * std::log(double(L)));
}

std::pair<CMat, CMat> RateModel::phi_maps(double theta, double x, const CMat& psi) const
{
    if (!(theta > 0.0)) throw std::invalid_argument("phi_maps: theta must be positive");
    const int L = mu_.L();
    const Point px = point(x, false);
    const double two_theta = 2.0 * theta;
    CMat Mt = px.M;
    if (two_theta < -px.m) Mt = point(mu_.inverse_neg_stieltjes(two_theta), false).M;
    CMat varphi = -Mt / (two_theta * L);
    const double c = std::max(0.0, 1.0 + px.m / two_theta);
    CMat phi_hat = varphi + c * psi;
    return {hermitian_part(varphi), hermitian_part(phi_hat)};
}

RateBreakdown RateModel::breakdown(double theta, double x, const CMat& psi, int beta) const
{
    RateBreakdown b;
    b.theta = theta;
    b.x = x;
    b.psi = psi;
    b.beta = beta;
    if (theta == 0.0) {
        b.F = 0.0;
        return b;
    }
    auto [vp, ph] = phi_maps(theta, x, psi);
    b.varphi = vp;
    b.phi_hat = ph;
    b.J = j_value(x, theta);
    b.K = k_value(theta, ph, beta);
    b.F = beta * (mu_.L() * b.J - b.K);
    return b;
}

double RateModel::f_value(double theta, double x, const CMat& psi, int beta) const
{
    if (theta < 0.0) throw std::invalid_argument("f_value: theta must be non-negative");
    if (theta == 0.0) return 0.0;
    auto [vp, ph] = phi_maps(theta, x, psi);
    return beta * (mu_.L() * j_value(x, theta) - k_value(theta, ph, beta));
}

double RateModel::b0() const { return 2.0 * mu_.L() * op_norm(mu_.structure().A0); }

double RateModel::coupling(const CMat& psi) const
{
    return (psi * apply_S(mu_.structure(), psi)).trace().real();
}

double RateModel::a_const(const CMat& psi) const
{
    const double L = mu_.L();
    return L * L * coupling(psi) / 4.0;
}

double RateModel::theta_cap(double M_cap, double eta, double eps) const
{
    if (!(eta > mu_.r_inf())) throw std::domain_error("theta_cap: eta must exceed r_inf");
    if (!(eps > 0.0)) throw std::invalid_argument("theta_cap: eps must be positive");
    const double L = mu_.L();
    return -m_at(eta) + 4.0 * (M_cap + b0()) / (L * L * eps);
}

std::pair<double, double> RateModel::sup_theta(double x, const CMat& psi, int beta, double eps,
                                               int coarse_points) const
{
    const double q = coupling(psi);
    if (q < eps - 1e-12) throw std::invalid_argument("sup_theta: Tr[psi S(psi)] below eps");
    const double L = mu_.L();
    const double theta_x = -m_at(x) / 2.0;
    const double cap = theta_cap(x + 1.0, 0.5 * (mu_.r_inf() + x), eps);
    // F(theta_x + u) <= L (x + |A0|) u - 4 a u^2, so F < 0 beyond the root of the envelope.
    const double slope = L * (x + op_norm(mu_.structure().A0));
    if (slope <= 0.0) return {theta_x, 0.0};
    const double hi = std::min(cap, theta_x + 1.05 * slope / (4.0 * a_const(psi)) + 1e-9);

    auto F = [&](double th) { return f_value(th, x, psi, beta); };
    const int n = std::max(coarse_points, 4);
    std::vector<double> grid(n), vals(n);
    std::size_t best = 0;
    for (int i = 0; i < n; ++i) {
        grid[i] = theta_x + (hi - theta_x) * i / (n - 1);
        vals[i] = i == 0 ? 0.0 : F(grid[i]);
        if (vals[i] > vals[best]) best = i;
    }
    if (vals[best] <= 0.0) return {theta_x, 0.0};
    const double lo_b = grid[best == 0 ? 0 : best - 1];
    const double hi_b = grid[std::min<std::size_t>(best + 1, n - 1)];
    boost::uintmax_t it = 200;
    auto res = boost::math::tools::brent_find_minima([&](double th) { return -F(th); }, lo_b, hi_b, 40, it);
    if (-res.second >= vals[best]) return {res.first, -res.second};
    return {grid[best], vals[best]};
}

namespace {

int param_count(int L, int beta) { return beta == 1 ? L * L : 2 * L * L; }

CMat factor_from_params(const std::vector<double>& p, int L, int beta)
{
    CMat c(L, L);
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) {
            const int k = i * L + j;
            c(i, j) = beta == 1 ? cplx(p[k], 0.0) : cplx(p[k], p[k + L * L]);
        }
    return c;
}

std::vector<double> params_from_profile(const CMat& psi, int beta)
{
    const int L = static_cast<int>(psi.rows());
    CMat c = psd_sqrt(psi);
    std::vector<double> p(param_count(L, beta));
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) {
            p[i * L + j] = c(i, j).real();
            if (beta == 2) p[i * L + j + L * L] = c(i, j).imag();
        }
    return p;
}

CMat profile_from_params(const std::vector<double>& p, int L, int beta)
{
    const CMat c = factor_from_params(p, L, beta);
    CMat psi = c * c.adjoint();
    const double tr = psi.trace().real();
    if (!(tr > 1e-300) || !psi.allFinite()) return CMat::Identity(L, L) / double(L);
    return hermitian_part(psi / tr);
}

}  // namespace

RateResult RateModel::rate_function(double x, int beta, const OptConfig& cfg) const
{
    if (beta != 1 && beta != 2) throw std::invalid_argument("rate_function: beta must be 1 or 2");
    const StructureSet& s = mu_.structure();
    const int L = s.L;
    if (beta == 1 && !has_real_entries(s))
        throw std::invalid_argument("rate_function: beta=1 requires a real structure");
    const double unit = std::max(1.0, std::abs(mu_.r_inf()));
    if (!(x > mu_.r_inf() + LimitingMeasure::kGuard * unit)) throw std::domain_error("rate_function: x must exceed r_inf");
    const CMat id = CMat::Identity(L, L) / double(L);
    const double q_id = coupling(id);
    if (!(q_id > 0.0)) throw DegenerateModel("rate_function: S vanishes on every profile");

    RateResult out;
    out.x = x;
    const double eps0 = cfg.eps0 > 0.0 ? std::min(cfg.eps0, q_id) : 0.5 * q_id;

    if (L == 1) {
        auto [th, f] = sup_theta(x, id, beta, q_id, cfg.coarse_points);
        out.value = f;
        out.theta_star = th;
        out.psi_star = id;
        out.epsilon_used = q_id;
        out.stability_flag = true;
        out.eps_ladder = {q_id};
        out.ladder_values = {f};
        out.diagnostics = "L=1: profile fixed";
        return out;
    }

    // Smallest move toward Id/L restoring Tr[psi S(psi)] >= eps.
    auto project = [&](const CMat& psi, double eps) {
        if (coupling(psi) >= eps) return psi;
        double lo = 0.0, hi = 1.0;
        for (int i = 0; i < 60; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (coupling((1.0 - mid) * psi + mid * id) >= eps) hi = mid;
            else lo = mid;
        }
        return CMat((1.0 - hi) * psi + hi * id);
    };

    int evals = 0;
    auto objective = [&](const CMat& psi0, double eps, double* theta_out, CMat* psi_out) {
        const double q0 = coupling(psi0);
        const CMat psi = project(psi0, eps);
        auto [th, f] = sup_theta(x, psi, beta, eps, cfg.coarse_points);
        ++evals;
        if (theta_out) *theta_out = th;
        if (psi_out) *psi_out = psi;
        return f + cfg.penalty * std::max(0.0, eps - q0) / eps;
    };

    std::vector<CMat> starts;
    starts.push_back(id);
    {
        Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(s.A0));
        const CVec v = es.eigenvectors().col(L - 1);
        starts.push_back(0.8 * v * v.adjoint() + 0.2 * id);
    }
    for (const auto& w : cfg.warm_starts)
        if (w.rows() == L && is_profile(w, 1e-8)) starts.push_back(hermitian_part(w));
    CounterRng rng(cfg.seed);
    for (int i = 0; static_cast<int>(starts.size()) < std::max(cfg.starts, 8); ++i) {
        CounterRng r = rng.derive(i);
        CMat c(L, L);
        for (int a = 0; a < L; ++a)
            for (int b = 0; b < L; ++b) c(a, b) = cplx(r.normal(), beta == 2 ? r.normal() : 0.0);
        starts.push_back(hermitian_part(c * c.adjoint() / (c * c.adjoint()).trace().real()));
    }

    NelderMeadOptions nm;
    nm.initial_step = cfg.simplex_step;
    nm.max_evals = cfg.max_evals;
    nm.f_tol = 1e-11;
    nm.x_tol = 1e-8;

    double prev_value = std::numeric_limits<double>::infinity();
    CMat prev_psi = id;
    double prev_theta = 0.0;
    std::ostringstream diag;
    for (int m = 0; m < cfg.max_ladder; ++m) {
        const double eps = eps0 * std::ldexp(1.0, -m);
        double best = std::numeric_limits<double>::infinity();
        CMat best_psi = id;
        double best_theta = 0.0;

        std::vector<CMat> trial_starts = starts;
        if (m > 0) trial_starts.insert(trial_starts.begin(), prev_psi);
        for (const auto& st : trial_starts) {
            auto fn = [&](const std::vector<double>& p) {
                return objective(profile_from_params(p, L, beta), eps, nullptr, nullptr);
            };
            NelderMeadResult r = nelder_mead(fn, params_from_profile(project(st, eps), beta), nm);
            double th = 0.0;
            CMat ps;
            const double v = objective(profile_from_params(r.x, L, beta), eps, &th, &ps);
            if (v < best) {
                best = v;
                best_psi = ps;
                best_theta = th;
            }
        }
        // the previous optimum stays feasible for the larger set
        if (prev_value < best) {
            best = prev_value;
            best_psi = prev_psi;
            best_theta = prev_theta;
        }
        out.eps_ladder.push_back(eps);
        out.ladder_values.push_back(best);
        diag << "eps=" << eps << " I=" << best << "; ";
        const bool stable = m > 0 && std::abs(prev_value - best) <= cfg.stabilization_tol;
        prev_value = best;
        prev_psi = best_psi;
        prev_theta = best_theta;
        out.epsilon_used = eps;
        if (stable) {
            out.stability_flag = true;
            break;
        }
    }
    out.value = prev_value;
    out.psi_star = prev_psi;
    out.theta_star = prev_theta;
    out.evaluations = evals;
    out.diagnostics = diag.str();
    return out;
}

std::vector<RateResult> RateModel::rate_curve(const std::vector<double>& xs, int beta, const OptConfig& cfg) const
{
    std::vector<RateResult> out;
    OptConfig c = cfg;
    for (double x : xs) {
        out.push_back(rate_function(x, beta, c));
        c.warm_starts = cfg.warm_starts;
        c.warm_starts.push_back(out.back().psi_star);
    }
    return out;
}

}  // namespace kronldp
