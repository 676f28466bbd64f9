#include "kronldp/mde.hpp"

#include "kronldp/errors.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kronldp {

namespace {

CMat update_matrix(const StructureSet& s, cplx z, const CMat& M)
{
    CMat b = apply_S(s, M) - s.A0;
    b.diagonal().array() += z;
    return b;
}

CMat defect(const StructureSet& s, cplx z, const CMat& M)
{
    CMat r = update_matrix(s, z, M) * M;
    r.diagonal().array() += 1.0;
    return r;
}

CMat imag_part(const CMat& M) { return (M - M.adjoint()) / cplx(0.0, 2.0); }

bool herglotz_ok(const CMat& M, double slack = 1e-10)
{
    return min_eigenvalue(imag_part(M)) >= -slack * std::max(1.0, op_norm(M));
}

// Newton on G(M) = Id + (z - A0 + S[M]) M; M is overwritten only on success.
bool newton(const StructureSet& s, cplx z, CMat& M, double tol, int max_steps, int& iters, double& res,
            int min_steps = 0)
{
    const int L = s.L;
    const int n = L * L;
    CMat cur = M;
    double r = op_norm(defect(s, z, cur));
    for (int step = 0; step < max_steps; ++step) {
        if (r <= tol && step >= min_steps) break;
        const CMat b = update_matrix(s, z, cur);
        CMat g = b * cur;
        g.diagonal().array() += 1.0;
        std::vector<CMat> am;
        am.reserve(s.A.size());
        for (const auto& a : s.A) am.push_back(a * cur);
        CMat jac(n, n);
        CMat dg(L, L);
        for (int bcol = 0; bcol < L; ++bcol)
            for (int arow = 0; arow < L; ++arow) {
                dg.setZero();
                dg.col(bcol) = b.col(arow);
                for (std::size_t j = 0; j < s.A.size(); ++j) dg.noalias() += s.A[j].col(arow) * am[j].row(bcol);
                jac.col(arow + bcol * L) = Eigen::Map<const CVec>(dg.data(), n);
            }
        Eigen::FullPivLU<CMat> lu(jac);
        if (!lu.isInvertible()) return false;
        const CVec h = lu.solve(-Eigen::Map<const CVec>(g.data(), n));
        if (!h.allFinite()) return false;
        CMat next = cur + Eigen::Map<const CMat>(h.data(), L, L);
        const double rn = op_norm(defect(s, z, next));
        if (!std::isfinite(rn) || rn > 1e3 * std::max(r, 1e-8)) return false;
        if (step >= min_steps && rn >= r && r <= tol) break;
        cur = std::move(next);
        r = rn;
        ++iters;
    }
    if (!(r <= tol)) return false;
    M = std::move(cur);
    res = r;
    return true;
}

MdeSolution solve_upper(const StructureSet& s, cplx z, const MdeOptions& opt, const CMat* warm)
{
    const int L = s.L;
    MdeSolution out;
    out.z = z;
    const CMat id = CMat::Identity(L, L);
    if (is_deterministic(s)) {
        CMat b = -s.A0;
        b.diagonal().array() += z;
        out.M = -b.inverse();
        out.residual = op_norm(defect(s, z, out.M));
        return out;
    }
    CMat M = warm ? *warm : CMat(-id / z);
    double r = op_norm(defect(s, z, M));
    double alpha = 1.0;
    int next_newton = 0;
    int it = 0;
    while (r > opt.tol) {
        if (it >= opt.max_iter) {
            throw NumericalError("solve_mde: max_iter exceeded at z=(" + std::to_string(z.real()) + "," +
                                 std::to_string(z.imag()) + "), residual " + std::to_string(r));
        }
        if (r < 1e-2 && it >= next_newton) {
            CMat trial = M;
            double rn = r;
            int ni = 0;
            if (newton(s, z, trial, opt.tol, 40, ni, rn) && herglotz_ok(trial)) {
                M = std::move(trial);
                r = rn;
                it += ni;
                break;
            }
            next_newton = it + std::max(50, it / 2);
        }
        Eigen::PartialPivLU<CMat> lu(update_matrix(s, z, M));
        const CMat cand = -lu.inverse();
        if (!cand.allFinite()) throw NumericalError("solve_mde: singular update matrix");
        bool accepted = false;
        for (double a = alpha; a >= 1.0 / 64.0; a *= 0.5) {
            CMat next = (1.0 - a) * M + a * cand;
            const double rn = op_norm(defect(s, z, next));
            if (rn < r) {
                M = std::move(next);
                r = rn;
                alpha = std::min(1.0, 2.0 * a);
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // the undamped map is a contraction in the hyperbolic metric; take it
            M = cand;
            r = op_norm(defect(s, z, M));
            alpha = 1.0;
        }
        ++it;
    }
    out.M = M;
    out.residual = r;
    out.iterations = it;
    return out;
}

// Monotone iteration M <- -(x - A0 + S[M])^{-1} from an upper bound of the
// solution; converges to the maximal negative definite fixed point.
bool solve_real_monotone(const StructureSet& s, double x, const MdeOptions& opt, const CMat* warm, MdeSolution& out)
{
    const int L = s.L;
    const cplx z(x, 0.0);
    CMat M = warm ? CMat(hermitian_part(*warm).real().cast<cplx>()) : CMat::Zero(L, L);
    double r = std::numeric_limits<double>::infinity();
    int next_newton = 8;
    for (int it = 0; it < opt.max_iter; ++it) {
        const CMat b = hermitian_part(update_matrix(s, z, M));
        Eigen::LLT<CMat> llt(b);
        if (llt.info() != Eigen::Success) return false;
        M = -llt.solve(CMat::Identity(L, L));
        M = hermitian_part(M);
        r = op_norm(defect(s, z, M));
        if (r <= opt.tol) {
            out.M = M;
            out.residual = r;
            out.iterations = it + 1;
            return true;
        }
        if (it >= next_newton && r < 0.5) {
            CMat trial = M;
            double rn = r;
            int ni = 0;
            if (newton(s, z, trial, opt.tol, 40, ni, rn)) {
                trial = hermitian_part(trial);
                const double scale = std::max(1.0, op_norm(M));
                const bool neg_def = max_eigenvalue(trial) < 0.0;
                const bool below = min_eigenvalue(M - trial) >= -1e-9 * scale;
                if (neg_def && below) {
                    out.M = trial;
                    out.residual = op_norm(defect(s, z, trial));
                    out.iterations = it + 1 + ni;
                    return true;
                }
            }
            next_newton = it + std::max(8, it / 2);
        }
    }
    return false;
}

}  // namespace

double mde_residual(const StructureSet& s, cplx z, const CMat& M) { return op_norm(defect(s, z, M)); }

MdeSolution solve_mde(const StructureSet& s, cplx z, const MdeOptions& opt, const CMat* warm)
{
    if (!(opt.tol > 0.0)) throw std::invalid_argument("solve_mde: tol must be positive");
    if (z.imag() < 0.0) {
        MdeSolution conj = solve_mde(s, std::conj(z), opt, nullptr);
        conj.z = z;
        conj.M = conj.M.adjoint().eval();
        return conj;
    }
    if (z.imag() > 0.0) return solve_upper(s, z, opt, warm);

    const double x = z.real();
    MdeSolution out;
    out.z = z;
    if (solve_real_monotone(s, x, opt, warm, out)) return out;
    if (warm && solve_real_monotone(s, x, opt, nullptr, out)) return out;

    AxisSolution ax = solve_mde_to_axis(s, x, 1.0, 1e-14, opt.tol);
    const double im = op_norm(imag_part(ax.sol.M));
    if (ax.eta_reached != 0.0 || im > 1e-9 * std::max(1.0, op_norm(ax.sol.M)) || max_eigenvalue(ax.sol.M) >= 0.0)
        throw NumericalError("solve_mde: real z=" + std::to_string(x) + " is inside or too close to the spectrum");
    out.M = hermitian_part(ax.sol.M).real().cast<cplx>();
    out.residual = op_norm(defect(s, z, out.M));
    out.iterations = ax.sol.iterations;
    return out;
}

AxisSolution solve_mde_to_axis(const StructureSet& s, double x, double eta_start, double eta_floor, double tol)
{
    MdeOptions opt;
    opt.tol = tol;
    AxisSolution out;
    out.sol = solve_mde(s, cplx(x, eta_start), opt);
    CMat M = out.sol.M;
    int iters = out.sol.iterations;
    double eta = eta_start;
    while (eta > eta_floor) {
        eta = std::max(0.5 * eta, eta_floor);
        const cplx z(x, eta);
        CMat trial = M;
        double rn = 0.0;
        if (newton(s, z, trial, tol, 40, iters, rn) && herglotz_ok(trial)) M = std::move(trial);
        else M = solve_mde(s, z, opt, &M).M;
    }
    out.eta_reached = eta;
    CMat trial = M;
    double rn = 0.0;
    if (newton(s, cplx(x, 0.0), trial, tol, 40, iters, rn, 4) && herglotz_ok(trial)) {
        M = std::move(trial);
        out.eta_reached = 0.0;
    }
    out.sol.z = cplx(x, out.eta_reached);
    out.sol.M = M;
    out.sol.residual = op_norm(defect(s, out.sol.z, M));
    out.sol.iterations = iters;
    return out;
}

double SpectralDensity::trapezoid_mass() const
{
    double acc = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) acc += 0.5 * (density[i] + density[i - 1]) * (grid[i] - grid[i - 1]);
    return acc;
}

double density_at(const StructureSet& s, double x, const DensityOptions& opt, CMat* component, double* eta_used)
{
    const double L = s.L;
    MdeOptions mo;
    double eta = opt.eta_start;
    CMat M = solve_mde(s, cplx(x, eta), mo).M;
    auto value = [&](const CMat& m) { return m.trace().imag() / (std::numbers::pi * L); };
    double prev = value(M);
    double val = prev;
    while (true) {
        const double next = eta * opt.eta_factor;
        if (next < opt.eta_floor) break;
        eta = next;
        const cplx z(x, eta);
        CMat trial = M;
        double rn = 0.0;
        int it = 0;
        if (newton(s, z, trial, mo.tol, 40, it, rn) && herglotz_ok(trial)) M = std::move(trial);
        else M = solve_mde(s, z, mo, &M).M;
        val = value(M);
        if (std::abs(val - prev) < opt.extrapolation_tol) break;
        prev = val;
    }
    if (component) *component = imag_part(M) / std::numbers::pi;
    if (eta_used) *eta_used = eta;
    return val;
}

SpectralDensity density(const StructureSet& s, double x_lo, double x_hi, int G, const DensityOptions& opt)
{
    if (!(x_lo < x_hi)) throw std::invalid_argument("density: x_lo must be below x_hi");
    if (G < 2) throw std::invalid_argument("density: G must be at least 2");
    SpectralDensity out;
    out.grid.resize(G);
    out.density.resize(G);
    if (opt.components) out.matrix_components.resize(G);
    for (int i = 0; i < G; ++i) {
        const double x = x_lo + (x_hi - x_lo) * i / (G - 1);
        double eta = 0.0;
        CMat comp;
        out.grid[i] = x;
        out.density[i] = density_at(s, x, opt, opt.components ? &comp : nullptr, &eta);
        if (opt.components) out.matrix_components[i] = comp;
        out.eta_final = std::max(out.eta_final, eta);
    }
    return out;
}

namespace {

constexpr double kAxisFloor = 1e-14;
constexpr double kImagThreshold = 1e-9;

// True when x lies to the right of the support: the boundary value of M at x is
// real and negative definite.
bool outside_support(const StructureSet& s, double x)
{
    AxisSolution ax;
    try {
        ax = solve_mde_to_axis(s, x, 1.0, kAxisFloor, 1e-12);
    } catch (const NumericalError&) {
        return false;
    }
    const CMat& M = ax.sol.M;
    const double scale = std::max(1.0, op_norm(M));
    if (op_norm(imag_part(M)) > kImagThreshold * scale) return false;
    return max_eigenvalue(M) < 0.0;
}

StructureSet reflected(const StructureSet& s)
{
    StructureSet r = s;
    r.A0 = -s.A0;
    return r;
}

}  // namespace

SupportInfo right_edge(const StructureSet& s, double tol)
{
    if (!(tol > 0.0)) throw std::invalid_argument("right_edge: tol must be positive");
    SupportInfo info;
    info.detection_eta = kAxisFloor;
    info.detection_threshold = kImagThreshold;
    if (is_deterministic(s)) {
        info.r_inf = max_eigenvalue(s.A0);
        info.m_at_edge = std::numeric_limits<double>::infinity();
        info.finite_edge_value = false;
        return info;
    }
    const double scale = op_norm(s.A0) + 2.0 * std::sqrt(double(s.k)) * max_coupling_norm(s) + 1.0;
    double hi = scale;
    for (int i = 0; i < 20 && !outside_support(s, hi); ++i) hi += scale;
    if (!outside_support(s, hi)) throw NumericalError("right_edge: no point right of the support found");
    const double step = scale / 64.0;
    double lo = hi;
    bool found = false;
    while (lo > -4.0 * scale) {
        lo -= step;
        if (!outside_support(s, lo)) {
            found = true;
            break;
        }
        hi = lo;
    }
    if (!found) throw DegenerateModel("right_edge: no sign change in bracket");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (outside_support(s, mid)) hi = mid;
        else lo = mid;
    }
    info.r_inf = 0.5 * (lo + hi);

    const double unit = std::max(1.0, std::abs(info.r_inf));
    MdeOptions mo;
    auto neg_m = [&](double x) {
        AxisSolution ax = solve_mde_to_axis(s, x, 1.0, kAxisFloor, mo.tol);
        return -ax.sol.M.trace().real() / s.L;
    };
    const double near = neg_m(info.r_inf + LimitingMeasure::kGuard * unit);
    const double far = neg_m(info.r_inf + 1e-6 * unit);
    if (near > 5.0 * far) {
        info.m_at_edge = std::numeric_limits<double>::infinity();
        info.finite_edge_value = false;
    } else {
        info.m_at_edge = near;
        info.finite_edge_value = true;
    }
    return info;
}

double left_edge(const StructureSet& s, double tol) { return -right_edge(reflected(s), tol).r_inf; }

LimitingMeasure::LimitingMeasure(StructureSet s, double edge_tol) : s_(std::move(s)), edge_tol_(edge_tol)
{
    require_valid(s_);
    support_ = right_edge(s_, edge_tol_);
}

double LimitingMeasure::left_edge_value() const { return left_edge(s_, edge_tol_); }

LimitingMeasure::RealPoint LimitingMeasure::stieltjes_real(double x, const CMat* upper_warm) const
{
    const double unit = std::max(1.0, std::abs(support_.r_inf));
    if (!(x > support_.r_inf + kGuard * unit * 0.999))
        throw std::domain_error("stieltjes_real: x must exceed r_inf + guard");
    MdeSolution sol = solve_mde(s_, cplx(x, 0.0), MdeOptions{}, upper_warm);
    RealPoint p;
    p.M = sol.M;
    p.m = sol.M.trace().real() / s_.L;
    return p;
}

double LimitingMeasure::inverse_neg_stieltjes(double two_theta) const
{
    if (!(two_theta > 0.0) || !(two_theta < support_.m_at_edge))
        throw std::domain_error("inverse_neg_stieltjes: value outside the range of -m");
    const double r = support_.r_inf;
    const double unit = std::max(1.0, std::abs(r));
    auto f = [&](double t) { return -stieltjes_real(t).m - two_theta; };

    double a = r + kGuard * unit;
    double fa = f(a);
    while (fa < 0.0) {
        // only reachable when -m is unbounded at the edge (atom at r_inf)
        const double d = (a - r) * 0.5;
        if (d < 1e-6 * kGuard * unit) throw std::domain_error("inverse_neg_stieltjes: value beyond resolvable range");
        a = r + d;
        fa = f(a);
    }
    double b = r + 1.0;
    double fb = f(b);
    while (fb > 0.0) {
        b = r + 2.0 * (b - r);
        fb = f(b);
    }
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    boost::uintmax_t max_iter = 200;
    auto res = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52),
                                                 max_iter);
    const double t = 0.5 * (res.first + res.second);
    return t;
}

double LimitingMeasure::log_potential(double x) const
{
    const double r = support_.r_inf;
    const double unit = std::max(1.0, std::abs(r));
    if (x < r - 1e-9 * unit) throw std::domain_error("log_potential: x inside the support");
    const double xe = std::max(x, r);
    if (!support_.finite_edge_value && xe - r < 1e-12 * unit) return -std::numeric_limits<double>::infinity();

    const double c = xe - 1.0;
    const double floor_s = r + kGuard * unit;
    auto g = [&](double s) {
        const double se = std::max(s, floor_s);
        return stieltjes_real(se).m + 1.0 / (s - c);
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    const double i1 = ts.integrate(g, xe, xe + 1.0, 1e-13);
    const double i2 = es.integrate(g, xe + 1.0, std::numeric_limits<double>::infinity(), 1e-13);
    return std::log(xe - c) + i1 + i2;
}

double LimitingMeasure::log_potential_quadrature(double x, int G) const
{
    const double r = support_.r_inf;
    const double l = left_edge_value();
    const double unit = std::max(1.0, std::abs(r));
    if (x < r - 1e-9 * unit) throw std::domain_error("log_potential_quadrature: x inside the support");
    if (G < 4) throw std::invalid_argument("log_potential_quadrature: G too small");
    const double h = 1.0 / G;
    double acc = 0.0;
    for (int i = 1; i < G; ++i) {
        const double sv = i * h;
        const double y = l + (r - l) * 0.5 * (1.0 - std::cos(std::numbers::pi * sv));
        const double dy = (r - l) * 0.5 * std::numbers::pi * std::sin(std::numbers::pi * sv);
        const double rho = std::max(0.0, density_at(s_, y));
        acc += std::log(std::abs(x - y)) * rho * dy;
    }
    return acc * h;
}

}  // namespace kronldp
