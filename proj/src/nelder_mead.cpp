#include "kronldp/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kronldp {

namespace {

NelderMeadResult run_simplex(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& x0, const NelderMeadOptions& opt, int budget)
{
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> vals(n + 1);
    int evals = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double h = x0[i] != 0.0 ? opt.initial_step * std::max(1.0, std::abs(x0[i])) : opt.initial_step;
        pts[i + 1][i] += h;
    }
    for (std::size_t i = 0; i <= n; ++i) vals[i] = f(pts[i]), ++evals;

    std::vector<std::size_t> idx(n + 1);
    bool converged = false;
    while (evals < budget) {
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = idx[0], worst = idx[n], second = idx[n - 1];

        double spread = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t d = 0; d < n; ++d) spread = std::max(spread, std::abs(pts[i][d] - pts[best][d]));
        if (std::abs(vals[worst] - vals[best]) <= opt.f_tol && spread <= opt.x_tol * 1e3) {
            converged = true;
            break;
        }
        if (spread <= opt.x_tol) {
            converged = true;
            break;
        }

        std::vector<double> c(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i)
            if (i != worst)
                for (std::size_t d = 0; d < n; ++d) c[d] += pts[i][d] / n;
        auto along = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t d = 0; d < n; ++d) p[d] = c[d] + t * (pts[worst][d] - c[d]);
            return p;
        };

        auto xr = along(-1.0);
        const double fr = f(xr);
        ++evals;
        if (fr < vals[best]) {
            auto xe = along(-2.0);
            const double fe = f(xe);
            ++evals;
            if (fe < fr) pts[worst] = xe, vals[worst] = fe;
            else pts[worst] = xr, vals[worst] = fr;
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = xr, vals[worst] = fr;
            continue;
        }
        const bool outside = fr < vals[worst];
        auto xc = along(outside ? -0.5 : 0.5);
        const double fc = f(xc);
        ++evals;
        if (fc < (outside ? fr : vals[worst])) {
            pts[worst] = xc, vals[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t d = 0; d < n; ++d) pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
            vals[i] = f(pts[i]);
            ++evals;
        }
    }
    const std::size_t b = std::min_element(vals.begin(), vals.end()) - vals.begin();
    return {pts[b], vals[b], evals, converged};
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             const NelderMeadOptions& opt)
{
    NelderMeadResult first = run_simplex(f, x0, opt, opt.max_evals);
    NelderMeadOptions again = opt;
    again.initial_step = opt.initial_step * 0.2;
    NelderMeadResult second = run_simplex(f, first.x, again, std::max(100, opt.max_evals - first.evals));
    second.evals += first.evals;
    if (first.f < second.f) {
        first.evals = second.evals;
        return first;
    }
    return second;
}

}  // namespace kronldp
