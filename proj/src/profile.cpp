#include "kronldp/profile.hpp"

#include <cmath>
#include <stdexcept>

namespace kronldp {

bool is_profile(const CMat& psi, double tol)
{
    if (psi.rows() != psi.cols() || psi.rows() == 0) return false;
    if (!is_hermitian(psi, 10 * tol)) return false;
    if (std::abs(psi.trace() - cplx(1.0, 0.0)) > tol) return false;
    return min_eigenvalue(psi) >= -tol;
}

Profile::Profile(CMat psi, double tol) : psi_(std::move(psi))
{
    if (!is_profile(psi_, tol)) throw std::invalid_argument("not a trace-one PSD profile");
    psi_ = hermitian_part(psi_);
}

Profile Profile::identity(int L) { return Profile(CMat::Identity(L, L) / double(L)); }

Profile Profile::from_factor(const CMat& c)
{
    CMat p = c * c.adjoint();
    const double tr = p.trace().real();
    if (!(tr > 0.0)) throw std::invalid_argument("from_factor: zero factor");
    return Profile(hermitian_part(p / tr), 1e-10);
}

CMat rho_profile(const CVec& w, int L)
{
    if (L < 1 || w.size() % L != 0) throw std::invalid_argument("rho_profile: length not divisible by L");
    const Eigen::Index N = w.size() / L;
    CMat out(L, L);
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) out(i, j) = w.segment(i * N, N).dot(w.segment(j * N, N));
    return out;
}

CMat rho_profile(const CVec& w1, const CVec& w2, int L)
{
    if (w1.size() != w2.size()) throw std::invalid_argument("rho_profile: length mismatch");
    if (L < 1 || w1.size() % L != 0) throw std::invalid_argument("rho_profile: length not divisible by L");
    const Eigen::Index N = w1.size() / L;
    CMat out(L, L);
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j)
            out(i, j) = w1.segment(i * N, N).dot(w2.segment(j * N, N)) +
                        w2.segment(i * N, N).dot(w1.segment(j * N, N));
    return out;
}

namespace {

CMat gaussian_block(int rows, int cols, int beta, CounterRng& rng)
{
    CMat g(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) {
            const double re = rng.normal();
            const double im = beta == 2 ? rng.normal() : 0.0;
            g(i, j) = cplx(re, im);
        }
    return g;
}

}  // namespace

CVec profile_vector(const StructureSet& s, const CMat& psi, int N, CounterRng& rng)
{
    const int L = s.L;
    if (N < L) throw std::invalid_argument("profile_vector: N < L");
    if (psi.rows() != L || psi.cols() != L) throw std::invalid_argument("profile_vector: psi must be L x L");

    CMat c = psd_sqrt(psi);  // psi = C C*, C Hermitian
    Eigen::HouseholderQR<CMat> qr(gaussian_block(N, L, s.beta, rng));
    CMat f = qr.householderQ() * CMat::Identity(N, L);

    // u_a = sum_b conj(C_ab) f_b gives <u_a, u_c> = (C C*)_ac
    CVec u(static_cast<Eigen::Index>(N) * L);
    for (int a = 0; a < L; ++a) u.segment(a * N, N) = f * c.row(a).adjoint();
    return u / u.norm();
}

CVec uniform_sphere(int dim, int beta, CounterRng& rng)
{
    CVec g = gaussian_block(dim, 1, beta, rng).col(0);
    return g / g.norm();
}

}  // namespace kronldp
