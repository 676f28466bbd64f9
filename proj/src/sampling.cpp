#include "kronldp/sampling.hpp"

#include "kronldp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kronldp {

namespace {

std::uint64_t entry_key(std::uint64_t seed, int j) { return hash_words({seed, std::uint64_t(j), 0x57ULL}); }

std::uint64_t entry_counter(int a, int b, int N)
{
    if (a > b) std::swap(a, b);
    return static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(N) + static_cast<std::uint64_t>(b);
}

RMat goe_matrix(std::uint64_t seed, int j, int N)
{
    const std::uint64_t key = entry_key(seed, j);
    const double off = 1.0 / std::sqrt(double(N));
    const double diag = std::sqrt(2.0 / N);
    RMat w(N, N);
    for (int b = 0; b < N; ++b) {
        for (int a = 0; a < b; ++a) {
            const double v = off * normal_at(key, 2 * entry_counter(a, b, N));
            w(a, b) = v;
            w(b, a) = v;
        }
        w(b, b) = diag * normal_at(key, 2 * entry_counter(b, b, N));
    }
    return w;
}

CMat gue_matrix(std::uint64_t seed, int j, int N)
{
    const std::uint64_t key = entry_key(seed, j);
    const double off = 1.0 / std::sqrt(2.0 * N);
    const double diag = 1.0 / std::sqrt(double(N));
    CMat w(N, N);
    for (int b = 0; b < N; ++b) {
        for (int a = 0; a < b; ++a) {
            const std::uint64_t c = 2 * entry_counter(a, b, N);
            const cplx v(off * normal_at(key, c), off * normal_at(key, c + 1));
            w(a, b) = v;
            w(b, a) = std::conj(v);
        }
        w(b, b) = diag * normal_at(key, 2 * entry_counter(b, b, N));
    }
    return w;
}

void check_unit(const CVec& u, Eigen::Index dim)
{
    if (u.size() != dim) throw std::invalid_argument("tilt vector has wrong length");
    if (std::abs(u.norm() - 1.0) > 1e-10) throw std::invalid_argument("tilt vector is not a unit vector");
}

}  // namespace

double goe_entry(std::uint64_t seed, int j, int a, int b, int N)
{
    const double sd = a == b ? std::sqrt(2.0 / N) : 1.0 / std::sqrt(double(N));
    return sd * normal_at(entry_key(seed, j), 2 * entry_counter(a, b, N));
}

cplx gue_entry(std::uint64_t seed, int j, int a, int b, int N)
{
    const std::uint64_t key = entry_key(seed, j);
    const std::uint64_t c = 2 * entry_counter(a, b, N);
    if (a == b) return {normal_at(key, c) / std::sqrt(double(N)), 0.0};
    const double sd = 1.0 / std::sqrt(2.0 * N);
    const cplx v(sd * normal_at(key, c), sd * normal_at(key, c + 1));
    return a < b ? v : std::conj(v);
}

DenseKronecker assemble_kronecker(const StructureSet& s, int N, std::uint64_t seed)
{
    if (N < 1) throw std::invalid_argument("N must be positive");
    DenseKronecker x;
    x.N = N;
    x.L = s.L;
    x.is_complex = s.beta == 2 || !has_real_entries(s);
    const Eigen::Index n = x.dim();
    const int L = s.L;

    if (!x.is_complex) {
        x.re = RMat::Zero(n, n);
        for (int c = 0; c < L; ++c)
            for (int d = 0; d < L; ++d)
                if (s.A0(c, d) != 0.0) x.re.block(c * N, d * N, N, N).diagonal().array() += s.A0(c, d).real();
        for (int j = 0; j < s.k; ++j) {
            if (s.A[j].cwiseAbs().maxCoeff() == 0.0) continue;
            const RMat w = goe_matrix(seed, j, N);
            for (int c = 0; c < L; ++c)
                for (int d = 0; d < L; ++d) {
                    const double a = s.A[j](c, d).real();
                    if (a != 0.0) x.re.block(c * N, d * N, N, N) += a * w;
                }
        }
    } else {
        x.cx = CMat::Zero(n, n);
        for (int c = 0; c < L; ++c)
            for (int d = 0; d < L; ++d)
                if (s.A0(c, d) != 0.0) x.cx.block(c * N, d * N, N, N).diagonal().array() += s.A0(c, d);
        for (int j = 0; j < s.k; ++j) {
            if (s.A[j].cwiseAbs().maxCoeff() == 0.0) continue;
            const CMat w = s.beta == 2 ? gue_matrix(seed, j, N) : CMat(goe_matrix(seed, j, N).cast<cplx>());
            for (int c = 0; c < L; ++c)
                for (int d = 0; d < L; ++d) {
                    const cplx a = s.A[j](c, d);
                    if (a != 0.0) x.cx.block(c * N, d * N, N, N) += a * w;
                }
        }
    }
    return x;
}

void add_tilt(DenseKronecker& x, const StructureSet& s, double theta, const CVec& u)
{
    if (theta < 0.0) throw std::invalid_argument("theta must be non-negative");
    check_unit(u, x.dim());
    if (theta == 0.0) return;
    const int N = x.N, L = x.L;
    CMat U(N, L);
    for (int a = 0; a < L; ++a) U.col(a) = u.segment(a * N, N);

    if (!x.is_complex && !is_real(U, 0.0))
        throw std::invalid_argument("complex tilt vector for a real sample");

    for (const auto& aj : s.A) {
        if (aj.cwiseAbs().maxCoeff() == 0.0) continue;
        const CMat bj = U * aj.transpose() * U.adjoint();
        for (int c = 0; c < L; ++c)
            for (int d = 0; d < L; ++d) {
                const cplx coef = 2.0 * theta * aj(c, d);
                if (coef == 0.0) continue;
                if (x.is_complex) x.cx.block(c * N, d * N, N, N) += coef * bj;
                else x.re.block(c * N, d * N, N, N) += coef.real() * bj.real();
            }
    }
}

std::vector<double> eigenvalues_desc(const DenseKronecker& x)
{
    RVec ev;
    if (x.is_complex) {
        Eigen::SelfAdjointEigenSolver<CMat> es(x.cx, Eigen::EigenvaluesOnly);
        ev = es.eigenvalues();
    } else {
        Eigen::SelfAdjointEigenSolver<RMat> es(x.re, Eigen::EigenvaluesOnly);
        ev = es.eigenvalues();
    }
    std::vector<double> out(ev.data(), ev.data() + ev.size());
    std::reverse(out.begin(), out.end());
    return out;
}

KroneckerSample decompose(const DenseKronecker& x, std::uint64_t seed, const SampleOptions& opt)
{
    KroneckerSample out;
    out.N = x.N;
    out.seed = seed;
    const Eigen::Index n = x.dim();
    RVec ev;
    if (opt.want_vector) {
        if (x.is_complex) {
            Eigen::SelfAdjointEigenSolver<CMat> es(x.cx);
            ev = es.eigenvalues();
            out.v1 = es.eigenvectors().col(n - 1);
        } else {
            Eigen::SelfAdjointEigenSolver<RMat> es(x.re);
            ev = es.eigenvalues();
            out.v1 = es.eigenvectors().col(n - 1).cast<cplx>();
        }
        out.v1 /= out.v1.norm();
    } else {
        if (x.is_complex) ev = Eigen::SelfAdjointEigenSolver<CMat>(x.cx, Eigen::EigenvaluesOnly).eigenvalues();
        else ev = Eigen::SelfAdjointEigenSolver<RMat>(x.re, Eigen::EigenvaluesOnly).eigenvalues();
    }
    out.lambda1 = ev(n - 1);
    if (opt.want_spectrum) {
        out.spectrum.assign(ev.data(), ev.data() + n);
        std::reverse(out.spectrum.begin(), out.spectrum.end());
    }
    return out;
}

namespace {

// A_0 (x) Id: exact spectrum from the L x L eigenproblem.
KroneckerSample deterministic_sample(const StructureSet& s, int N, std::uint64_t seed, const SampleOptions& opt)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(s.A0));
    KroneckerSample out;
    out.N = N;
    out.seed = seed;
    out.lambda1 = es.eigenvalues()(s.L - 1);
    if (opt.want_vector) {
        out.v1 = CVec::Zero(static_cast<Eigen::Index>(N) * s.L);
        const CVec e = es.eigenvectors().col(s.L - 1);
        for (int a = 0; a < s.L; ++a) out.v1(a * N) = e(a);
    }
    if (opt.want_spectrum) {
        for (int i = s.L - 1; i >= 0; --i)
            for (int r = 0; r < N; ++r) out.spectrum.push_back(es.eigenvalues()(i));
    }
    return out;
}

}  // namespace

KroneckerSample sample_kronecker(const StructureSet& s, int N, std::uint64_t seed, const SampleOptions& opt)
{
    if (N < 1) throw std::invalid_argument("N must be positive");
    if (is_deterministic(s)) return deterministic_sample(s, N, seed, opt);
    return decompose(assemble_kronecker(s, N, seed), seed, opt);
}

KroneckerSample sample_tilted(const StructureSet& s, int N, double theta, const CVec& u,
                              std::uint64_t seed, const SampleOptions& opt)
{
    if (theta < 0.0) throw std::invalid_argument("theta must be non-negative");
    check_unit(u, static_cast<Eigen::Index>(N) * s.L);
    if (theta == 0.0) return sample_kronecker(s, N, seed, opt);
    DenseKronecker x = assemble_kronecker(s, N, seed);
    add_tilt(x, s, theta, u);
    return decompose(x, seed, opt);
}

double quadratic_form(const DenseKronecker& x, const CVec& u)
{
    if (x.is_complex) return u.dot(x.cx * u).real();
    const RVec ur = u.real(), ui = u.imag();
    return ur.dot(x.re * ur) + ui.dot(x.re * ui);
}

}  // namespace kronldp
