#include "kronldp/montecarlo.hpp"

#include "kronldp/errors.hpp"
#include "kronldp/outlier.hpp"
#include "kronldp/profile.hpp"
#include "kronldp/rng.hpp"
#include "kronldp/sampling.hpp"
#include "kronldp/spherical.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

namespace kronldp {

int default_threads()
{
    if (const char* env = std::getenv("KRONLDP_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int n, int width, const std::function<void(int)>& f)
{
    if (width <= 0) width = default_threads();
    width = std::min(width, n);
    if (width <= 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mtx;
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mtx);
                if (!err) err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < width; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

std::pair<double, double> clopper_pearson(long hits, long reps, double confidence)
{
    if (reps <= 0 || hits < 0 || hits > reps) throw std::invalid_argument("clopper_pearson: need 0 <= hits <= reps");
    const double a = 1.0 - confidence;
    const double lo = hits == 0 ? 0.0 : boost::math::ibeta_inv(double(hits), double(reps - hits + 1), a / 2);
    const double hi = hits == reps ? 1.0 : boost::math::ibeta_inv(double(hits + 1), double(reps - hits), 1 - a / 2);
    return {lo, hi};
}

std::uint64_t replicate_seed(std::uint64_t master, int N, long rep)
{
    return hash_words({master, std::uint64_t(N), std::uint64_t(rep)});
}

std::string to_string(TailMethod m) { return m == TailMethod::Direct ? "direct" : "importance"; }

double Histogram::mass() const
{
    KahanSum s;
    s.add(below);
    s.add(above);
    for (std::size_t i = 0; i < density.size(); ++i) s.add(density[i] * (edges[i + 1] - edges[i]));
    return s.sum;
}

namespace {

constexpr int kChunk = 1024;

int resolve_threads(int t) { return t > 0 ? t : default_threads(); }

// L=1 reduces to sigma W + a0 with sigma^2 = sum_j |a_j|^2.
bool scalar_model(const StructureSet& s) { return s.L == 1 && !is_deterministic(s); }

bool use_tridiagonal(const StructureSet& s, Sampler m)
{
    if (m == Sampler::Tridiagonal && !scalar_model(s))
        throw std::invalid_argument("tridiagonal sampler requires L=1 and k>=1");
    return m == Sampler::Tridiagonal || (m == Sampler::Auto && scalar_model(s));
}

double scalar_sigma(const StructureSet& s)
{
    double v = 0.0;
    for (const auto& a : s.A) v += std::norm(a(0, 0));
    return std::sqrt(v);
}

struct Tridiagonal {
    RVec d;
    RVec e;
};

// Tridiagonal model with the spectrum law of sigma W + a0 + spike e1 e1*:
// diagonal N(0,2), off-diagonal chi_{beta(N-1)}, ..., chi_beta, scaled by 1/sqrt(beta N).
Tridiagonal sample_tridiagonal(const StructureSet& s, int N, double spike, std::uint64_t seed)
{
    CounterRng rng(seed);
    const int beta = s.beta;
    const double sigma = scalar_sigma(s);
    const double a0 = s.A0(0, 0).real();
    const double scale = sigma / std::sqrt(double(beta) * N);
    Tridiagonal t{RVec(N), RVec(std::max(N - 1, 0))};
    for (int i = 0; i < N; ++i) t.d(i) = a0 + scale * std::sqrt(2.0) * rng.normal();
    for (int i = 0; i < N - 1; ++i) {
        std::gamma_distribution<double> g(0.5 * beta * (N - 1 - i), 1.0);
        t.e(i) = scale * std::sqrt(2.0 * g(rng));
    }
    t.d(0) += spike;
    return t;
}

// Number of eigenvalues strictly above y.
int count_above(const Tridiagonal& t, double y)
{
    const Eigen::Index n = t.d.size();
    int neg = 0;
    double q = t.d(0) - y;
    for (Eigen::Index i = 0;; ++i) {
        if (q < 0.0) ++neg;
        if (i + 1 == n) break;
        if (q == 0.0) q = 1e-300;
        q = t.d(i + 1) - y - t.e(i) * t.e(i) / q;
    }
    return static_cast<int>(n) - neg;
}

bool in_event(double lambda1, double x, double delta, bool two_sided)
{
    return two_sided ? std::abs(lambda1 - x) <= delta : lambda1 >= x;
}

bool in_event(const Tridiagonal& t, double x, double delta, bool two_sided)
{
    if (!two_sided) return count_above(t, x) >= 1;
    return count_above(t, x + delta) == 0 && count_above(t, x - delta) >= 1;
}

std::vector<double> tridiagonal_spectrum(const Tridiagonal& t)
{
    Eigen::SelfAdjointEigenSolver<RMat> es;
    es.computeFromTridiagonal(t.d, t.e, Eigen::EigenvaluesOnly);
    const RVec& ev = es.eigenvalues();
    return std::vector<double>(ev.data(), ev.data() + ev.size());
}

CounterRng vector_stream(std::uint64_t seed, int N, long rep)
{
    return CounterRng(hash_words({seed, std::uint64_t(N), std::uint64_t(rep), 0x75ULL}));
}

}  // namespace

std::vector<Lambda1Draw> simulate_lambda1(const StructureSet& s, int N, int reps, std::uint64_t seed, int threads)
{
    if (N < 1 || reps < 1) throw std::invalid_argument("simulate_lambda1: N and reps must be positive");
    std::vector<Lambda1Draw> out(reps);
    parallel_for(reps, resolve_threads(threads), [&](int r) {
        auto smp = sample_kronecker(s, N, replicate_seed(seed, N, r), {true, false});
        out[r].lambda1 = smp.lambda1;
        out[r].rho = rho_profile(smp.v1, s.L);
    });
    return out;
}

Histogram empirical_spectrum(const StructureSet& s, int N, int reps, double lo, double hi, int bins,
                             std::uint64_t seed, int threads)
{
    if (!(hi > lo) || bins < 1) throw std::invalid_argument("empirical_spectrum: bin width must be positive");
    std::vector<std::vector<long>> counts(reps, std::vector<long>(bins + 2, 0));
    const double width = (hi - lo) / bins;
    parallel_for(reps, resolve_threads(threads), [&](int r) {
        auto smp = sample_kronecker(s, N, replicate_seed(seed, N, r), {false, true});
        for (double ev : smp.spectrum) {
            if (ev < lo) ++counts[r][0];
            else if (ev >= hi) ++counts[r][bins + 1];
            else ++counts[r][1 + std::min(bins - 1, int((ev - lo) / width))];
        }
    });
    std::vector<long> total(bins + 2, 0);
    for (const auto& c : counts)
        for (int i = 0; i < bins + 2; ++i) total[i] += c[i];
    Histogram h;
    h.eigenvalues = static_cast<long>(reps) * N * s.L;
    const double tot = double(h.eigenvalues);
    for (int i = 0; i <= bins; ++i) h.edges.push_back(lo + width * i);
    h.edges.back() = hi;
    for (int i = 0; i < bins; ++i) h.density.push_back(double(total[i + 1]) / (tot * width));
    h.below = double(total[0]) / tot;
    h.above = double(total[bins + 1]) / tot;
    return h;
}

namespace {

// Conjugate orthogonal CG for the complex symmetric systems (A - z) Y = B, A real symmetric,
// one recurrence per column.
CMat cocg(const RMat& A, cplx z, const CMat& B, double tol, int max_iter, int& iters, bool& converged)
{
    const Eigen::Index n = B.rows(), m = B.cols();
    CMat X = CMat::Zero(n, m), R = B, P = B;
    auto apply = [&](const CMat& V) {
        RMat re = A * V.real(), im = A * V.imag();
        CMat out(n, m);
        out.real() = re;
        out.imag() = im;
        return CMat(out - z * V);
    };
    Eigen::VectorXcd rho(m);
    RVec bnorm(m);
    for (Eigen::Index c = 0; c < m; ++c) {
        rho(c) = (R.col(c).transpose() * R.col(c))(0);
        bnorm(c) = B.col(c).norm();
    }
    std::vector<bool> done(m, false);
    converged = false;
    for (iters = 0; iters < max_iter; ++iters) {
        const CMat Q = apply(P);
        bool all = true;
        for (Eigen::Index c = 0; c < m; ++c) {
            if (done[c]) continue;
            const cplx pq = (P.col(c).transpose() * Q.col(c))(0);
            if (pq == 0.0) {
                done[c] = true;
                continue;
            }
            const cplx alpha = rho(c) / pq;
            X.col(c) += alpha * P.col(c);
            R.col(c) -= alpha * Q.col(c);
            if (R.col(c).norm() <= tol * bnorm(c)) {
                done[c] = true;
                continue;
            }
            all = false;
            const cplx rho_new = (R.col(c).transpose() * R.col(c))(0);
            P.col(c) = R.col(c) + (rho_new / rho(c)) * P.col(c);
            rho(c) = rho_new;
        }
        if (all) {
            converged = true;
            ++iters;
            break;
        }
    }
    return X;
}

}  // namespace

ResolventEstimate block_resolvent_trace(const StructureSet& s, int N, int reps, cplx z, std::uint64_t seed,
                                        const ResolventOptions& opt)
{
    if (N < 1 || reps < 1) throw std::invalid_argument("block_resolvent_trace: N and reps must be positive");
    const int L = s.L;
    const Eigen::Index n = static_cast<Eigen::Index>(N) * L;
    ResolventEstimate out;
    out.exact = n <= opt.exact_max_dim;
    std::vector<CMat> per(reps);
    std::vector<int> iters(reps, 0);
    std::vector<char> bad(reps, 0);

    parallel_for(reps, resolve_threads(opt.threads), [&](int r) {
        const std::uint64_t rs = replicate_seed(seed, N, r);
        const DenseKronecker x = assemble_kronecker(s, N, rs);
        CMat g = CMat::Zero(L, L);
        if (out.exact) {
            RVec ev;
            CMat V;
            if (x.is_complex) {
                Eigen::SelfAdjointEigenSolver<CMat> es(x.cx);
                ev = es.eigenvalues();
                V = es.eigenvectors();
            } else {
                Eigen::SelfAdjointEigenSolver<RMat> es(x.re);
                ev = es.eigenvalues();
                V = es.eigenvectors().cast<cplx>();
            }
            CVec inv(n);
            for (Eigen::Index k = 0; k < n; ++k) {
                const cplx d = ev(k) - z;
                if (std::abs(d) < 1e-10) bad[r] = 1;
                inv(k) = 1.0 / d;
            }
            for (int i = 0; i < L; ++i)
                for (int j = 0; j < L; ++j) {
                    const CMat& Vi = V.middleRows(i * N, N);
                    const CMat& Vj = V.middleRows(j * N, N);
                    // sum_n V_(i,n)k conj(V_(j,n)k) for every k
                    const CVec w = (Vi.array() * Vj.conjugate().array()).colwise().sum().transpose();
                    g(i, j) = (w.array() * inv.array()).sum() / double(N);
                }
        } else {
            CounterRng rng(hash_words({rs, 0x9aULL}));
            const int p = std::max(1, opt.probes);
            RMat probes(N, p);
            for (int c = 0; c < p; ++c)
                for (int a = 0; a < N; ++a) probes(a, c) = (rng() >> 63) ? 1.0 : -1.0;
            // columns (j, probe): e_j (x) probe
            const Eigen::Index dim = x.is_complex ? 2 * n : n;
            CMat B = CMat::Zero(dim, L * p);
            for (int j = 0; j < L; ++j)
                for (int c = 0; c < p; ++c) {
                    B.col(j * p + c).segment(j * N, N) = probes.col(c).cast<cplx>();
                    // Hermitian H = R + iJ acts on [v; -iv] through the real symmetric [[R, -J], [J, R]]
                    if (x.is_complex) B.col(j * p + c).segment(n + j * N, N) = cplx(0, -1) * probes.col(c).cast<cplx>();
                }
            RMat A;
            if (x.is_complex) {
                A.resize(dim, dim);
                A.topLeftCorner(n, n) = x.cx.real();
                A.bottomRightCorner(n, n) = x.cx.real();
                A.topRightCorner(n, n) = -x.cx.imag();
                A.bottomLeftCorner(n, n) = x.cx.imag();
            }
            bool conv = false;
            const CMat Y = cocg(x.is_complex ? A : x.re, z, B, opt.tol, opt.max_iter, iters[r], conv);
            if (!conv) bad[r] = 1;
            for (int i = 0; i < L; ++i)
                for (int j = 0; j < L; ++j) {
                    cplx acc = 0.0;
                    for (int c = 0; c < p; ++c)
                        acc += probes.col(c).cast<cplx>().dot(Y.col(j * p + c).segment(i * N, N));
                    g(i, j) = acc / double(N * p);
                }
        }
        per[r] = g;
    });
    out.G = CMat::Zero(L, L);
    for (int r = 0; r < reps; ++r) {
        out.G += per[r];
        out.ill_conditioned = out.ill_conditioned || bad[r];
        out.max_iterations = std::max(out.max_iterations, iters[r]);
    }
    out.G /= double(reps);
    return out;
}

TailEstimate tail_probability(const StructureSet& s, double x, double delta, int N, long reps, std::uint64_t seed,
                              const TailOptions& opt)
{
    if (reps < 1 || N < 1) throw std::invalid_argument("tail_probability: N and reps must be positive");
    if (opt.two_sided && !(delta > 0.0)) throw std::invalid_argument("tail_probability: delta must be positive");
    const bool tri = use_tridiagonal(s, opt.sampler);
    const int chunks = static_cast<int>((reps + kChunk - 1) / kChunk);
    std::vector<long> hits(chunks, 0);
    parallel_for(chunks, resolve_threads(opt.threads), [&](int c) {
        const long r0 = long(c) * kChunk, r1 = std::min(reps, r0 + kChunk);
        long h = 0;
        for (long r = r0; r < r1; ++r) {
            const std::uint64_t rs = replicate_seed(seed, N, r);
            if (tri) h += in_event(sample_tridiagonal(s, N, 0.0, rs), x, delta, opt.two_sided);
            else h += in_event(sample_kronecker(s, N, rs, {false, false}).lambda1, x, delta, opt.two_sided);
        }
        hits[c] = h;
    });
    TailEstimate t;
    t.x = x;
    t.delta = delta;
    t.N = N;
    t.reps = reps;
    t.two_sided = opt.two_sided;
    for (long h : hits) t.hits += h;
    t.p_hat = double(t.hits) / double(reps);
    if (t.hits > 0) t.rate_hat = -std::log(t.p_hat) / N;
    std::tie(t.ci_low, t.ci_high) = clopper_pearson(t.hits, reps);
    t.ess = double(t.hits);
    t.reliable = t.hits > 0;
    return t;
}

std::vector<WeightedDraw> importance_draws(const StructureSet& s, double theta, const CMat& psi_in, int N, long reps,
                                           std::uint64_t seed, const TailOptions& opt)
{
    if (theta < 0.0) throw std::invalid_argument("importance_draws: theta must be non-negative");
    const int L = s.L, beta = s.beta;
    const CMat psi = psi_in.size() ? psi_in : CMat(CMat::Identity(L, L) / double(L));
    std::vector<WeightedDraw> out(reps);
    const bool tri = use_tridiagonal(s, opt.sampler);
    const double t = double(beta) * N * theta;

    if (L == 1) {
        // tilt averaged over u on the sphere: weight e^Lambda / E_u exp(beta N theta <u, X u>)
        const double sigma = scalar_sigma(s);
        const double a0 = s.A0(0, 0).real();
        const double big_lambda = t * (a0 + theta * sigma * sigma);
        const int chunks = static_cast<int>((reps + kChunk - 1) / kChunk);
        parallel_for(chunks, resolve_threads(opt.threads), [&](int c) {
            const long r0 = long(c) * kChunk, r1 = std::min(reps, r0 + kChunk);
            for (long r = r0; r < r1; ++r) {
                const std::uint64_t rs = replicate_seed(seed, N, r);
                std::vector<double> ev;
                if (tri) {
                    ev = tridiagonal_spectrum(sample_tridiagonal(s, N, 2.0 * theta * sigma * sigma, rs));
                } else {
                    CounterRng ur = vector_stream(seed, N, r);
                    const CVec u = uniform_sphere(N, beta, ur);
                    ev = sample_tilted(s, N, theta, u, rs, {false, true}).spectrum;
                    std::reverse(ev.begin(), ev.end());
                }
                out[r].lambda1 = ev.back();
                out[r].weight = theta == 0.0 ? 1.0 : std::exp(big_lambda - log_spherical_integral(ev, t, beta));
            }
        });
        return out;
    }

    if (tri) throw std::invalid_argument("importance_draws: tridiagonal sampler requires L=1");
    CounterRng ur = vector_stream(seed, N, -1);
    const CVec u = profile_vector(s, psi, N, ur);
    const CMat rho = rho_profile(u, L);
    double quad = 0.0;
    for (const auto& a : s.A) quad += (a.transpose() * rho * a.transpose() * rho).trace().real();
    const double big_lambda = t * (theta * quad + (s.A0.transpose() * rho).trace().real());
    parallel_for(static_cast<int>(reps), resolve_threads(opt.threads), [&](int r) {
        const std::uint64_t rs = replicate_seed(seed, N, r);
        DenseKronecker x = assemble_kronecker(s, N, rs);
        add_tilt(x, s, theta, u);
        const double q = quadratic_form(x, u);
        out[r].lambda1 = eigenvalues_desc(x).front();
        out[r].weight = theta == 0.0 ? 1.0 : std::exp(big_lambda - t * q);
    });
    return out;
}

TailEstimate importance_tail(const LimitingMeasure& mu, double x, double delta, int N, long reps,
                             std::uint64_t seed, const ImportanceOptions& opt)
{
    const StructureSet& s = mu.structure();
    const int L = s.L;
    CMat psi = opt.psi.size() ? opt.psi : CMat(CMat::Identity(L, L) / double(L));
    double theta = opt.theta;
    if (theta < 0.0) {
        const TiltSolve ts = tilt_for_target(mu, x, psi);
        theta = ts.theta;
        psi = ts.phi_hat;
    }
    const auto draws = importance_draws(s, theta, psi, N, reps, seed, opt.tail);
    KahanSum sw, swh, swh2;
    TailEstimate t;
    for (const auto& d : draws) {
        sw.add(d.weight);
        if (in_event(d.lambda1, x, delta, opt.tail.two_sided)) {
            ++t.hits;
            swh.add(d.weight);
            swh2.add(d.weight * d.weight);
        }
    }
    t.x = x;
    t.delta = delta;
    t.N = N;
    t.reps = reps;
    t.method = TailMethod::Importance;
    t.two_sided = opt.tail.two_sided;
    t.theta = theta;
    t.p_hat = swh.sum / double(reps);
    t.mean_weight = sw.sum / double(reps);
    const double var = std::max(0.0, swh2.sum / double(reps) - t.p_hat * t.p_hat);
    const double se = std::sqrt(var / double(reps));
    t.ci_low = std::max(0.0, t.p_hat - 1.959963984540054 * se);
    t.ci_high = t.p_hat + 1.959963984540054 * se;
    t.ess = swh2.sum > 0.0 ? swh.sum * swh.sum / swh2.sum : 0.0;
    t.reliable = t.ess >= 10.0;
    if (t.p_hat > 0.0) t.rate_hat = -std::log(t.p_hat) / N;
    return t;
}

TiltCheck tilted_outlier_check(const LimitingMeasure& mu, double theta, const CMat& psi, int N, int reps,
                               std::uint64_t seed, int threads)
{
    const StructureSet& s = mu.structure();
    std::vector<double> l1(reps);
    parallel_for(reps, resolve_threads(threads), [&](int r) {
        CounterRng ur = vector_stream(seed, N, r);
        const CVec u = profile_vector(s, psi, N, ur);
        l1[r] = sample_tilted(s, N, theta, u, replicate_seed(seed, N, r), {false, false}).lambda1;
    });
    TiltCheck c;
    c.reps = reps;
    KahanSum m, m2;
    for (double v : l1) m.add(v);
    c.mean = m.sum / reps;
    for (double v : l1) m2.add((v - c.mean) * (v - c.mean));
    c.sd = reps > 1 ? std::sqrt(m2.sum / (reps - 1)) : 0.0;
    c.predicted_Z = largest_outlier(mu, theta, psi).Z;
    c.z_score = c.sd > 0.0 ? (c.mean - c.predicted_Z) / (c.sd / std::sqrt(double(reps))) : 0.0;
    return c;
}

ProfileSummary profile_histogram(int L, int N, long reps, std::uint64_t seed, int beta,
                                 const ProfileHistogramSpec& spec, int threads)
{
    if (L < 1 || N < L) throw std::invalid_argument("profile_histogram: need L >= 1 and N >= L");
    if (beta != 1 && beta != 2) throw std::invalid_argument("profile_histogram: beta must be 1 or 2");
    ProfileSummary out;
    out.L = L;
    out.N = N;
    out.samples = reps;
    const double a = 0.5 * beta * N, b = 0.5 * beta * N * (L - 1);
    const double sd11 = L > 1 ? std::sqrt(a * b / ((a + b) * (a + b) * (a + b + 1))) : 0.0;
    const double hw = spec.half_width > 0.0 ? spec.half_width : 3.5 * std::max(sd11, 1e-3);
    const int nb = std::max(1, spec.bins);
    if (L == 2) {
        for (int i = 0; i <= nb; ++i) {
            out.p_edges.push_back(0.5 - hw + 2.0 * hw * i / nb);
            out.q_edges.push_back(-hw + 2.0 * hw * i / nb);
        }
    }
    const double det_max = std::pow(double(L), -double(L));
    constexpr int kDetBins = 50;

    struct Part {
        CMat sum;
        RMat sum2;
        double det_sum = 0.0;
        long small = 0;
        std::vector<long> det_hist;
        std::vector<long> counts;
    };
    const int chunks = static_cast<int>((reps + kChunk - 1) / kChunk);
    std::vector<Part> parts(chunks);
    parallel_for(chunks, resolve_threads(threads), [&](int c) {
        Part& p = parts[c];
        p.sum = CMat::Zero(L, L);
        p.sum2 = RMat::Zero(L, L);
        p.det_hist.assign(kDetBins, 0);
        p.counts.assign(L == 2 ? nb * nb : 0, 0);
        const long r0 = long(c) * kChunk, r1 = std::min(reps, r0 + kChunk);
        for (long r = r0; r < r1; ++r) {
            CounterRng rng(replicate_seed(seed, N, r));
            const CMat rho = rho_profile(uniform_sphere(N * L, beta, rng), L);
            p.sum += rho;
            p.sum2 += rho.real().cwiseAbs2();
            const double det = std::max(0.0, Eigen::PartialPivLU<CMat>(rho).determinant().real());
            p.det_sum += det;
            if (det < 0.5 * det_max) ++p.small;
            ++p.det_hist[std::min(kDetBins - 1, int(det / det_max * kDetBins))];
            if (L == 2) {
                const double pv = rho(0, 0).real(), qv = rho(0, 1).real();
                const int ip = int(std::floor((pv - out.p_edges.front()) / (2.0 * hw) * nb));
                const int iq = int(std::floor((qv - out.q_edges.front()) / (2.0 * hw) * nb));
                if (ip >= 0 && ip < nb && iq >= 0 && iq < nb) ++p.counts[ip * nb + iq];
            }
        }
    });
    CMat sum = CMat::Zero(L, L);
    RMat sum2 = RMat::Zero(L, L);
    std::vector<long> det_hist(kDetBins, 0);
    out.counts.assign(L == 2 ? nb * nb : 0, 0);
    long small = 0;
    KahanSum det_sum;
    for (const auto& p : parts) {
        sum += p.sum;
        sum2 += p.sum2;
        det_sum.add(p.det_sum);
        small += p.small;
        for (int i = 0; i < kDetBins; ++i) det_hist[i] += p.det_hist[i];
        for (std::size_t i = 0; i < out.counts.size(); ++i) out.counts[i] += p.counts[i];
    }
    out.mean = sum / double(reps);
    const RMat m = out.mean.real();
    out.sd = (sum2 / double(reps) - m.cwiseAbs2()).cwiseMax(0.0).cwiseSqrt();
    out.det_mean = det_sum.sum / double(reps);
    out.frac_small_det = double(small) / double(reps);
    const auto mode = std::max_element(det_hist.begin(), det_hist.end()) - det_hist.begin();
    out.det_mode = (double(mode) + 0.5) / kDetBins * det_max;
    return out;
}

}  // namespace kronldp
