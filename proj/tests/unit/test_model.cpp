#include "kronldp/errors.hpp"
#include "kronldp/io.hpp"
#include "kronldp/profile.hpp"
#include "kronldp/rng.hpp"
#include "kronldp/sampling.hpp"
#include "kronldp/structure.hpp"

#include <doctest.h>

#include <cmath>

using namespace kronldp;

namespace {

CMat m2(cplx a, cplx b, cplx c, cplx d)
{
    CMat m(2, 2);
    m << a, b, c, d;
    return m;
}

CMat one() { return CMat::Ones(1, 1); }

StructureSet goe() { return StructureSet::make(1, CMat::Zero(1, 1), {one()}); }

CMat random_sym(int L, int beta, CounterRng& rng)
{
    CMat g(L, L);
    for (int a = 0; a < L; ++a)
        for (int b = 0; b < L; ++b) g(a, b) = cplx(rng.normal(), beta == 2 ? rng.normal() : 0.0);
    return hermitian_part(g);
}

}  // namespace

TEST_CASE("validate")
{
    CHECK(validate(goe()).empty());

    StructureSet bad = StructureSet::make(1, CMat::Zero(2, 2), {m2(0, 1, 0, 0)});
    const auto v = validate(bad);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("A1") != std::string::npos);
    CHECK_THROWS_AS(require_valid(bad), ConfigError);

    const cplx i(0, 1);
    CHECK(validate(StructureSet::make(2, m2(0, i, -i, 0), {})).empty());
    // complex Hermitian is not real symmetric
    CHECK_FALSE(validate(StructureSet::make(1, m2(0, i, -i, 0), {})).empty());
}

TEST_CASE("apply_S examples")
{
    CMat t(1, 1);
    t(0, 0) = 0.7;
    CHECK(std::abs(apply_S(goe(), t)(0, 0) - 0.7) == 0.0);

    const auto s2 = StructureSet::make(1, CMat::Zero(2, 2), {m2(1, 0, 0, 2)});
    CHECK((apply_S(s2, CMat::Identity(2, 2)) - m2(1, 0, 0, 4)).norm() == 0.0);

    const auto s3 = StructureSet::make(1, CMat::Zero(2, 2), {m2(0, 1, 1, 0)});
    CHECK((apply_S(s3, m2(1, 0, 0, 0)) - m2(0, 0, 0, 1)).norm() == 0.0);

    CHECK_THROWS_AS(apply_S(s3, CMat::Identity(3, 3)), std::invalid_argument);
}

TEST_CASE("apply_S is linear and positivity preserving; s_big matches the contraction")
{
    CounterRng rng(42);
    for (int trial = 0; trial < 5; ++trial) {
        const int L = 3;
        const auto s = StructureSet::make(1, random_sym(L, 1, rng), {random_sym(L, 1, rng), random_sym(L, 1, rng)});
        const CMat t1 = random_sym(L, 1, rng), t2 = random_sym(L, 1, rng);
        const double alpha = rng.normal();
        CHECK((apply_S(s, alpha * t1 + t2) - alpha * apply_S(s, t1) - apply_S(s, t2)).cwiseAbs().maxCoeff() < 1e-12);

        const CMat p = t1 * t1.adjoint();
        CHECK(min_eigenvalue(apply_S(s, p)) > -1e-12);

        // (sum_j A_j (x) A_j) vec(T) with lexicographic (a,b) indices = sum A_ac A_bd T_cd
        const CMat big = s_big(s);
        CVec vt(L * L);
        for (int c = 0; c < L; ++c)
            for (int d = 0; d < L; ++d) vt(c * L + d) = t1(c, d);
        const CVec out = big * vt;
        double err = 0.0;
        for (int a = 0; a < L; ++a)
            for (int b = 0; b < L; ++b) {
                cplx acc = 0.0;
                for (const auto& aj : s.A)
                    for (int c = 0; c < L; ++c)
                        for (int d = 0; d < L; ++d) acc += aj(a, c) * aj(b, d) * t1(c, d);
                err = std::max(err, std::abs(out(a * L + b) - acc));
            }
        CHECK(err < 1e-12);
        // for symmetric T the contraction equals vec(S[T])
        const CMat st = apply_S(s, t1);
        for (int a = 0; a < L; ++a)
            for (int b = 0; b < L; ++b) CHECK(std::abs(out(a * L + b) - st(a, b)) < 1e-12);
    }
}

TEST_CASE("s_big examples")
{
    CHECK(s_big(goe())(0, 0) == cplx(1.0));
    CHECK(s_big(StructureSet::make(1, CMat::Zero(2, 2), {})).norm() == 0.0);
    const CMat d = s_big(StructureSet::make(1, CMat::Zero(2, 2), {m2(1, 0, 0, 2)}));
    CHECK((d.diagonal() - CVec::Map(std::vector<cplx>{1, 2, 2, 4}.data(), 4)).norm() == 0.0);
    CHECK((d - CMat(d.diagonal().asDiagonal())).norm() == 0.0);
}

TEST_CASE("sample_kronecker")
{
    const auto det = StructureSet::make(1, m2(3, 0, 0, 1), {});
    for (int N : {1, 5, 40}) CHECK(sample_kronecker(det, N, 9).lambda1 == 3.0);
    CHECK_THROWS_AS(sample_kronecker(goe(), 0, 1), std::invalid_argument);

    const auto s = sample_kronecker(goe(), 2000, 17, {true, true});
    CHECK(s.lambda1 >= 1.9);
    CHECK(s.lambda1 <= 2.1);
    CHECK(std::abs(s.v1.norm() - 1.0) < 1e-12);
    CHECK(std::is_sorted(s.spectrum.rbegin(), s.spectrum.rend()));
    CHECK(s.spectrum.front() == s.lambda1);

    // determinism
    CHECK(sample_kronecker(goe(), 50, 5).lambda1 == sample_kronecker(goe(), 50, 5).lambda1);
}

TEST_CASE("entry variances")
{
    const int N = 20, reps = 10000;
    double acc = 0.0, acc_diag = 0.0, acc_gue = 0.0;
    for (int r = 0; r < reps; ++r) {
        const double w = goe_entry(r, 0, 0, 1, N);
        acc += N * w * w;
        const double d = goe_entry(r, 0, 3, 3, N);
        acc_diag += N * d * d;
        acc_gue += N * std::norm(gue_entry(r, 0, 0, 1, N));
    }
    CHECK(acc / reps == doctest::Approx(1.0).epsilon(0.05));
    CHECK(acc_diag / reps == doctest::Approx(2.0).epsilon(0.05));
    CHECK(acc_gue / reps == doctest::Approx(1.0).epsilon(0.05));
    CHECK(goe_entry(3, 0, 1, 4, N) == goe_entry(3, 0, 4, 1, N));
    CHECK(gue_entry(3, 0, 1, 4, N) == std::conj(gue_entry(3, 0, 4, 1, N)));
}

TEST_CASE("sample mean of X converges to A0 (x) Id")
{
    const auto s = StructureSet::make(1, m2(0.5, 0.2, 0.2, -0.3), {m2(1, 0.3, 0.3, 0.4)});
    const int N = 3, reps = 2000;
    RMat sum = RMat::Zero(6, 6), sum2 = RMat::Zero(6, 6);
    for (int r = 0; r < reps; ++r) {
        const RMat x = assemble_kronecker(s, N, r).re;
        sum += x;
        sum2 += x.cwiseAbs2();
    }
    const RMat mean = sum / reps;
    const RMat sd = (sum2 / reps - mean.cwiseAbs2()).cwiseSqrt();
    const RMat target = kron(s.A0, CMat::Identity(N, N)).real();
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) CHECK(std::abs(mean(a, b) - target(a, b)) <= 5.0 * sd(a, b) / std::sqrt(reps) + 1e-15);
}

TEST_CASE("norm envelope over many draws")
{
    const auto s = StructureSet::make(1, m2(0.5, 0, 0, -0.5), {m2(1, 0, 0, 0.5), m2(0, 0.6, 0.6, 0)});
    const double bound = 4.0 * s.k + op_norm(s.A0);
    double worst = 0.0;
    for (int r = 0; r < 1000; ++r) {
        const auto x = assemble_kronecker(s, 100, r);
        const auto ev = eigenvalues_desc(x);
        worst = std::max({worst, std::abs(ev.front()), std::abs(ev.back())});
    }
    CHECK(worst <= bound);
}

TEST_CASE("sample_tilted")
{
    CounterRng rng(3);
    const CVec u = uniform_sphere(60, 1, rng);
    CHECK(sample_tilted(goe(), 60, 0.0, u, 8).lambda1 == sample_kronecker(goe(), 60, 8).lambda1);

    CHECK_THROWS_AS(sample_tilted(goe(), 60, -1.0, u, 8), std::invalid_argument);
    CHECK_THROWS_AS(sample_tilted(goe(), 60, 1.0, 2.0 * u, 8), std::invalid_argument);

    // the deterministic part equals 2 theta D exactly
    const auto s = StructureSet::make(1, m2(0.1, 0, 0, 0.2), {m2(1, 0.5, 0.5, 0), m2(0.3, 0, 0, 1)});
    const CMat psi = m2(0.6, 0.1, 0.1, 0.4);
    const CVec w = profile_vector(s, psi, 7, rng);
    auto base = assemble_kronecker(s, 7, 99);
    auto tilted = base;
    add_tilt(tilted, s, 0.8, w);
    CMat U(7, 2);
    U.col(0) = w.head(7);
    U.col(1) = w.tail(7);
    CMat D = CMat::Zero(14, 14);
    for (const auto& a : s.A) D += kron(a, U * a.transpose() * U.adjoint());
    CHECK((tilted.re - base.re - 2.0 * 0.8 * D.real()).cwiseAbs().maxCoeff() < 1e-13);

    double mean = 0.0;
    for (int r = 0; r < 100; ++r) {
        CounterRng ur(1000 + r);
        mean += sample_tilted(goe(), 400, 1.0, uniform_sphere(400, 1, ur), r, {false, false}).lambda1;
    }
    CHECK(std::abs(mean / 100 - 2.5) <= 0.1);
}

TEST_CASE("rho_profile and profile_vector")
{
    CVec u = CVec::Zero(12);
    u(0) = 0.6;
    u(3) = 0.8;
    CMat e11 = CMat::Zero(3, 3);
    e11(0, 0) = 1.0;
    CHECK((rho_profile(u, 3) - e11).norm() < 1e-15);
    CHECK_THROWS_AS(rho_profile(CVec::Zero(10), 3), std::invalid_argument);

    CounterRng rng(5);
    for (int beta : {1, 2}) {
        const auto s = StructureSet::make(beta, CMat::Zero(3, 3), {});
        CMat c(3, 3);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) c(a, b) = cplx(rng.normal(), beta == 2 ? rng.normal() : 0.0);
        const CMat psi = c * c.adjoint() / (c * c.adjoint()).trace().real();
        const CVec v = profile_vector(s, psi, 50, rng);
        CHECK((rho_profile(v, 3) - psi).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(std::abs(v.norm() - 1.0) < 1e-12);
        CHECK(is_profile(rho_profile(uniform_sphere(150, beta, rng), 3)));

        const CVec vid = profile_vector(s, CMat::Identity(3, 3) / 3.0, 50, rng);
        const CMat r = rho_profile(vid, 3);
        CHECK((r - CMat::Identity(3, 3) / 3.0).cwiseAbs().maxCoeff() < 1e-12);

        const CVec ve = profile_vector(s, e11, 50, rng);
        CHECK(ve.tail(100).norm() < 1e-12);
    }
    CHECK_THROWS_AS(profile_vector(StructureSet::make(1, CMat::Zero(3, 3), {}), e11, 2, rng), std::invalid_argument);

    // two-argument form is the symmetrized bilinear version
    const CVec a = uniform_sphere(12, 1, rng), b = uniform_sphere(12, 1, rng);
    CHECK((rho_profile(a, a, 3) - 2.0 * rho_profile(a, 3)).norm() < 1e-14);
    CHECK((rho_profile(a, b, 3) - rho_profile(b, a, 3)).norm() < 1e-14);
}

TEST_CASE("structure JSON round trip and diagnostics")
{
    const cplx i(0, 1);
    const auto s = StructureSet::make(2, m2(0, i, -i, 1), {m2(1, 0.5 + i, 0.5 - i, 0)});
    const auto back = structure_from_json(structure_to_json(s));
    CHECK(back.L == 2);
    CHECK(back.k == 1);
    CHECK((back.A0 - s.A0).norm() == 0.0);
    CHECK((back.A[0] - s.A[0]).norm() == 0.0);
    CHECK(structure_hash(back) == structure_hash(s));

    auto j = structure_to_json(s);
    j["A"][0][0] = {1.0};
    try {
        structure_from_json(j);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("A[0]") != std::string::npos);
    }
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_double(M_PI)) == M_PI);
}
