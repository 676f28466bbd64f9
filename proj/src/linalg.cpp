#include "kronldp/linalg.hpp"

#include <cmath>
#include <limits>

namespace kronldp {

double op_norm(const CMat& a)
{
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMat> svd(a);
    return svd.singularValues()(0);
}

CMat hermitian_part(const CMat& a) { return 0.5 * (a + a.adjoint()); }

RVec hermitian_eigenvalues(const CMat& a)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(a), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double min_eigenvalue(const CMat& a) { return hermitian_eigenvalues(a)(0); }

double max_eigenvalue(const CMat& a)
{
    RVec ev = hermitian_eigenvalues(a);
    return ev(ev.size() - 1);
}

bool is_hermitian(const CMat& a, double tol)
{
    if (a.rows() != a.cols()) return false;
    return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_real(const CMat& a, double tol) { return a.imag().cwiseAbs().maxCoeff() <= tol; }

CMat psd_sqrt(const CMat& a)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(a));
    RVec d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

CMat kron(const CMat& a, const CMat& b)
{
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

double log_det_hpd(const CMat& a)
{
    Eigen::LLT<CMat> llt(hermitian_part(a));
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        double d = llt.matrixL()(i, i).real();
        if (!(d > 0.0)) return -std::numeric_limits<double>::infinity();
        s += 2.0 * std::log(d);
    }
    return s;
}

}  // namespace kronldp
