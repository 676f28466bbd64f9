#pragma once

#include <Eigen/Dense>

#include <complex>

namespace kronldp {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// Largest singular value.
double op_norm(const CMat& a);

CMat hermitian_part(const CMat& a);

// Eigenvalues of the Hermitian part, ascending.
RVec hermitian_eigenvalues(const CMat& a);
double min_eigenvalue(const CMat& a);
double max_eigenvalue(const CMat& a);

bool is_hermitian(const CMat& a, double tol);
bool is_real(const CMat& a, double tol);

// Principal square root of a Hermitian PSD matrix; negative eigenvalues are clipped.
CMat psd_sqrt(const CMat& a);

// Standard Kronecker product, row/column pairs (a,b) ordered lexicographically.
CMat kron(const CMat& a, const CMat& b);

// ln det of a Hermitian positive definite matrix, -inf if not positive definite.
double log_det_hpd(const CMat& a);

}  // namespace kronldp
