#pragma once

#include "kronldp/linalg.hpp"
#include "kronldp/mde.hpp"

#include <string>
#include <utility>

namespace kronldp {

enum class OutlierMethod { DetRoot, LambdaRoot, None };

std::string to_string(OutlierMethod m);

struct OutlierOptions {
    int grid = 400;        // log-spaced scan points between the bound and r_inf + guard
    double tol = 1e-13;    // bisection width in z
    bool prefer_lambda = true;
};

struct OutlierSolve {
    double theta = 0.0;
    CMat psi;
    double Z = 0.0;
    std::pair<double, double> bracket{0.0, 0.0};
    OutlierMethod method = OutlierMethod::None;
    double residual = 0.0;
    double c0 = 0.0;  // realized bound Z <= c0 + c1 theta
    double c1 = 0.0;
    bool has_outlier = false;
};

// det(Id + 2 theta S (M(z) (x) psi)), S = sum_j A_j (x) conj(A_j).
double outlier_det(const LimitingMeasure& mu, double theta, const CMat& psi, double z);
double outlier_det(const StructureSet& s, double theta, const CMat& psi, const CMat& M);

// Largest eigenvalue of R S R with R = sqrt(-M(z) (x) 2 theta psi).
double lambda_sym(const LimitingMeasure& mu, double theta, double z, const CMat& psi);
double lambda_sym(const StructureSet& s, double theta, const CMat& psi, const CMat& M);

// Largest z > r_inf solving the determinant equation, or Z = r_inf when none exists.
OutlierSolve largest_outlier(const LimitingMeasure& mu, double theta, const CMat& psi,
                             const OutlierOptions& opt = {});

struct TiltSolve {
    double theta = 0.0;
    double Z = 0.0;
    CMat phi_hat;
    double residual = 0.0;  // Z - x
    int scan_steps = 0;
    std::string trace;
};

struct TiltOptions {
    double growth = 1.05;
    double theta_max_factor = 1e4;  // scan stops at theta_0 * factor
    double tol = 1e-12;
    OutlierOptions outlier;
};

// Smallest theta >= -m(x)/2 with Z(theta) = x at profile phi_hat(theta, x, psi).
// Throws NumericalError when no bracket is found.
TiltSolve tilt_for_target(const LimitingMeasure& mu, double x, const CMat& psi, const TiltOptions& opt = {});

}  // namespace kronldp
