#pragma once

#include "kronldp/linalg.hpp"
#include "kronldp/structure.hpp"

#include <limits>
#include <vector>

namespace kronldp {

struct MdeOptions {
    double tol = 1e-12;
    int max_iter = 200000;
};

struct MdeSolution {
    cplx z;
    CMat M;
    double residual = 0.0;
    int iterations = 0;
};

// || Id + (z - A0 + S[M]) M ||
double mde_residual(const StructureSet& s, cplx z, const CMat& M);

// Im z > 0: damped fixed point from -Id/z (or warm), Newton polish once close.
// Im z = 0: real solution outside the spectrum. Starts from the monotone
// iteration M_0 = 0 (or a warm start known to lie above the solution in Loewner
// order) and falls back to eta-continuation. Throws NumericalError when z is
// inside or too close to the spectrum.
MdeSolution solve_mde(const StructureSet& s, cplx z, const MdeOptions& opt = {}, const CMat* warm = nullptr);

// M(x + i0+) by continuation in eta from eta_start down to eta_floor and a last
// Newton step at eta = 0. Complex inside the support, real outside.
struct AxisSolution {
    MdeSolution sol;
    double eta_reached = 0.0;
};
AxisSolution solve_mde_to_axis(const StructureSet& s, double x, double eta_start = 1.0,
                               double eta_floor = 1e-14, double tol = 1e-12);

struct DensityOptions {
    double eta_start = 1.0;
    double eta_factor = 0.5;
    double eta_floor = 1e-12;
    double extrapolation_tol = 1e-10;
    bool components = false;
};

struct SpectralDensity {
    std::vector<double> grid;
    std::vector<double> density;
    double eta_final = 0.0;
    std::vector<CMat> matrix_components;
    double quadrature_tol = 1e-3;

    double trapezoid_mass() const;
};

// Im<M(x+i eta)>/pi with eta decreased geometrically until successive values agree.
double density_at(const StructureSet& s, double x, const DensityOptions& opt = {}, CMat* component = nullptr,
                  double* eta_used = nullptr);

SpectralDensity density(const StructureSet& s, double x_lo, double x_hi, int G, const DensityOptions& opt = {});

struct SupportInfo {
    double r_inf = 0.0;
    double m_at_edge = std::numeric_limits<double>::infinity();  // -lim m(y), y -> r_inf+
    bool finite_edge_value = false;
    double detection_eta = 0.0;
    double detection_threshold = 0.0;
};

SupportInfo right_edge(const StructureSet& s, double tol = 1e-11);
// Left edge through the reflected structure (A0, A_j) -> (-A0, -A_j).
double left_edge(const StructureSet& s, double tol = 1e-11);

// Limit measure mu_inf together with its right edge; immutable after construction.
class LimitingMeasure {
public:
    static constexpr double kGuard = 1e-8;

    explicit LimitingMeasure(StructureSet s, double edge_tol = 1e-11);

    const StructureSet& structure() const { return s_; }
    const SupportInfo& support() const { return support_; }
    double r_inf() const { return support_.r_inf; }
    int L() const { return s_.L; }

    struct RealPoint {
        double m = 0.0;
        CMat M;
    };
    // Real MDE solution at x > r_inf + guard. upper_warm, when given, must satisfy
    // upper_warm >= M(x) in Loewner order (e.g. M(x') for x' > x).
    RealPoint stieltjes_real(double x, const CMat* upper_warm = nullptr) const;

    // t with -m(t) = two_theta; throws std::domain_error when two_theta is outside (0, m_at_edge).
    double inverse_neg_stieltjes(double two_theta) const;

    // int ln|x - y| dmu_inf(y) for x >= r_inf, via ln(x - c) + int_x^inf (m(s) + 1/(s - c)) ds.
    double log_potential(double x) const;

    // Same quantity by quadrature against the density on a grid clustered at both edges.
    double log_potential_quadrature(double x, int G = 4000) const;

    double left_edge_value() const;

private:
    StructureSet s_;
    SupportInfo support_;
    double edge_tol_;
};

}  // namespace kronldp
