#pragma once

#include "kronldp/linalg.hpp"
#include "kronldp/structure.hpp"

#include <cstdint>
#include <vector>

namespace kronldp {

struct KroneckerSample {
    int N = 0;
    std::uint64_t seed = 0;
    double lambda1 = 0.0;
    CVec v1;                      // empty unless requested
    std::vector<double> spectrum;  // non-increasing; empty unless requested
};

struct SampleOptions {
    bool want_vector = true;
    bool want_spectrum = false;
};

// Entry (a,b) of W_j for a given seed. GOE: variance (1+delta_ab)/N; GUE: E|W_ab|^2 = 1/N.
double goe_entry(std::uint64_t seed, int j, int a, int b, int N);
cplx gue_entry(std::uint64_t seed, int j, int a, int b, int N);

// Dense NL x NL realization. Real storage is used when beta=1 and the structure is real.
struct DenseKronecker {
    int N = 0;
    int L = 0;
    bool is_complex = false;
    RMat re;
    CMat cx;

    Eigen::Index dim() const { return static_cast<Eigen::Index>(N) * L; }
    CMat as_complex() const { return is_complex ? cx : CMat(re.cast<cplx>()); }
};

DenseKronecker assemble_kronecker(const StructureSet& s, int N, std::uint64_t seed);

// Adds 2 theta D with D = sum_j A_j (x) (U A_j^T U*), U = [u_1 ... u_L].
void add_tilt(DenseKronecker& x, const StructureSet& s, double theta, const CVec& u);

KroneckerSample decompose(const DenseKronecker& x, std::uint64_t seed, const SampleOptions& opt);

// Eigenvalues in non-increasing order.
std::vector<double> eigenvalues_desc(const DenseKronecker& x);

KroneckerSample sample_kronecker(const StructureSet& s, int N, std::uint64_t seed,
                                 const SampleOptions& opt = {});

KroneckerSample sample_tilted(const StructureSet& s, int N, double theta, const CVec& u,
                              std::uint64_t seed, const SampleOptions& opt = {});

// <u, X u> for a dense realization.
double quadratic_form(const DenseKronecker& x, const CVec& u);

}  // namespace kronldp
