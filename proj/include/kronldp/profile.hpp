#pragma once

#include "kronldp/linalg.hpp"
#include "kronldp/rng.hpp"
#include "kronldp/structure.hpp"

namespace kronldp {

// Trace-one positive semi-definite L x L matrix.
class Profile {
public:
    static constexpr double kTol = 1e-12;

    // Throws std::invalid_argument unless psi is Hermitian, PSD and of trace one (within tol).
    explicit Profile(CMat psi, double tol = kTol);

    static Profile identity(int L);
    // C C* / Tr(C C*)
    static Profile from_factor(const CMat& c);

    const CMat& psi() const { return psi_; }
    int dim() const { return static_cast<int>(psi_.rows()); }

private:
    CMat psi_;
};

bool is_profile(const CMat& psi, double tol = Profile::kTol);

// rho(w)_ij = <w_i, w_j> over blocks of length N = |w| / L.
CMat rho_profile(const CVec& w, int L);

// Symmetrized bilinear version: rho(w1,w2)_ij = <w1_i, w2_j> + <w2_i, w1_j>, so rho(w,w) = 2 rho(w).
CMat rho_profile(const CVec& w1, const CVec& w2, int L);

// Unit NL-vector with rho(u) = psi exactly, built from psi = C C* and random
// orthonormal f_b (real for beta=1, complex for beta=2).
CVec profile_vector(const StructureSet& s, const CMat& psi, int N, CounterRng& rng);

// Unit vector uniform on the sphere of R^{NL} (beta=1) or C^{NL} (beta=2).
CVec uniform_sphere(int dim, int beta, CounterRng& rng);

}  // namespace kronldp
