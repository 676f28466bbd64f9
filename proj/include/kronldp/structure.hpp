#pragma once

#include "kronldp/linalg.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kronldp {

// Deterministic data of X = sum_j A_j (x) W_j + A_0 (x) Id_N.
struct StructureSet {
    int L = 1;
    int k = 0;
    int beta = 1;
    CMat A0;
    std::vector<CMat> A;

    // Fills L and k from the matrices.
    static StructureSet make(int beta, CMat a0, std::vector<CMat> a);
};

// Every dimension/symmetry violation; empty iff the structure is valid.
std::vector<std::string> validate(const StructureSet& s);

// Throws ConfigError listing the violations.
void require_valid(const StructureSet& s);

// S[T] = sum_j A_j T A_j
CMat apply_S(const StructureSet& s, const CMat& t);

// sum_j A_j (x) A_j
CMat s_big(const StructureSet& s);

// sum_j A_j (x) conj(A_j): the coupling seen by a tilted Hermitian sample.
// Coincides with s_big for real structures.
CMat s_tilt(const StructureSet& s);

bool has_real_entries(const StructureSet& s);

// True when every A_j vanishes, i.e. S == 0.
bool is_deterministic(const StructureSet& s);

double max_coupling_norm(const StructureSet& s);

std::uint64_t structure_hash(const StructureSet& s);
std::string structure_hash_hex(const StructureSet& s);

}  // namespace kronldp
