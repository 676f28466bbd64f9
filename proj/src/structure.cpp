#include "kronldp/structure.hpp"

#include "kronldp/errors.hpp"

#include <cmath>
#include <cstring>
#include <cstdio>
#include <sstream>

namespace kronldp {

StructureSet StructureSet::make(int beta, CMat a0, std::vector<CMat> a)
{
    StructureSet s;
    s.beta = beta;
    s.L = static_cast<int>(a0.rows());
    s.k = static_cast<int>(a.size());
    s.A0 = std::move(a0);
    s.A = std::move(a);
    return s;
}

namespace {

void check_matrix(const CMat& m, const std::string& name, int L, int beta,
                  std::vector<std::string>& out)
{
    if (m.rows() != L || m.cols() != L) {
        std::ostringstream os;
        os << name << ": expected " << L << "x" << L << ", got " << m.rows() << "x" << m.cols();
        out.push_back(os.str());
        return;
    }
    if (!m.allFinite()) {
        out.push_back(name + ": non-finite entry");
        return;
    }
    if (beta == 1) {
        if (!is_real(m, 0.0)) out.push_back(name + ": complex entry with beta=1");
        else if ((m - m.transpose()).cwiseAbs().maxCoeff() != 0.0)
            out.push_back(name + ": not symmetric");
    } else if (beta == 2) {
        if ((m - m.adjoint()).cwiseAbs().maxCoeff() != 0.0) out.push_back(name + ": not Hermitian");
    }
}

}  // namespace

std::vector<std::string> validate(const StructureSet& s)
{
    std::vector<std::string> out;
    if (s.L < 1) out.push_back("L: must be positive");
    if (s.k < 0) out.push_back("k: must be non-negative");
    if (s.beta != 1 && s.beta != 2) out.push_back("beta: must be 1 or 2");
    if (static_cast<int>(s.A.size()) != s.k) {
        std::ostringstream os;
        os << "A: expected " << s.k << " matrices, got " << s.A.size();
        out.push_back(os.str());
    }
    if (s.L < 1) return out;
    check_matrix(s.A0, "A0", s.L, s.beta, out);
    for (std::size_t j = 0; j < s.A.size(); ++j)
        check_matrix(s.A[j], "A" + std::to_string(j + 1), s.L, s.beta, out);
    return out;
}

void require_valid(const StructureSet& s)
{
    auto v = validate(s);
    if (v.empty()) return;
    std::string msg = "invalid structure:";
    for (auto& e : v) msg += " " + e + ";";
    throw ConfigError(msg);
}

CMat apply_S(const StructureSet& s, const CMat& t)
{
    if (t.rows() != s.L || t.cols() != s.L)
        throw std::invalid_argument("apply_S: dimension mismatch");
    CMat out = CMat::Zero(s.L, s.L);
    for (const auto& a : s.A) out.noalias() += a * t * a;
    return out;
}

CMat s_big(const StructureSet& s)
{
    CMat out = CMat::Zero(s.L * s.L, s.L * s.L);
    for (const auto& a : s.A) out += kron(a, a);
    return out;
}

CMat s_tilt(const StructureSet& s)
{
    CMat out = CMat::Zero(s.L * s.L, s.L * s.L);
    for (const auto& a : s.A) out += kron(a, a.conjugate());
    return out;
}

bool has_real_entries(const StructureSet& s)
{
    if (!is_real(s.A0, 0.0)) return false;
    for (const auto& a : s.A)
        if (!is_real(a, 0.0)) return false;
    return true;
}

bool is_deterministic(const StructureSet& s)
{
    for (const auto& a : s.A)
        if (a.cwiseAbs().maxCoeff() > 0.0) return false;
    return true;
}

double max_coupling_norm(const StructureSet& s)
{
    double m = 0.0;
    for (const auto& a : s.A) m = std::max(m, op_norm(a));
    return m;
}

std::uint64_t structure_hash(const StructureSet& s)
{
    // FNV-1a over the raw numeric content
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto eat = [&h](const void* p, std::size_t n) {
        const auto* c = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= c[i];
            h *= 0x100000001b3ULL;
        }
    };
    auto eat_mat = [&](const CMat& m) {
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                double re = m(i, j).real() + 0.0, im = m(i, j).imag() + 0.0;
                eat(&re, sizeof re);
                eat(&im, sizeof im);
            }
    };
    eat(&s.L, sizeof s.L);
    eat(&s.k, sizeof s.k);
    eat(&s.beta, sizeof s.beta);
    eat_mat(s.A0);
    for (const auto& a : s.A) eat_mat(a);
    return h;
}

std::string structure_hash_hex(const StructureSet& s)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(structure_hash(s)));
    return buf;
}

}  // namespace kronldp
