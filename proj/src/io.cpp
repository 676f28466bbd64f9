#include "kronldp/io.hpp"

#include "kronldp/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#ifndef KRONLDP_VERSION
#define KRONLDP_VERSION "unknown"
#endif

namespace kronldp {

std::string version_string() { return KRONLDP_VERSION; }

namespace {

cplx parse_entry(const nlohmann::json& e, const std::string& field)
{
    if (e.is_number()) return {e.get<double>(), 0.0};
    if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
        return {e[0].get<double>(), e[1].get<double>()};
    throw ConfigError("field '" + field + "': entries must be numbers or [re, im] pairs");
}

CMat parse_matrix(const nlohmann::json& m, int L, const std::string& field)
{
    if (!m.is_array() || static_cast<int>(m.size()) != L)
        throw ConfigError("field '" + field + "': expected " + std::to_string(L) + " rows");
    CMat out(L, L);
    for (int a = 0; a < L; ++a) {
        if (!m[a].is_array() || static_cast<int>(m[a].size()) != L)
            throw ConfigError("field '" + field + "': row " + std::to_string(a) + " must have " + std::to_string(L) +
                              " entries");
        for (int b = 0; b < L; ++b) out(a, b) = parse_entry(m[a][b], field);
    }
    return out;
}

nlohmann::json matrix_json(const CMat& m, bool real)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index a = 0; a < m.rows(); ++a) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index b = 0; b < m.cols(); ++b) {
            if (real) row.push_back(m(a, b).real());
            else row.push_back({m(a, b).real(), m(a, b).imag()});
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

StructureSet structure_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) throw ConfigError("structure: expected a JSON object");
    for (const char* f : {"L", "beta", "A0", "A"})
        if (!j.contains(f)) throw ConfigError(std::string("structure: missing field '") + f + "'");
    if (!j["L"].is_number_integer() || j["L"].get<int>() < 1) throw ConfigError("field 'L': positive integer required");
    if (!j["beta"].is_number_integer()) throw ConfigError("field 'beta': must be 1 or 2");
    const int L = j["L"].get<int>();
    const int beta = j["beta"].get<int>();
    if (beta != 1 && beta != 2) throw ConfigError("field 'beta': must be 1 or 2");
    if (!j["A"].is_array()) throw ConfigError("field 'A': expected a list of matrices");
    if (j.contains("k") && (!j["k"].is_number_integer() || j["k"].get<std::size_t>() != j["A"].size()))
        throw ConfigError("field 'k': does not match the number of matrices in 'A'");
    std::vector<CMat> a;
    for (std::size_t i = 0; i < j["A"].size(); ++i)
        a.push_back(parse_matrix(j["A"][i], L, "A[" + std::to_string(i) + "]"));
    StructureSet s = StructureSet::make(beta, parse_matrix(j["A0"], L, "A0"), std::move(a));
    require_valid(s);
    return s;
}

nlohmann::json structure_to_json(const StructureSet& s)
{
    const bool real = has_real_entries(s);
    nlohmann::json j;
    j["L"] = s.L;
    j["k"] = s.k;
    j["beta"] = s.beta;
    j["A0"] = matrix_json(s.A0, real);
    j["A"] = nlohmann::json::array();
    for (const auto& a : s.A) j["A"].push_back(matrix_json(a, real));
    return j;
}

nlohmann::json load_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("parse error in '" + path + "': " + e.what());
    }
}

StructureSet load_structure(const std::string& path)
{
    const nlohmann::json j = load_json(path);
    return structure_from_json(j.contains("structure") ? j["structure"] : j);
}

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os)
{
    for (const auto& h : header) *this << h;
    end_row();
}

void CsvWriter::sep()
{
    if (!first_) os_ << ',';
    first_ = false;
}

CsvWriter& CsvWriter::operator<<(double v)
{
    sep();
    os_ << format_double(v);
    return *this;
}

CsvWriter& CsvWriter::operator<<(long v)
{
    sep();
    os_ << v;
    return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& v)
{
    sep();
    os_ << v;
    return *this;
}

void CsvWriter::end_row()
{
    os_ << '\n';
    first_ = true;
}

void write_json_line(std::ostream& os, const nlohmann::json& j) { os << j.dump() << '\n'; }

}  // namespace kronldp
