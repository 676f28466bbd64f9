#pragma once

#include "kronldp/structure.hpp"

#include <json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace kronldp {

// git-describable build version
std::string version_string();

// Structure schema: {"L", "k", "beta", "A0": [[...]], "A": [[[...]]]}; complex entries as [re, im].
// Throws ConfigError naming the offending field.
StructureSet structure_from_json(const nlohmann::json& j);
nlohmann::json structure_to_json(const StructureSet& s);
StructureSet load_structure(const std::string& path);

// Whole config document; ConfigError with the parser diagnostic on malformed input.
nlohmann::json load_json(const std::string& path);

// Shortest-free round-trip text: 17 significant digits, '.' decimal, no locale.
std::string format_double(double v);

class CsvWriter {
public:
    CsvWriter(std::ostream& os, const std::vector<std::string>& header);
    CsvWriter& operator<<(double v);
    CsvWriter& operator<<(long v);
    CsvWriter& operator<<(int v) { return *this << long(v); }
    CsvWriter& operator<<(const std::string& v);
    void end_row();

private:
    void sep();
    std::ostream& os_;
    bool first_ = true;
};

// One compact JSON object per line.
void write_json_line(std::ostream& os, const nlohmann::json& j);

}  // namespace kronldp
