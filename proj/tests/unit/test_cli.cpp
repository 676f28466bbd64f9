#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string kCli = KRONLDP_CLI_PATH;
const std::string kConfigs = KRONLDP_CONFIG_DIR;

fs::path scratch_root() { return fs::temp_directory_path() / ("kronldp_cli_test_" + std::to_string(::getpid())); }

struct ScratchCleanup {
    ~ScratchCleanup()
    {
        std::error_code ec;
        fs::remove_all(scratch_root(), ec);
    }
} cleanup;

fs::path scratch(const std::string& name)
{
    fs::path p = scratch_root() / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

struct Run {
    int code = -1;
    std::string err;
};

// Runs the CLI with stdout discarded and stderr captured.
Run run_cli(const std::string& args, const fs::path& dir)
{
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = "\"" + kCli + "\" " + args + " > /dev/null 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(err);
    std::stringstream ss;
    ss << in.rdbuf();
    r.err = ss.str();
    return r;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Header plus numeric rows; non-numeric cells become NaN.
struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    int col(const std::string& name) const
    {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return int(i);
        return -1;
    }
};

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

Csv read_csv(const fs::path& p)
{
    Csv c;
    std::ifstream in(p);
    std::string line;
    if (std::getline(in, line)) c.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        for (const auto& cell : split(line)) {
            char* end = nullptr;
            double v = std::strtod(cell.c_str(), &end);
            row.push_back(end != cell.c_str() && *end == '\0' ? v : std::nan(""));
        }
        c.rows.push_back(row);
    }
    return c;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& body)
{
    fs::path p = dir / name;
    std::ofstream(p) << body;
    return p;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("density on the semicircle")
{
    auto dir = scratch("density");
    auto r = run_cli("--config " + q(kConfigs + "/goe.json") + " --out " + q(dir) + " density", dir);
    REQUIRE(r.code == 0);
    auto csv = read_csv(dir / "density.csv");
    REQUIRE(csv.col("mass") >= 0);
    double total = 0.0;
    for (const auto& row : csv.rows) total += row[csv.col("mass")];
    CHECK(std::abs(total - 1.0) <= 1e-3);
    auto support = slurp(dir / "support.json");
    CHECK(support.find("\"r_inf\"") != std::string::npos);
    CHECK(fs::exists(dir / "metadata.json"));
}

TEST_CASE("density on a deterministic structure reports the top eigenvalue")
{
    auto dir = scratch("deterministic");
    auto r = run_cli("--config " + q(kConfigs + "/deterministic.json") + " --out " + q(dir), dir);
    REQUIRE(r.code == 0);
    auto support = slurp(dir / "support.json");
    auto pos = support.find("\"r_inf\"");
    REQUIRE(pos != std::string::npos);
    double v = std::strtod(support.c_str() + support.find(':', pos) + 1, nullptr);
    CHECK(std::abs(v - 3.0) < 1e-9);
    CHECK(read_csv(dir / "density.csv").rows.empty());
}

TEST_CASE("malformed input exits with code 1")
{
    auto dir = scratch("malformed");
    auto bad = write_file(dir, "bad.json", "{\"command\": \"density\", \"structure\": {\"L\": 1, ");
    auto r = run_cli("--config " + q(bad) + " --out " + q(dir), dir);
    CHECK(r.code == 1);
    CHECK_FALSE(r.err.empty());

    auto wrong = write_file(dir, "wrong.json",
                            "{\"command\": \"density\", \"structure\": {\"L\": 1, \"beta\": 1, \"A0\": [[0]], "
                            "\"A\": [[[1, 2]]]}}");
    auto r2 = run_cli("--config " + q(wrong) + " --out " + q(dir), dir);
    CHECK(r2.code == 1);
    CHECK(r2.err.find("A[0]") != std::string::npos);

    auto missing = write_file(dir, "missing.json", "{\"command\": \"density\", \"structure\": {\"L\": 1, \"beta\": 1}}");
    auto r3 = run_cli("--config " + q(missing) + " --out " + q(dir), dir);
    CHECK(r3.code == 1);
    CHECK(r3.err.find("A0") != std::string::npos);

    CHECK(run_cli("--config " + q(dir / "absent.json") + " --out " + q(dir), dir).code == 1);
}

TEST_CASE("rate on the GOE")
{
    auto dir = scratch("rate");
    auto r = run_cli("--config " + q(kConfigs + "/goe.json") + " --out " + q(dir) + " rate --x 1.5 2.5 3", dir);
    REQUIRE(r.code == 0);
    CHECK(r.err.find("1.5") != std::string::npos);
    auto csv = read_csv(dir / "rate.csv");
    REQUIRE(csv.rows.size() == 2);
    int ix = csv.col("x"), ii = csv.col("I");
    REQUIRE(ix >= 0);
    REQUIRE(ii >= 0);
    CHECK(csv.rows[0][ix] == 2.5);
    CHECK(std::abs(csv.rows[0][ii] - oracle::goe_rate_closed(2.5)) <= 1e-3);
    CHECK(std::abs(csv.rows[1][ii] - 0.71463) <= 1e-3);

    auto dir2 = scratch("rate_beta2");
    auto r2 = run_cli("--config " + q(kConfigs + "/goe.json") + " --out " + q(dir2) + " rate --x 2.5 3 --beta 2", dir2);
    REQUIRE(r2.code == 0);
    auto csv2 = read_csv(dir2 / "rate.csv");
    REQUIRE(csv2.rows.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) CHECK(csv2.rows[i][ii] <= 2.0 * csv.rows[i][ii] + 1e-6);
    CHECK(csv2.col("psi_00_im") >= 0);
}

TEST_CASE("rate on a deterministic structure exits with code 3")
{
    auto dir = scratch("degenerate");
    auto r = run_cli("--config " + q(kConfigs + "/deterministic.json") + " --out " + q(dir) + " rate --x 4", dir);
    CHECK(r.code == 3);
}

TEST_CASE("outlier table on the GOE")
{
    auto dir = scratch("outlier");
    auto r = run_cli("--config " + q(kConfigs + "/goe.json") + " --out " + q(dir) + " outlier --theta 0.6 1 2", dir);
    REQUIRE(r.code == 0);
    auto csv = read_csv(dir / "outlier.csv");
    REQUIRE(csv.rows.size() == 3);
    int iz = csv.col("Z");
    REQUIRE(iz >= 0);
    const double expect[] = {1.2 + 1.0 / 1.2, 2.5, 4.25};
    for (int i = 0; i < 3; ++i) CHECK(std::abs(csv.rows[i][iz] - expect[i]) <= 1e-6);
    auto tilt = read_csv(dir / "tilt.csv");
    REQUIRE(tilt.rows.size() == 1);
    CHECK(std::abs(tilt.rows[0][tilt.col("theta")] - 1.0) <= 1e-6);
}

TEST_CASE("simulate rejects non-positive reps")
{
    auto dir = scratch("simulate_bad");
    auto r = run_cli("--config " + q(kConfigs + "/goe.json") + " --out " + q(dir) + " simulate --reps 0", dir);
    CHECK(r.code == 1);
    CHECK(r.err.find("reps must be positive") != std::string::npos);
}

TEST_CASE("outputs are byte-identical across runs")
{
    const std::string sim = " simulate --reps 2000 --N 20 40";
    auto a = scratch("repro_a");
    auto b = scratch("repro_b");
    for (const auto& d : {a, b}) {
        REQUIRE(run_cli("--config " + q(kConfigs + "/goe.json") + " --seed 5 --out " + q(d) + sim, d).code == 0);
        REQUIRE(run_cli("--config " + q(kConfigs + "/two_block.json") + " --out " + q(d) + " density --points 101", d).code == 0);
        REQUIRE(run_cli("--config " + q(kConfigs + "/goe.json") + " --out " + q(d) + " outlier", d).code == 0);
    }
    for (const char* f : {"tail.jsonl", "density.csv", "support.json", "outlier.csv"}) {
        INFO(f);
        CHECK(slurp(a / f) == slurp(b / f));
        CHECK_FALSE(slurp(a / f).empty());
    }

    auto c = scratch("repro_threads");
    REQUIRE(run_cli("--config " + q(kConfigs + "/goe.json") + " --seed 5 --threads 1 --out " + q(c) + sim, c).code == 0);
    CHECK(slurp(a / "tail.jsonl") == slurp(c / "tail.jsonl"));
}
