#include "criteria.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>
#include <sys/wait.h>

namespace {

constexpr double kVerifySeconds = 600.0;

criteria::Result run_verify()
{
    const auto t0 = std::chrono::steady_clock::now();
    const std::string cmd = std::string("\"") + KRONLDP_CLI_PATH + "\" verify --out \"" + KRONLDP_VERIFY_OUT + "\"";
    const int status = std::system(cmd.c_str());
    criteria::Result r;
    r.id = 12;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.pass = code == 0 && r.seconds <= kVerifySeconds;
    r.detail = "exit " + std::to_string(code) + " in " + std::to_string(int(r.seconds)) + " s (limit " +
               std::to_string(int(kVerifySeconds)) + " s)";
    return r;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance criteria"};
    int id = 0;
    int threads = 0;
    app.add_option("--criterion", id, "criterion 1-12; omitted runs all")->check(CLI::Range(1, 12));
    app.add_option("--threads", threads, "worker threads");
    CLI11_PARSE(app, argc, argv);

    bool all_pass = true;
    for (int c = 1; c <= 12; ++c) {
        if (id != 0 && c != id) continue;
        const criteria::Result r = c == 12 ? run_verify() : criteria::run(c, threads);
        std::cout << criteria::format(r) << std::endl;
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : 1;
}
