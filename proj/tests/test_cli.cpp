#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code;
    std::string out;
};

// Runs the CLI, capturing stdout; stderr goes to a scratch file and is
// ignored unless the caller reads it.
RunResult run(const std::string& args) {
    const fs::path out_file = fs::temp_directory_path() / "biconserve_cli_test_stdout.txt";
    const std::string cmd =
        std::string(CLI_PATH) + " " + args + " > " + out_file.string() + " 2>/dev/null";
    const int raw = std::system(cmd.c_str());
    std::ifstream in(out_file);
    std::ostringstream buf;
    buf << in.rdbuf();
    return {raw == -1 ? -1 : WEXITSTATUS(raw), buf.str()};
}

fs::path scratch(const std::string& name) { return fs::temp_directory_path() / name; }

}  // namespace

TEST_CASE("enumerate") {
    const RunResult r = run("enumerate --max-r 5");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("2,3,") != std::string::npos);
    CHECK(r.out.find("3,5,") != std::string::npos);

    CHECK(run("enumerate --max-r 2").exit_code == 0);
    CHECK(run("enumerate --max-r 0").exit_code == 2);
    CHECK(run("enumerate").exit_code == 2);  // missing required flag
}

TEST_CASE("solve") {
    const RunResult r = run("solve --n 5 --l 2 --r 3");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("d = 0.7993906846") != std::string::npos);
    CHECK(r.out.find("period = 3.14159265358979") != std::string::npos);

    CHECK(run("solve --n 5 --l 1 --r 1").exit_code == 2);
    CHECK(run("solve --n 2 --l 2 --r 3").exit_code == 2);
    CHECK(run("--rho -1 solve --n 5 --l 2 --r 3").exit_code == 2);
}

TEST_CASE("sweep") {
    const RunResult r = run("sweep --n 5 --d-min 0.6 --d-max 2 --steps 5");
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("d,I,period,alpha,beta,regime", 0) == 0);
    // Header plus five data rows.
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 6);

    CHECK(run("sweep --n 5 --d-min 0.1 --d-max 2 --steps 5").exit_code == 2);
    CHECK(run("sweep --n 5 --d-min 2 --d-max 1 --steps 5").exit_code == 2);
}

TEST_CASE("trace, verify and the ingestion error paths") {
    const fs::path curve = scratch("cli_curve.json");
    const fs::path report = scratch("cli_report.json");

    CHECK(run("trace --n 3 --l 2 --r 3 --points 4096 --out " + curve.string()).exit_code == 0);
    const RunResult v = run("verify --in " + curve.string() + " --n 3 --out " + report.string());
    CHECK(v.exit_code == 0);
    {
        std::ifstream in(report);
        std::ostringstream buf;
        buf << in.rdbuf();
        CHECK(buf.str().find("\"all_passed\": true") != std::string::npos);
    }

    // Wrong dimension on ingestion.
    CHECK(run("verify --in " + curve.string() + " --n 4").exit_code == 2);
    // Missing file.
    CHECK(run("verify --in /nonexistent/c.json --n 3").exit_code == 2);

    // Tampered sample: stored kappa no longer matches u, so checks fail.
    {
        std::ifstream in(curve);
        std::ostringstream buf;
        buf << in.rdbuf();
        std::string text = buf.str();
        const auto pos = text.find("\"kappa\": ");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, 11, "\"kappa\": 9");
        const fs::path bad = scratch("cli_curve_bad.json");
        std::ofstream out(bad);
        out << text;
        out.close();
        CHECK(run("verify --in " + bad.string() + " --n 3").exit_code == 1);
    }

    // Malformed JSON is an argument-level error.
    {
        const fs::path garbage = scratch("cli_garbage.json");
        std::ofstream out(garbage);
        out << "{\"meta\": {}}";
        out.close();
        CHECK(run("verify --in " + garbage.string() + " --n 3").exit_code == 2);
    }

    // Open one-period trace via an explicit level.
    const fs::path open_curve = scratch("cli_open.json");
    CHECK(run("trace --n 5 --d 1.2 --points 1024 --out " + open_curve.string()).exit_code == 0);
    CHECK(run("verify --in " + open_curve.string() + " --n 5").exit_code == 0);
    // Level at or below d_star cannot be traced.
    CHECK(run("trace --n 5 --d 0.4 --points 1024 --out " + open_curve.string()).exit_code == 2);
    // Mixing --d with --l/--r is rejected.
    CHECK(run("trace --n 5 --d 1.2 --l 2 --r 3 --out " + open_curve.string()).exit_code == 2);
}

TEST_CASE("BICONSERVE_CONFIG overrides tolerances") {
    const fs::path cfg = scratch("cli_tol.cfg");
    {
        std::ofstream out(cfg);
        out << "quad_rel_tol = 1e-8\n";
    }
    const std::string prefix = "BICONSERVE_CONFIG=" + cfg.string() + " ";
    const fs::path out_file = fs::temp_directory_path() / "biconserve_cli_env_out.txt";
    int raw = std::system((prefix + CLI_PATH + " solve --n 5 --l 2 --r 3 > " +
                           out_file.string() + " 2>/dev/null")
                              .c_str());
    CHECK(WEXITSTATUS(raw) == 0);

    // Bad config file is an argument error for any command.
    {
        std::ofstream out(cfg);
        out << "bogus = 1\n";
    }
    raw = std::system((prefix + CLI_PATH + " enumerate --max-r 5 > /dev/null 2>/dev/null").c_str());
    CHECK(WEXITSTATUS(raw) == 2);
}
