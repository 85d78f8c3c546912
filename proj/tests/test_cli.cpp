#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fmmd/csv.hpp>
#include <fstream>
#include <sstream>
#include <string>

#ifndef FMMD_CLI_PATH
#define FMMD_CLI_PATH "fmmd"
#endif

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(FMMD_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

void write_growth_csv(const std::string& path) {
    // two classes tagged by the first id character, 8 samples each
    std::ofstream out(path);
    out << "t";
    for (int i = 1; i <= 8; ++i) out << ",b" << i;
    for (int i = 1; i <= 8; ++i) out << ",g" << i;
    out << "\n";
    for (int r = 0; r < 12; ++r) {
        const double t = r / 11.0;
        out << t;
        for (int c = 0; c < 16; ++c) {
            const double cls = c < 8 ? 0.0 : 0.6;
            out << ',' << (cls + t + 0.05 * ((r * 7 + c * 3) % 5));
        }
        out << "\n";
    }
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli("") == 2);
    CHECK(run_cli("bogus-subcommand") == 2);
    CHECK(run_cli("size --trials 2 --perms 5 --kernel NOPE") == 2);
}

TEST_CASE("data errors exit with code 3") {
    CHECK(run_cli("growth /nonexistent/file.csv --trials 2 --perms 5 --kernel ID") == 3);
}

TEST_CASE("size experiment emits a deterministic results table") {
    const std::string out1 = temp_path("fmmd_cli_size1.csv");
    const std::string out2 = temp_path("fmmd_cli_size2.csv");
    const std::string args = "size --trials 5 --perms 20 --kernel ID --seed 42 --out ";
    REQUIRE(run_cli(args + out1) == 0);
    REQUIRE(run_cli(args + out2) == 0);
    CHECK(slurp(out1) == slurp(out2));

    const auto rows = fmmd::read_results_csv(out1);
    REQUIRE(rows.size() == 3);  // M in {5, 15, 25}
    for (const auto& r : rows) {
        CHECK(r.experiment == "size");
        CHECK(r.kernel == "ID");
        CHECK(r.power >= 0.0);
        CHECK(r.power <= 1.0);
    }
    std::remove(out1.c_str());
    std::remove(out2.c_str());
}

TEST_CASE("config file fills values and flags win") {
    const std::string cfg_path = temp_path("fmmd_cli_cfg.json");
    {
        std::ofstream out(cfg_path);
        out << R"({"trials": 5, "perms": 20, "kernel": "ID", "seed": 42})";
    }
    const std::string out1 = temp_path("fmmd_cli_cfg1.csv");
    const std::string out2 = temp_path("fmmd_cli_cfg2.csv");
    REQUIRE(run_cli("size --config " + cfg_path + " --out " + out1) == 0);
    REQUIRE(run_cli("size --trials 5 --perms 20 --kernel ID --seed 42 --out " + out2) == 0);
    CHECK(slurp(out1) == slurp(out2));

    // an explicit flag overrides the config value
    const std::string out3 = temp_path("fmmd_cli_cfg3.csv");
    REQUIRE(run_cli("size --config " + cfg_path + " --kernel COV --out " + out3) == 0);
    const auto rows = fmmd::read_results_csv(out3);
    for (const auto& r : rows) CHECK(r.kernel == "COV");
    std::remove(cfg_path.c_str());
    std::remove(out1.c_str());
    std::remove(out2.c_str());
    std::remove(out3.c_str());
}

TEST_CASE("growth experiment runs on a two-class csv") {
    const std::string data = temp_path("fmmd_cli_growth.csv");
    write_growth_csv(data);
    const std::string cfg_path = temp_path("fmmd_cli_growth_cfg.json");
    {
        std::ofstream out(cfg_path);
        out << R"({"subsample_sizes": [4], "trials": 4, "perms": 20, "kernel": "ID"})";
    }
    const std::string out = temp_path("fmmd_cli_growth_out.csv");
    REQUIRE(run_cli("growth " + data + " --config " + cfg_path + " --out " + out) == 0);
    const auto rows = fmmd::read_results_csv(out);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].n == 4);
    CHECK(rows[0].experiment == "growth");

    // default subsample grid includes sizes larger than the 8-sample classes
    CHECK(run_cli("growth " + data + " --trials 2 --perms 5 --kernel ID") == 2);

    std::remove(data.c_str());
    std::remove(cfg_path.c_str());
    std::remove(out.c_str());
}

TEST_CASE("validate emits its own schema") {
    const std::string out = temp_path("fmmd_cli_validate.csv");
    const int code =
        run_cli("validate --trials 15 --n 32 --mesh 10 --seed 7 --out " + out);
    CHECK((code == 0 || code == 4));  // 4 would flag a >3se monte-carlo drift
    const std::string text = slurp(out);
    CHECK(text.rfind("case,closed_form,mc_mean,mc_se,xi2_theory,xi2_empirical,flagged", 0) == 0);
    int lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    CHECK(lines == 6);
    std::remove(out.c_str());
}
