#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fmmd/csv.hpp>
#include <fmmd/rng.hpp>
#include <fstream>

#include "test_util.hpp"

using namespace fmmd;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) {
        path = (std::filesystem::temp_directory_path() / name).string();
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("function set csv round-trips exactly") {
    auto mesh = Mesh::uniform(17, 0.0, 2.0);
    Rng rng(3);
    auto set = test::random_set(mesh, 5, rng, 3.7);

    TempFile f("fmmd_test_set.csv");
    write_function_set_csv(f.path, set, {"a", "b", "c", "d", "e"});
    const auto loaded = read_function_set_csv(f.path);

    CHECK(loaded.ids == std::vector<std::string>{"a", "b", "c", "d", "e"});
    CHECK(loaded.set.mesh()->points() == mesh->points());
    CHECK(loaded.set.mesh()->weights() == mesh->weights());
    CHECK(loaded.set.values() == set.values());
}

TEST_CASE("function set csv errors carry line numbers") {
    TempFile f("fmmd_test_bad.csv");
    {
        std::ofstream out(f.path);
        out << "t,s1\n0.0,1.0\n0.5,oops\n";
    }
    try {
        (void)read_function_set_csv(f.path);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(e.line == 3);
    }

    {
        std::ofstream out(f.path);
        out << "time,s1\n0.0,1.0\n";
    }
    CHECK_THROWS_AS((void)read_function_set_csv(f.path), DataError);

    CHECK_THROWS_AS((void)read_function_set_csv("/nonexistent/file.csv"), DataError);
}

TEST_CASE("observation csv groups by sample and sorts by location") {
    TempFile f("fmmd_test_obs.csv");
    {
        std::ofstream out(f.path);
        out << "sample_id,t,value\n";
        out << "s2,0.5,2.5\n";
        out << "s1,0.9,1.9\n";
        out << "s1,0.1,1.1\n";
        out << "s2,0.2,2.2\n";
        out << "s1,0.4,1.4\n";
    }
    const auto recs = read_observations_csv(f.path);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].id == "s2");
    CHECK(recs[0].obs.locations[0] == 0.2);
    CHECK(recs[0].obs.values[0] == 2.2);
    CHECK(recs[1].id == "s1");
    REQUIRE(recs[1].obs.locations.size() == 3);
    CHECK(recs[1].obs.locations[1] == 0.4);
    CHECK(recs[1].obs.values[2] == 1.9);

    {
        std::ofstream out(f.path);
        out << "s1,0.5,1.0\ns1,0.5,2.0\n";
    }
    CHECK_THROWS_AS((void)read_observations_csv(f.path), DataError);
}

TEST_CASE("result rows round-trip") {
    std::vector<ResultRow> rows(2);
    rows[0] = {"mean-shift", "CEXP", 1.5, 100, 100, 0.875, 0.0330718913883, 12345};
    rows[1] = {"scaling", "ID", 0.0, 50, 250, 0.13, 0.03363034344160047, 18446744073709551615ULL};

    TempFile f("fmmd_test_rows.csv");
    write_results_csv(f.path, rows);
    const auto loaded = read_results_csv(f.path);
    REQUIRE(loaded.size() == 2);
    for (int i = 0; i < 2; ++i) {
        CHECK(loaded[i].experiment == rows[i].experiment);
        CHECK(loaded[i].kernel == rows[i].kernel);
        CHECK(loaded[i].delta == rows[i].delta);
        CHECK(loaded[i].n == rows[i].n);
        CHECK(loaded[i].mesh_size == rows[i].mesh_size);
        CHECK(loaded[i].power == rows[i].power);
        CHECK(loaded[i].std_error == rows[i].std_error);
        CHECK(loaded[i].seed == rows[i].seed);
    }
}
