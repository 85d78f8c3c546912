#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fmmd/mesh.hpp"
#include "fmmd/reconstruction.hpp"

namespace fmmd {

struct NamedFunctionSet {
    FunctionSet set;
    std::vector<std::string> ids;

    NamedFunctionSet(FunctionSet s, std::vector<std::string> names)
        : set(std::move(s)), ids(std::move(names)) {}
};

/// Format: header `t,<id1>,<id2>,...`, then one row per mesh point with the
/// location first and one value per sample. Numbers are written with 17
/// significant digits so a write/read cycle reproduces the exact doubles.
NamedFunctionSet read_function_set_csv(const std::string& path);
void write_function_set_csv(const std::string& path, const FunctionSet& set,
                            const std::vector<std::string>& ids = {});

/// Format: rows `sample_id,t,value` (optional header). Rows are grouped by
/// sample id in first-appearance order and sorted by location.
struct ObservationRecord {
    std::string id;
    Observation obs;
};
std::vector<ObservationRecord> read_observations_csv(const std::string& path);

struct ResultRow {
    std::string experiment;
    std::string kernel;
    double delta = 0.0;
    int n = 0;
    int mesh_size = 0;
    double power = 0.0;
    double std_error = 0.0;
    std::uint64_t seed = 0;
};

/// Schema: experiment,kernel,delta,n,N,power,stderr,seed
void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(const std::string& path);
std::string results_csv_to_string(const std::vector<ResultRow>& rows);

}  // namespace fmmd
