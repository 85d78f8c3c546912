#include "fmmd/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace fmmd {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string strip(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
    return s.substr(a, b - a);
}

bool try_parse(const std::string& field, double& out) {
    const std::string s = strip(field);
    if (s.empty()) return false;
    const char* begin = s.data();
    const char* end = begin + s.size();
    const auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc() && res.ptr == end;
}

double parse_number(const std::string& field, std::size_t line_no) {
    double v = 0.0;
    if (!try_parse(field, v)) throw DataError("expected a number, got '" + strip(field) + "'", line_no);
    return v;
}

std::uint64_t parse_u64(const std::string& field, std::size_t line_no) {
    const std::string s = strip(field);
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw DataError("expected an unsigned integer, got '" + s + "'", line_no);
    return v;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'", 0);
    return in;
}

}  // namespace

NamedFunctionSet read_function_set_csv(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw DataError("empty file", 1);
    ++line_no;
    const auto header = split_line(line);
    if (header.size() < 2) throw DataError("header needs at least one sample column", line_no);
    if (strip(header[0]) != "t") throw DataError("first header column must be 't'", line_no);
    std::vector<std::string> ids(header.begin() + 1, header.end());
    for (auto& id : ids) id = strip(id);

    std::vector<double> ts;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        const auto fields = split_line(line);
        if (fields.size() != header.size())
            throw DataError("expected " + std::to_string(header.size()) + " fields, got " +
                                std::to_string(fields.size()),
                            line_no);
        ts.push_back(parse_number(fields[0], line_no));
        std::vector<double> row(ids.size());
        for (std::size_t c = 0; c < ids.size(); ++c) row[c] = parse_number(fields[c + 1], line_no);
        rows.push_back(std::move(row));
    }
    if (ts.size() < 1) throw DataError("file has no data rows", line_no + 1);
    for (std::size_t i = 1; i < ts.size(); ++i)
        if (ts[i] <= ts[i - 1]) throw DataError("mesh points must be strictly increasing", i + 2);

    Vector points = Eigen::Map<Vector>(ts.data(), static_cast<Index>(ts.size()));
    Matrix values(static_cast<Index>(ts.size()), static_cast<Index>(ids.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < ids.size(); ++c)
            values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];

    return {FunctionSet(Mesh::from_points(std::move(points)), std::move(values)), std::move(ids)};
}

void write_function_set_csv(const std::string& path, const FunctionSet& set,
                            const std::vector<std::string>& ids) {
    if (!ids.empty() && static_cast<Index>(ids.size()) != set.size())
        throw std::invalid_argument("id count does not match sample count");
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing", 0);
    out << "t";
    for (Index c = 0; c < set.size(); ++c)
        out << ',' << (ids.empty() ? "s" + std::to_string(c + 1) : ids[c]);
    out << '\n';
    for (Index r = 0; r < set.mesh()->size(); ++r) {
        out << format_double(set.mesh()->points()[r]);
        for (Index c = 0; c < set.size(); ++c) out << ',' << format_double(set.values()(r, c));
        out << '\n';
    }
}

std::vector<ObservationRecord> read_observations_csv(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    std::size_t line_no = 0;

    struct Row {
        double t, v;
        std::size_t line;
    };
    std::vector<std::string> order;
    std::map<std::string, std::vector<Row>> groups;

    while (std::getline(in, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        const auto fields = split_line(line);
        if (fields.size() != 3) throw DataError("expected 3 fields: sample_id,t,value", line_no);
        double t = 0.0;
        if (!try_parse(fields[1], t)) {
            if (line_no == 1) continue;  // header row
            throw DataError("expected a number, got '" + strip(fields[1]) + "'", line_no);
        }
        const double v = parse_number(fields[2], line_no);
        const std::string id = strip(fields[0]);
        if (id.empty()) throw DataError("empty sample id", line_no);
        auto it = groups.find(id);
        if (it == groups.end()) {
            order.push_back(id);
            it = groups.emplace(id, std::vector<Row>{}).first;
        }
        it->second.push_back({t, v, line_no});
    }
    if (order.empty()) throw DataError("file has no observation rows", line_no + 1);

    std::vector<ObservationRecord> out;
    out.reserve(order.size());
    for (const auto& id : order) {
        auto& rows = groups[id];
        std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.t < b.t; });
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i].t == rows[i - 1].t)
                throw DataError("duplicate location for sample '" + id + "'", rows[i].line);
        Observation obs;
        obs.locations.resize(static_cast<Index>(rows.size()));
        obs.values.resize(static_cast<Index>(rows.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            obs.locations[static_cast<Index>(i)] = rows[i].t;
            obs.values[static_cast<Index>(i)] = rows[i].v;
        }
        out.push_back({id, std::move(obs)});
    }
    return out;
}

std::string results_csv_to_string(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    out << "experiment,kernel,delta,n,N,power,stderr,seed\n";
    for (const auto& r : rows) {
        out << r.experiment << ',' << r.kernel << ',' << format_double(r.delta) << ',' << r.n << ','
            << r.mesh_size << ',' << format_double(r.power) << ',' << format_double(r.std_error)
            << ',' << r.seed << '\n';
    }
    return out.str();
}

void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing", 0);
    out << results_csv_to_string(rows);
}

std::vector<ResultRow> read_results_csv(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw DataError("empty file", 1);
    ++line_no;
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        const auto f = split_line(line);
        if (f.size() != 8) throw DataError("expected 8 fields", line_no);
        ResultRow r;
        r.experiment = strip(f[0]);
        r.kernel = strip(f[1]);
        r.delta = parse_number(f[2], line_no);
        r.n = static_cast<int>(parse_number(f[3], line_no));
        r.mesh_size = static_cast<int>(parse_number(f[4], line_no));
        r.power = parse_number(f[5], line_no);
        r.std_error = parse_number(f[6], line_no);
        r.seed = parse_u64(f[7], line_no);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace fmmd
