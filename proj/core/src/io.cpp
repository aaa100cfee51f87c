#include "ionheat/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ionheat/errors.hpp"
#include "ionheat/version.hpp"

namespace ionheat {

std::string format_double(double v) {
    // Try increasing precision until the value round-trips.
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "# ionheat-csv: " << csv_schema_version << "\n";
    for (const auto& [key, value] : table.metadata) out << "# " << key << ": " << value << "\n";
    for (std::size_t i = 0; i < table.header.size(); ++i)
        out << (i ? "," : "") << table.header[i];
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
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

double parse_number(const std::string& cell, const std::string& path, std::size_t line_no) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || errno == ERANGE)
        throw IoError(path + ":" + std::to_string(line_no) + ": not a number: '" + cell + "'");
    return v;
}

long parse_long(const std::string& cell, const std::string& path, std::size_t line_no) {
    const double v = parse_number(cell, path, line_no);
    const long l = static_cast<long>(v);
    if (static_cast<double>(l) != v)
        throw IoError(path + ":" + std::to_string(line_no) + ": not an integer: '" + cell + "'");
    return l;
}

struct ParsedCsv {
    CsvTable table;
    std::vector<std::size_t> row_lines;  // source line number of each data row
    std::string path;
};

ParsedCsv read_csv_impl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    ParsedCsv parsed;
    parsed.path = path;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(1);
            if (!body.empty() && body.front() == ' ') body.erase(0, 1);
            const std::size_t sep = body.find(": ");
            if (sep != std::string::npos)
                parsed.table.metadata.emplace_back(body.substr(0, sep), body.substr(sep + 2));
            continue;
        }
        if (!have_header) {
            parsed.table.header = split_commas(line);
            have_header = true;
            continue;
        }
        const std::vector<std::string> cells = split_commas(line);
        if (cells.size() != parsed.table.header.size())
            throw IoError(path + ":" + std::to_string(line_no) + ": expected " +
                          std::to_string(parsed.table.header.size()) + " columns, got " +
                          std::to_string(cells.size()));
        parsed.table.rows.push_back(cells);
        parsed.row_lines.push_back(line_no);
    }
    if (!have_header) throw IoError(path + ": empty file or missing header row");
    return parsed;
}

void require_header(const ParsedCsv& parsed, const std::vector<std::string>& expected) {
    if (parsed.table.header != expected) {
        std::string msg = parsed.path + ": expected header ";
        for (std::size_t i = 0; i < expected.size(); ++i) msg += (i ? "," : "") + expected[i];
        throw IoError(msg);
    }
}

}  // namespace

CsvTable read_csv(const std::string& path) { return read_csv_impl(path).table; }

std::string csv_metadata(const CsvTable& table, const std::string& key) {
    for (const auto& [k, v] : table.metadata)
        if (k == key) return v;
    return {};
}

void write_population_csv(const std::string& path, const PopulationDataset& data,
                          std::vector<std::pair<std::string, std::string>> metadata) {
    CsvTable t;
    t.metadata = std::move(metadata);
    t.metadata.emplace_back("schema", "population-dataset");
    t.header = {"time_s", "level", "counts", "shots"};
    for (const PopulationSample& s : data.samples) {
        const double counts = s.shots > 0 ? static_cast<double>(s.counts) : s.value;
        t.rows.push_back({format_double(s.time), std::to_string(s.level), format_double(counts),
                          std::to_string(s.shots)});
    }
    write_csv(path, t);
}

PopulationDataset read_population_csv(const std::string& path) {
    const ParsedCsv parsed = read_csv_impl(path);
    require_header(parsed, {"time_s", "level", "counts", "shots"});
    PopulationDataset data;
    for (std::size_t r = 0; r < parsed.table.rows.size(); ++r) {
        const auto& row = parsed.table.rows[r];
        const std::size_t ln = parsed.row_lines[r];
        const double time = parse_number(row[0], path, ln);
        const long level = parse_long(row[1], path, ln);
        const double counts = parse_number(row[2], path, ln);
        const long shots = parse_long(row[3], path, ln);
        if (level < 0) throw IoError(path + ":" + std::to_string(ln) + ": negative level");
        if (shots > 0) {
            const long k = static_cast<long>(counts);
            if (static_cast<double>(k) != counts || k < 0 || k > shots)
                throw IoError(path + ":" + std::to_string(ln) + ": counts outside [0, shots]");
            data.add_counts(time, static_cast<int>(level), k, shots);
        } else {
            if (!(counts >= 0.0 && counts <= 1.0))
                throw IoError(path + ":" + std::to_string(ln) + ": probability outside [0, 1]");
            data.samples.push_back({time, static_cast<int>(level), counts, 0.0});
        }
    }
    return data;
}

void write_flop_csv(const std::string& path, const FlopDataset& data,
                    std::vector<std::pair<std::string, std::string>> metadata) {
    CsvTable t;
    t.metadata = std::move(metadata);
    t.metadata.emplace_back("schema", "flop-dataset");
    t.metadata.emplace_back("transition", data.kind == TransitionKind::carrier ? "carrier"
                                                                               : "blue_sideband");
    if (data.rabi_prior > 0.0) t.metadata.emplace_back("rabi_prior_rad_s", format_double(data.rabi_prior));
    t.header = {"time_s", "counts", "shots"};
    for (const FlopPoint& p : data.points)
        t.rows.push_back({format_double(p.time), format_double(p.counts), std::to_string(p.shots)});
    write_csv(path, t);
}

FlopDataset read_flop_csv(const std::string& path) {
    const ParsedCsv parsed = read_csv_impl(path);
    require_header(parsed, {"time_s", "counts", "shots"});
    FlopDataset data;
    const std::string transition = csv_metadata(parsed.table, "transition");
    if (transition == "carrier") data.kind = TransitionKind::carrier;
    else if (transition == "blue_sideband" || transition.empty()) data.kind = TransitionKind::blue_sideband;
    else throw IoError(path + ": unknown transition kind '" + transition + "'");
    const std::string prior = csv_metadata(parsed.table, "rabi_prior_rad_s");
    if (!prior.empty()) data.rabi_prior = parse_number(prior, path, 1);

    for (std::size_t r = 0; r < parsed.table.rows.size(); ++r) {
        const auto& row = parsed.table.rows[r];
        const std::size_t ln = parsed.row_lines[r];
        FlopPoint p;
        p.time = parse_number(row[0], path, ln);
        p.counts = parse_number(row[1], path, ln);
        p.shots = parse_long(row[2], path, ln);
        data.points.push_back(p);
    }
    data.validate();
    return data;
}

void write_levels_csv(const std::string& path, const PopulationEstimate& estimate,
                      std::vector<std::pair<std::string, std::string>> metadata) {
    CsvTable t;
    t.metadata = std::move(metadata);
    t.metadata.emplace_back("schema", "level-populations");
    t.metadata.emplace_back("bootstrap_count", std::to_string(estimate.bootstrap_count));
    t.header = {"level", "p", "p_lo", "p_hi"};
    for (std::size_t n = 0; n < estimate.median.size(); ++n)
        t.rows.push_back({std::to_string(n), format_double(estimate.median[n]),
                          format_double(estimate.lo[n]), format_double(estimate.hi[n])});
    write_csv(path, t);
}

std::vector<LevelObservation> read_levels_csv(const std::string& path) {
    const ParsedCsv parsed = read_csv_impl(path);
    require_header(parsed, {"level", "p", "p_lo", "p_hi"});
    std::vector<LevelObservation> out;
    for (std::size_t r = 0; r < parsed.table.rows.size(); ++r) {
        const auto& row = parsed.table.rows[r];
        const std::size_t ln = parsed.row_lines[r];
        LevelObservation o;
        const long level = parse_long(row[0], path, ln);
        if (level < 0) throw IoError(path + ":" + std::to_string(ln) + ": negative level");
        o.level = static_cast<int>(level);
        o.value = parse_number(row[1], path, ln);
        const double lo = parse_number(row[2], path, ln);
        const double hi = parse_number(row[3], path, ln);
        if (!(lo <= o.value && o.value <= hi))
            throw IoError(path + ":" + std::to_string(ln) + ": interval does not bracket p");
        o.sigma = 0.5 * (hi - lo);
        out.push_back(o);
    }
    return out;
}

}  // namespace ionheat
