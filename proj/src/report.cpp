#include "ywlab/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ywlab/config.hpp"
#include "ywlab/errors.hpp"

namespace ywlab {

void SuiteReport::add(std::string quantity, double estimate, double standard_error, double tolerance, bool pass) {
    rows.push_back({std::move(quantity), estimate, standard_error, tolerance, pass});
}

bool SuiteReport::passed() const {
    return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

Verdict SuiteReport::verdict() const {
    if (inconclusive) return Verdict::inconclusive;
    return passed() ? Verdict::pass : Verdict::fail;
}

void SuiteReport::merge(const SuiteReport& other) {
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
    notes.insert(notes.end(), other.notes.begin(), other.notes.end());
    inconclusive = inconclusive || other.inconclusive;
}

std::string exact(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

void write_report_csv(std::ostream& out, const SuiteReport& report, std::uint64_t digest) {
    out << "# digest=" << digest_hex(digest) << "\n# suite=" << report.name << "\n";
    out << "quantity,estimate,standard_error,tolerance,pass\n";
    for (const ReportRow& r : report.rows)
        out << csv_field(r.quantity) << ',' << exact(r.estimate) << ',' << exact(r.standard_error) << ','
            << exact(r.tolerance) << ',' << (r.pass ? "pass" : "fail") << '\n';
}

void write_law_csv(std::ostream& out, const LawComparisonReport& report, std::uint64_t digest) {
    out << "# digest=" << digest_hex(digest) << "\n# alpha=" << exact(report.alpha)
        << " corrected_alpha=" << exact(report.corrected_alpha) << "\n";
    out << "statistic,n_a,n_b,distance,p_value,verdict\n";
    for (const StatisticComparison& s : report.statistics)
        out << csv_field(s.name) << ',' << s.n_a << ',' << s.n_b << ',' << exact(s.distance) << ','
            << exact(s.p_value) << ',' << (s.reject ? "reject" : "non-reject") << '\n';
    for (std::size_t i = 0; i < report.skorokhod_distances.size(); ++i)
        out << "# d0 at sup-norm quantile " << exact(report.skorokhod_quantiles[i]) << " = "
            << exact(report.skorokhod_distances[i]) << '\n';
}

void write_compat_csv(std::ostream& out, const CompatibilityReport& report, std::uint64_t digest) {
    out << "# digest=" << digest_hex(digest) << "\n# cut=" << exact(report.cut) << " samples=" << report.samples
        << " threshold=" << exact(report.threshold) << "\n";
    out << "past,future,correlation,pass\n";
    for (const CorrelationEntry& e : report.entries)
        out << csv_field(e.past) << ',' << csv_field(e.future) << ',' << exact(e.correlation) << ','
            << (std::abs(e.correlation) < report.threshold ? "pass" : "fail") << '\n';
}

void write_solution_csv(std::ostream& out, const SolutionPath& path, std::uint64_t digest) {
    out << "# digest=" << digest_hex(digest) << "\n";
    out << "time";
    for (std::size_t k = 0; k < path.dim; ++k) out << ",u_" << k + 1;
    out << '\n';
    for (std::size_t i = 0; i < path.size(); ++i) {
        out << exact(path.times[i]);
        for (double v : path.at(i)) out << ',' << exact(v);
        out << '\n';
    }
}

void write_summary(std::ostream& out, const SuiteReport& report) {
    std::size_t passed = 0;
    for (const ReportRow& r : report.rows) passed += r.pass ? 1 : 0;
    out << report.name << ": " << verdict_name(report.verdict()) << " (" << passed << "/" << report.rows.size()
        << " checks)\n";
    for (const ReportRow& r : report.rows)
        if (!r.pass) out << "  failed: " << r.quantity << " estimate=" << exact(r.estimate)
                         << " tolerance=" << exact(r.tolerance) << '\n';
    for (const std::string& n : report.notes) out << "  note: " << n << '\n';
}

JumpPath read_path_csv(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot open path file " + file);
    std::string line;
    bool header = false;
    std::size_t dim = 0;
    std::vector<double> times, values;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            double v = 0.0;
            const auto b = cell.find_first_not_of(" \t");
            const auto e = cell.find_last_not_of(" \t");
            if (b == std::string::npos) throw ValidationError(file + ": empty field");
            const auto [ptr, ec] = std::from_chars(cell.data() + b, cell.data() + e + 1, v);
            if (ec != std::errc() || ptr != cell.data() + e + 1) throw ValidationError(file + ": bad number '" + cell + "'");
            row.push_back(v);
        }
        if (row.size() < 2) throw ValidationError(file + ": rows need a time and at least one value");
        if (dim == 0) dim = row.size() - 1;
        if (row.size() != dim + 1) throw ValidationError(file + ": ragged rows");
        times.push_back(row[0]);
        values.insert(values.end(), row.begin() + 1, row.end());
    }
    if (times.empty()) throw ValidationError(file + ": no data rows");
    if (times.front() != 0.0) throw ValidationError(file + ": the first row must be at t = 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw ValidationError(file + ": times must increase");
    JumpPath p = JumpPath::from_samples(times, values, dim);
    p.validate();
    return p;
}

}  // namespace ywlab
