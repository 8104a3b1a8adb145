#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "ywlab/spde_solver.hpp"
#include "ywlab/yw_harness.hpp"

namespace ywlab {

/// One line of a verification report.
struct ReportRow {
    std::string quantity;
    double estimate = 0.0;
    double standard_error = 0.0;
    double tolerance = 0.0;
    bool pass = true;
};

struct SuiteReport {
    std::string name;
    std::vector<ReportRow> rows;
    std::vector<std::string> notes;
    bool inconclusive = false;

    void add(std::string quantity, double estimate, double standard_error, double tolerance, bool pass);
    bool passed() const;
    Verdict verdict() const;
    void merge(const SuiteReport& other);
};

/// CSV with a `# digest=` comment line and the header
/// quantity,estimate,standard_error,tolerance,pass.
void write_report_csv(std::ostream& out, const SuiteReport& report, std::uint64_t digest);
void write_law_csv(std::ostream& out, const LawComparisonReport& report, std::uint64_t digest);
void write_compat_csv(std::ostream& out, const CompatibilityReport& report, std::uint64_t digest);
/// time,u_1,...,u_d rows; the first row is t = 0.
void write_solution_csv(std::ostream& out, const SolutionPath& path, std::uint64_t digest);
/// Human-readable summary of a suite.
void write_summary(std::ostream& out, const SuiteReport& report);

/// Reads a path CSV: `#` comment lines, one header line, then rows of
/// time followed by the values. Throws ValidationError on malformed input.
JumpPath read_path_csv(const std::string& file);

/// Exact decimal text of a double (round-trips).
std::string exact(double x);

}  // namespace ywlab
