#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cohortlab/bertillon.hpp"
#include "cohortlab/cohort.hpp"
#include "cohortlab/gompertz.hpp"
#include "cohortlab/randomization.hpp"
#include "cohortlab/regression.hpp"

namespace cohortlab {

/// Thrown when a file cannot be opened or written (distinct from validation
/// failures, which are reported through ParseReport).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseIssue {
    std::size_t line = 0;  ///< 1-based; 0 means file-level
    std::string column;
    std::string message;
};

struct ParseReport {
    std::size_t rows_accepted = 0;
    std::vector<ParseIssue> issues;
    bool fatal = false;  ///< when set, rows_accepted is zeroed and the
                         ///< parsed value must not be used

    bool ok() const noexcept { return !fatal; }
    /// One "line N [column]: message" entry per issue.
    std::vector<std::string> formatted() const;
};

// All readers accept UTF-8 CSV with a required header row, comma separator
// and dot decimal. Blank lines and lines starting with '#' are skipped.
// Fields must not contain commas; no locale handling.

struct CohortLoad {
    CohortSpec spec;
    ParseReport report;
};
/// Schema: bin_lo,bin_hi,count. Malformed rows, lo > hi, negative counts and
/// overlapping bins are fatal, each with its line number. Bins are sorted
/// ascending before the disjointness check.
CohortLoad load_cohort(std::istream& in);
CohortLoad load_cohort(const std::filesystem::path& path);

struct SubjectsLoad {
    std::vector<Subject> subjects;
    ParseReport report;
};
/// Schema: age,sex,marital_status. Bad rows are rejected with a diagnostic
/// and parsing continues; zero accepted rows is fatal.
SubjectsLoad load_subjects(std::istream& in);
SubjectsLoad load_subjects(const std::filesystem::path& path);

struct RiskTableLoad {
    RelativeRiskTable table;
    ParseReport report;
};
/// Schema: sex,cause,anchor_age,status,multiplier. Any bad row is fatal
/// (a partial risk table would silently misprice the remaining statuses).
RiskTableLoad load_risk_table(std::istream& in);
RiskTableLoad load_risk_table(const std::filesystem::path& path);

struct CompositionLoad {
    MaritalComposition composition;
    ParseReport report;
};
/// Schema: status,proportion. Proportions must be nonnegative and sum to
/// 1 +/- 1e-6; accepted compositions are renormalized to sum exactly 1.
/// Duplicate statuses and bad rows are fatal.
CompositionLoad load_composition(std::istream& in);
CompositionLoad load_composition(const std::filesystem::path& path);

struct CountiesLoad {
    std::vector<CountyRecord> counties;
    ParseReport report;
};
/// Schema: unit_id,median_age,f65,death_rate. Bad rows are rejected with a
/// diagnostic and parsing continues. When every accepted f65 is below 1 the
/// report carries a file-level "suspected fraction scale" warning (f65 is
/// expected in percentage points).
CountiesLoad load_counties(std::istream& in);
CountiesLoad load_counties(const std::filesystem::path& path);

// Writers. Numbers are emitted with shortest round-trip formatting so that
// serialize/load cycles are lossless.

/// Rows: start_age,year,deaths (year is 1-based within the trial).
void write_projection_csv(std::ostream& out, const DeathProjection& projection);
/// Rows: metric,mean,sd,cv,n.
void write_dispersion_csv(std::ostream& out,
                          std::span<const DispersionReport> reports);
void write_cohort_csv(std::ostream& out, const CohortSpec& spec);
void write_subjects_csv(std::ostream& out, std::span<const Subject> subjects);
void write_risk_table_csv(std::ostream& out, const RelativeRiskTable& table);
void write_composition_csv(std::ostream& out, const MaritalComposition& comp);
void write_counties_csv(std::ostream& out, std::span<const CountyRecord> counties);

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double value);

}  // namespace cohortlab
