#include "cohortlab/csv_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace cohortlab {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.emplace_back(trim(line.substr(start)));
            break;
        }
        fields.emplace_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

// One CSV data row with its 1-based source line number.
struct Row {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

// Reads the header plus data rows, skipping blanks and '#' comments. Returns
// false (with a fatal issue) when the header is missing or wrong.
bool read_table(std::istream& in, const std::vector<std::string>& expected_header,
                std::vector<Row>& rows, ParseReport& report) {
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        // Strip a UTF-8 BOM on the first line.
        if (line_no == 1 && line.size() >= 3 && line[0] == '\xef' &&
            line[1] == '\xbb' && line[2] == '\xbf') {
            line.erase(0, 3);
        }
        const std::string_view view = trim(line);
        if (view.empty() || view.front() == '#') {
            continue;
        }
        if (!header_seen) {
            auto fields = split_fields(view);
            std::vector<std::string> lowered;
            lowered.reserve(fields.size());
            for (auto& f : fields) {
                std::transform(f.begin(), f.end(), f.begin(),
                               [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
                lowered.push_back(f);
            }
            if (lowered != expected_header) {
                std::string want;
                for (std::size_t i = 0; i < expected_header.size(); ++i) {
                    want += (i ? "," : "") + expected_header[i];
                }
                report.issues.push_back(
                    {line_no, "", "expected header '" + want + "'"});
                report.fatal = true;
                return false;
            }
            header_seen = true;
            continue;
        }
        rows.push_back({line_no, split_fields(view)});
    }
    if (!header_seen) {
        report.issues.push_back({0, "", "no data rows"});
        report.fatal = true;
        return false;
    }
    if (rows.empty()) {
        report.issues.push_back({0, "", "no data rows"});
        report.fatal = true;
        return false;
    }
    return true;
}

bool parse_double(const std::string& field, double& out) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_int(const std::string& field, int& out) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

bool expect_width(const Row& row, std::size_t width, ParseReport& report) {
    if (row.fields.size() != width) {
        report.issues.push_back({row.line, "",
                                 "expected " + std::to_string(width) + " fields, got " +
                                     std::to_string(row.fields.size())});
        return false;
    }
    return true;
}

void finalize_fatal(ParseReport& report) {
    if (report.fatal) {
        report.rows_accepted = 0;
    }
}

template <typename Load, typename Fn>
Load load_from_path(const std::filesystem::path& path, Fn loader) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    return loader(in);
}

}  // namespace

std::vector<std::string> ParseReport::formatted() const {
    std::vector<std::string> out;
    out.reserve(issues.size());
    for (const auto& issue : issues) {
        std::string s = issue.line == 0 ? "file" : "line " + std::to_string(issue.line);
        if (!issue.column.empty()) {
            s += " [" + issue.column + "]";
        }
        s += ": " + issue.message;
        out.push_back(std::move(s));
    }
    return out;
}

CohortLoad load_cohort(std::istream& in) {
    CohortLoad result;
    std::vector<Row> rows;
    if (!read_table(in, {"bin_lo", "bin_hi", "count"}, rows, result.report)) {
        return result;
    }
    struct PendingBin {
        AgeBin bin;
        std::size_t line;
    };
    std::vector<PendingBin> pending;
    for (const auto& row : rows) {
        if (!expect_width(row, 3, result.report)) {
            result.report.fatal = true;
            continue;
        }
        // One diagnostic per rejected row: stop at the first problem.
        AgeBin bin;
        if (!parse_int(row.fields[0], bin.lo)) {
            result.report.issues.push_back({row.line, "bin_lo", "not an integer"});
            result.report.fatal = true;
            continue;
        }
        if (!parse_int(row.fields[1], bin.hi)) {
            result.report.issues.push_back({row.line, "bin_hi", "not an integer"});
            result.report.fatal = true;
            continue;
        }
        if (!parse_double(row.fields[2], bin.count)) {
            result.report.issues.push_back({row.line, "count", "not a number"});
            result.report.fatal = true;
            continue;
        }
        if (bin.lo > bin.hi) {
            result.report.issues.push_back(
                {row.line, "", "bin_lo exceeds bin_hi (" + row.fields[0] + " > " +
                                   row.fields[1] + ")"});
            result.report.fatal = true;
            continue;
        }
        if (bin.lo < 0) {
            result.report.issues.push_back({row.line, "bin_lo", "ages must be >= 0"});
            result.report.fatal = true;
            continue;
        }
        if (bin.count < 0.0) {
            result.report.issues.push_back({row.line, "count", "must be >= 0"});
            result.report.fatal = true;
            continue;
        }
        pending.push_back({bin, row.line});
    }
    if (!result.report.fatal) {
        std::stable_sort(pending.begin(), pending.end(),
                         [](const PendingBin& l, const PendingBin& r) {
                             return l.bin.lo < r.bin.lo;
                         });
        for (std::size_t i = 1; i < pending.size(); ++i) {
            if (pending[i].bin.lo <= pending[i - 1].bin.hi) {
                result.report.issues.push_back(
                    {pending[i].line, "",
                     "bin overlaps the bin ending at " +
                         std::to_string(pending[i - 1].bin.hi)});
                result.report.fatal = true;
            }
        }
    }
    if (!result.report.fatal) {
        std::vector<AgeBin> bins;
        bins.reserve(pending.size());
        for (const auto& p : pending) {
            bins.push_back(p.bin);
        }
        result.spec = CohortSpec(std::move(bins));
        result.report.rows_accepted = pending.size();
    }
    finalize_fatal(result.report);
    return result;
}

SubjectsLoad load_subjects(std::istream& in) {
    SubjectsLoad result;
    std::vector<Row> rows;
    if (!read_table(in, {"age", "sex", "marital_status"}, rows, result.report)) {
        return result;
    }
    for (const auto& row : rows) {
        if (!expect_width(row, 3, result.report)) {
            continue;  // rejected row, parsing continues
        }
        Subject subject;
        if (!parse_int(row.fields[0], subject.age) || subject.age < 0) {
            result.report.issues.push_back({row.line, "age", "not a nonnegative integer"});
            continue;
        }
        try {
            subject.sex = sex_from_string(row.fields[1]);
        } catch (const std::invalid_argument& e) {
            result.report.issues.push_back({row.line, "sex", e.what()});
            continue;
        }
        try {
            subject.status = marital_status_from_string(row.fields[2]);
        } catch (const std::invalid_argument& e) {
            result.report.issues.push_back({row.line, "marital_status", e.what()});
            continue;
        }
        result.subjects.push_back(subject);
        ++result.report.rows_accepted;
    }
    if (result.subjects.empty()) {
        result.report.issues.push_back({0, "", "no usable subject rows"});
        result.report.fatal = true;
    }
    finalize_fatal(result.report);
    if (result.report.fatal) {
        result.subjects.clear();
    }
    return result;
}

RiskTableLoad load_risk_table(std::istream& in) {
    RiskTableLoad result;
    std::vector<Row> rows;
    if (!read_table(in, {"sex", "cause", "anchor_age", "status", "multiplier"}, rows,
                    result.report)) {
        return result;
    }
    for (const auto& row : rows) {
        if (!expect_width(row, 5, result.report)) {
            result.report.fatal = true;
            continue;
        }
        int anchor_age = 0;
        double multiplier = 0.0;
        Sex sex{};
        MaritalStatus status{};
        try {
            sex = sex_from_string(row.fields[0]);
        } catch (const std::invalid_argument& e) {
            result.report.issues.push_back({row.line, "sex", e.what()});
            result.report.fatal = true;
            continue;
        }
        if (row.fields[1].empty()) {
            result.report.issues.push_back({row.line, "cause", "must not be empty"});
            result.report.fatal = true;
            continue;
        }
        if (!parse_int(row.fields[2], anchor_age) || anchor_age < 0) {
            result.report.issues.push_back(
                {row.line, "anchor_age", "not a nonnegative integer"});
            result.report.fatal = true;
            continue;
        }
        try {
            status = marital_status_from_string(row.fields[3]);
        } catch (const std::invalid_argument& e) {
            result.report.issues.push_back({row.line, "status", e.what()});
            result.report.fatal = true;
            continue;
        }
        if (!parse_double(row.fields[4], multiplier)) {
            result.report.issues.push_back({row.line, "multiplier", "not a number"});
            result.report.fatal = true;
            continue;
        }
        try {
            result.table.set(sex, row.fields[1], anchor_age, status, multiplier);
        } catch (const std::invalid_argument& e) {
            result.report.issues.push_back({row.line, "multiplier", e.what()});
            result.report.fatal = true;
            continue;
        }
        ++result.report.rows_accepted;
    }
    finalize_fatal(result.report);
    if (result.report.fatal) {
        result.table = RelativeRiskTable{};
    }
    return result;
}

CompositionLoad load_composition(std::istream& in) {
    CompositionLoad result;
    std::vector<Row> rows;
    if (!read_table(in, {"status", "proportion"}, rows, result.report)) {
        return result;
    }
    std::array<double, 5> shares{0.0, 0.0, 0.0, 0.0, 0.0};
    std::array<bool, 5> seen{false, false, false, false, false};
    for (const auto& row : rows) {
        if (!expect_width(row, 2, result.report)) {
            result.report.fatal = true;
            continue;
        }
        MaritalStatus status{};
        double proportion = 0.0;
        try {
            status = marital_status_from_string(row.fields[0]);
        } catch (const std::invalid_argument& e) {
            result.report.issues.push_back({row.line, "status", e.what()});
            result.report.fatal = true;
            continue;
        }
        if (!parse_double(row.fields[1], proportion) || proportion < 0.0) {
            result.report.issues.push_back(
                {row.line, "proportion", "not a nonnegative number"});
            result.report.fatal = true;
            continue;
        }
        const auto idx = static_cast<std::size_t>(status);
        if (seen[idx]) {
            result.report.issues.push_back(
                {row.line, "status",
                 "duplicate status '" + std::string(to_string(status)) + "'"});
            result.report.fatal = true;
            continue;
        }
        seen[idx] = true;
        shares[idx] = proportion;
        ++result.report.rows_accepted;
    }
    if (!result.report.fatal) {
        double sum = 0.0;
        for (double s : shares) {
            sum += s;
        }
        if (std::abs(sum - 1.0) > 1e-6) {
            result.report.issues.push_back(
                {0, "proportion",
                 "proportions sum to " + std::to_string(sum) + ", expected 1"});
            result.report.fatal = true;
        } else {
            for (double& s : shares) {
                s /= sum;  // renormalize exactly
            }
            result.composition = MaritalComposition(shares);
        }
    }
    finalize_fatal(result.report);
    return result;
}

CountiesLoad load_counties(std::istream& in) {
    CountiesLoad result;
    std::vector<Row> rows;
    if (!read_table(in, {"unit_id", "median_age", "f65", "death_rate"}, rows,
                    result.report)) {
        return result;
    }
    for (const auto& row : rows) {
        if (!expect_width(row, 4, result.report)) {
            continue;  // rejected row, parsing continues
        }
        CountyRecord record;
        record.id = row.fields[0];
        if (record.id.empty()) {
            result.report.issues.push_back({row.line, "unit_id", "must not be empty"});
            continue;
        }
        if (!parse_double(row.fields[1], record.median_age)) {
            result.report.issues.push_back({row.line, "median_age", "not a number"});
            continue;
        }
        if (!parse_double(row.fields[2], record.f65) || record.f65 < 0.0 ||
            record.f65 > 100.0) {
            result.report.issues.push_back(
                {row.line, "f65", "must be a percentage in [0,100]"});
            continue;
        }
        if (!parse_double(row.fields[3], record.death_rate) || record.death_rate < 0.0) {
            result.report.issues.push_back(
                {row.line, "death_rate", "not a nonnegative number"});
            continue;
        }
        result.counties.push_back(std::move(record));
        ++result.report.rows_accepted;
    }
    if (result.counties.empty()) {
        result.report.issues.push_back({0, "", "no usable county rows"});
        result.report.fatal = true;
    } else {
        const bool all_below_one =
            std::all_of(result.counties.begin(), result.counties.end(),
                        [](const CountyRecord& c) { return c.f65 < 1.0; });
        if (all_below_one) {
            result.report.issues.push_back(
                {0, "f65",
                 "suspected fraction scale: every f65 value is below 1, but the "
                 "column is expected in percentage points (0-100)"});
        }
    }
    finalize_fatal(result.report);
    if (result.report.fatal) {
        result.counties.clear();
    }
    return result;
}

CohortLoad load_cohort(const std::filesystem::path& path) {
    return load_from_path<CohortLoad>(path, [](std::istream& in) { return load_cohort(in); });
}
SubjectsLoad load_subjects(const std::filesystem::path& path) {
    return load_from_path<SubjectsLoad>(path,
                                        [](std::istream& in) { return load_subjects(in); });
}
RiskTableLoad load_risk_table(const std::filesystem::path& path) {
    return load_from_path<RiskTableLoad>(
        path, [](std::istream& in) { return load_risk_table(in); });
}
CompositionLoad load_composition(const std::filesystem::path& path) {
    return load_from_path<CompositionLoad>(
        path, [](std::istream& in) { return load_composition(in); });
}
CountiesLoad load_counties(const std::filesystem::path& path) {
    return load_from_path<CountiesLoad>(
        path, [](std::istream& in) { return load_counties(in); });
}

std::string format_double(double value) {
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc()) {
        return "nan";
    }
    return std::string(buffer, ptr);
}

void write_projection_csv(std::ostream& out, const DeathProjection& projection) {
    out << "start_age,year,deaths\n";
    for (std::size_t i = 0; i < projection.start_ages.size(); ++i) {
        for (int t = 0; t < projection.years; ++t) {
            out << projection.start_ages[i] << ',' << (t + 1) << ','
                << format_double(projection.cell(i, t)) << '\n';
        }
    }
}

void write_dispersion_csv(std::ostream& out,
                          std::span<const DispersionReport> reports) {
    out << "metric,mean,sd,cv,n\n";
    for (const auto& r : reports) {
        out << r.metric << ',' << format_double(r.mean) << ',' << format_double(r.sd)
            << ',' << format_double(r.cv) << ',' << r.replications << '\n';
    }
}

void write_cohort_csv(std::ostream& out, const CohortSpec& spec) {
    out << "bin_lo,bin_hi,count\n";
    for (const auto& bin : spec.bins()) {
        out << bin.lo << ',' << bin.hi << ',' << format_double(bin.count) << '\n';
    }
}

void write_subjects_csv(std::ostream& out, std::span<const Subject> subjects) {
    out << "age,sex,marital_status\n";
    for (const auto& s : subjects) {
        out << s.age << ',' << to_string(s.sex) << ',' << to_string(s.status) << '\n';
    }
}

void write_risk_table_csv(std::ostream& out, const RelativeRiskTable& table) {
    out << "sex,cause,anchor_age,status,multiplier\n";
    for (Sex sex : {Sex::male, Sex::female}) {
        for (const auto& cause : table.causes(sex)) {
            for (int age : table.anchor_ages(sex, cause)) {
                for (MaritalStatus status : kMaritalStatuses) {
                    out << to_string(sex) << ',' << cause << ',' << age << ','
                        << to_string(status) << ','
                        << format_double(table.relative_rate(
                               sex, cause, status, static_cast<double>(age)))
                        << '\n';
                }
            }
        }
    }
}

void write_composition_csv(std::ostream& out, const MaritalComposition& comp) {
    out << "status,proportion\n";
    for (MaritalStatus status : kMaritalStatuses) {
        out << to_string(status) << ',' << format_double(comp.share(status)) << '\n';
    }
}

void write_counties_csv(std::ostream& out, std::span<const CountyRecord> counties) {
    out << "unit_id,median_age,f65,death_rate\n";
    for (const auto& c : counties) {
        out << c.id << ',' << format_double(c.median_age) << ',' << format_double(c.f65)
            << ',' << format_double(c.death_rate) << '\n';
    }
}

}  // namespace cohortlab
