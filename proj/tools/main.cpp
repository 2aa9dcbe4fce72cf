#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cohortlab/bertillon.hpp"
#include "cohortlab/cohort.hpp"
#include "cohortlab/csv_io.hpp"
#include "cohortlab/gompertz.hpp"
#include "cohortlab/randomization.hpp"
#include "cohortlab/regression.hpp"

namespace fs = std::filesystem;
using namespace cohortlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

std::string fixed(double value, int decimals) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(decimals) << value;
    return out.str();
}

void print_issues(const ParseReport& report, const std::string& path) {
    for (const auto& line : report.formatted()) {
        std::cerr << (report.fatal ? "error: " : "warning: ") << path << ": " << line
                  << "\n";
    }
}

// Loads via the given loader; fatal reports exit with a validation error.
template <typename Load, typename Fn>
Load load_or_fail(const fs::path& path, Fn loader) {
    Load result = loader(path);
    print_issues(result.report, path.string());
    if (!result.report.ok()) {
        throw std::invalid_argument("cannot use " + path.string());
    }
    return result;
}

struct OutputDir {
    std::optional<fs::path> dir;

    // --out wins; COHORT_BIAS_LAB_OUT is the fallback; otherwise no files.
    static OutputDir resolve(const std::string& flag_value) {
        OutputDir out;
        if (!flag_value.empty()) {
            out.dir = flag_value;
        } else if (const char* env = std::getenv("COHORT_BIAS_LAB_OUT");
                   env != nullptr && *env != '\0') {
            out.dir = env;
        }
        return out;
    }

    template <typename Fn>
    void write(const std::string& filename, Fn writer) const {
        if (!dir) {
            return;
        }
        std::error_code ec;
        fs::create_directories(*dir, ec);
        if (ec) {
            throw IoError("cannot create output directory " + dir->string());
        }
        const fs::path path = *dir / filename;
        std::ofstream out(path);
        if (!out) {
            throw IoError("cannot open " + path.string() + " for writing");
        }
        writer(out);
        if (!out) {
            throw IoError("failed while writing " + path.string());
        }
        std::cout << "wrote " << path.string() << "\n";
    }
};

struct HazardFlags {
    double g0 = 0.11;
    double a = 0.082;
    double makeham = 0.0;

    void attach(CLI::App& cmd) {
        cmd.add_option("--g0", g0, "Baseline death rate per 1,000 at age 0");
        cmd.add_option("--a", a, "Exponential hazard growth per year of age");
        cmd.add_option("--makeham", makeham,
                       "Age-independent hazard term (unsupported; must stay 0)");
    }
    GompertzParams params() const {
        GompertzParams p{g0, a, makeham};
        p.validate();
        return p;
    }
};

void print_hazard_line(const GompertzParams& params) {
    std::cout << "hazard: g0=" << fixed(params.g0, 6) << " per 1,000 at age 0, a="
              << fixed(params.a, 6) << " per year\n";
}

int cmd_project(const std::string& cohort_path, const HazardFlags& hazard_flags,
                int years, double observed, const OutputDir& out) {
    const GompertzParams params = hazard_flags.params();
    auto load = load_or_fail<CohortLoad>(cohort_path, [](const fs::path& p) {
        return load_cohort(p);
    });
    const AgeRoster roster = expand(load.spec);
    const DeathProjection projection = project(params, roster, years);

    std::cout << "cohort: " << cohort_path << "\n";
    std::cout << "subjects: " << fixed(load.spec.total(), 1) << "  bins: "
              << load.spec.size() << "  years: " << years << "\n";
    print_hazard_line(params);
    for (const auto& bin : load.spec.bins()) {
        std::cout << "bin " << bin.lo << "-" << bin.hi << ": "
                  << fixed(projection.total_for_age_range(bin.lo, bin.hi), 2)
                  << " expected deaths\n";
    }
    std::cout << "total expected deaths: " << fixed(projection.grand_total, 2) << "\n";

    if (observed > 0.0) {
        const CalibrationResult cal = calibrate(params, roster, years, observed);
        std::cout << "observed deaths: " << fixed(observed, 2) << "\n";
        std::cout << "calibration factor: " << fixed(cal.factor, 4) << "\n";
        std::cout << "calibrated g0: " << fixed(cal.params.g0, 6) << "\n";
    }

    out.write("projection.csv", [&](std::ostream& os) {
        write_projection_csv(os, projection);
    });
    return kExitOk;
}

int cmd_sensitivity(const std::string& cohort_path, const HazardFlags& hazard_flags,
                    int years, int bin_flag, double calibrate_observed,
                    const OutputDir& out) {
    GompertzParams params = hazard_flags.params();
    auto load = load_or_fail<CohortLoad>(cohort_path, [](const fs::path& p) {
        return load_cohort(p);
    });
    const CohortSpec& spec = load.spec;

    // Default to the oldest bin, the one whose within-bin spread matters most.
    std::size_t bin_index = spec.size() - 1;
    if (bin_flag >= 0) {
        bin_index = static_cast<std::size_t>(bin_flag);
        if (bin_index >= spec.size()) {
            throw std::out_of_range("bin index " + std::to_string(bin_flag) +
                                    " out of range (cohort has " +
                                    std::to_string(spec.size()) + " bins)");
        }
    }

    std::cout << "cohort: " << cohort_path << "\n";
    const AgeBin& bin = spec.bins()[bin_index];
    std::cout << "bin " << bin_index << " (ages " << bin.lo << "-" << bin.hi << "): "
              << fixed(bin.count, 1) << " subjects, " << years << " years\n";
    print_hazard_line(params);

    double reference_total;
    if (calibrate_observed > 0.0) {
        const CalibrationResult cal =
            calibrate(params, expand(spec), years, calibrate_observed);
        std::cout << "calibration: observed " << fixed(calibrate_observed, 2)
                  << ", factor " << fixed(cal.factor, 4) << ", calibrated g0 "
                  << fixed(cal.params.g0, 6) << "\n";
        params = cal.params;
        reference_total = calibrate_observed;
    } else {
        reference_total = project(params, expand(spec), years).grand_total;
    }

    const SensitivityBounds bounds = sensitivity_bounds(params, spec, bin_index, years);
    std::cout << "all at age " << bin.lo << ": " << fixed(bounds.min_deaths, 2)
              << " expected deaths\n";
    std::cout << "uniform: " << fixed(bounds.uniform_deaths, 2)
              << " expected deaths\n";
    std::cout << "all at age " << bin.hi << ": " << fixed(bounds.max_deaths, 2)
              << " expected deaths\n";
    const double spread = bounds.max_deaths - bounds.min_deaths;
    std::cout << "spread: " << fixed(spread, 2) << " deaths = "
              << fixed(100.0 * spread / reference_total, 2) << "% of "
              << fixed(reference_total, 0) << " total deaths\n";

    out.write("sensitivity.csv", [&](std::ostream& os) {
        os << "scenario,deaths\n";
        os << "all_at_" << bin.lo << ',' << format_double(bounds.min_deaths) << '\n';
        os << "uniform," << format_double(bounds.uniform_deaths) << '\n';
        os << "all_at_" << bin.hi << ',' << format_double(bounds.max_deaths) << '\n';
    });
    out.write("hazard_curve.csv", [&](std::ostream& os) {
        os << "age,death_rate\n";
        const int lo = spec.bins().front().lo;
        const int hi = spec.bins().back().hi;
        for (int age = lo; age <= hi; ++age) {
            os << age << ',' << format_double(hazard(params, age)) << '\n';
        }
    });
    out.write("age_histogram.csv", [&](std::ostream& os) {
        write_cohort_csv(os, spec);
    });
    return kExitOk;
}

void print_composition(const std::string& label, const MaritalComposition& comp) {
    std::cout << label << ":";
    for (MaritalStatus status : kMaritalStatuses) {
        if (comp.share(status) > 0.0) {
            std::cout << " " << to_string(status) << " " << fixed(comp.share(status), 4);
        }
    }
    std::cout << "\n";
}

int cmd_adjust_marital(const std::string& composition_path,
                       const std::string& composition_d_path,
                       const std::string& risk_table_path, const std::string& sex_label,
                       const std::string& cause, double age, double base_rate,
                       double base_deaths, const OutputDir& out) {
    const Sex sex = sex_from_string(sex_label);
    RelativeRiskTable table;
    if (risk_table_path.empty()) {
        table = RelativeRiskTable::builtin_male_us1980();
        std::cout << "risk table: builtin (US males, 1980)\n";
    } else {
        auto load = load_or_fail<RiskTableLoad>(risk_table_path, [](const fs::path& p) {
            return load_risk_table(p);
        });
        table = std::move(load.table);
        std::cout << "risk table: " << risk_table_path << "\n";
    }

    auto comp_load = load_or_fail<CompositionLoad>(
        composition_path, [](const fs::path& p) { return load_composition(p); });
    const MaritalComposition comp_p = comp_load.composition;

    std::cout << "cause: " << cause << "  sex: " << to_string(sex) << "  age: "
              << fixed(age, 1) << "\n";
    print_composition("composition P", comp_p);
    const double adj_p = composition_adjustment(comp_p, table, sex, cause, age);
    std::cout << "adjustment factor P: " << fixed(adj_p, 4) << "\n";
    if (base_rate >= 0.0) {
        std::cout << "adjusted rate: "
                  << fixed(composition_adjusted_rate(base_rate, comp_p, table, sex, cause,
                                                     age), 4)
                  << " per 1,000 (base " << fixed(base_rate, 4) << ")\n";
    }

    std::optional<double> excess;
    std::optional<double> adj_d;
    if (!composition_d_path.empty()) {
        auto d_load = load_or_fail<CompositionLoad>(
            composition_d_path, [](const fs::path& p) { return load_composition(p); });
        const MaritalComposition comp_d = d_load.composition;
        print_composition("composition D", comp_d);
        adj_d = composition_adjustment(comp_d, table, sex, cause, age);
        std::cout << "adjustment factor D: " << fixed(*adj_d, 4) << "\n";
        if (base_deaths >= 0.0) {
            excess = imbalance_excess_deaths(base_deaths, comp_p, comp_d, table, sex,
                                             cause, age);
            std::cout << "excess deaths in P (D-mix baseline of " << fixed(base_deaths, 1)
                      << " deaths): " << fixed(*excess, 2) << "\n";
        }
    }

    out.write("adjust_marital.csv", [&](std::ostream& os) {
        os << "quantity,value\n";
        os << "adjustment_p," << format_double(adj_p) << '\n';
        if (base_rate >= 0.0) {
            os << "adjusted_rate_p,"
               << format_double(composition_adjusted_rate(base_rate, comp_p, table, sex,
                                                          cause, age))
               << '\n';
        }
        if (adj_d) {
            os << "adjustment_d," << format_double(*adj_d) << '\n';
        }
        if (excess) {
            os << "excess_deaths," << format_double(*excess) << '\n';
        }
    });
    return kExitOk;
}

BalanceMetric parse_metric(const std::string& text) {
    if (text == "median_age") {
        return MedianAgeMetric{};
    }
    if (!text.empty() && text.front() == 'f') {
        int threshold = 0;
        if (CLI::detail::lexical_cast(text.substr(1), threshold) && threshold >= 0) {
            return FractionOverMetric{threshold};
        }
    }
    // cell:<sex>:<status>
    if (text.rfind("cell:", 0) == 0) {
        const std::string rest = text.substr(5);
        const std::size_t colon = rest.find(':');
        if (colon != std::string::npos) {
            return CellShareMetric{sex_from_string(rest.substr(0, colon)),
                                   marital_status_from_string(rest.substr(colon + 1))};
        }
    }
    throw std::invalid_argument(
        "unknown metric '" + text +
        "' (expected median_age, f<age>, or cell:<sex>:<status>)");
}

int cmd_dispersion(const std::string& subjects_path, int splits, std::uint64_t seed,
                   const std::vector<std::string>& metric_flags, const OutputDir& out) {
    auto load = load_or_fail<SubjectsLoad>(subjects_path, [](const fs::path& p) {
        return load_subjects(p);
    });

    std::vector<BalanceMetric> metrics;
    if (metric_flags.empty()) {
        metrics.push_back(MedianAgeMetric{});
        metrics.push_back(FractionOverMetric{65});
        for (Sex sex : {Sex::male, Sex::female}) {
            for (MaritalStatus status : kMaritalStatuses) {
                metrics.push_back(CellShareMetric{sex, status});
            }
        }
    } else {
        for (const auto& flag : metric_flags) {
            metrics.push_back(parse_metric(flag));
        }
    }

    std::vector<DispersionReport> reports;
    reports.reserve(metrics.size());
    for (const auto& metric : metrics) {
        reports.push_back(replicate_dispersion(load.subjects, metric, splits, seed));
    }

    std::ostringstream csv;
    csv << "# rng: " << kRngAlgorithm << " seed=" << seed << " splits=" << splits
        << " subjects=" << load.subjects.size() << "\n";
    write_dispersion_csv(csv, reports);
    std::cout << csv.str();
    for (const auto& r : reports) {
        if (r.missing > 0) {
            std::cerr << "warning: metric " << r.metric << ": " << r.missing
                      << " of " << splits << " replications undefined\n";
        }
    }
    out.write("dispersion.csv", [&](std::ostream& os) { os << csv.str(); });
    return kExitOk;
}

void print_fit(const std::string& label, const FitResult& fit) {
    std::cout << "fit death_rate ~ " << label << ": ";
    if (!fit.ok()) {
        std::cout << "degenerate ("
                  << (fit.status == FitStatus::degenerate_x ? "constant regressor"
                                                            : "constant response")
                  << ", n=" << fit.n << ")\n";
        return;
    }
    std::cout << "slope=" << fixed(fit.slope, 4) << " (se " << fixed(fit.slope_se, 4)
              << "), intercept=" << fixed(fit.intercept, 4) << " (se "
              << fixed(fit.intercept_se, 4) << "), r2=" << fixed(fit.r_squared, 4)
              << ", n=" << fit.n << "\n";
}

int cmd_regress(const std::string& counties_path, const OutputDir& out) {
    auto load = load_or_fail<CountiesLoad>(counties_path, [](const fs::path& p) {
        return load_counties(p);
    });
    std::cout << "counties: " << counties_path << " (" << load.counties.size()
              << " units)\n";

    const PredictorContrast contrast = predictor_contrast(load.counties);
    print_fit("f65", contrast.vs_f65);
    print_fit("median_age", contrast.vs_median_age);
    if (contrast.vs_f65.ok() && contrast.vs_median_age.ok()) {
        const bool f65_better =
            contrast.vs_f65.r_squared >= contrast.vs_median_age.r_squared;
        std::cout << "better predictor: " << (f65_better ? "f65" : "median_age")
                  << " (r2 " << fixed(contrast.vs_f65.r_squared, 4) << " vs "
                  << fixed(contrast.vs_median_age.r_squared, 4) << ")\n";
    }

    const DispersionReport cv_ma = cross_unit_cv(load.counties, CountyField::median_age);
    const DispersionReport cv_f65 = cross_unit_cv(load.counties, CountyField::f65);
    std::cout << "cross-unit CV: f65 " << fixed(cv_f65.cv, 4) << ", median_age "
              << fixed(cv_ma.cv, 4);
    if (cv_ma.cv > 0.0) {
        std::cout << " (ratio " << fixed(cv_f65.cv / cv_ma.cv, 2) << ")";
    }
    std::cout << "\n";

    out.write("fits.csv", [&](std::ostream& os) {
        os << "predictor,slope,slope_se,intercept,intercept_se,r_squared,n\n";
        const auto row = [&os](const std::string& label, const FitResult& fit) {
            os << label << ',' << format_double(fit.slope) << ','
               << format_double(fit.slope_se) << ',' << format_double(fit.intercept)
               << ',' << format_double(fit.intercept_se) << ','
               << format_double(fit.r_squared) << ',' << fit.n << '\n';
        };
        row("f65", contrast.vs_f65);
        row("median_age", contrast.vs_median_age);
    });
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Expected-mortality analysis for age-binned study groups:\n"
                 "cohort death projection under an exponential hazard, within-bin\n"
                 "sensitivity bounds, marital-status rate adjustment, randomization\n"
                 "balance dispersion, and county death-rate regression."};
    app.require_subcommand(1);

    // project
    auto* project_cmd =
        app.add_subcommand("project", "Project expected deaths for a binned cohort");
    std::string project_cohort;
    int project_years = 6;
    double project_observed = -1.0;
    std::string project_out;
    HazardFlags project_hazard;
    project_cmd->add_option("--cohort", project_cohort, "Cohort bins CSV")->required();
    project_cmd->add_option("--years", project_years, "Trial duration in years");
    project_cmd->add_option("--observed", project_observed,
                            "Observed death count; prints the calibration factor");
    project_cmd->add_option("--out", project_out, "Output directory for CSV artifacts");
    project_hazard.attach(*project_cmd);

    // sensitivity
    auto* sens_cmd = app.add_subcommand(
        "sensitivity", "Within-bin distribution bounds on expected deaths");
    std::string sens_cohort;
    int sens_years = 6;
    int sens_bin = -1;
    double sens_calibrate = -1.0;
    std::string sens_out;
    HazardFlags sens_hazard;
    sens_cmd->add_option("--cohort", sens_cohort, "Cohort bins CSV")->required();
    sens_cmd->add_option("--bin", sens_bin, "Bin index (default: oldest bin)");
    sens_cmd->add_option("--years", sens_years, "Trial duration in years");
    sens_cmd->add_option("--calibrate", sens_calibrate,
                         "Observed death count; rescales g0 before the experiment");
    sens_cmd->add_option("--out", sens_out, "Output directory for CSV artifacts");
    sens_hazard.attach(*sens_cmd);

    // adjust-marital
    auto* adjust_cmd = app.add_subcommand(
        "adjust-marital", "Composition-adjusted death rates and imbalance excess");
    std::string adjust_comp;
    std::string adjust_comp_d;
    std::string adjust_table;
    std::string adjust_sex = "male";
    std::string adjust_cause = "heart";
    double adjust_age = 50.0;
    double adjust_base_rate = -1.0;
    double adjust_base_deaths = -1.0;
    std::string adjust_out;
    adjust_cmd->add_option("--composition", adjust_comp, "P-group composition CSV")
        ->required();
    adjust_cmd->add_option("--composition-d", adjust_comp_d, "D-group composition CSV");
    adjust_cmd->add_option("--risk-table", adjust_table,
                           "Relative-risk CSV (default: builtin US males 1980)");
    adjust_cmd->add_option("--sex", adjust_sex, "male or female");
    adjust_cmd->add_option("--cause", adjust_cause, "Cause-of-death label");
    adjust_cmd->add_option("--age", adjust_age, "Age for the risk lookup");
    adjust_cmd->add_option("--base-rate", adjust_base_rate,
                           "Married death rate per 1,000 to adjust");
    adjust_cmd->add_option("--base-deaths", adjust_base_deaths,
                           "Baseline death count for the excess computation");
    adjust_cmd->add_option("--out", adjust_out, "Output directory for CSV artifacts");

    // dispersion
    auto* disp_cmd = app.add_subcommand(
        "dispersion", "Monte-Carlo dispersion of balance metrics across splits");
    std::string disp_subjects;
    int disp_splits = 1000;
    std::uint64_t disp_seed = 1;
    std::vector<std::string> disp_metrics;
    std::string disp_out;
    disp_cmd->add_option("--subjects", disp_subjects, "Subjects CSV")->required();
    disp_cmd->add_option("--splits", disp_splits, "Number of random splits");
    disp_cmd->add_option("--seed", disp_seed, "Random seed");
    disp_cmd->add_option("--metric", disp_metrics,
                         "Metric: median_age, f<age>, or cell:<sex>:<status> "
                         "(repeatable; default: median_age, f65 and all ten cells)");
    disp_cmd->add_option("--out", disp_out, "Output directory for CSV artifacts");

    // regress
    auto* regress_cmd = app.add_subcommand(
        "regress", "Least-squares death-rate fits against f65 and median age");
    std::string regress_counties;
    std::string regress_out;
    regress_cmd->add_option("--counties", regress_counties, "County records CSV")
        ->required();
    regress_cmd->add_option("--out", regress_out, "Output directory for CSV artifacts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*project_cmd) {
            return cmd_project(project_cohort, project_hazard, project_years,
                               project_observed, OutputDir::resolve(project_out));
        }
        if (*sens_cmd) {
            return cmd_sensitivity(sens_cohort, sens_hazard, sens_years, sens_bin,
                                   sens_calibrate, OutputDir::resolve(sens_out));
        }
        if (*adjust_cmd) {
            return cmd_adjust_marital(adjust_comp, adjust_comp_d, adjust_table,
                                      adjust_sex, adjust_cause, adjust_age,
                                      adjust_base_rate, adjust_base_deaths,
                                      OutputDir::resolve(adjust_out));
        }
        if (*disp_cmd) {
            return cmd_dispersion(disp_subjects, disp_splits, disp_seed, disp_metrics,
                                  OutputDir::resolve(disp_out));
        }
        if (*regress_cmd) {
            return cmd_regress(regress_counties, OutputDir::resolve(regress_out));
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}
