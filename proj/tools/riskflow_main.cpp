// Command-line front end.
//
//   riskflow run      --scenario FILE [--out DIR] [--mode M] [--seed N] [--cells LIST]
//   riskflow validate --scenario FILE
//   riskflow compare  --scenario FILE [--out DIR] [--mode M] [--seed N] [--cells LIST]
//   riskflow analyze  --csv FILE --column NAME [--max-peaks N]
//
// Exit codes: 0 success; 1 configuration/usage problems; 2 violated model
// constraints; 3 numerical failures (CFL, blow-up, undefined statistics).

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "riskflow/analysis.hpp"
#include "riskflow/scenario.hpp"

namespace {

riskflow::RunMode parse_mode_flag(const std::string& v) {
    if (v == "hierarchy") return riskflow::RunMode::Hierarchy;
    if (v == "self-consistent") return riskflow::RunMode::SelfConsistent;
    if (v == "ode-only") return riskflow::RunMode::OdeOnly;
    if (v == "kinetic-init") return riskflow::RunMode::KineticInit;
    throw riskflow::ConfigError(
        "unknown --mode '" + v +
        "' (hierarchy, self-consistent, ode-only, kinetic-init)");
}

std::vector<int> parse_cells_flag(const std::string& v) {
    std::vector<int> out;
    std::string cur;
    const auto flush = [&] {
        if (cur.empty()) throw riskflow::ConfigError("--cells: empty entry in '" + v + "'");
        try {
            std::size_t pos = 0;
            const long x = std::stol(cur, &pos);
            if (pos != cur.size() || x < 1) throw std::invalid_argument("");
            out.push_back(static_cast<int>(x));
        } catch (const std::exception&) {
            throw riskflow::ConfigError("--cells: cannot parse '" + cur + "' in '" + v + "'");
        }
        cur.clear();
    };
    for (char c : v) {
        if (c == ',') flush();
        else if (c != ' ') cur += c;
    }
    flush();
    return out;
}

struct Overrides {
    std::string mode;
    long long seed = -1;
    std::string cells;
};

void apply_overrides(riskflow::Scenario& sc, const Overrides& ov) {
    if (!ov.mode.empty()) sc.mode = parse_mode_flag(ov.mode);
    if (ov.seed >= 0) sc.seed = static_cast<std::uint64_t>(ov.seed);
    if (!ov.cells.empty()) {
        std::vector<int> cells = parse_cells_flag(ov.cells);
        const std::size_t dim = sc.upper.size();
        if (cells.size() == 1 && dim > 1) cells.assign(dim, cells[0]);
        if (cells.size() != dim)
            throw riskflow::ConfigError("--cells has " + std::to_string(cells.size()) +
                                        " entries, scenario space has " +
                                        std::to_string(dim));
        sc.cells = std::move(cells);
    }
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            const Overrides& ov) {
    riskflow::Scenario sc = riskflow::load_scenario(scenario_path);
    apply_overrides(sc, ov);
    const riskflow::RunOutputs out = riskflow::run_scenario(sc, out_dir);
    std::cout << "mode " << riskflow::to_string(sc.mode) << ", " << out.series.size()
              << " samples\n";
    std::cout << "aggregates: " << out.csv_path << "\n";
    std::cout << "summary:    " << out.summary_path << "\n";
    if (out.ode_truncated)
        std::cout << "note: trajectory truncated (" << out.truncation_reason << ")\n";
    return 0;
}

int cmd_validate(const std::string& scenario_path) {
    const riskflow::Scenario sc = riskflow::load_scenario(scenario_path);
    const riskflow::ConstraintReport report = riskflow::check_constraints(sc.couplings);
    std::cout << report.to_string();
    if (!report.all_passed()) {
        std::cout << "constraint check FAILED\n";
        return 2;
    }
    std::cout << "constraint check passed\n";
    return 0;
}

int cmd_compare(const std::string& scenario_path, const std::string& out_dir,
                const Overrides& ov) {
    riskflow::Scenario sc = riskflow::load_scenario(scenario_path);
    apply_overrides(sc, ov);
    const riskflow::CompareResult res = riskflow::compare_scenario(sc, out_dir);
    std::cout << "compared " << std::min(res.transport.size(), res.reduced.size())
              << " samples at level " << riskflow::to_string(sc.ode_level) << "\n";
    for (const riskflow::LabelDeviation& d : res.deviations) {
        std::cout << "  " << d.label;
        for (std::size_t pad = d.label.size(); pad < 15; ++pad) std::cout << ' ';
        std::cout << " max|diff| " << riskflow::detail::format_double(d.max_abs)
                  << "  rel " << riskflow::detail::format_double(d.max_rel) << "\n";
    }
    std::cout << "worst relative deviation: "
              << riskflow::detail::format_double(res.worst_rel) << "\n";
    std::cout << "report: " << res.report_path << "\n";
    if (res.ode_truncated) std::cout << "note: reduced trajectory truncated\n";
    return 0;
}

int cmd_analyze(const std::string& csv_path, const std::string& column,
                std::size_t max_peaks) {
    std::ifstream is(csv_path);
    if (!is) throw riskflow::ConfigError("cannot open CSV file " + csv_path);
    const riskflow::CsvTable table = riskflow::read_csv(is);
    const std::vector<double> t = table.column("t");
    const std::vector<double> y = table.column(column);
    if (t.size() < 2)
        throw riskflow::ConfigError("CSV has fewer than 2 rows");
    for (std::size_t i = 0; i < y.size(); ++i)
        if (std::isnan(y[i]))
            throw riskflow::ConfigError("column " + column + " has an empty cell at row " +
                                        std::to_string(i + 1));
    const double dt = t[1] - t[0];
    if (!(dt > 0.0)) throw riskflow::ConfigError("CSV time column is not increasing");

    std::cout << "column " << column << ", " << y.size() << " samples, dt "
              << riskflow::detail::format_double(dt) << "\n";
    try {
        const double g = riskflow::growth_rate(y, dt);
        std::cout << "growth rate (trailing half): "
                  << riskflow::detail::format_double(g) << "\n";
    } catch (const riskflow::NumericalError& e) {
        std::cout << "growth rate: unavailable (" << e.what() << ")\n";
    }
    const riskflow::Spectrum spec = riskflow::spectrum(y, dt, max_peaks);
    if (spec.detrend_rate != 0.0)
        std::cout << "detrended exponential rate: "
                  << riskflow::detail::format_double(spec.detrend_rate) << "\n";
    if (spec.peaks.empty()) {
        std::cout << "no spectral peaks\n";
    } else {
        std::cout << "peaks (frequency in cycles per unit time):\n";
        for (const riskflow::SpectralPeak& p : spec.peaks)
            std::cout << "  f = " << riskflow::detail::format_double(p.frequency)
                      << "  power = " << riskflow::detail::format_double(p.power) << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupled-sector risk-flow simulator"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = ".", csv_path, column;
    Overrides ov;
    std::size_t max_peaks = 8;

    CLI::App* run = app.add_subcommand("run", "Execute a scenario");
    run->add_option("--scenario", scenario_path, "Scenario file")->required();
    run->add_option("--out", out_dir, "Output directory (default .)");
    run->add_option("--mode", ov.mode, "Override run.mode");
    run->add_option("--seed", ov.seed, "Override run.seed");
    run->add_option("--cells", ov.cells, "Override space.cells (comma-separated)");

    CLI::App* validate = app.add_subcommand("validate", "Check coupling constraints");
    validate->add_option("--scenario", scenario_path, "Scenario file")->required();

    CLI::App* compare =
        app.add_subcommand("compare", "Run transport and the reduced system side by side");
    compare->add_option("--scenario", scenario_path, "Scenario file")->required();
    compare->add_option("--out", out_dir, "Output directory (default .)");
    compare->add_option("--mode", ov.mode, "Override run.mode");
    compare->add_option("--seed", ov.seed, "Override run.seed");
    compare->add_option("--cells", ov.cells, "Override space.cells (comma-separated)");

    CLI::App* analyze = app.add_subcommand("analyze", "Growth rate and spectrum of a CSV column");
    analyze->add_option("--csv", csv_path, "Aggregates CSV file")->required();
    analyze->add_option("--column", column, "Column name")->required();
    analyze->add_option("--max-peaks", max_peaks, "Peak count limit (default 8)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run) return cmd_run(scenario_path, out_dir, ov);
        if (*validate) return cmd_validate(scenario_path);
        if (*compare) return cmd_compare(scenario_path, out_dir, ov);
        if (*analyze) return cmd_analyze(csv_path, column, max_peaks);
    } catch (const riskflow::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const riskflow::ConstraintError& e) {
        std::cerr << "constraint error: " << e.what() << "\n";
        return 2;
    } catch (const riskflow::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
