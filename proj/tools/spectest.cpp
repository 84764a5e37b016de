#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "spectest/experiment.hpp"
#include "spectest/models.hpp"
#include "spectest/panel.hpp"
#include "spectest/randomize.hpp"

namespace {

constexpr int kExitRejected = 10;

int run_simulate(const std::string& model, const std::string& innovation, int n, std::uint64_t seed,
                 int burn_in, const std::string& out_path) {
    spectest::ModelSpec spec = spectest::preset(model);
    spec.innovation = spectest::innovation_by_name(innovation);
    if (burn_in >= 0) spec.burn_in = burn_in;
    const auto panel = spectest::simulate(spec, n, seed);
    spectest::write_panel_csv(panel, out_path);
    std::cout << "wrote " << panel.length() << " x " << panel.dim() << " panel to " << out_path << "\n";
    return 0;
}

int run_test(const std::string& input, int p, int q, const spectest::RandomizationConfig& config) {
    const auto panel = spectest::read_panel_csv(input, p, q);
    const auto report = spectest::run_randomization_test(panel, config);
    std::cout << spectest::to_json(report) << "\n";
    return report.reject ? kExitRejected : 0;
}

int run_experiment_cmd(const std::string& config_path, const std::string& out_path, int workers,
                       bool paper_scale, const std::string& format_name, const std::string& text_path) {
    spectest::ExperimentConfig config = spectest::parse_experiment_config(config_path);
    config.workers = workers;
    if (paper_scale) {
        config.replications = 400;
        config.draws = 300;
    }
    const auto table = spectest::run_experiment(config);
    const auto format = format_name == "text" ? spectest::TableFormat::Text : spectest::TableFormat::Csv;
    spectest::export_table(table, out_path, format);
    if (!text_path.empty()) spectest::export_table(table, text_path, spectest::TableFormat::Text);
    std::cout << "wrote " << table.cells.size() << " cells to " << out_path << " ("
              << table.wall_seconds << " s";
    if (table.excluded > 0) std::cout << ", " << table.excluded << " replications excluded";
    std::cout << ")\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tests for equality of the diagonal spectral density blocks of a multivariate "
                 "stationary time series"};
    app.require_subcommand(1);

    auto* simulate = app.add_subcommand("simulate", "Generate a panel from a named model preset");
    std::string model = "MA1";
    std::string innovation = "gaussian";
    int sim_n = 200;
    std::uint64_t sim_seed = 1;
    int burn_in = -1;
    std::string sim_out = "panel.csv";
    simulate->add_option("--model", model, "Preset name (AR1..AR6, MA1..MA6, GARCH1..GARCH6, TAR1..TAR6, RCA1..RCA3)")->required();
    simulate->add_option("--innovation", innovation, "gaussian | logistic | double-exponential");
    simulate->add_option("--n", sim_n, "Sample size")->required();
    simulate->add_option("--seed", sim_seed, "Generator seed");
    simulate->add_option("--burn-in", burn_in, "Override the preset burn-in");
    simulate->add_option("--out", sim_out, "Output CSV path")->required();

    auto* test = app.add_subcommand("test", "Run an equality test on a CSV panel");
    std::string input;
    int p = 1;
    int q = 2;
    std::string kind = "uncentered";
    spectest::RandomizationConfig config;
    double fixed_bandwidth = 0.0;
    bool use_cv = false;
    double cv_mult = 1.0;
    std::string kernel_name = "bartlett-priestley";
    bool no_demean = false;
    bool legacy_rule = false;
    test->add_option("--input", input, "Input CSV (one row per time point, p*q columns)")->required();
    test->add_option("--p", p, "Block dimension")->required();
    test->add_option("--q", q, "Number of groups")->required();
    test->add_option("--kind", kind, "asymptotic | uncentered | centered | studentized");
    test->add_option("--B", config.draws, "Randomization draws");
    test->add_option("--alpha", config.alpha, "Nominal level");
    test->add_option("--seed", config.seed, "Randomization seed");
    auto* bw_opt = test->add_option("--bandwidth", fixed_bandwidth, "Fixed bandwidth in (0, pi]");
    auto* cv_opt = test->add_flag("--cv", use_cv, "Select the bandwidth by cross validation");
    test->add_option("--cv-mult", cv_mult, "Multiplier applied to the cross-validated bandwidth");
    test->add_option("--kernel", kernel_name, "bartlett-priestley | cosine");
    test->add_option("--workers", config.workers, "Worker threads for the draws");
    test->add_flag("--no-demean", no_demean, "Skip the centering step");
    test->add_flag("--legacy-count-rule", legacy_rule,
                   "Reject when the fraction of draws strictly below the statistic exceeds alpha");
    bw_opt->excludes(cv_opt);

    auto* experiment = app.add_subcommand("experiment", "Run a size/power experiment from a config file");
    std::string config_path;
    std::string out_path = "table.csv";
    std::string text_path;
    std::string format_name = "csv";
    int workers = 1;
    bool paper_scale = false;
    experiment->add_option("--config", config_path, "Experiment config file")->required();
    experiment->add_option("--out", out_path, "Output table path")->required();
    experiment->add_option("--format", format_name, "csv | text");
    experiment->add_option("--text-out", text_path, "Also write a text-format table here");
    experiment->add_option("--workers", workers, "Worker threads over replications");
    experiment->add_flag("--paper-scale", paper_scale, "Use T = 400 replications and B = 300 draws");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return run_simulate(model, innovation, sim_n, sim_seed, burn_in, sim_out);
        if (test->parsed()) {
            config.kind = spectest::test_kind_by_name(kind);
            config.kernel = spectest::kernel_by_name(kernel_name);
            config.demean_first = !no_demean;
            config.literal_count_rule = legacy_rule;
            if (use_cv || fixed_bandwidth <= 0.0) {
                config.bandwidth = spectest::BandwidthSpec{true, 0.0, cv_mult};
            } else {
                config.bandwidth = spectest::BandwidthSpec{false, fixed_bandwidth, 1.0};
            }
            return run_test(input, p, q, config);
        }
        if (experiment->parsed())
            return run_experiment_cmd(config_path, out_path, workers, paper_scale, format_name, text_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << "spectest: invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "spectest: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "spectest: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
