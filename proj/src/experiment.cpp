#include "spectest/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "detail_engine.hpp"
#include "detail_parallel.hpp"
#include "spectest/kernel.hpp"
#include "spectest/randomize.hpp"
#include "spectest/rng.hpp"

namespace spectest {

void validate(const ExperimentConfig& config) {
    if (config.replications < 50) throw std::invalid_argument("experiment: need at least 50 replications");
    if (config.draws < 19) throw std::invalid_argument("experiment: need at least 19 randomization draws");
    if (config.sizes.empty()) throw std::invalid_argument("experiment: no sample sizes");
    for (int n : config.sizes)
        if (n < 8) throw std::invalid_argument("experiment: sample sizes must be at least 8");
    if (config.alphas.empty()) throw std::invalid_argument("experiment: no nominal levels");
    for (double a : config.alphas)
        if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("experiment: levels must lie in (0, 1)");
    if (config.multipliers.empty()) throw std::invalid_argument("experiment: no bandwidth multipliers");
    for (double c : config.multipliers)
        if (!(c > 0.0)) throw std::invalid_argument("experiment: multipliers must be positive");
    if (config.tests.empty()) throw std::invalid_argument("experiment: no tests requested");
    (void)preset(config.model);
    (void)kernel_by_name(config.kernel);
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> items;
    std::string cur;
    for (char ch : s) {
        if (ch == ',' || ch == ' ' || ch == '\t') {
            if (!cur.empty()) items.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) items.push_back(cur);
    return items;
}

} // namespace

ExperimentConfig parse_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");

    ExperimentConfig config;
    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#' || text[0] == ';') continue;
        if (text.front() == '[' && text.back() == ']') {
            section = trim(text.substr(1, text.size() - 2));
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (!section.empty() && section != "experiment")
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": unknown section [" + section + "]");

        try {
            if (key == "model") config.model = value;
            else if (key == "innovation") config.innovation = innovation_by_name(value);
            else if (key == "kernel") config.kernel = value;
            else if (key == "sizes") {
                config.sizes.clear();
                for (const auto& item : split_list(value)) config.sizes.push_back(std::stoi(item));
            } else if (key == "alphas") {
                config.alphas.clear();
                for (const auto& item : split_list(value)) config.alphas.push_back(std::stod(item));
            } else if (key == "multipliers") {
                config.multipliers.clear();
                for (const auto& item : split_list(value)) config.multipliers.push_back(std::stod(item));
            } else if (key == "replications") config.replications = std::stoi(value);
            else if (key == "draws") config.draws = std::stoi(value);
            else if (key == "seed") config.seed = std::stoull(value);
            else if (key == "tests") {
                config.tests.clear();
                for (const auto& item : split_list(value)) config.tests.push_back(test_kind_by_name(item));
            } else {
                throw std::runtime_error("unknown key '" + key + "'");
            }
        } catch (const std::runtime_error&) {
            throw;
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }

    if (const char* env = std::getenv("SPECTEST_SEED")) config.seed = std::stoull(env);
    validate(config);
    return config;
}

const SizePowerCell* SizePowerTable::find(const std::string& model, int n, double alpha, double c,
                                          const std::string& test) const {
    for (const auto& cell : cells) {
        if (cell.model == model && cell.sample_size == n && cell.alpha == alpha &&
            cell.multiplier == c && cell.test == test)
            return &cell;
    }
    return nullptr;
}

SizePowerTable run_experiment(const ExperimentConfig& config) {
    validate(config);
    const auto start = std::chrono::steady_clock::now();

    const Kernel kernel = kernel_by_name(config.kernel);
    ModelSpec spec = preset(config.model);
    spec.innovation = config.innovation;

    const int replications = config.replications;
    const int num_c = static_cast<int>(config.multipliers.size());
    const int num_alpha = static_cast<int>(config.alphas.size());
    const int num_tests = static_cast<int>(config.tests.size());
    const int cells_per_size = num_c * num_alpha * num_tests;

    const bool needs_centering =
        std::any_of(config.tests.begin(), config.tests.end(), [](TestKind k) {
            return k != TestKind::RandUncentered;
        });
    const bool needs_draws = std::any_of(config.tests.begin(), config.tests.end(), [](TestKind k) {
        return k != TestKind::Asymptotic;
    });

    SizePowerTable table;
    table.seed = config.seed;
    table.replications = replications;
    table.draws = config.draws;

    for (int n : config.sizes) {
        // decision matrix: one row per replication, flat (c, alpha, test) columns
        std::vector<std::uint8_t> decisions(static_cast<std::size_t>(replications) * cells_per_size, 0);
        std::vector<std::uint8_t> failed(static_cast<std::size_t>(replications), 0);
        const std::uint64_t size_seed = child_seed(config.seed, static_cast<std::uint64_t>(n));

        detail::parallel_for(replications, config.workers, [&](int rep) {
            try {
                const std::uint64_t rep_seed = child_seed(size_seed, static_cast<std::uint64_t>(rep) + 1);
                const TimeSeriesPanel panel =
                    demean(simulate(spec, n, child_seed(rep_seed, 0)));
                const int p = panel.block_dim;
                const int q = panel.groups;
                const auto pgram = periodogram(panel);
                const auto candidates = default_bandwidth_grid(n);
                const double h_cv =
                    cross_validate_bandwidth(panel, kernel, candidates, 1).value;

                std::vector<detail::StatisticWorkspace> workspaces;
                std::vector<double> observed(static_cast<std::size_t>(num_c), 0.0);
                std::vector<CenteringEstimates> centerings(static_cast<std::size_t>(num_c));
                const auto identity = identity_family(q, n);
                for (int ci = 0; ci < num_c; ++ci) {
                    const double h = std::min(config.multipliers[static_cast<std::size_t>(ci)] * h_cv, kPi);
                    workspaces.push_back(detail::make_workspace(pgram, kernel, h, p, q));
                    observed[static_cast<std::size_t>(ci)] =
                        detail::evaluate_statistic(workspaces.back(), identity);
                    if (needs_centering) {
                        const auto smoothed = smooth(pgram, kernel, h);
                        auto& est = centerings[static_cast<std::size_t>(ci)];
                        est.mu_hat = estimate_mu_hat(smoothed, kernel, p, q);
                        est.tau_hat_sq = estimate_tau_sq(smoothed, kernel, p, q);
                        est.mu_hat_star = estimate_mu_hat_star(smoothed, kernel, p, q);
                        est.tau_hat_star_sq = estimate_tau_sq_star(smoothed, kernel, p, q);
                    }
                }

                // randomization draws: permutation families are shared across
                // bandwidth multipliers, only the statistic changes with h
                std::vector<std::vector<double>> star(static_cast<std::size_t>(num_c));
                if (needs_draws) {
                    for (auto& s : star) s.resize(static_cast<std::size_t>(config.draws));
                    for (int b = 0; b < config.draws; ++b) {
                        const auto family =
                            sample_family(q, n, child_seed(rep_seed, static_cast<std::uint64_t>(b) + 1));
                        for (int ci = 0; ci < num_c; ++ci)
                            star[static_cast<std::size_t>(ci)][static_cast<std::size_t>(b)] =
                                detail::evaluate_statistic(workspaces[static_cast<std::size_t>(ci)], family);
                    }
                }

                for (int ci = 0; ci < num_c; ++ci) {
                    const double h = workspaces[static_cast<std::size_t>(ci)].h;
                    const double root_h = std::sqrt(h);
                    const auto& est = centerings[static_cast<std::size_t>(ci)];
                    for (int ai = 0; ai < num_alpha; ++ai) {
                        const double alpha = config.alphas[static_cast<std::size_t>(ai)];
                        for (int ti = 0; ti < num_tests; ++ti) {
                            const TestKind kind = config.tests[static_cast<std::size_t>(ti)];
                            bool reject = false;
                            const double tn = observed[static_cast<std::size_t>(ci)];
                            if (kind == TestKind::Asymptotic) {
                                if (est.tau_hat_sq == 0.0)
                                    throw std::domain_error("degenerate scale estimate");
                                const double standardized =
                                    (tn - est.mu_hat / root_h) / std::sqrt(est.tau_hat_sq);
                                reject = standardized > normal_quantile(1.0 - alpha);
                            } else {
                                double obs = tn;
                                double center = 0.0;
                                double scale = 1.0;
                                if (kind == TestKind::RandCentered) {
                                    obs = tn - est.mu_hat / root_h;
                                    center = est.mu_hat_star / root_h;
                                } else if (kind == TestKind::RandStudentized) {
                                    if (est.tau_hat_sq == 0.0 || est.tau_hat_star_sq == 0.0)
                                        throw std::domain_error("degenerate scale estimate");
                                    obs = (tn - est.mu_hat / root_h) / std::sqrt(est.tau_hat_sq);
                                    center = est.mu_hat_star / root_h;
                                    scale = std::sqrt(est.tau_hat_star_sq);
                                }
                                int at_least = 0;
                                for (double s : star[static_cast<std::size_t>(ci)]) {
                                    const double value = (s - center) / scale;
                                    if (value >= obs) ++at_least;
                                }
                                const double p_value =
                                    static_cast<double>(1 + at_least) / (config.draws + 1);
                                reject = p_value <= alpha;
                            }
                            const std::size_t slot =
                                static_cast<std::size_t>(rep) * cells_per_size +
                                static_cast<std::size_t>((ci * num_alpha + ai) * num_tests + ti);
                            decisions[slot] = reject ? 1 : 0;
                        }
                    }
                }
            } catch (const std::exception&) {
                failed[static_cast<std::size_t>(rep)] = 1;
            }
        });

        int excluded = 0;
        for (auto f : failed) excluded += f;
        table.excluded += excluded;
        if (excluded > replications / 100)
            throw std::runtime_error("experiment: more than 1% of replications failed at n = " +
                                     std::to_string(n));

        for (int ci = 0; ci < num_c; ++ci)
            for (int ai = 0; ai < num_alpha; ++ai)
                for (int ti = 0; ti < num_tests; ++ti) {
                    SizePowerCell cell;
                    cell.model = config.model;
                    cell.sample_size = n;
                    cell.alpha = config.alphas[static_cast<std::size_t>(ai)];
                    cell.multiplier = config.multipliers[static_cast<std::size_t>(ci)];
                    cell.test = test_kind_name(config.tests[static_cast<std::size_t>(ti)]);
                    cell.valid = replications - excluded;
                    int rejections = 0;
                    for (int rep = 0; rep < replications; ++rep) {
                        if (failed[static_cast<std::size_t>(rep)]) continue;
                        const std::size_t slot = static_cast<std::size_t>(rep) * cells_per_size +
                                                 static_cast<std::size_t>((ci * num_alpha + ai) * num_tests + ti);
                        rejections += decisions[slot];
                    }
                    cell.rejections = rejections;
                    cell.rate = cell.valid > 0 ? 100.0 * rejections / cell.valid : 0.0;
                    table.cells.push_back(std::move(cell));
                }
    }

    table.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return table;
}

void export_table(const SizePowerTable& table, const std::string& path, TableFormat format) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");

    if (format == TableFormat::Csv) {
        out << "model,n,alpha,c,test,rate,T,B,seed\n";
        out << std::setprecision(17);
        for (const auto& cell : table.cells) {
            out << cell.model << ',' << cell.sample_size << ',' << cell.alpha << ',' << cell.multiplier
                << ',' << cell.test << ',' << cell.rate << ',' << table.replications << ','
                << table.draws << ',' << table.seed << '\n';
        }
    } else {
        // one block per test, rows (alpha, c), columns n; one-decimal rates
        // with Monte Carlo standard errors
        std::vector<std::string> tests;
        std::vector<int> sizes;
        std::vector<std::pair<double, double>> rows;  // (alpha, c)
        for (const auto& cell : table.cells) {
            if (std::find(tests.begin(), tests.end(), cell.test) == tests.end()) tests.push_back(cell.test);
            if (std::find(sizes.begin(), sizes.end(), cell.sample_size) == sizes.end())
                sizes.push_back(cell.sample_size);
            const std::pair<double, double> row{cell.alpha, cell.multiplier};
            if (std::find(rows.begin(), rows.end(), row) == rows.end()) rows.push_back(row);
        }
        out << "# replications = " << table.replications << ", draws = " << table.draws
            << ", seed = " << table.seed;
        if (table.excluded > 0) out << ", excluded = " << table.excluded;
        out << "\n";
        for (const auto& test : tests) {
            out << "\n" << test << " (rejection rate % and standard error)\n";
            out << std::setw(8) << "alpha" << std::setw(6) << "c";
            for (int n : sizes) out << std::setw(16) << ("n=" + std::to_string(n));
            out << "\n";
            for (const auto& [alpha, c] : rows) {
                out << std::setw(8) << std::setprecision(3) << std::defaultfloat << alpha << std::setw(6)
                    << c;
                for (int n : sizes) {
                    const auto* cell = table.cells.empty()
                                           ? nullptr
                                           : table.find(table.cells.front().model, n, alpha, c, test);
                    if (cell == nullptr) {
                        out << std::setw(16) << "-";
                        continue;
                    }
                    const double r = cell->rate / 100.0;
                    const double se =
                        cell->valid > 0 ? 100.0 * std::sqrt(r * (1.0 - r) / cell->valid) : 0.0;
                    std::ostringstream entry;
                    entry << std::fixed << std::setprecision(1) << cell->rate << " (" << se << ")";
                    out << std::setw(16) << entry.str();
                }
                out << "\n";
            }
        }
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

SizePowerTable parse_table_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");

    SizePowerTable table;
    std::string line;
    if (!std::getline(in, line) || trim(line) != "model,n,alpha,c,test,rate,T,B,seed")
        throw std::runtime_error(path + ": unexpected CSV header");
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::stringstream ss(line);
        std::string field;
        SizePowerCell cell;
        try {
            std::getline(ss, cell.model, ',');
            std::getline(ss, field, ',');
            cell.sample_size = std::stoi(field);
            std::getline(ss, field, ',');
            cell.alpha = std::stod(field);
            std::getline(ss, field, ',');
            cell.multiplier = std::stod(field);
            std::getline(ss, cell.test, ',');
            std::getline(ss, field, ',');
            cell.rate = std::stod(field);
            std::getline(ss, field, ',');
            table.replications = std::stoi(field);
            std::getline(ss, field, ',');
            table.draws = std::stoi(field);
            std::getline(ss, field, ',');
            table.seed = std::stoull(field);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ": parse error at line " + std::to_string(line_no));
        }
        cell.valid = table.replications;
        cell.rejections = static_cast<int>(std::llround(cell.rate * cell.valid / 100.0));
        table.cells.push_back(std::move(cell));
    }
    return table;
}

} // namespace spectest
