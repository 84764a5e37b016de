#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spectest/equality.hpp"
#include "spectest/models.hpp"

namespace spectest {

/// One size/power experiment: a model preset replicated T times per sample
/// size, with every requested test evaluated at every nominal level and
/// bandwidth multiplier.
struct ExperimentConfig {
    std::string model = "MA1";
    Innovation innovation = Innovation::Gaussian;
    std::vector<int> sizes = {100};
    std::vector<double> alphas = {0.05};
    std::vector<double> multipliers = {1.0};
    int replications = 200;  // T >= 50
    int draws = 199;         // B >= 19
    std::uint64_t seed = 1;
    std::vector<TestKind> tests = {TestKind::RandUncentered};
    std::string kernel = "bartlett-priestley";
    int workers = 1;
};

void validate(const ExperimentConfig& config);

/// Parses a plain-text config with [section] headers and key = value lines
/// (section [experiment]; keys model, innovation, sizes, alphas, multipliers,
/// replications, draws, seed, tests, kernel). Lists are space or comma
/// separated. The SPECTEST_SEED environment variable overrides the seed.
[[nodiscard]] ExperimentConfig parse_experiment_config(const std::string& path);

struct SizePowerCell {
    std::string model;
    int sample_size = 0;
    double alpha = 0.0;
    double multiplier = 1.0;
    std::string test;
    double rate = 0.0;      // rejection rate in percent
    int rejections = 0;
    int valid = 0;          // replications that completed
};

struct SizePowerTable {
    std::vector<SizePowerCell> cells;
    std::uint64_t seed = 0;
    int replications = 0;
    int draws = 0;
    int excluded = 0;        // replications dropped due to errors (all cells)
    double wall_seconds = 0.0;

    [[nodiscard]] const SizePowerCell* find(const std::string& model, int n, double alpha, double c,
                                            const std::string& test) const;
};

/// Runs the experiment: per replication simulate -> demean -> cross-validated
/// bandwidth -> scale by c -> every requested test, then aggregates rejection
/// percentages. Deterministic given the master seed; aggregates are identical
/// for any worker count (per-replication child seeds, order-independent
/// integer counts). Throws std::runtime_error when more than 1% of
/// replications error out.
[[nodiscard]] SizePowerTable run_experiment(const ExperimentConfig& config);

enum class TableFormat { Csv, Text };

/// CSV columns: model,n,alpha,c,test,rate,T,B,seed (full-precision rates, so
/// export/parse round-trips exactly). The text format mirrors a size/power
/// table layout with one-decimal rates and per-cell Monte Carlo standard
/// errors sqrt(r(1-r)/T).
void export_table(const SizePowerTable& table, const std::string& path, TableFormat format);

/// Parses a table back from its CSV export.
[[nodiscard]] SizePowerTable parse_table_csv(const std::string& path);

} // namespace spectest
