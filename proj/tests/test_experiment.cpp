#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "spectest/experiment.hpp"

using namespace spectest;

namespace {

ExperimentConfig tiny_config() {
    ExperimentConfig config;
    config.model = "MA1";
    config.sizes = {50};
    config.alphas = {0.05};
    config.multipliers = {1.0};
    config.replications = 50;
    config.draws = 39;
    config.seed = 20;
    config.tests = {TestKind::RandUncentered};
    return config;
}

} // namespace

TEST_SUITE("harness-cli") {

TEST_CASE("a one-cell experiment is reproducible bit for bit") {
    const auto config = tiny_config();
    const auto first = run_experiment(config);
    REQUIRE(first.cells.size() == 1);
    const auto& cell = first.cells.front();
    CHECK(cell.rate >= 0.0);
    CHECK(cell.rate <= 100.0);
    CHECK(cell.valid == config.replications);
    CHECK(cell.rate == 100.0 * cell.rejections / cell.valid);

    const auto second = run_experiment(config);
    CHECK(second.cells.front().rate == cell.rate);
    CHECK(second.cells.front().rejections == cell.rejections);
}

TEST_CASE("AR1 null size at full scale stays near its reference value") {
    ExperimentConfig config;
    config.model = "AR1";
    config.sizes = {100};
    config.alphas = {0.05};
    config.multipliers = {1.0};
    config.replications = 400;
    config.draws = 300;
    config.seed = 42;
    config.tests = {TestKind::RandUncentered};
    config.workers = 2;
    const auto table = run_experiment(config);
    CHECK(std::fabs(table.cells.front().rate - 5.8) <= 2.5);
}

TEST_CASE("aggregates are identical for any worker count") {
    auto config = tiny_config();
    config.tests = {TestKind::Asymptotic, TestKind::RandUncentered, TestKind::RandStudentized};
    config.workers = 1;
    const auto serial = run_experiment(config);
    config.workers = 2;
    const auto parallel = run_experiment(config);
    REQUIRE(serial.cells.size() == parallel.cells.size());
    for (std::size_t i = 0; i < serial.cells.size(); ++i) {
        CHECK(serial.cells[i].rate == parallel.cells[i].rate);
        CHECK(serial.cells[i].rejections == parallel.cells[i].rejections);
    }
}

TEST_CASE("experiment validation rejects undersized runs") {
    auto config = tiny_config();
    config.replications = 49;
    CHECK_THROWS_AS((void)run_experiment(config), std::invalid_argument);
    config = tiny_config();
    config.draws = 18;
    CHECK_THROWS_AS((void)run_experiment(config), std::invalid_argument);
    config = tiny_config();
    config.alphas = {1.5};
    CHECK_THROWS_AS((void)run_experiment(config), std::invalid_argument);
    config = tiny_config();
    config.model = "NOPE1";
    CHECK_THROWS_AS((void)run_experiment(config), std::invalid_argument);
    config = tiny_config();
    config.tests.clear();
    CHECK_THROWS_AS((void)run_experiment(config), std::invalid_argument);
}

TEST_CASE("csv export round-trips the table") {
    auto config = tiny_config();
    config.alphas = {0.05, 0.10};
    const auto table = run_experiment(config);
    const std::string path = "experiment_roundtrip.csv";
    export_table(table, path, TableFormat::Csv);

    {
        std::ifstream in(path);
        std::string header;
        std::getline(in, header);
        CHECK(header == "model,n,alpha,c,test,rate,T,B,seed");
        int data_lines = 0;
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) ++data_lines;
        CHECK(data_lines == 2);
    }

    const auto loaded = parse_table_csv(path);
    REQUIRE(loaded.cells.size() == table.cells.size());
    CHECK(loaded.seed == table.seed);
    CHECK(loaded.replications == table.replications);
    CHECK(loaded.draws == table.draws);
    for (std::size_t i = 0; i < table.cells.size(); ++i) {
        CHECK(loaded.cells[i].model == table.cells[i].model);
        CHECK(loaded.cells[i].sample_size == table.cells[i].sample_size);
        CHECK(loaded.cells[i].alpha == table.cells[i].alpha);
        CHECK(loaded.cells[i].multiplier == table.cells[i].multiplier);
        CHECK(loaded.cells[i].test == table.cells[i].test);
        CHECK(loaded.cells[i].rate == table.cells[i].rate);
        CHECK(loaded.cells[i].rejections == table.cells[i].rejections);
    }
    std::remove(path.c_str());
}

TEST_CASE("text export formats rates with one decimal and reports standard errors") {
    SizePowerTable table;
    table.replications = 400;
    table.draws = 300;
    table.seed = 9;
    SizePowerCell cell;
    cell.model = "MA1";
    cell.sample_size = 100;
    cell.alpha = 0.05;
    cell.multiplier = 1.0;
    cell.test = "phi_n_star";
    cell.rejections = 23;
    cell.valid = 400;
    cell.rate = 100.0 * 23 / 400;  // 5.75 -> printed as 5.8
    table.cells.push_back(cell);

    const std::string path = "experiment_text.txt";
    export_table(table, path, TableFormat::Text);
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(content.find("5.8") != std::string::npos);
    const double se = 100.0 * std::sqrt(0.0575 * (1.0 - 0.0575) / 400.0);
    char se_text[16];
    std::snprintf(se_text, sizeof se_text, "(%.1f)", se);
    CHECK(content.find(se_text) != std::string::npos);
    CHECK(content.find("phi_n_star") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("config files parse into experiment configs") {
    const std::string path = "experiment_config.cfg";
    {
        std::ofstream out(path);
        out << "# comment line\n"
            << "[experiment]\n"
            << "model = AR2\n"
            << "innovation = logistic\n"
            << "sizes = 50, 100\n"
            << "alphas = 0.01 0.05\n"
            << "multipliers = 0.5 1 1.5\n"
            << "replications = 60\n"
            << "draws = 29\n"
            << "seed = 31415\n"
            << "tests = phi_n phi_n_star\n";
    }
    const auto config = parse_experiment_config(path);
    CHECK(config.model == "AR2");
    CHECK(config.innovation == Innovation::Logistic);
    CHECK(config.sizes == std::vector<int>{50, 100});
    CHECK(config.alphas == std::vector<double>{0.01, 0.05});
    CHECK(config.multipliers == std::vector<double>{0.5, 1.0, 1.5});
    CHECK(config.replications == 60);
    CHECK(config.draws == 29);
    CHECK(config.seed == 31415);
    REQUIRE(config.tests.size() == 2);
    CHECK(config.tests[0] == TestKind::Asymptotic);
    CHECK(config.tests[1] == TestKind::RandUncentered);
    std::remove(path.c_str());
}

TEST_CASE("environment seed override wins") {
    const std::string path = "experiment_config_env.cfg";
    {
        std::ofstream out(path);
        out << "model = MA1\nreplications = 50\ndraws = 19\nseed = 1\n";
    }
    setenv("SPECTEST_SEED", "777", 1);
    const auto config = parse_experiment_config(path);
    unsetenv("SPECTEST_SEED");
    CHECK(config.seed == 777);
    std::remove(path.c_str());
}

TEST_CASE("malformed configs report their location") {
    const std::string path = "experiment_config_bad.cfg";
    {
        std::ofstream out(path);
        out << "model = MA1\nnot a key value line\n";
    }
    CHECK_THROWS_AS((void)parse_experiment_config(path), std::runtime_error);
    {
        std::ofstream out(path);
        out << "mdoel = MA1\n";
    }
    CHECK_THROWS_AS((void)parse_experiment_config(path), std::runtime_error);
    std::remove(path.c_str());
}

} // TEST_SUITE
