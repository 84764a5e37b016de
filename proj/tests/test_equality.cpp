#include <doctest.h>

#include <cmath>
#include <complex>

#include "spectest/equality.hpp"
#include "spectest/randomize.hpp"
#include "test_support.hpp"

using namespace spectest;

namespace {

// Independent brute-force evaluation of the statistic as an explicit double
// sum over frequency pairs, with its own kernel evaluations.
double brute_force_statistic(const SpectralMatrixField& pgram, const Kernel& kernel, double h, int p,
                             int q) {
    const int n = pgram.grid.size();
    const auto pooled = pooled_diagonal(pgram, p, q);
    double total = 0.0;
    for (int e = 0; e < n; ++e) {
        const double w_e = pgram.grid.value(e);
        for (int k1 = 0; k1 < n; ++k1) {
            const double weight1 = kernel.evaluate(wrap_angle(w_e - pgram.grid.value(k1)) / h) / h;
            if (weight1 == 0.0) continue;
            for (int k2 = 0; k2 < n; ++k2) {
                const double weight2 = kernel.evaluate(wrap_angle(w_e - pgram.grid.value(k2)) / h) / h;
                if (weight2 == 0.0) continue;
                std::complex<double> cross = 0.0;
                for (int r = 0; r < q; ++r) {
                    const Eigen::MatrixXcd d1 =
                        pgram.at(k1).block(r * p, r * p, p, p) - pooled.at(k1);
                    const Eigen::MatrixXcd d2 =
                        pgram.at(k2).block(r * p, r * p, p, p) - pooled.at(k2);
                    cross += frobenius_inner(d1, d2);
                }
                total += weight1 * weight2 * cross.real();
            }
        }
    }
    return kTwoPi * std::sqrt(h) * total / (static_cast<double>(n) * n);
}

// Literal nested-loop evaluation of the exactness sums, elementwise inner
// products, no library block helpers.
double exactness_oracle_at(const Eigen::MatrixXcd& m, int p, int q) {
    auto inner = [&](int j1, int j3, int j2, int j4) {
        std::complex<double> acc = 0.0;
        for (int a = 0; a < p; ++a)
            for (int b = 0; b < p; ++b)
                acc += m(j1 * p + a, j3 * p + b) * std::conj(m(j2 * p + a, j4 * p + b));
        return std::norm(acc);
    };
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (int j1 = 0; j1 < q; ++j1)
        for (int j3 = 0; j3 < q; ++j3)
            if (j1 != j3) s1 += inner(j1, j3, j1, j3);
    for (int j1 = 0; j1 < q; ++j1)
        for (int j3 = 0; j3 < q; ++j3)
            for (int j4 = 0; j4 < q; ++j4)
                if (j1 != j3 && j1 != j4 && j3 != j4) s2 += inner(j1, j3, j1, j4);
    for (int j1 = 0; j1 < q; ++j1)
        for (int j2 = 0; j2 < q; ++j2)
            for (int j3 = 0; j3 < q; ++j3)
                for (int j4 = 0; j4 < q; ++j4)
                    if (j1 != j3 && j2 != j4 && j1 != j2 && j3 != j4) s3 += inner(j1, j3, j2, j4);
    const double qd = q;
    return (std::pow(qd - 1.0, 3) - 1.0) * s1 - 2.0 * (std::pow(qd - 1.0, 2) + 1.0) * s2 +
           (qd - 2.0) * s3;
}

} // namespace

TEST_SUITE("equality-test") {

TEST_CASE("duplicated sub-series give a statistic of exactly zero") {
    auto panel = test_support::random_panel(32, 1, 2, 101);
    panel.data.col(1) = panel.data.col(0);
    const auto pgram = periodogram(demean(panel));
    CHECK(l2_statistic(pgram, bartlett_priestley(), 0.5, 1, 2) == 0.0);
}

TEST_CASE("statistic scales with the fourth power of the data") {
    const auto panel = demean(test_support::random_panel(24, 1, 2, 103));
    TimeSeriesPanel scaled = panel;
    const double c = 1.7;
    scaled.data *= c;
    const auto kernel = bartlett_priestley();
    const double base = l2_statistic(periodogram(panel), kernel, 0.6, 1, 2);
    const double grown = l2_statistic(periodogram(scaled), kernel, 0.6, 1, 2);
    CHECK(grown == doctest::Approx(std::pow(c, 4) * base).epsilon(1e-10));
}

TEST_CASE("statistic matches the brute-force double-sum oracle at n=32") {
    const auto panel = demean(test_support::random_panel(32, 1, 2, 107));
    const auto pgram = periodogram(panel);
    const auto kernel = bartlett_priestley();
    const double h = 0.45;
    const double fast = l2_statistic(pgram, kernel, h, 1, 2);
    const double oracle = brute_force_statistic(pgram, kernel, h, 1, 2);
    CHECK(fast == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("statistic agrees with its smoothed-field form") {
    const auto panel = demean(test_support::random_panel(28, 2, 2, 109));
    const auto pgram = periodogram(panel);
    const auto kernel = bartlett_priestley();
    const double h = 0.7;
    const double engine = l2_statistic(pgram, kernel, h, 2, 2);
    const double literal = l2_statistic_from_smoothed(smooth(pgram, kernel, h), 2, 2, h);
    CHECK(engine == doctest::Approx(literal).epsilon(1e-12));
}

TEST_CASE("statistic is invariant under relabeling the groups") {
    const auto panel = demean(test_support::random_panel(20, 1, 3, 113));
    TimeSeriesPanel shuffled = panel;
    shuffled.data.col(0) = panel.data.col(2);
    shuffled.data.col(2) = panel.data.col(0);
    const auto kernel = bartlett_priestley();
    const double a = l2_statistic(periodogram(panel), kernel, 0.5, 1, 3);
    const double b = l2_statistic(periodogram(shuffled), kernel, 0.5, 1, 3);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("centering estimate on simple constructed fields") {
    const auto kernel = bartlett_priestley();

    SUBCASE("all-zero field gives zero") {
        SpectralMatrixField field;
        field.grid = fourier_frequencies(8);
        field.kind = FieldKind::Smoothed;
        field.matrices.assign(8, Eigen::MatrixXcd::Zero(2, 2));
        CHECK(estimate_mu_hat(field, kernel, 1, 2) == 0.0);
        CHECK(estimate_tau_sq(field, kernel, 1, 2) == 0.0);
    }

    SUBCASE("constant diagonal field f = 1/(2pi) gives the closed forms") {
        SpectralMatrixField field;
        field.grid = fourier_frequencies(16);
        field.kind = FieldKind::Smoothed;
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
        const double f = 1.0 / kTwoPi;
        m(0, 0) = f;
        m(1, 1) = f;
        field.matrices.assign(16, m);
        CHECK(estimate_mu_hat(field, kernel, 1, 2) ==
              doctest::Approx(kernel.mean_constant / kTwoPi).epsilon(1e-12));
        // tau^2 = B * Int f^4 = B * 2pi * f^4
        CHECK(estimate_tau_sq(field, kernel, 1, 2) ==
              doctest::Approx(kernel.variance_constant * kTwoPi * std::pow(f, 4)).epsilon(1e-12));
    }
}

TEST_CASE("centering estimate matches the squared-coherence form on equal diagonals") {
    const auto kernel = bartlett_priestley();
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto field = test_support::equal_diagonal_field(16, 1000 + seed);
        const double direct = estimate_mu_hat(field, kernel, 1, 2);
        double coherence_form = 0.0;
        for (int pos = 0; pos < 16; ++pos) {
            const double f11 = field.at(pos)(0, 0).real();
            const double coherence = std::norm(field.at(pos)(0, 1)) / (f11 * f11);
            coherence_form += f11 * f11 * (1.0 - coherence);
        }
        coherence_form *= kernel.mean_constant * kTwoPi / 16.0;
        CHECK(direct == doctest::Approx(coherence_form).epsilon(1e-10));
    }
}

TEST_CASE("scale estimate has homogeneity degree eight") {
    const auto kernel = bartlett_priestley();
    const auto panel = demean(test_support::random_panel(24, 1, 2, 127));
    const auto smoothed = smooth(periodogram(panel), kernel, 0.7);
    SpectralMatrixField scaled = smoothed;
    const double c2 = 1.9;  // scaling the field by c^2 corresponds to data scaled by c
    for (auto& m : scaled.matrices) m *= c2;
    const double base = estimate_tau_sq(smoothed, kernel, 1, 2);
    const double grown = estimate_tau_sq(scaled, kernel, 1, 2);
    CHECK(grown == doctest::Approx(std::pow(c2, 4) * base).epsilon(1e-10));
}

TEST_CASE("scale estimate reduces to B * Int f^4 for equal uncorrelated components") {
    const auto kernel = bartlett_priestley();
    SpectralMatrixField field;
    field.grid = fourier_frequencies(12);
    field.kind = FieldKind::Smoothed;
    field.matrices.clear();
    for (int pos = 0; pos < 12; ++pos) {
        // symmetric profile in the index keeps conjugate symmetry
        const double f = 1.0 + 0.25 * std::cos(field.grid.value(pos));
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
        m(0, 0) = f;
        m(1, 1) = f;
        field.matrices.push_back(m);
    }
    double expected = 0.0;
    for (int pos = 0; pos < 12; ++pos) expected += std::pow(field.at(pos)(0, 0).real(), 4);
    expected *= kernel.variance_constant * kTwoPi / 12.0;
    CHECK(estimate_tau_sq(field, kernel, 1, 2) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("normal quantile approximation is accurate") {
    CHECK(std::fabs(normal_quantile(0.95) - 1.6448536269514722) < 1e-9);
    CHECK(std::fabs(normal_quantile(0.975) - 1.959963984540054) < 1e-9);
    CHECK(std::fabs(normal_quantile(0.99) - 2.3263478740408408) < 1e-9);
    CHECK(std::fabs(normal_quantile(0.5)) < 1e-15);
    CHECK(normal_quantile(0.025) == doctest::Approx(-normal_quantile(0.975)).epsilon(1e-12));
    CHECK_THROWS_AS((void)normal_quantile(0.0), std::invalid_argument);
}

TEST_CASE("asymptotic test decision rule") {
    StatisticValue statistic{0.0, 100, 0.5, 100};
    CenteringEstimates centering{0.0, 1.0, 0.0, 1.0};

    SUBCASE("standardized statistic 0 is retained at the 5% level") {
        statistic.value = 0.0;
        const auto report = asymptotic_test(statistic, centering, 0.05);
        CHECK_FALSE(report.reject);
        CHECK(report.critical_value_or_pvalue == doctest::Approx(1.6448536269514722).epsilon(1e-8));
    }

    SUBCASE("standardized statistic 3 is rejected at the 5% level") {
        statistic.value = 3.0;
        CHECK(asymptotic_test(statistic, centering, 0.05).reject);
    }

    SUBCASE("degenerate scale raises") {
        centering.tau_hat_sq = 0.0;
        CHECK_THROWS_AS((void)asymptotic_test(statistic, centering, 0.05), std::domain_error);
    }

    SUBCASE("alpha outside (0,1) raises") {
        CHECK_THROWS_AS((void)asymptotic_test(statistic, centering, 0.0), std::invalid_argument);
    }
}

TEST_CASE("full pipeline is scale invariant after studentization") {
    const auto kernel = bartlett_priestley();
    const double h = 0.4;
    const auto panel = demean(test_support::random_panel(48, 1, 2, 131));
    TimeSeriesPanel scaled = panel;
    scaled.data *= 3.7;

    auto standardized = [&](const TimeSeriesPanel& input) {
        const auto smoothed = smooth(periodogram(input), kernel, h);
        const double tn = l2_statistic(periodogram(input), kernel, h, 1, 2);
        const double mu = estimate_mu_hat(smoothed, kernel, 1, 2);
        const double tau_sq = estimate_tau_sq(smoothed, kernel, 1, 2);
        return (tn - mu / std::sqrt(h)) / std::sqrt(tau_sq);
    };

    const double base = standardized(panel);
    const double grown = standardized(scaled);
    CHECK(grown == doctest::Approx(base).epsilon(1e-8));

    // identical decisions at several levels
    for (double alpha : {0.01, 0.05, 0.10}) {
        const double u = normal_quantile(1.0 - alpha);
        CHECK((base > u) == (grown > u));
    }
}

TEST_CASE("exactness condition vanishes identically for two groups") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto field = test_support::random_hermitian_field(12, 2, 2000 + seed);
        const auto diag = exactness_condition(field, 1, 2);
        CHECK(diag.aggregate <= 1e-10);
    }
    // also for blocks of dimension 2
    const auto field = test_support::random_hermitian_field(8, 4, 2500);
    CHECK(exactness_condition(field, 2, 2).aggregate <= 1e-10);
}

TEST_CASE("exactness condition vanishes for equal-modulus cross spectra at q=3") {
    spectest::RngEngine rng(2600);
    SpectralMatrixField field;
    field.grid = fourier_frequencies(10);
    field.kind = FieldKind::Smoothed;
    field.matrices.assign(10, Eigen::MatrixXcd::Zero(3, 3));
    for (int k = 0; k <= field.grid.max_index(); ++k) {
        const bool self = (k == 0) || (2 * k == 10);
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(3, 3);
        for (int j = 0; j < 3; ++j) m(j, j) = 1.0 + rng.uniform01();
        const double modulus = 0.5;
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b) {
                const double phase = self ? (rng.uniform01() < 0.5 ? 0.0 : kPi) : kTwoPi * rng.uniform01();
                m(a, b) = std::polar(modulus, phase);
                m(b, a) = std::conj(m(a, b));
            }
        field.matrices[static_cast<std::size_t>(field.grid.position(k))] = m;
        if (k > 0 && -k >= field.grid.min_index())
            field.matrices[static_cast<std::size_t>(field.grid.position(-k))] = m.conjugate();
    }
    CHECK(exactness_condition(field, 1, 3).aggregate <= 1e-10);
}

TEST_CASE("exactness condition is positive for unequal cross-spectral moduli at q=3") {
    SpectralMatrixField field;
    const int n = 8;
    field.grid = fourier_frequencies(n);
    field.kind = FieldKind::Smoothed;
    Eigen::MatrixXcd base = Eigen::MatrixXcd::Identity(3, 3);
    field.matrices.assign(n, base);
    Eigen::MatrixXcd spike = base;
    spike(0, 1) = 1.0;  // |f_12| = 1, |f_13| = |f_23| = 0
    spike(1, 0) = 1.0;
    field.matrices[static_cast<std::size_t>(field.grid.position(1))] = spike;
    field.matrices[static_cast<std::size_t>(field.grid.position(-1))] = spike.conjugate();

    const auto diag = exactness_condition(field, 1, 3);
    const double at_spike = diag.pointwise[static_cast<std::size_t>(field.grid.position(1))];
    CHECK(at_spike > 0.0);
    CHECK(at_spike == doctest::Approx(exactness_oracle_at(spike, 1, 3)).epsilon(1e-12));

    double oracle_aggregate = 0.0;
    for (int pos = 0; pos < n; ++pos)
        oracle_aggregate += std::fabs(exactness_oracle_at(field.at(pos), 1, 3));
    oracle_aggregate *= kTwoPi / n;
    CHECK(diag.aggregate == doctest::Approx(oracle_aggregate).epsilon(1e-10));
    CHECK(diag.aggregate > 0.0);
}

TEST_CASE("detection shift of the zero perturbation is zero") {
    const auto grid = fourier_frequencies(8);
    std::vector<Eigen::MatrixXcd> zero(8, Eigen::MatrixXcd::Zero(2, 2));
    CHECK(detection_shift(zero, grid, 1, 2) == 0.0);
}

TEST_CASE("detection shift of diag(a, -a) matches the explicit 4x4 coupling") {
    const auto grid = fourier_frequencies(8);
    const double a = 1.3;
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(2, 2);
    g(0, 0) = a;
    g(1, 1) = -a;
    std::vector<Eigen::MatrixXcd> constant(8, g);

    // brute-force coupling for p = 1, q = 2 over vectorized entries
    Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(4, 4);
    gamma(0, 0) = gamma(3, 3) = 0.5;
    gamma(0, 3) = gamma(3, 0) = -0.5;
    const Eigen::Vector4d v(a, 0.0, 0.0, -a);
    const double expected = kTwoPi * v.dot(gamma * v);

    CHECK(detection_shift(constant, grid, 1, 2) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(kTwoPi * 2.0 * a * a).epsilon(1e-12));
    CHECK((detection_shift_coupling(1, 2) - gamma).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("perturbations supported off the diagonal blocks have zero shift") {
    const auto grid = fourier_frequencies(8);
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(2, 2);
    g(0, 1) = std::complex<double>(0.7, -0.2);
    g(1, 0) = std::conj(g(0, 1));
    std::vector<Eigen::MatrixXcd> constant(8, g);
    CHECK(detection_shift(constant, grid, 1, 2) == 0.0);
}

TEST_CASE("non-Hermitian perturbations are rejected") {
    const auto grid = fourier_frequencies(8);
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(2, 2);
    g(0, 1) = 1.0;  // g(1,0) stays 0
    std::vector<Eigen::MatrixXcd> constant(8, g);
    CHECK_THROWS_AS((void)detection_shift(constant, grid, 1, 2), std::invalid_argument);
}

TEST_CASE("coupling matrix is symmetric PSD on the diagonal-block index set") {
    for (auto [p, q] : {std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 2}, std::pair{2, 3}}) {
        const int d = p * q;
        const auto gamma = detection_shift_coupling(p, q);
        std::vector<int> xi;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (i / p == j / p) xi.push_back(i + j * d);
        Eigen::MatrixXd sub(xi.size(), xi.size());
        for (std::size_t a = 0; a < xi.size(); ++a)
            for (std::size_t b = 0; b < xi.size(); ++b)
                sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                    gamma(xi[a], xi[b]);
        CHECK((sub - sub.transpose()).cwiseAbs().maxCoeff() == 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sub, Eigen::EigenvaluesOnly);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
    }
}

TEST_CASE("coupling applies the literal offset rule outside the diagonal-block set") {
    // row entry (2,2), column entry (3,1): offsets |2-3| = |2-1| = 1
    const auto gamma = detection_shift_coupling(1, 3);
    const int row = 1 + 1 * 3;
    const int col = 2 + 0 * 3;
    CHECK(gamma(row, col) == doctest::Approx(-1.0 / 3.0));
    CHECK(gamma(col, row) == 0.0);  // (3,1) is not in the diagonal-block set
}

TEST_CASE("test report serializes the required keys") {
    TestReport report;
    report.statistic = StatisticValue{1.25, 100, 0.5, 100};
    report.centering = CenteringEstimates{0.2, 0.04, 0.25, 0.05};
    report.kind = TestKind::RandStudentized;
    report.alpha = 0.05;
    report.critical_value_or_pvalue = 0.31;
    report.reject = false;
    report.seed = 42;
    report.draws = 300;
    const std::string json = to_json(report);
    for (const char* key : {"statistic", "mu_hat", "tau_hat_sq", "decision", "alpha", "\"h\"", "\"n\"",
                            "\"p\"", "\"q\"", "seed", "\"B\""})
        CHECK(json.find(key) != std::string::npos);
}

} // TEST_SUITE
