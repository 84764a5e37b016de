#include "spectest/equality.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include <json.hpp>

#include "spectest/randomize.hpp"

namespace spectest {

std::string test_kind_name(TestKind kind) {
    switch (kind) {
        case TestKind::Asymptotic: return "phi_n";
        case TestKind::RandUncentered: return "phi_n_star";
        case TestKind::RandCentered: return "phi_cent_star";
        case TestKind::RandStudentized: return "phi_stud_star";
    }
    return "unknown";
}

TestKind test_kind_by_name(std::string_view name) {
    if (name == "phi_n" || name == "asymptotic") return TestKind::Asymptotic;
    if (name == "phi_n_star" || name == "uncentered") return TestKind::RandUncentered;
    if (name == "phi_cent_star" || name == "centered") return TestKind::RandCentered;
    if (name == "phi_stud_star" || name == "studentized") return TestKind::RandStudentized;
    throw std::invalid_argument("unknown test kind '" + std::string(name) + "'");
}

std::string to_json(const TestReport& report) {
    nlohmann::ordered_json j;
    j["statistic"] = report.statistic.value;
    j["mu_hat"] = report.centering.mu_hat;
    j["tau_hat_sq"] = report.centering.tau_hat_sq;
    j["mu_hat_star"] = report.centering.mu_hat_star;
    j["tau_hat_star_sq"] = report.centering.tau_hat_star_sq;
    j["kind"] = test_kind_name(report.kind);
    j["decision"] = report.reject ? "reject" : "retain";
    j["alpha"] = report.alpha;
    j[report.kind == TestKind::Asymptotic ? "critical_value" : "pvalue"] = report.critical_value_or_pvalue;
    j["h"] = report.statistic.bandwidth;
    j["n"] = report.statistic.sample_size;
    j["p"] = report.block_dim;
    j["q"] = report.groups;
    j["seed"] = report.seed;
    j["B"] = report.draws;
    j["bandwidth_source"] = report.bandwidth_source;
    return j.dump(2);
}

double normal_quantile(double prob) {
    // Wichura's algorithm AS 241, PPND16.
    if (!(prob > 0.0 && prob < 1.0)) throw std::invalid_argument("normal_quantile: prob must be in (0,1)");
    const double q = prob - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    r = q < 0.0 ? prob : 1.0 - prob;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                      2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                    3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
                  4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                      1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                    6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
                  2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                      1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                    2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
                  5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
                (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                      1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                    1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                  5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -value : value;
}

double l2_statistic(const SpectralMatrixField& pgram, const Kernel& kernel, double h, int block_dim,
                    int groups) {
    return l2_statistic_randomized(pgram, identity_family(groups, pgram.grid.size()), kernel, h,
                                   block_dim, groups);
}

double l2_statistic_from_smoothed(const SpectralMatrixField& smoothed, int block_dim, int groups,
                                  double h) {
    const int n = smoothed.grid.size();
    if (smoothed.dim() != block_dim * groups)
        throw std::invalid_argument("l2_statistic_from_smoothed: dimension mismatch");
    const auto pooled = pooled_diagonal(smoothed, block_dim, groups);
    double total = 0.0;
    for (int pos = 0; pos < n; ++pos) {
        const auto& m = smoothed.at(pos);
        for (int r = 0; r < groups; ++r) {
            const Eigen::MatrixXcd dev =
                m.block(r * block_dim, r * block_dim, block_dim, block_dim) - pooled.at(pos);
            total += dev.squaredNorm();
        }
    }
    return static_cast<double>(n) * std::sqrt(h) * (kTwoPi / n) * total;
}

double estimate_mu_hat(const SpectralMatrixField& smoothed, const Kernel& kernel, int block_dim,
                       int groups) {
    const int n = smoothed.grid.size();
    const int p = block_dim;
    const int q = groups;
    if (smoothed.dim() != p * q) throw std::invalid_argument("estimate_mu_hat: dimension mismatch");

    double acc = 0.0;
    for (int pos = 0; pos < n; ++pos) {
        const auto& m = smoothed.at(pos);
        std::complex<double> pooled_trace = 0.0;
        for (int j = 0; j < q; ++j)
            for (int a = 0; a < p; ++a) pooled_trace += m(j * p + a, j * p + a);
        pooled_trace /= static_cast<double>(q);

        double cross = 0.0;
        for (int j1 = 0; j1 < q; ++j1)
            for (int j2 = 0; j2 < q; ++j2) {
                if (j1 == j2) continue;
                std::complex<double> tr = 0.0;
                for (int a = 0; a < p; ++a) tr += m(j1 * p + a, j2 * p + a);
                cross += std::norm(tr);
            }
        acc += (q - 1) * std::norm(pooled_trace) - cross / q;
    }
    return kernel.mean_constant * (kTwoPi / n) * acc;
}

double estimate_tau_sq(const SpectralMatrixField& smoothed, const Kernel& kernel, int block_dim,
                       int groups, bool pooled_plugin) {
    const int n = smoothed.grid.size();
    const int p = block_dim;
    const int q = groups;
    if (smoothed.dim() != p * q) throw std::invalid_argument("estimate_tau_sq: dimension mismatch");

    const auto pooled = pooled_diagonal(smoothed, p, q);
    auto plugin_block = [&](const Eigen::MatrixXcd& m, int pos, int j, int l) -> Eigen::MatrixXcd {
        if (pooled_plugin && j == l) return pooled.at(pos);
        return m.block(j * p, l * p, p, p);
    };

    double acc = 0.0;
    for (int pos = 0; pos < n; ++pos) {
        const auto& m = smoothed.at(pos);
        for (int j1 = 0; j1 < q; ++j1)
            for (int j2 = 0; j2 < q; ++j2) {
                const double w12 = (j1 == j2) ? (q - 1.0) : -1.0;
                for (int j3 = 0; j3 < q; ++j3)
                    for (int j4 = 0; j4 < q; ++j4) {
                        const double w34 = (j3 == j4) ? (q - 1.0) : -1.0;
                        const auto inner = frobenius_inner(plugin_block(m, pos, j1, j3),
                                                           plugin_block(m, pos, j2, j4));
                        acc += w12 * w34 * std::norm(inner);
                    }
            }
    }
    double value = kernel.variance_constant * (kTwoPi / n) * acc / (static_cast<double>(q) * q);
    if (value < 0.0) {
        std::cerr << "spectest: warning: variance estimate " << value << " clamped to 0\n";
        value = 0.0;
    }
    return value;
}

TestReport asymptotic_test(const StatisticValue& statistic, const CenteringEstimates& centering,
                           double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0, 1)");
    if (centering.tau_hat_sq < 0.0) throw std::invalid_argument("tau_hat_sq must be nonnegative");
    if (centering.tau_hat_sq == 0.0)
        throw std::domain_error("asymptotic_test: degenerate scale (tau_hat_sq = 0)");

    const double scale = std::sqrt(centering.tau_hat_sq);
    const double standardized =
        (statistic.value - centering.mu_hat / std::sqrt(statistic.bandwidth)) / scale;
    const double quantile = normal_quantile(1.0 - alpha);

    TestReport report;
    report.statistic = statistic;
    report.centering = centering;
    report.kind = TestKind::Asymptotic;
    report.alpha = alpha;
    report.critical_value_or_pvalue = quantile;
    report.reject = standardized > quantile;
    return report;
}

ExactnessDiagnostic exactness_condition(const SpectralMatrixField& field, int block_dim, int groups) {
    const int n = field.grid.size();
    const int p = block_dim;
    const int q = groups;
    if (field.dim() != p * q) throw std::invalid_argument("exactness_condition: dimension mismatch");

    ExactnessDiagnostic diag;
    diag.pointwise.resize(static_cast<std::size_t>(n), 0.0);
    const double c1 = std::pow(q - 1.0, 3) - 1.0;
    const double c2 = std::pow(q - 1.0, 2) + 1.0;
    const double c3 = q - 2.0;

    for (int pos = 0; pos < n; ++pos) {
        const auto& m = field.at(pos);
        auto blk = [&](int j, int l) { return m.block(j * p, l * p, p, p); };

        double sum1 = 0.0;
        for (int j1 = 0; j1 < q; ++j1)
            for (int j3 = 0; j3 < q; ++j3) {
                if (j1 == j3) continue;
                sum1 += std::norm(frobenius_inner(blk(j1, j3), blk(j1, j3)));
            }

        double sum2 = 0.0;
        for (int j1 = 0; j1 < q; ++j1)
            for (int j3 = 0; j3 < q; ++j3)
                for (int j4 = 0; j4 < q; ++j4) {
                    if (j1 == j3 || j1 == j4 || j3 == j4) continue;
                    sum2 += std::norm(frobenius_inner(blk(j1, j3), blk(j1, j4)));
                }

        double sum3 = 0.0;
        for (int j1 = 0; j1 < q; ++j1)
            for (int j2 = 0; j2 < q; ++j2)
                for (int j3 = 0; j3 < q; ++j3)
                    for (int j4 = 0; j4 < q; ++j4) {
                        if (j1 == j3 || j2 == j4 || j1 == j2 || j3 == j4) continue;
                        sum3 += std::norm(frobenius_inner(blk(j1, j3), blk(j2, j4)));
                    }

        diag.pointwise[static_cast<std::size_t>(pos)] = c1 * sum1 - 2.0 * c2 * sum2 + c3 * sum3;
        diag.aggregate += std::fabs(diag.pointwise[static_cast<std::size_t>(pos)]);
    }
    diag.aggregate *= kTwoPi / n;
    return diag;
}

Eigen::MatrixXd detection_shift_coupling(int block_dim, int groups) {
    const int p = block_dim;
    const int q = groups;
    const int d = p * q;
    auto in_block_set = [&](int i, int j) { return (i / p) == (j / p); };  // 0-based entries

    Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            if (!in_block_set(i, j)) continue;
            const int row = i + j * d;
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    const int col = k + l * d;
                    const int di = std::abs(i - k);
                    const int dj = std::abs(j - l);
                    if (di == 0 && dj == 0)
                        coupling(row, col) = (q - 1.0) / q;
                    else if (di == dj && di % p == 0 && di > 0)
                        coupling(row, col) = -1.0 / q;
                }
        }
    return coupling;
}

double detection_shift(std::span<const Eigen::MatrixXcd> perturbation, const FrequencyGrid& grid,
                       int block_dim, int groups) {
    const int d = block_dim * groups;
    if (static_cast<int>(perturbation.size()) != grid.size())
        throw std::invalid_argument("detection_shift: one matrix per grid frequency required");

    const Eigen::MatrixXd coupling = detection_shift_coupling(block_dim, groups);
    double acc = 0.0;
    for (const auto& g : perturbation) {
        if (g.rows() != d || g.cols() != d)
            throw std::invalid_argument("detection_shift: matrix dimension mismatch");
        if ((g - g.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, g.cwiseAbs().maxCoeff()))
            throw std::invalid_argument("detection_shift: perturbation must be Hermitian");
        const Eigen::Map<const Eigen::VectorXcd> v(g.data(), d * d);  // column-stacked
        const Eigen::VectorXd re = v.real();
        const Eigen::VectorXd im = v.imag();
        acc += re.dot(coupling * re) + im.dot(coupling * im);
    }
    return (kTwoPi / grid.size()) * acc;
}

} // namespace spectest
