#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spectest/kernel.hpp"
#include "spectest/spectral.hpp"

namespace spectest {

/// Value of the L2 equality statistic together with the quantities that fix
/// its discretization.
struct StatisticValue {
    double value = 0.0;
    int sample_size = 0;
    double bandwidth = 0.0;
    int grid_size = 0;
};

/// Plug-in centering and scale estimates for the statistic and for its
/// randomized counterpart.
struct CenteringEstimates {
    double mu_hat = 0.0;
    double tau_hat_sq = 0.0;
    double mu_hat_star = 0.0;
    double tau_hat_star_sq = 0.0;
};

enum class TestKind { Asymptotic, RandUncentered, RandCentered, RandStudentized };

[[nodiscard]] std::string test_kind_name(TestKind kind);
[[nodiscard]] TestKind test_kind_by_name(std::string_view name);

/// Outcome of one test run: the decision, its critical value or Monte Carlo
/// p-value, and the provenance needed to reproduce it.
struct TestReport {
    StatisticValue statistic;
    CenteringEstimates centering;
    TestKind kind = TestKind::Asymptotic;
    double alpha = 0.05;
    double critical_value_or_pvalue = 0.0;
    bool reject = false;
    int block_dim = 1;
    int groups = 2;
    std::uint64_t seed = 0;
    int draws = 0;  // B; 0 for the asymptotic test
    std::string bandwidth_source = "fixed";
};

/// Flat JSON rendering with keys statistic, mu_hat, tau_hat_sq, decision,
/// alpha, h, n, p, q, seed, B (plus kind/p-value metadata).
[[nodiscard]] std::string to_json(const TestReport& report);

/// Standard normal quantile, Wichura's AS 241 rational approximation
/// (absolute error well below 1e-8).
[[nodiscard]] double normal_quantile(double prob);

/// The L2 equality statistic
///   T = n h^{1/2} Int sum_r || F_hat_rr(w) - F_tilde(w) ||^2 dw,
/// with F_hat the kernel estimate built from the periodogram field, F_tilde
/// the pooled diagonal average and the integral taken as the Riemann sum over
/// the n Fourier frequencies with weight 2*pi/n. Computed through the same
/// summation path as the randomized statistic, so an identity permutation
/// family reproduces it bit for bit.
[[nodiscard]] double l2_statistic(const SpectralMatrixField& pgram, const Kernel& kernel, double h,
                                  int block_dim, int groups);

/// Same statistic assembled from an already smoothed field; agrees with
/// l2_statistic up to floating-point reassociation (within 1e-12 relative).
[[nodiscard]] double l2_statistic_from_smoothed(const SpectralMatrixField& smoothed, int block_dim,
                                                int groups, double h);

/// Centering estimate
///   mu_hat = A Int (q-1)|tr F_tilde|^2 - (1/q) sum_{j1 != j2} |tr F_hat_{j1j2}|^2 dw
/// with A the kernel mean constant.
[[nodiscard]] double estimate_mu_hat(const SpectralMatrixField& smoothed, const Kernel& kernel,
                                     int block_dim, int groups);

/// Scale estimate: the null-hypothesis plug-in of the limiting variance,
///   tau_hat^2 = B Int (1/q^2) sum_{j1..j4} (-1+q d_{j1j2})(-1+q d_{j3j4})
///               |tr(G_{j1j3} conj(G_{j2j4})^T)|^2 dw,
/// where G substitutes the pooled average for every diagonal block and the
/// smoothed estimate for off-diagonal blocks (pooled_plugin = true). The raw
/// plug-in with G = F_hat everywhere is available for sensitivity checks.
/// Negative values are clamped to zero with a warning.
[[nodiscard]] double estimate_tau_sq(const SpectralMatrixField& smoothed, const Kernel& kernel,
                                     int block_dim, int groups, bool pooled_plugin = true);

/// Gaussian benchmark test: rejects when (T - h^{-1/2} mu_hat)/tau_hat
/// exceeds the standard normal (1-alpha)-quantile. Throws std::domain_error
/// when tau_hat_sq is zero.
[[nodiscard]] TestReport asymptotic_test(const StatisticValue& statistic,
                                         const CenteringEstimates& centering, double alpha);

/// Pointwise and aggregate value of the exactness condition for the
/// uncentered/centered randomization tests: identically zero iff those tests
/// are asymptotically exact and equivalent to the benchmark test.
struct ExactnessDiagnostic {
    std::vector<double> pointwise;   // one value per grid frequency
    double aggregate = 0.0;          // (2*pi/n) sum_k |pointwise_k|
};

[[nodiscard]] ExactnessDiagnostic exactness_condition(const SpectralMatrixField& field, int block_dim,
                                                      int groups);

/// The d^2 x d^2 coupling matrix of the local-power quadratic form, built
/// literally from the case rule over vectorized entries: (q-1)/q on matching
/// in-block entries, -1/q when both absolute index offsets agree and are a
/// positive multiple of p (row entry in a diagonal block), 0 otherwise.
/// Exposed for inspection.
[[nodiscard]] Eigen::MatrixXd detection_shift_coupling(int block_dim, int groups);

/// Detection shift nu = Int vec(conj g)^T Gamma vec(g) dw of a local spectral
/// perturbation g (Hermitian at each grid frequency; validated).
[[nodiscard]] double detection_shift(std::span<const Eigen::MatrixXcd> perturbation,
                                     const FrequencyGrid& grid, int block_dim, int groups);

} // namespace spectest
