#pragma once

#include <cstdint>
#include <vector>

#include "spectest/equality.hpp"
#include "spectest/kernel.hpp"
#include "spectest/panel.hpp"
#include "spectest/spectral.hpp"

namespace spectest {

/// Frequency-indexed random permutations pi_0, ..., pi_{floor(n/2)} of the
/// group labels {1..q} (stored 0-based), extended to all integer indices by
/// pi_{-k} = pi_k and pi_{k+s*n} = pi_k, matching the symmetry and
/// periodicity of the spectral matrices.
class FrequencyPermutationFamily {
public:
    FrequencyPermutationFamily(int groups, int sample_size, std::vector<std::vector<int>> base);

    [[nodiscard]] int groups() const noexcept { return q_; }
    [[nodiscard]] int sample_size() const noexcept { return n_; }
    [[nodiscard]] int base_size() const noexcept { return static_cast<int>(base_.size()); }

    /// Permutation attached to an arbitrary integer frequency index,
    /// resolved through the extension rule.
    [[nodiscard]] const std::vector<int>& at(int k) const noexcept;

private:
    int q_ = 0;
    int n_ = 0;
    std::vector<std::vector<int>> base_;  // floor(n/2)+1 permutations of 0..q-1
};

/// The family of identity permutations (reproduces the unpermuted statistic).
[[nodiscard]] FrequencyPermutationFamily identity_family(int groups, int sample_size);

/// Independent uniform permutations via seeded Fisher-Yates; deterministic
/// given the seed. Requires groups >= 2.
[[nodiscard]] FrequencyPermutationFamily sample_family(int groups, int sample_size, std::uint64_t seed);

/// One randomization draw.
struct RandomizationDraw {
    double t_star = 0.0;
};

/// The randomized statistic: the L2 statistic recomputed with the diagonal
/// periodogram blocks permuted per frequency, the pooled average unchanged.
/// Shares its summation path with l2_statistic.
[[nodiscard]] double l2_statistic_randomized(const SpectralMatrixField& pgram,
                                             const FrequencyPermutationFamily& family,
                                             const Kernel& kernel, double h, int block_dim, int groups);

/// Conditional centering of the randomized statistic,
///   mu_hat_star = A Int (1/q) sum_{j1,j2} (-1+q d_{j1j2})
///                 { |tr F_hat_{j1j2}|^2 + tr(F_hat_{j1j1} conj(F_hat_{j2j2})^T) } dw.
[[nodiscard]] double estimate_mu_hat_star(const SpectralMatrixField& smoothed, const Kernel& kernel,
                                          int block_dim, int groups);

/// Conditional scale of the randomized statistic,
///   tau_hat_star^2 = B Int (1/q^2) sum_{j1..j4}
///       (-1 + q d_{j1j3} d_{j2j4} + (q/(q-1))(1-d_{j1j3})(1-d_{j2j4}))
///       { tr(F_{j1j1} conj(F_{j2j2})^T) tr(conj(F_{j3j3}) F_{j4j4}^T)
///         + |tr(F_{j1j3} conj(F_{j2j4})^T)|^2 } dw,
/// clamped at zero with a warning.
[[nodiscard]] double estimate_tau_sq_star(const SpectralMatrixField& smoothed, const Kernel& kernel,
                                          int block_dim, int groups);

/// Add-one Monte Carlo p-value (1 + #{draws >= observed}) / (B + 1); ties
/// count toward non-rejection.
[[nodiscard]] double mc_pvalue(double observed, std::span<const double> draws);

struct BandwidthSpec {
    bool cross_validate = true;
    double fixed_value = 0.0;   // used when cross_validate == false
    double multiplier = 1.0;    // c, applied to the cross-validated bandwidth
};

struct RandomizationConfig {
    TestKind kind = TestKind::RandUncentered;  // uncentered / centered / studentized
    int draws = 300;                           // B >= 19
    double alpha = 0.05;
    std::uint64_t seed = 0;
    Kernel kernel;                             // defaults to bartlett_priestley()
    BandwidthSpec bandwidth;
    int workers = 1;
    bool demean_first = true;
    bool literal_count_rule = false;  // reject iff (1/B) #{T > T*_b} > alpha instead of the
                                      // add-one p-value; kept for compatibility only
    bool pooled_plugin_tau = true;

    RandomizationConfig();
};

/// Full randomization test pipeline: demean, periodogram, bandwidth, observed
/// statistic, B seeded draws (one child generator per draw index, so the
/// result is identical for any worker count), Monte Carlo p-value and
/// decision. Throws std::invalid_argument for B < 19 and std::domain_error
/// when a studentized scale estimate is zero.
[[nodiscard]] TestReport run_randomization_test(const TimeSeriesPanel& panel,
                                                const RandomizationConfig& config);

} // namespace spectest
