#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spectest/spectral.hpp"

namespace spectest {

/// A smoothing kernel: bounded, symmetric, nonnegative, supported on
/// [-pi, pi] and normalized so that Int K = 2*pi. The two constants drive
/// the asymptotic centering and scale of the L2 statistic:
///   mean_constant     = (1/2pi) Int K^2(v) dv
///   variance_constant = (1/pi^2) Int_{-2pi}^{2pi} ( Int K(v) K(v+z) dv )^2 dz
struct Kernel {
    std::string name;
    std::function<double(double)> evaluate;
    double mean_constant = 0.0;
    double variance_constant = 0.0;
};

/// Bartlett-Priestley kernel K(w) = (3/2)(1 - (w/pi)^2) on [-pi, pi].
/// Constants are set to their closed forms 6/5 and 2672*pi/385.
[[nodiscard]] Kernel bartlett_priestley();

/// Raised-cosine kernel K(w) = (pi/2) cos(w/2) on [-pi, pi]; constants are
/// computed by quadrature at construction.
[[nodiscard]] Kernel cosine_kernel();

/// Kernel lookup for config / CLI ("bartlett-priestley", "cosine").
[[nodiscard]] Kernel kernel_by_name(std::string_view name);

/// Numeric checks of the kernel invariants (mass 2*pi within 1e-6, symmetry,
/// nonnegativity, constants within 1e-6 relative). Throws on violation.
void validate(const Kernel& kernel);

/// Quadrature values used by validate(); exposed for tests.
[[nodiscard]] double numeric_kernel_mass(const Kernel& kernel);
[[nodiscard]] double numeric_mean_constant(const Kernel& kernel);
[[nodiscard]] double numeric_variance_constant(const Kernel& kernel);

enum class BandwidthSource { Fixed, CrossValidated };

struct Bandwidth {
    double value = 0.0;
    BandwidthSource source = BandwidthSource::Fixed;
    double multiplier = 1.0;  // c, when cross-validated
};

/// Scaled kernel weights on the Fourier grid: weights[m] = K_h(wrap(2*pi*m/n))
/// with K_h(x) = K(x/h)/h and the argument wrapped into (-pi, pi]. The table
/// is circulant in the index difference between evaluation and sample
/// frequency and symmetric (weights[m] == weights[n-m]).
[[nodiscard]] std::vector<double> smoothing_weights(const Kernel& kernel, double h, int n);

/// Throws std::invalid_argument for h <= 0 or h > pi; warns on stderr when h
/// violates the h^2*n >= 1 / h^{9/2}*n < 10 rate heuristics. Intended to run
/// once per user-facing test, not in inner loops.
void check_bandwidth(double h, int n);

/// Kernel spectral density estimate f_hat(w) = (1/n) sum_k K_h(w - w_k) I(w_k)
/// evaluated on the field's own grid. Nonnegative weights preserve Hermitian
/// positive semidefiniteness.
[[nodiscard]] SpectralMatrixField smooth(const SpectralMatrixField& field, const Kernel& kernel, double h);

/// Same estimate evaluated on an arbitrary grid (general fallback path).
[[nodiscard]] SpectralMatrixField smooth(const SpectralMatrixField& field, const Kernel& kernel, double h,
                                         const FrequencyGrid& eval_grid);

/// Point evaluation of the kernel estimator at an arbitrary frequency.
[[nodiscard]] Eigen::MatrixXcd smooth_at(const SpectralMatrixField& field, const Kernel& kernel, double h,
                                         double omega);

/// Default candidate bandwidths: 15 log-spaced values in [4*pi/n, pi/2].
[[nodiscard]] std::vector<double> default_bandwidth_grid(int n);

/// Leave-two-out Whittle criterion
///   CV(h) = sum_{j=1}^{d} sum_{k=1}^{floor((n-1)/2)}
///           log f_hat_jj^{(-k)}(w_k) + I_jj(w_k) / f_hat_jj^{(-k)}(w_k),
/// where f_hat^{(-k)} omits the ordinates at indices +-k and renormalizes the
/// remaining weights to sum to one. Nonpositive leave-out estimates make the
/// score +infinity.
[[nodiscard]] double whittle_cv_score(const SpectralMatrixField& pgram, const Kernel& kernel, double h);

/// Selects the candidate with the smallest Whittle criterion (ties broken
/// toward the smaller bandwidth). Candidate scores may be evaluated by
/// several workers; the selection is independent of the worker count.
[[nodiscard]] Bandwidth cross_validate_bandwidth(const TimeSeriesPanel& panel, const Kernel& kernel,
                                                 std::span<const double> candidates, int workers = 1);

} // namespace spectest
