#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "spectest/panel.hpp"

namespace spectest {

enum class Innovation { Gaussian, Logistic, DoubleExponential };

[[nodiscard]] std::string innovation_name(Innovation law);
[[nodiscard]] Innovation innovation_by_name(std::string_view name);

/// X_t = A X_{t-1} + e_t with e_t ~ (0, Sigma). Requires spectral radius of
/// the transition matrix < 1 and Sigma symmetric positive definite.
struct Var1Params {
    Eigen::MatrixXd transition;
    Eigen::MatrixXd noise_cov;
};

/// X_t = B e_{t-1} + e_t with e_t ~ (0, Sigma).
struct Vma1Params {
    Eigen::MatrixXd ma_coeff;
    Eigen::MatrixXd noise_cov;
};

/// Independent univariate GARCH(1,1) components
/// X_{t,i} = s_{t,i} e_{t,i}, s_{t,i}^2 = omega + a X_{t-1,i}^2 + b s_{t-1,i}^2.
/// Requires omega > 0, a, b >= 0 and a + b < 1 per component.
struct Garch11Params {
    struct Component {
        double omega = 0.0;
        double arch = 0.0;   // a
        double garch = 0.0;  // b
    };
    std::vector<Component> components;
};

/// Independent univariate threshold AR(1) components
/// X_{t,i} = a(1) X_{t-1,i} + e_{t,i} if X_{t-1,i} < 0, else a(2) X_{t-1,i} + e_{t,i}.
/// Output is centered by its empirical mean.
struct Tar1Params {
    std::vector<std::array<double, 2>> coeffs;  // (a(1), a(2)) per component
};

/// Independent univariate random-coefficient AR(1) components
/// X_{t,i} = a_{t,i} X_{t-1,i} + e_{t,i} with a_{t,i} ~ N(0, sd^2) i.i.d.
struct Rca1Params {
    std::vector<double> coeff_sd;  // sigma per component
};

struct ModelSpec {
    std::variant<Var1Params, Vma1Params, Garch11Params, Tar1Params, Rca1Params> family;
    Innovation innovation = Innovation::Gaussian;
    int burn_in = 500;
};

/// Throws std::invalid_argument when a stationarity or positivity guard is
/// violated (spectral radius >= 1, Sigma not SPD, a + b >= 1, |a(i)| >= 1,
/// coefficient sd >= 1, burn_in < 0).
void validate(const ModelSpec& spec);

/// Named bivariate presets: AR1..AR6, MA1..MA6, GARCH1..GARCH6, TAR1..TAR6,
/// RCA1..RCA3. Indices 1-3 are null configurations (both sub-series
/// identical), 4-6 alternatives. Innovation defaults to Gaussian.
[[nodiscard]] ModelSpec preset(std::string_view name);
[[nodiscard]] std::vector<std::string> preset_names();

/// Generates burn_in + n steps from a seeded generator and returns the last n
/// as a panel with block_dim = 1 (moving-average models use one exact
/// presample innovation instead of a burn-in). Deterministic given the seed.
[[nodiscard]] TimeSeriesPanel simulate(const ModelSpec& spec, int n, std::uint64_t seed);

} // namespace spectest
