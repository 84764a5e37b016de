#include "spectest/models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "spectest/rng.hpp"

namespace spectest {

std::string innovation_name(Innovation law) {
    switch (law) {
        case Innovation::Gaussian: return "gaussian";
        case Innovation::Logistic: return "logistic";
        case Innovation::DoubleExponential: return "double-exponential";
    }
    return "unknown";
}

Innovation innovation_by_name(std::string_view name) {
    if (name == "gaussian" || name == "normal") return Innovation::Gaussian;
    if (name == "logistic") return Innovation::Logistic;
    if (name == "double-exponential" || name == "laplace") return Innovation::DoubleExponential;
    throw std::invalid_argument("unknown innovation '" + std::string(name) + "'");
}

namespace {

double draw_innovation(RngEngine& rng, Innovation law) {
    switch (law) {
        case Innovation::Gaussian: return rng.normal();
        case Innovation::Logistic: return rng.logistic(true);
        case Innovation::DoubleExponential: return rng.double_exponential(true);
    }
    return 0.0;
}

double spectral_radius(const Eigen::MatrixXd& m) {
    return Eigen::EigenSolver<Eigen::MatrixXd>(m, false).eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& cov, const char* what) {
    if (cov.rows() != cov.cols() || (cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument(std::string(what) + ": covariance must be symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument(std::string(what) + ": covariance must be positive definite");
    return llt.matrixL();
}

} // namespace

void validate(const ModelSpec& spec) {
    if (spec.burn_in < 0) throw std::invalid_argument("model: burn_in must be nonnegative");
    std::visit(
        [&](const auto& params) {
            using T = std::decay_t<decltype(params)>;
            if constexpr (std::is_same_v<T, Var1Params>) {
                if (params.transition.rows() != params.transition.cols())
                    throw std::invalid_argument("VAR(1): transition matrix must be square");
                if (spectral_radius(params.transition) >= 1.0)
                    throw std::invalid_argument("VAR(1): spectral radius must be below 1");
                (void)cholesky_factor(params.noise_cov, "VAR(1)");
            } else if constexpr (std::is_same_v<T, Vma1Params>) {
                if (params.ma_coeff.rows() != params.ma_coeff.cols())
                    throw std::invalid_argument("VMA(1): coefficient matrix must be square");
                (void)cholesky_factor(params.noise_cov, "VMA(1)");
            } else if constexpr (std::is_same_v<T, Garch11Params>) {
                if (params.components.size() < 2)
                    throw std::invalid_argument("GARCH(1,1): need at least 2 components");
                for (const auto& c : params.components) {
                    if (!(c.omega > 0.0) || c.arch < 0.0 || c.garch < 0.0)
                        throw std::invalid_argument("GARCH(1,1): need omega > 0 and a, b >= 0");
                    if (c.arch + c.garch >= 1.0)
                        throw std::invalid_argument("GARCH(1,1): need a + b < 1");
                }
            } else if constexpr (std::is_same_v<T, Tar1Params>) {
                if (params.coeffs.size() < 2)
                    throw std::invalid_argument("TAR(1): need at least 2 components");
                for (const auto& c : params.coeffs)
                    if (std::fabs(c[0]) >= 1.0 || std::fabs(c[1]) >= 1.0)
                        throw std::invalid_argument("TAR(1): regime coefficients must lie in (-1, 1)");
            } else if constexpr (std::is_same_v<T, Rca1Params>) {
                if (params.coeff_sd.size() < 2)
                    throw std::invalid_argument("RCA(1): need at least 2 components");
                for (double sd : params.coeff_sd)
                    if (sd < 0.0 || sd >= 1.0)
                        throw std::invalid_argument("RCA(1): coefficient sd must lie in [0, 1)");
            }
        },
        spec.family);
}

namespace {

Eigen::MatrixXd diag2(double a, double b) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

Eigen::MatrixXd mat2(double a11, double a12, double a21, double a22) {
    Eigen::MatrixXd m(2, 2);
    m << a11, a12, a21, a22;
    return m;
}

} // namespace

ModelSpec preset(std::string_view name) {
    std::string key(name);
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });

    ModelSpec spec;
    const Eigen::MatrixXd identity2 = Eigen::MatrixXd::Identity(2, 2);
    const Eigen::MatrixXd sigma2 = mat2(1.0, 0.5, 0.5, 1.0);

    if (key == "AR1") spec.family = Var1Params{diag2(0.1, 0.1), identity2};
    else if (key == "AR2") spec.family = Var1Params{diag2(0.5, 0.5), identity2};
    else if (key == "AR3") spec.family = Var1Params{diag2(0.9, 0.9), identity2};
    else if (key == "AR4") spec.family = Var1Params{diag2(0.9, 0.8), identity2};
    else if (key == "AR5") spec.family = Var1Params{diag2(0.9, 0.7), identity2};
    else if (key == "AR6") spec.family = Var1Params{diag2(0.9, 0.6), identity2};
    else if (key == "MA1") spec.family = Vma1Params{mat2(0.1, 0.5, 0.5, 0.1), sigma2};
    else if (key == "MA2") spec.family = Vma1Params{mat2(0.5, 0.5, 0.5, 0.5), sigma2};
    else if (key == "MA3") spec.family = Vma1Params{mat2(0.9, 0.5, 0.5, 0.9), sigma2};
    else if (key == "MA4") spec.family = Vma1Params{mat2(0.5, 0.5, 0.5, 0.7), sigma2};
    else if (key == "MA5") spec.family = Vma1Params{mat2(0.5, 0.5, 0.5, 0.8), sigma2};
    else if (key == "MA6") spec.family = Vma1Params{mat2(0.5, 0.5, 0.5, 0.9), sigma2};
    else if (key == "GARCH1") spec.family = Garch11Params{{{0.01, 0.1, 0.2}, {0.01, 0.1, 0.2}}};
    else if (key == "GARCH2") spec.family = Garch11Params{{{0.01, 0.1, 0.3}, {0.01, 0.1, 0.3}}};
    else if (key == "GARCH3") spec.family = Garch11Params{{{0.01, 0.1, 0.4}, {0.01, 0.1, 0.4}}};
    else if (key == "GARCH4") spec.family = Garch11Params{{{0.01, 0.1, 0.2}, {0.01, 0.1, 0.3}}};
    else if (key == "GARCH5") spec.family = Garch11Params{{{0.01, 0.1, 0.2}, {0.01, 0.1, 0.4}}};
    else if (key == "GARCH6") spec.family = Garch11Params{{{0.01, 0.1, 0.2}, {0.01, 0.1, 0.5}}};
    else if (key == "TAR1") spec.family = Tar1Params{{{-0.2, 0.1}, {-0.2, 0.1}}};
    else if (key == "TAR2") spec.family = Tar1Params{{{-0.3, 0.2}, {-0.3, 0.2}}};
    else if (key == "TAR3") spec.family = Tar1Params{{{-0.4, 0.3}, {-0.4, 0.3}}};
    else if (key == "TAR4") spec.family = Tar1Params{{{-0.2, 0.1}, {-0.3, 0.2}}};
    else if (key == "TAR5") spec.family = Tar1Params{{{-0.2, 0.1}, {-0.4, 0.3}}};
    else if (key == "TAR6") spec.family = Tar1Params{{{-0.2, 0.1}, {-0.5, 0.4}}};
    else if (key == "RCA1") spec.family = Rca1Params{{0.1, 0.1}};
    else if (key == "RCA2") spec.family = Rca1Params{{0.2, 0.2}};
    else if (key == "RCA3") spec.family = Rca1Params{{0.3, 0.3}};
    else throw std::invalid_argument("unknown model preset '" + std::string(name) + "'");

    validate(spec);
    return spec;
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (int i = 1; i <= 6; ++i) names.push_back("AR" + std::to_string(i));
    for (int i = 1; i <= 6; ++i) names.push_back("MA" + std::to_string(i));
    for (int i = 1; i <= 6; ++i) names.push_back("GARCH" + std::to_string(i));
    for (int i = 1; i <= 6; ++i) names.push_back("TAR" + std::to_string(i));
    for (int i = 1; i <= 3; ++i) names.push_back("RCA" + std::to_string(i));
    return names;
}

namespace {

Eigen::VectorXd correlated_innovation(RngEngine& rng, Innovation law, const Eigen::MatrixXd& chol) {
    Eigen::VectorXd z(chol.rows());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = draw_innovation(rng, law);
    return chol * z;
}

} // namespace

TimeSeriesPanel simulate(const ModelSpec& spec, int n, std::uint64_t seed) {
    if (n < 4) throw std::invalid_argument("simulate: need n >= 4");
    validate(spec);
    RngEngine rng(seed);

    TimeSeriesPanel panel;
    panel.block_dim = 1;

    std::visit(
        [&](const auto& params) {
            using T = std::decay_t<decltype(params)>;
            if constexpr (std::is_same_v<T, Var1Params>) {
                const int d = static_cast<int>(params.transition.rows());
                const Eigen::MatrixXd chol = cholesky_factor(params.noise_cov, "VAR(1)");
                panel.data.resize(n, d);
                Eigen::VectorXd state = Eigen::VectorXd::Zero(d);
                for (int t = 0; t < spec.burn_in + n; ++t) {
                    state = params.transition * state + correlated_innovation(rng, spec.innovation, chol);
                    if (t >= spec.burn_in) panel.data.row(t - spec.burn_in) = state.transpose();
                }
            } else if constexpr (std::is_same_v<T, Vma1Params>) {
                const int d = static_cast<int>(params.ma_coeff.rows());
                const Eigen::MatrixXd chol = cholesky_factor(params.noise_cov, "VMA(1)");
                panel.data.resize(n, d);
                // moving average of order one: a single presample innovation suffices
                Eigen::VectorXd previous = correlated_innovation(rng, spec.innovation, chol);
                for (int t = 0; t < n; ++t) {
                    const Eigen::VectorXd current = correlated_innovation(rng, spec.innovation, chol);
                    panel.data.row(t) = (params.ma_coeff * previous + current).transpose();
                    previous = current;
                }
            } else if constexpr (std::is_same_v<T, Garch11Params>) {
                const int d = static_cast<int>(params.components.size());
                panel.data.resize(n, d);
                for (int i = 0; i < d; ++i) {
                    const auto& c = params.components[static_cast<std::size_t>(i)];
                    // recursion starts at the stationary variance
                    double variance = c.omega / (1.0 - c.arch - c.garch);
                    double x = 0.0;
                    for (int t = 0; t < spec.burn_in + n; ++t) {
                        variance = c.omega + c.arch * x * x + c.garch * variance;
                        x = std::sqrt(variance) * draw_innovation(rng, spec.innovation);
                        if (t >= spec.burn_in) panel.data(t - spec.burn_in, i) = x;
                    }
                }
            } else if constexpr (std::is_same_v<T, Tar1Params>) {
                const int d = static_cast<int>(params.coeffs.size());
                panel.data.resize(n, d);
                for (int i = 0; i < d; ++i) {
                    const auto& c = params.coeffs[static_cast<std::size_t>(i)];
                    double x = 0.0;
                    for (int t = 0; t < spec.burn_in + n; ++t) {
                        x = (x < 0.0 ? c[0] : c[1]) * x + draw_innovation(rng, spec.innovation);
                        if (t >= spec.burn_in) panel.data(t - spec.burn_in, i) = x;
                    }
                    // the asymmetric regimes shift the level; center the kept stretch
                    panel.data.col(i).array() -= panel.data.col(i).mean();
                }
            } else if constexpr (std::is_same_v<T, Rca1Params>) {
                const int d = static_cast<int>(params.coeff_sd.size());
                panel.data.resize(n, d);
                for (int i = 0; i < d; ++i) {
                    const double sd = params.coeff_sd[static_cast<std::size_t>(i)];
                    double x = 0.0;
                    for (int t = 0; t < spec.burn_in + n; ++t) {
                        x = sd * rng.normal() * x + draw_innovation(rng, spec.innovation);
                        if (t >= spec.burn_in) panel.data(t - spec.burn_in, i) = x;
                    }
                }
            }
        },
        spec.family);

    panel.groups = panel.dim();
    validate(panel);
    return panel;
}

} // namespace spectest
