#include "spectest/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "detail_parallel.hpp"

namespace spectest {

namespace {

struct Quadrature {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

// Gauss-Legendre nodes/weights by Newton iteration on the Legendre recurrence.
Quadrature gauss_legendre(int m) {
    Quadrature q;
    q.nodes.resize(static_cast<std::size_t>(m));
    q.weights.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (m + 0.5));
        double deriv = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= m; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            deriv = m * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / deriv;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        q.nodes[static_cast<std::size_t>(i)] = x;
        q.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * deriv * deriv);
    }
    return q;
}

double integrate(const std::function<double(double)>& f, double lo, double hi, const Quadrature& q) {
    const double mid = 0.5 * (hi + lo);
    const double half = 0.5 * (hi - lo);
    double acc = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) acc += q.weights[i] * f(mid + half * q.nodes[i]);
    return acc * half;
}

const Quadrature& quad48() {
    static const Quadrature q = gauss_legendre(48);
    return q;
}

const Quadrature& quad96() {
    static const Quadrature q = gauss_legendre(96);
    return q;
}

} // namespace

Kernel bartlett_priestley() {
    Kernel k;
    k.name = "bartlett-priestley";
    k.evaluate = [](double w) {
        if (std::fabs(w) > kPi) return 0.0;
        const double u = w / kPi;
        return 1.5 * (1.0 - u * u);
    };
    k.mean_constant = 6.0 / 5.0;
    k.variance_constant = 2672.0 * kPi / 385.0;
    return k;
}

Kernel cosine_kernel() {
    Kernel k;
    k.name = "cosine";
    k.evaluate = [](double w) {
        if (std::fabs(w) > kPi) return 0.0;
        return 0.5 * kPi * std::cos(0.5 * w);
    };
    k.mean_constant = numeric_mean_constant(k);
    k.variance_constant = numeric_variance_constant(k);
    return k;
}

Kernel kernel_by_name(std::string_view name) {
    if (name == "bartlett-priestley") return bartlett_priestley();
    if (name == "cosine") return cosine_kernel();
    throw std::invalid_argument("unknown kernel '" + std::string(name) + "'");
}

double numeric_kernel_mass(const Kernel& kernel) {
    // split at 0 to keep any midpoint kink off the quadrature panels
    return integrate(kernel.evaluate, -kPi, 0.0, quad96()) + integrate(kernel.evaluate, 0.0, kPi, quad96());
}

double numeric_mean_constant(const Kernel& kernel) {
    auto sq = [&](double w) { return kernel.evaluate(w) * kernel.evaluate(w); };
    return (integrate(sq, -kPi, 0.0, quad96()) + integrate(sq, 0.0, kPi, quad96())) / kTwoPi;
}

double numeric_variance_constant(const Kernel& kernel) {
    auto convolution = [&](double z) {
        const double lo = std::max(-kPi, -kPi - z);
        const double hi = std::min(kPi, kPi - z);
        if (hi <= lo) return 0.0;
        auto prod = [&](double v) { return kernel.evaluate(v) * kernel.evaluate(v + z); };
        return integrate(prod, lo, hi, quad48());
    };
    auto sq = [&](double z) {
        const double c = convolution(z);
        return c * c;
    };
    return (integrate(sq, -kTwoPi, 0.0, quad96()) + integrate(sq, 0.0, kTwoPi, quad96())) / (kPi * kPi);
}

void validate(const Kernel& kernel) {
    if (!kernel.evaluate) throw std::invalid_argument("kernel: missing evaluation function");
    const double mass = numeric_kernel_mass(kernel);
    if (std::fabs(mass - kTwoPi) > 1e-6)
        throw std::invalid_argument("kernel '" + kernel.name + "': mass " + std::to_string(mass) +
                                    " is not 2*pi");
    for (int i = 0; i <= 200; ++i) {
        const double w = -kPi + kTwoPi * i / 200.0;
        const double v = kernel.evaluate(w);
        if (v < 0.0) throw std::invalid_argument("kernel: negative value");
        if (std::fabs(v - kernel.evaluate(-w)) > 1e-12) throw std::invalid_argument("kernel: not symmetric");
    }
    if (std::fabs(kernel.evaluate(1.5 * kPi)) != 0.0 || std::fabs(kernel.evaluate(-1.5 * kPi)) != 0.0)
        throw std::invalid_argument("kernel: support exceeds [-pi, pi]");
    const double a = numeric_mean_constant(kernel);
    const double b = numeric_variance_constant(kernel);
    if (std::fabs(a - kernel.mean_constant) > 1e-6 * std::fabs(a))
        throw std::invalid_argument("kernel: mean constant inconsistent with quadrature");
    if (std::fabs(b - kernel.variance_constant) > 1e-6 * std::fabs(b))
        throw std::invalid_argument("kernel: variance constant inconsistent with quadrature");
}

std::vector<double> smoothing_weights(const Kernel& kernel, double h, int n) {
    if (!(h > 0.0)) throw std::invalid_argument("bandwidth must be positive");
    if (h > kPi) throw std::invalid_argument("bandwidth must not exceed pi");
    std::vector<double> w(static_cast<std::size_t>(n), 0.0);
    for (int m = 0; m < n; ++m) {
        const double angle = wrap_angle(kTwoPi * static_cast<double>(m) / static_cast<double>(n));
        w[static_cast<std::size_t>(m)] = kernel.evaluate(angle / h) / h;
    }
    return w;
}

void check_bandwidth(double h, int n) {
    if (!(h > 0.0)) throw std::invalid_argument("bandwidth must be positive");
    if (h > kPi) throw std::invalid_argument("bandwidth must not exceed pi");
    const double nn = static_cast<double>(n);
    if (h * h * nn < 1.0)
        std::cerr << "spectest: warning: bandwidth " << h << " undersmooths at n = " << n
                  << " (h^2 n < 1)\n";
    else if (std::pow(h, 4.5) * nn >= 10.0)
        std::cerr << "spectest: warning: bandwidth " << h << " oversmooths at n = " << n
                  << " (h^{9/2} n >= 10)\n";
}

namespace {

// Offsets with nonzero weight, walking outward from 0 so narrow kernels stay cheap.
std::vector<std::pair<int, double>> weight_support(const std::vector<double>& w) {
    const int n = static_cast<int>(w.size());
    std::vector<std::pair<int, double>> support;
    for (int m = 0; m < n; ++m)
        if (w[static_cast<std::size_t>(m)] != 0.0) support.emplace_back(m, w[static_cast<std::size_t>(m)]);
    return support;
}

} // namespace

SpectralMatrixField smooth(const SpectralMatrixField& field, const Kernel& kernel, double h) {
    const int n = field.grid.size();
    const int d = field.dim();
    const auto w = smoothing_weights(kernel, h, n);
    const auto support = weight_support(w);

    SpectralMatrixField out;
    out.grid = field.grid;
    out.kind = FieldKind::Smoothed;
    out.matrices.assign(static_cast<std::size_t>(n), Eigen::MatrixXcd::Zero(d, d));
    for (int e = 0; e < n; ++e) {
        auto& acc = out.matrices[static_cast<std::size_t>(e)];
        for (const auto& [m, weight] : support) {
            int pos = e - m;
            if (pos < 0) pos += n;
            acc += weight * field.at(pos);
        }
        acc /= static_cast<double>(n);
    }
    return out;
}

SpectralMatrixField smooth(const SpectralMatrixField& field, const Kernel& kernel, double h,
                           const FrequencyGrid& eval_grid) {
    if (eval_grid == field.grid) return smooth(field, kernel, h);
    SpectralMatrixField out;
    out.grid = eval_grid;
    out.kind = FieldKind::Smoothed;
    out.matrices.reserve(static_cast<std::size_t>(eval_grid.size()));
    for (int e = 0; e < eval_grid.size(); ++e)
        out.matrices.push_back(smooth_at(field, kernel, h, eval_grid.value(e)));
    return out;
}

Eigen::MatrixXcd smooth_at(const SpectralMatrixField& field, const Kernel& kernel, double h, double omega) {
    if (!(h > 0.0) || h > kPi) throw std::invalid_argument("bandwidth must lie in (0, pi]");
    const int n = field.grid.size();
    const int d = field.dim();
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d, d);
    for (int pos = 0; pos < n; ++pos) {
        const double weight = kernel.evaluate(wrap_angle(omega - field.grid.value(pos)) / h) / h;
        if (weight != 0.0) acc += weight * field.at(pos);
    }
    return acc / static_cast<double>(n);
}

std::vector<double> default_bandwidth_grid(int n) {
    const double lo = 4.0 * kPi / static_cast<double>(n);
    const double hi = kPi / 2.0;
    const int count = 15;
    std::vector<double> grid;
    grid.reserve(count);
    if (lo >= hi) {
        grid.push_back(hi);
        return grid;
    }
    const double step = std::log(hi / lo) / (count - 1);
    for (int i = 0; i < count; ++i) grid.push_back(lo * std::exp(step * i));
    return grid;
}

double whittle_cv_score(const SpectralMatrixField& pgram, const Kernel& kernel, double h) {
    const int n = pgram.grid.size();
    const int d = pgram.dim();
    const auto w = smoothing_weights(kernel, h, n);
    const auto support = weight_support(w);
    double total_weight = 0.0;
    for (const auto& [m, weight] : support) total_weight += weight;

    // diagonal ordinates and their full smoothed values
    Eigen::MatrixXd diag(n, d);
    for (int pos = 0; pos < n; ++pos)
        for (int j = 0; j < d; ++j) diag(pos, j) = pgram.at(pos)(j, j).real();
    Eigen::MatrixXd smoothed = Eigen::MatrixXd::Zero(n, d);
    for (int e = 0; e < n; ++e)
        for (const auto& [m, weight] : support) {
            int pos = e - m;
            if (pos < 0) pos += n;
            smoothed.row(e) += weight * diag.row(pos);
        }

    double score = 0.0;
    const int half = (n - 1) / 2;
    for (int k = 1; k <= half; ++k) {
        const int pos = pgram.grid.position(k);
        const int neg = pgram.grid.position(-k);
        const double w_self = w[0];
        int diff = pos - neg;
        if (diff < 0) diff += n;
        const double w_mirror = w[static_cast<std::size_t>(diff)];
        const double denom = total_weight - w_self - w_mirror;
        if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
        for (int j = 0; j < d; ++j) {
            const double leave_out =
                (smoothed(pos, j) - w_self * diag(pos, j) - w_mirror * diag(neg, j)) / denom;
            if (!(leave_out > 0.0)) return std::numeric_limits<double>::infinity();
            score += std::log(leave_out) + diag(pos, j) / leave_out;
        }
    }
    return score;
}

Bandwidth cross_validate_bandwidth(const TimeSeriesPanel& panel, const Kernel& kernel,
                                   std::span<const double> candidates, int workers) {
    if (candidates.empty()) throw std::invalid_argument("cross_validate_bandwidth: empty candidate list");
    for (double h : candidates)
        if (!(h > 0.0) || h > kPi)
            throw std::invalid_argument("cross_validate_bandwidth: candidates must lie in (0, pi]");

    const auto pgram = periodogram(panel);
    std::vector<double> scores(candidates.size(), 0.0);
    detail::parallel_for(static_cast<int>(candidates.size()), workers, [&](int i) {
        scores[static_cast<std::size_t>(i)] = whittle_cv_score(pgram, kernel, candidates[static_cast<std::size_t>(i)]);
    });

    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const bool better = scores[i] < scores[best] ||
                            (scores[i] == scores[best] && candidates[i] < candidates[best]);
        if (better) best = i;
    }
    return Bandwidth{candidates[best], BandwidthSource::CrossValidated, 1.0};
}

} // namespace spectest
