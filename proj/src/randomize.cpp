#include "spectest/randomize.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <cstdio>
#include <stdexcept>

#include "detail_engine.hpp"
#include "detail_parallel.hpp"
#include "spectest/rng.hpp"

namespace spectest {

FrequencyPermutationFamily::FrequencyPermutationFamily(int groups, int sample_size,
                                                       std::vector<std::vector<int>> base)
    : q_(groups), n_(sample_size), base_(std::move(base)) {
    if (q_ < 2) throw std::invalid_argument("permutation family: need at least 2 groups");
    if (static_cast<int>(base_.size()) != n_ / 2 + 1)
        throw std::invalid_argument("permutation family: need floor(n/2)+1 base permutations");
    std::vector<bool> seen;
    for (const auto& perm : base_) {
        if (static_cast<int>(perm.size()) != q_)
            throw std::invalid_argument("permutation family: wrong permutation length");
        seen.assign(static_cast<std::size_t>(q_), false);
        for (int v : perm) {
            if (v < 0 || v >= q_ || seen[static_cast<std::size_t>(v)])
                throw std::invalid_argument("permutation family: entry is not a bijection");
            seen[static_cast<std::size_t>(v)] = true;
        }
    }
}

const std::vector<int>& FrequencyPermutationFamily::at(int k) const noexcept {
    int r = k % n_;
    if (r < 0) r += n_;
    if (r > n_ / 2) r = n_ - r;  // periodic extension, then symmetry
    return base_[static_cast<std::size_t>(r)];
}

FrequencyPermutationFamily identity_family(int groups, int sample_size) {
    std::vector<int> id(static_cast<std::size_t>(groups));
    std::iota(id.begin(), id.end(), 0);
    std::vector<std::vector<int>> base(static_cast<std::size_t>(sample_size / 2 + 1), id);
    return {groups, sample_size, std::move(base)};
}

FrequencyPermutationFamily sample_family(int groups, int sample_size, std::uint64_t seed) {
    if (groups < 2) throw std::invalid_argument("sample_family: need at least 2 groups");
    RngEngine rng(seed);
    std::vector<int> id(static_cast<std::size_t>(groups));
    std::iota(id.begin(), id.end(), 0);
    std::vector<std::vector<int>> base;
    base.reserve(static_cast<std::size_t>(sample_size / 2 + 1));
    for (int k = 0; k <= sample_size / 2; ++k) {
        std::vector<int> perm = id;
        for (int i = groups - 1; i > 0; --i) {
            const int j = rng.uniform_int(i + 1);
            std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
        }
        base.push_back(std::move(perm));
    }
    return {groups, sample_size, std::move(base)};
}

namespace detail {

StatisticWorkspace make_workspace(const SpectralMatrixField& pgram, const Kernel& kernel, double h,
                                  int block_dim, int groups) {
    const int n = pgram.grid.size();
    const int p = block_dim;
    const int q = groups;
    if (pgram.dim() != p * q) throw std::invalid_argument("statistic: dimension must equal block_dim * groups");

    StatisticWorkspace ws;
    ws.n = n;
    ws.q = q;
    ws.p2 = p * p;
    ws.h = h;
    ws.min_index = pgram.grid.min_index();

    const auto pooled = pooled_diagonal(pgram, p, q);
    ws.deviations.resize(static_cast<std::size_t>(q) * n * ws.p2);
    for (int j = 0; j < q; ++j)
        for (int pos = 0; pos < n; ++pos) {
            const Eigen::MatrixXcd dev =
                pgram.at(pos).block(j * p, j * p, p, p) - pooled.at(pos);
            auto* dst = &ws.deviations[(static_cast<std::size_t>(j) * n + pos) * ws.p2];
            for (int a = 0; a < p; ++a)
                for (int b = 0; b < p; ++b) dst[a * p + b] = dev(a, b);
        }

    const auto weights = smoothing_weights(kernel, h, n);
    for (int m = 0; m < n; ++m)
        if (weights[static_cast<std::size_t>(m)] != 0.0)
            ws.support.emplace_back(m, weights[static_cast<std::size_t>(m)]);
    return ws;
}

double evaluate_statistic(const StatisticWorkspace& ws, const FrequencyPermutationFamily& family) {
    if (family.sample_size() != ws.n) throw std::invalid_argument("statistic: family sample size mismatch");
    if (family.groups() != ws.q) throw std::invalid_argument("statistic: family group count mismatch");

    const int n = ws.n;
    const int q = ws.q;
    const int p2 = ws.p2;

    // resolve the permuted block index for every (position, r) once
    std::vector<int> permuted(static_cast<std::size_t>(n) * q);
    for (int pos = 0; pos < n; ++pos) {
        const auto& perm = family.at(ws.min_index + pos);
        for (int r = 0; r < q; ++r) permuted[static_cast<std::size_t>(pos) * q + r] = perm[static_cast<std::size_t>(r)];
    }

    double total = 0.0;
    std::vector<std::complex<double>> acc(static_cast<std::size_t>(p2));
    for (int e = 0; e < n; ++e) {
        for (int r = 0; r < q; ++r) {
            std::fill(acc.begin(), acc.end(), std::complex<double>(0.0, 0.0));
            for (const auto& [m, weight] : ws.support) {
                int pos = e - m;
                if (pos < 0) pos += n;
                const int j = permuted[static_cast<std::size_t>(pos) * q + r];
                const auto* src = &ws.deviations[(static_cast<std::size_t>(j) * n + pos) * p2];
                for (int t = 0; t < p2; ++t) acc[static_cast<std::size_t>(t)] += weight * src[t];
            }
            for (int t = 0; t < p2; ++t) total += std::norm(acc[static_cast<std::size_t>(t)]);
        }
    }
    return kTwoPi * std::sqrt(ws.h) * total / (static_cast<double>(n) * n);
}

} // namespace detail

double l2_statistic_randomized(const SpectralMatrixField& pgram, const FrequencyPermutationFamily& family,
                               const Kernel& kernel, double h, int block_dim, int groups) {
    const auto ws = detail::make_workspace(pgram, kernel, h, block_dim, groups);
    return detail::evaluate_statistic(ws, family);
}

double estimate_mu_hat_star(const SpectralMatrixField& smoothed, const Kernel& kernel, int block_dim,
                            int groups) {
    const int n = smoothed.grid.size();
    const int p = block_dim;
    const int q = groups;
    if (smoothed.dim() != p * q) throw std::invalid_argument("estimate_mu_hat_star: dimension mismatch");

    double acc = 0.0;
    for (int pos = 0; pos < n; ++pos) {
        const auto& m = smoothed.at(pos);
        for (int j1 = 0; j1 < q; ++j1)
            for (int j2 = 0; j2 < q; ++j2) {
                const double w = (j1 == j2) ? (q - 1.0) : -1.0;
                std::complex<double> tr = 0.0;
                for (int a = 0; a < p; ++a) tr += m(j1 * p + a, j2 * p + a);
                const auto diag_inner = frobenius_inner(m.block(j1 * p, j1 * p, p, p),
                                                        m.block(j2 * p, j2 * p, p, p));
                acc += w * (std::norm(tr) + diag_inner.real());
            }
    }
    return kernel.mean_constant * (kTwoPi / n) * acc / q;
}

double estimate_tau_sq_star(const SpectralMatrixField& smoothed, const Kernel& kernel, int block_dim,
                            int groups) {
    const int n = smoothed.grid.size();
    const int p = block_dim;
    const int q = groups;
    if (q < 2) throw std::invalid_argument("estimate_tau_sq_star: need at least 2 groups");
    if (smoothed.dim() != p * q) throw std::invalid_argument("estimate_tau_sq_star: dimension mismatch");

    const double off_weight = static_cast<double>(q) / (q - 1.0);
    double acc = 0.0;
    for (int pos = 0; pos < n; ++pos) {
        const auto& m = smoothed.at(pos);
        auto blk = [&](int j, int l) { return m.block(j * p, l * p, p, p); };

        // Frobenius inner products of the diagonal blocks (real for Hermitian blocks)
        Eigen::MatrixXd diag_inner(q, q);
        for (int a = 0; a < q; ++a)
            for (int b = 0; b < q; ++b) diag_inner(a, b) = frobenius_inner(blk(a, a), blk(b, b)).real();

        for (int j1 = 0; j1 < q; ++j1)
            for (int j2 = 0; j2 < q; ++j2)
                for (int j3 = 0; j3 < q; ++j3)
                    for (int j4 = 0; j4 < q; ++j4) {
                        const double w = -1.0 + (j1 == j3 && j2 == j4 ? q : 0.0) +
                                         (j1 != j3 && j2 != j4 ? off_weight : 0.0);
                        const double products = diag_inner(j1, j2) * diag_inner(j4, j3) +
                                                std::norm(frobenius_inner(blk(j1, j3), blk(j2, j4)));
                        acc += w * products;
                    }
    }
    double value = kernel.variance_constant * (kTwoPi / n) * acc / (static_cast<double>(q) * q);
    if (value < 0.0) {
        std::cerr << "spectest: warning: randomization variance estimate " << value << " clamped to 0\n";
        value = 0.0;
    }
    return value;
}

double mc_pvalue(double observed, std::span<const double> draws) {
    std::size_t at_least = 0;
    for (double d : draws)
        if (d >= observed) ++at_least;
    return static_cast<double>(1 + at_least) / static_cast<double>(draws.size() + 1);
}

RandomizationConfig::RandomizationConfig() : kernel(bartlett_priestley()) {}

TestReport run_randomization_test(const TimeSeriesPanel& panel, const RandomizationConfig& config) {
    validate(panel);
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw std::invalid_argument("alpha must be in (0, 1)");
    if (config.kind != TestKind::Asymptotic && config.draws < 19)
        throw std::invalid_argument("need at least B = 19 randomization draws to resolve alpha = 0.05");

    const TimeSeriesPanel working = config.demean_first ? demean(panel) : panel;
    const int n = working.length();
    const int p = working.block_dim;
    const int q = working.groups;
    const auto pgram = periodogram(working);

    Bandwidth bandwidth;
    if (config.bandwidth.cross_validate) {
        const auto candidates = default_bandwidth_grid(n);
        bandwidth = cross_validate_bandwidth(working, config.kernel, candidates, config.workers);
        bandwidth.value = std::min(bandwidth.value * config.bandwidth.multiplier, kPi);
        bandwidth.multiplier = config.bandwidth.multiplier;
    } else {
        bandwidth = Bandwidth{config.bandwidth.fixed_value, BandwidthSource::Fixed, 1.0};
    }
    check_bandwidth(bandwidth.value, n);
    const double h = bandwidth.value;

    const auto ws = detail::make_workspace(pgram, config.kernel, h, p, q);
    const double observed_tn = detail::evaluate_statistic(ws, identity_family(q, n));

    const auto smoothed = smooth(pgram, config.kernel, h);
    CenteringEstimates centering;
    centering.mu_hat = estimate_mu_hat(smoothed, config.kernel, p, q);
    centering.tau_hat_sq = estimate_tau_sq(smoothed, config.kernel, p, q, config.pooled_plugin_tau);
    centering.mu_hat_star = estimate_mu_hat_star(smoothed, config.kernel, p, q);
    centering.tau_hat_star_sq = estimate_tau_sq_star(smoothed, config.kernel, p, q);

    StatisticValue statistic{observed_tn, n, h, n};

    TestReport report;
    if (config.kind == TestKind::Asymptotic) {
        report = asymptotic_test(statistic, centering, config.alpha);
    } else {
        const double root_h = std::sqrt(h);
        double observed = observed_tn;
        if (config.kind == TestKind::RandCentered) observed = observed_tn - centering.mu_hat / root_h;
        if (config.kind == TestKind::RandStudentized) {
            if (centering.tau_hat_sq == 0.0 || centering.tau_hat_star_sq == 0.0)
                throw std::domain_error("studentized test: degenerate scale estimate");
            observed = (observed_tn - centering.mu_hat / root_h) / std::sqrt(centering.tau_hat_sq);
        }

        const double star_center = centering.mu_hat_star / root_h;
        const double star_scale = std::sqrt(centering.tau_hat_star_sq);
        std::vector<double> draws(static_cast<std::size_t>(config.draws), 0.0);
        detail::parallel_for(config.draws, config.workers, [&](int b) {
            const auto family = sample_family(q, n, child_seed(config.seed, static_cast<std::uint64_t>(b) + 1));
            double value = detail::evaluate_statistic(ws, family);
            if (config.kind == TestKind::RandCentered) value -= star_center;
            if (config.kind == TestKind::RandStudentized) value = (value - star_center) / star_scale;
            draws[static_cast<std::size_t>(b)] = value;
        });

        report.statistic = statistic;
        report.centering = centering;
        report.kind = config.kind;
        report.alpha = config.alpha;
        if (config.literal_count_rule) {
            int strictly_below = 0;
            for (double d : draws)
                if (observed > d) ++strictly_below;
            const double fraction = static_cast<double>(strictly_below) / config.draws;
            report.critical_value_or_pvalue = fraction;
            report.reject = fraction > config.alpha;
        } else {
            const double p_value = mc_pvalue(observed, draws);
            report.critical_value_or_pvalue = p_value;
            report.reject = p_value <= config.alpha;
        }
    }

    report.block_dim = p;
    report.groups = q;
    report.seed = config.seed;
    report.draws = config.kind == TestKind::Asymptotic ? 0 : config.draws;
    if (bandwidth.source == BandwidthSource::CrossValidated) {
        char text[48];
        std::snprintf(text, sizeof text, "cv(c=%g)", bandwidth.multiplier);
        report.bandwidth_source = text;
    } else {
        report.bandwidth_source = "fixed";
    }
    return report;
}

} // namespace spectest
