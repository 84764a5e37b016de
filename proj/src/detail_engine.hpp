#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "spectest/kernel.hpp"
#include "spectest/randomize.hpp"
#include "spectest/spectral.hpp"

namespace spectest::detail {

// Precomputed state for evaluating the (randomized) L2 statistic many times
// on one periodogram field: the per-frequency deviations of each diagonal
// block from the pooled average, and the circulant kernel weight support.
struct StatisticWorkspace {
    int n = 0;
    int q = 0;
    int p2 = 0;        // block_dim^2
    double h = 0.0;
    int min_index = 0;
    // deviations[(j*n + pos)*p2 + t]: entry t of block j's deviation at grid position pos
    std::vector<std::complex<double>> deviations;
    std::vector<std::pair<int, double>> support;  // (circulant offset, kernel weight)
};

[[nodiscard]] StatisticWorkspace make_workspace(const SpectralMatrixField& pgram, const Kernel& kernel,
                                                double h, int block_dim, int groups);

// n h^{1/2} (2pi/n) sum_e sum_r || (1/n) sum_k K_h(w_e - w_k) dev_{pi_k(r)}(k) ||^2
// with a fixed summation order, so equal inputs give bit-equal results.
[[nodiscard]] double evaluate_statistic(const StatisticWorkspace& ws,
                                        const FrequencyPermutationFamily& family);

} // namespace spectest::detail
