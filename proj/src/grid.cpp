#include "spectest/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace spectest {

double wrap_angle(double x) noexcept {
    double y = std::fmod(x, kTwoPi);
    if (y <= -kPi) y += kTwoPi;
    else if (y > kPi) y -= kTwoPi;
    return y;
}

FrequencyGrid::FrequencyGrid(int sample_size) : n_(sample_size) {}

double FrequencyGrid::value(int pos) const noexcept {
    return kTwoPi * static_cast<double>(index(pos)) / static_cast<double>(n_);
}

int FrequencyGrid::position(int k) const noexcept {
    int r = k % n_;
    if (r < min_index()) r += n_;
    else if (r > max_index()) r -= n_;
    return r - min_index();
}

FrequencyGrid fourier_frequencies(int n) {
    if (n < 4) throw std::invalid_argument("fourier_frequencies: need n >= 4");
    return FrequencyGrid(n);
}

} // namespace spectest
