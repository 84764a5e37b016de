#pragma once

namespace spectest {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Reduces an angle to the interval (-pi, pi].
[[nodiscard]] double wrap_angle(double x) noexcept;

/// The n Fourier frequencies w_k = 2*pi*k/n, k = -floor((n-1)/2), ..., floor(n/2).
///
/// Grid positions run 0..n-1 in increasing frequency order. Index arithmetic
/// is understood modulo n (2*pi-periodic extension), so position(k) accepts
/// any integer index.
class FrequencyGrid {
public:
    FrequencyGrid() = default;
    explicit FrequencyGrid(int sample_size);

    [[nodiscard]] int sample_size() const noexcept { return n_; }
    [[nodiscard]] int size() const noexcept { return n_; }
    [[nodiscard]] int min_index() const noexcept { return -((n_ - 1) / 2); }
    [[nodiscard]] int max_index() const noexcept { return n_ / 2; }

    /// Integer index k of the grid position pos in 0..n-1.
    [[nodiscard]] int index(int pos) const noexcept { return min_index() + pos; }

    /// Frequency value w_k at the grid position pos.
    [[nodiscard]] double value(int pos) const noexcept;

    /// Grid position of an arbitrary integer index, reduced modulo n.
    [[nodiscard]] int position(int k) const noexcept;

    [[nodiscard]] bool operator==(const FrequencyGrid& other) const noexcept = default;

private:
    int n_ = 0;
};

/// Builds the Fourier frequency grid for a series of length n (n >= 4).
[[nodiscard]] FrequencyGrid fourier_frequencies(int n);

} // namespace spectest
