#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "spectest/grid.hpp"
#include "spectest/panel.hpp"

namespace spectest {

enum class FieldKind { Periodogram, Smoothed, Pooled };

/// A complex d x d Hermitian matrix attached to each Fourier frequency:
/// either a periodogram, a kernel-smoothed spectral estimate or a pooled
/// block-diagonal average. Matrices satisfy M(-w) = conj(M(w)) and are
/// understood as 2*pi-periodic in the frequency index.
struct SpectralMatrixField {
    FrequencyGrid grid;
    std::vector<Eigen::MatrixXcd> matrices;  // one per grid position
    FieldKind kind = FieldKind::Periodogram;

    [[nodiscard]] int dim() const { return matrices.empty() ? 0 : static_cast<int>(matrices.front().rows()); }
    [[nodiscard]] const Eigen::MatrixXcd& at(int pos) const { return matrices[static_cast<std::size_t>(pos)]; }

    /// Lookup by integer frequency index, reduced modulo n.
    [[nodiscard]] const Eigen::MatrixXcd& at_index(int k) const { return matrices[static_cast<std::size_t>(grid.position(k))]; }
};

/// Checks the field invariants: Hermitian within 1e-10 per entry, conjugate
/// symmetry M(-w_k) = conj(M(w_k)) within 1e-10, and for periodogram fields
/// positive semidefiniteness (eigenvalues >= -1e-10 * trace). Throws
/// std::invalid_argument on violation.
void validate(const SpectralMatrixField& field);

/// Discrete Fourier transform J(w) = (2*pi*n)^{-1/2} sum_t X_t e^{-i t w}
/// evaluated at every grid frequency. Satisfies J(-w_k) = conj(J(w_k))
/// exactly (negative frequencies are mirrored from positive ones).
[[nodiscard]] std::vector<Eigen::VectorXcd> dft(const TimeSeriesPanel& panel, const FrequencyGrid& grid);

/// Periodogram matrices I(w_k) = J(w_k) conj(J(w_k))^T; Hermitian PSD of
/// rank <= 1 at each frequency.
[[nodiscard]] SpectralMatrixField periodogram(const TimeSeriesPanel& panel);

/// Extracts the (row_group, col_group) p x p block of each matrix
/// (1-based group indices).
[[nodiscard]] std::vector<Eigen::MatrixXcd> block(const SpectralMatrixField& field, int row_group,
                                                  int col_group, int block_dim);

/// Per-frequency average of the q diagonal p x p blocks.
[[nodiscard]] SpectralMatrixField pooled_diagonal(const SpectralMatrixField& field, int block_dim, int groups);

/// Frobenius inner product <A, B> = tr(A conj(B)^T) = sum_ij A_ij conj(B_ij).
[[nodiscard]] std::complex<double> frobenius_inner(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

} // namespace spectest
