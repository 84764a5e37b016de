#include "spectest/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace spectest {

void validate(const SpectralMatrixField& field) {
    const int n = field.grid.size();
    if (static_cast<int>(field.matrices.size()) != n)
        throw std::invalid_argument("field: one matrix per grid frequency required");
    const int d = field.dim();
    const double hermitian_tol = 1e-10;
    for (int pos = 0; pos < n; ++pos) {
        const auto& m = field.at(pos);
        if (m.rows() != d || m.cols() != d) throw std::invalid_argument("field: inconsistent matrix sizes");
        if ((m - m.adjoint()).cwiseAbs().maxCoeff() > hermitian_tol)
            throw std::invalid_argument("field: matrix not Hermitian within tolerance");
        const int neg = field.grid.position(-field.grid.index(pos));
        if ((field.at(neg) - m.conjugate()).cwiseAbs().maxCoeff() > hermitian_tol)
            throw std::invalid_argument("field: conjugate symmetry across frequencies violated");
        if (field.kind == FieldKind::Periodogram) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m, Eigen::EigenvaluesOnly);
            const double trace = m.real().trace();
            if (eig.eigenvalues().minCoeff() < -1e-10 * std::max(trace, 1.0))
                throw std::invalid_argument("field: periodogram matrix not positive semidefinite");
        }
    }
}

std::vector<Eigen::VectorXcd> dft(const TimeSeriesPanel& panel, const FrequencyGrid& grid) {
    validate(panel);
    if (grid.sample_size() != panel.length())
        throw std::invalid_argument("dft: grid and panel sample sizes differ");

    const int n = panel.length();
    const int d = panel.dim();
    const double scale = 1.0 / std::sqrt(kTwoPi * static_cast<double>(n));

    std::vector<Eigen::VectorXcd> out(static_cast<std::size_t>(n), Eigen::VectorXcd::Zero(d));
    // Direct summation at nonnegative indices with exact integer angle
    // reduction; negative frequencies are mirrored so that
    // J(-w_k) = conj(J(w_k)) holds exactly.
    for (int k = 0; k <= grid.max_index(); ++k) {
        Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(d);
        for (int t = 1; t <= n; ++t) {
            const long long m = (static_cast<long long>(t) * k) % n;
            const double angle = -kTwoPi * static_cast<double>(m) / static_cast<double>(n);
            const std::complex<double> rot(std::cos(angle), std::sin(angle));
            acc += panel.data.row(t - 1).transpose() * rot;
        }
        out[static_cast<std::size_t>(grid.position(k))] = acc * scale;
        if (k > 0 && -k >= grid.min_index())
            out[static_cast<std::size_t>(grid.position(-k))] = acc.conjugate() * scale;
    }
    return out;
}

SpectralMatrixField periodogram(const TimeSeriesPanel& panel) {
    const auto grid = fourier_frequencies(panel.length());
    const auto transforms = dft(panel, grid);

    SpectralMatrixField field;
    field.grid = grid;
    field.kind = FieldKind::Periodogram;
    field.matrices.reserve(transforms.size());
    for (const auto& j : transforms) field.matrices.push_back(j * j.adjoint());
    return field;
}

std::vector<Eigen::MatrixXcd> block(const SpectralMatrixField& field, int row_group, int col_group,
                                    int block_dim) {
    const int d = field.dim();
    if (block_dim < 1 || d % block_dim != 0)
        throw std::invalid_argument("block: block_dim does not divide the field dimension");
    const int groups = d / block_dim;
    if (row_group < 1 || row_group > groups || col_group < 1 || col_group > groups)
        throw std::invalid_argument("block: group index out of range");

    std::vector<Eigen::MatrixXcd> out;
    out.reserve(field.matrices.size());
    for (const auto& m : field.matrices)
        out.push_back(m.block((row_group - 1) * block_dim, (col_group - 1) * block_dim, block_dim, block_dim));
    return out;
}

SpectralMatrixField pooled_diagonal(const SpectralMatrixField& field, int block_dim, int groups) {
    if (field.dim() != block_dim * groups)
        throw std::invalid_argument("pooled_diagonal: dimension must equal block_dim * groups");

    SpectralMatrixField out;
    out.grid = field.grid;
    out.kind = FieldKind::Pooled;
    out.matrices.reserve(field.matrices.size());
    for (const auto& m : field.matrices) {
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(block_dim, block_dim);
        for (int j = 0; j < groups; ++j) acc += m.block(j * block_dim, j * block_dim, block_dim, block_dim);
        out.matrices.push_back(acc / static_cast<double>(groups));
    }
    return out;
}

std::complex<double> frobenius_inner(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return a.cwiseProduct(b.conjugate()).sum();
}

} // namespace spectest
