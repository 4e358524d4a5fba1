#pragma once

// Dense complex linear algebra over small finite-dimensional Hilbert spaces:
// tensor products, partial traces, projectors and expectation values.
// Subsystem 0 (the first entry of dims) is the most significant digit of the
// basis index, i.e. index = i0*d1*d2*... + i1*d2*... + ...
//
// All values are immutable after construction and every operation is a pure
// function, so unrestricted concurrent use is safe.

#include <complex>
#include <cstddef>
#include <vector>

#include "femtohbt/errors.hpp"

namespace femto {

using Complex = std::complex<double>;

inline constexpr double kHermTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kNormTol = 1e-12;
inline constexpr double kPsdSlack = 1e-10;
inline constexpr std::size_t kMaxTotalDim = 4096;

using Dims = std::vector<std::size_t>;

std::size_t total_dim(const Dims& dims);

struct StateVector {
    Dims dims;
    std::vector<Complex> amps;

    StateVector(Dims d, std::vector<Complex> a);

    std::size_t dim() const { return amps.size(); }
    double norm() const;
    bool normalized(double eps = kNormTol) const;
    StateVector normalized_copy() const;
};

struct LinearOperator {
    Dims dims;
    std::vector<Complex> mat; // row-major, side x side

    LinearOperator(Dims d, std::vector<Complex> m);

    std::size_t side() const;
    Complex& at(std::size_t i, std::size_t j) { return mat[i * side_ + j]; }
    const Complex& at(std::size_t i, std::size_t j) const { return mat[i * side_ + j]; }

    static LinearOperator identity(Dims d);
    LinearOperator adjoint() const;

  private:
    std::size_t side_ = 0;
};

struct DensityOperator {
    Dims dims;
    std::vector<Complex> mat; // row-major, side x side

    // Validates Hermiticity and unit trace; positive semidefiniteness is
    // checked by Jacobi diagonalization for sides up to kPsdCheckMaxSide.
    DensityOperator(Dims d, std::vector<Complex> m);

    std::size_t side() const;
    Complex& at(std::size_t i, std::size_t j) { return mat[i * side_ + j]; }
    const Complex& at(std::size_t i, std::size_t j) const { return mat[i * side_ + j]; }

    static DensityOperator from_state(const StateVector& psi);
    static DensityOperator maximally_mixed(Dims d);
    // Convex mixture sum_i w_i |psi_i><psi_i|; weights must be nonnegative
    // and sum to 1 within kTraceTol.
    static DensityOperator from_mixture(const std::vector<StateVector>& states,
                                        const std::vector<double>& weights);

    LinearOperator as_operator() const;

  private:
    std::size_t side_ = 0;
};

inline constexpr std::size_t kPsdCheckMaxSide = 128;

StateVector tensor_product(const StateVector& a, const StateVector& b);
LinearOperator tensor_product(const LinearOperator& a, const LinearOperator& b);
DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b);

// Traces out every subsystem not listed in `keep`; kept subsystems stay in
// their original order.
DensityOperator partial_trace(const DensityOperator& rho, const std::vector<std::size_t>& keep);

double purity(const DensityOperator& rho);

Complex expectation(const StateVector& psi, const LinearOperator& op);
Complex expectation(const DensityOperator& rho, const LinearOperator& op);

// Eigenvalues of a Hermitian matrix (row-major, side x side) by cyclic Jacobi,
// ascending. Intended for the small matrices this library traffics in.
std::vector<double> jacobi_eigenvalues(std::vector<Complex> mat, std::size_t side);

} // namespace femto
