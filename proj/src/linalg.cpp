#include "femtohbt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace femto {

namespace {

void check_dims(const Dims& dims) {
    if (dims.empty()) throw ArgumentError("dims must be nonempty");
    for (std::size_t d : dims)
        if (d == 0) throw ArgumentError("subsystem dimensions must be positive");
}

void check_finite(const std::vector<Complex>& v) {
    for (const Complex& c : v)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw ArgumentError("non-finite amplitude");
}

// Strides for row-major multi-index addressing; first subsystem is the most
// significant block.
std::vector<std::size_t> strides_of(const Dims& dims) {
    std::vector<std::size_t> s(dims.size());
    std::size_t acc = 1;
    for (std::size_t i = dims.size(); i-- > 0;) {
        s[i] = acc;
        acc *= dims[i];
    }
    return s;
}

} // namespace

std::size_t total_dim(const Dims& dims) {
    check_dims(dims);
    std::size_t n = 1;
    for (std::size_t d : dims) {
        if (d > kMaxTotalDim / n) throw CapacityError("total dimension exceeds cap");
        n *= d;
    }
    if (n > kMaxTotalDim) throw CapacityError("total dimension exceeds cap");
    return n;
}

StateVector::StateVector(Dims d, std::vector<Complex> a) : dims(std::move(d)), amps(std::move(a)) {
    if (amps.size() != total_dim(dims)) throw ArgumentError("amplitude count != product of dims");
    check_finite(amps);
}

double StateVector::norm() const {
    double s = 0;
    for (const Complex& c : amps) s += std::norm(c);
    return std::sqrt(s);
}

bool StateVector::normalized(double eps) const {
    double n2 = 0;
    for (const Complex& c : amps) n2 += std::norm(c);
    return n2 >= 1.0 - eps && n2 <= 1.0 + eps;
}

StateVector StateVector::normalized_copy() const {
    double n = norm();
    if (n == 0) throw ArgumentError("cannot normalize the zero vector");
    std::vector<Complex> a = amps;
    for (Complex& c : a) c /= n;
    return StateVector(dims, std::move(a));
}

LinearOperator::LinearOperator(Dims d, std::vector<Complex> m) : dims(std::move(d)), mat(std::move(m)) {
    side_ = total_dim(dims);
    if (mat.size() != side_ * side_) throw ArgumentError("operator matrix is not side x side");
    check_finite(mat);
}

std::size_t LinearOperator::side() const { return side_; }

LinearOperator LinearOperator::identity(Dims d) {
    std::size_t n = total_dim(d);
    std::vector<Complex> m(n * n, Complex(0, 0));
    for (std::size_t i = 0; i < n; ++i) m[i * n + i] = 1.0;
    return LinearOperator(std::move(d), std::move(m));
}

LinearOperator LinearOperator::adjoint() const {
    std::vector<Complex> m(mat.size());
    for (std::size_t i = 0; i < side_; ++i)
        for (std::size_t j = 0; j < side_; ++j) m[j * side_ + i] = std::conj(mat[i * side_ + j]);
    return LinearOperator(dims, std::move(m));
}

DensityOperator::DensityOperator(Dims d, std::vector<Complex> m) : dims(std::move(d)), mat(std::move(m)) {
    side_ = total_dim(dims);
    if (mat.size() != side_ * side_) throw ArgumentError("density matrix is not side x side");
    check_finite(mat);
    Complex tr(0, 0);
    for (std::size_t i = 0; i < side_; ++i) {
        tr += mat[i * side_ + i];
        for (std::size_t j = i; j < side_; ++j) {
            Complex diff = mat[i * side_ + j] - std::conj(mat[j * side_ + i]);
            if (std::abs(diff) > kHermTol) throw ArgumentError("density matrix is not Hermitian");
        }
    }
    if (std::abs(tr - 1.0) > kTraceTol) throw ArgumentError("density matrix trace != 1");
    if (side_ <= kPsdCheckMaxSide) {
        std::vector<double> ev = jacobi_eigenvalues(mat, side_);
        if (!ev.empty() && ev.front() < -kPsdSlack)
            throw ArgumentError("density matrix has a negative eigenvalue");
    }
}

std::size_t DensityOperator::side() const { return side_; }

DensityOperator DensityOperator::from_state(const StateVector& psi) {
    if (!psi.normalized()) throw ArgumentError("state must be normalized");
    std::size_t n = psi.dim();
    std::vector<Complex> m(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i * n + j] = psi.amps[i] * std::conj(psi.amps[j]);
    return DensityOperator(psi.dims, std::move(m));
}

DensityOperator DensityOperator::maximally_mixed(Dims d) {
    std::size_t n = total_dim(d);
    std::vector<Complex> m(n * n, Complex(0, 0));
    for (std::size_t i = 0; i < n; ++i) m[i * n + i] = 1.0 / static_cast<double>(n);
    return DensityOperator(std::move(d), std::move(m));
}

DensityOperator DensityOperator::from_mixture(const std::vector<StateVector>& states,
                                              const std::vector<double>& weights) {
    if (states.empty() || states.size() != weights.size())
        throw ArgumentError("mixture needs matching nonempty states and weights");
    std::size_t n = states.front().dim();
    std::vector<Complex> m(n * n, Complex(0, 0));
    double wsum = 0;
    for (std::size_t s = 0; s < states.size(); ++s) {
        if (states[s].dims != states.front().dims) throw ArgumentError("mixture dims mismatch");
        if (weights[s] < 0) throw ArgumentError("mixture weights must be nonnegative");
        wsum += weights[s];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                m[i * n + j] += weights[s] * states[s].amps[i] * std::conj(states[s].amps[j]);
    }
    if (std::abs(wsum - 1.0) > kTraceTol) throw ArgumentError("mixture weights must sum to 1");
    return DensityOperator(states.front().dims, std::move(m));
}

LinearOperator DensityOperator::as_operator() const { return LinearOperator(dims, mat); }

StateVector tensor_product(const StateVector& a, const StateVector& b) {
    Dims dims = a.dims;
    dims.insert(dims.end(), b.dims.begin(), b.dims.end());
    std::size_t n = total_dim(dims);
    std::vector<Complex> amps(n);
    std::size_t nb = b.dim();
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < nb; ++j) amps[i * nb + j] = a.amps[i] * b.amps[j];
    return StateVector(std::move(dims), std::move(amps));
}

namespace {

std::vector<Complex> kron(const std::vector<Complex>& a, std::size_t na,
                          const std::vector<Complex>& b, std::size_t nb) {
    std::size_t n = na * nb;
    std::vector<Complex> m(n * n);
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j)
            for (std::size_t k = 0; k < nb; ++k)
                for (std::size_t l = 0; l < nb; ++l)
                    m[(i * nb + k) * n + (j * nb + l)] = a[i * na + j] * b[k * nb + l];
    return m;
}

} // namespace

LinearOperator tensor_product(const LinearOperator& a, const LinearOperator& b) {
    Dims dims = a.dims;
    dims.insert(dims.end(), b.dims.begin(), b.dims.end());
    total_dim(dims); // capacity check before allocating
    return LinearOperator(std::move(dims), kron(a.mat, a.side(), b.mat, b.side()));
}

DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b) {
    Dims dims = a.dims;
    dims.insert(dims.end(), b.dims.begin(), b.dims.end());
    total_dim(dims);
    return DensityOperator(std::move(dims), kron(a.mat, a.side(), b.mat, b.side()));
}

DensityOperator partial_trace(const DensityOperator& rho, const std::vector<std::size_t>& keep) {
    if (keep.empty()) throw ArgumentError("keep set must be nonempty");
    std::vector<std::size_t> kept = keep;
    std::sort(kept.begin(), kept.end());
    if (std::adjacent_find(kept.begin(), kept.end()) != kept.end())
        throw ArgumentError("duplicate subsystem index in keep set");
    for (std::size_t k : kept)
        if (k >= rho.dims.size()) throw ArgumentError("keep index out of range");

    std::vector<std::size_t> traced;
    for (std::size_t i = 0; i < rho.dims.size(); ++i)
        if (!std::binary_search(kept.begin(), kept.end(), i)) traced.push_back(i);

    std::vector<std::size_t> strides = strides_of(rho.dims);

    Dims out_dims;
    for (std::size_t k : kept) out_dims.push_back(rho.dims[k]);
    std::size_t nk = 1;
    for (std::size_t d : out_dims) nk *= d;
    std::size_t nt = 1;
    for (std::size_t t : traced) nt *= rho.dims[t];

    auto offset = [&](const std::vector<std::size_t>& subsys, std::size_t flat) {
        std::size_t off = 0;
        for (std::size_t i = subsys.size(); i-- > 0;) {
            std::size_t d = rho.dims[subsys[i]];
            off += (flat % d) * strides[subsys[i]];
            flat /= d;
        }
        return off;
    };

    std::size_t side = rho.side();
    std::vector<Complex> out(nk * nk, Complex(0, 0));
    for (std::size_t r = 0; r < nk; ++r) {
        std::size_t roff = offset(kept, r);
        for (std::size_t c = 0; c < nk; ++c) {
            std::size_t coff = offset(kept, c);
            Complex sum(0, 0);
            for (std::size_t t = 0; t < nt; ++t) {
                std::size_t toff = offset(traced, t);
                sum += rho.mat[(roff + toff) * side + (coff + toff)];
            }
            out[r * nk + c] = sum;
        }
    }
    return DensityOperator(std::move(out_dims), std::move(out));
}

double purity(const DensityOperator& rho) {
    // tr(rho^2) = sum_ij rho_ij * rho_ji = sum_ij |rho_ij|^2 by Hermiticity
    double s = 0;
    for (const Complex& c : rho.mat) s += std::norm(c);
    return s;
}

Complex expectation(const StateVector& psi, const LinearOperator& op) {
    if (psi.dims != op.dims) throw ArgumentError("state/operator dimension mismatch");
    std::size_t n = psi.dim();
    Complex sum(0, 0);
    for (std::size_t i = 0; i < n; ++i) {
        Complex row(0, 0);
        for (std::size_t j = 0; j < n; ++j) row += op.at(i, j) * psi.amps[j];
        sum += std::conj(psi.amps[i]) * row;
    }
    return sum;
}

Complex expectation(const DensityOperator& rho, const LinearOperator& op) {
    if (rho.dims != op.dims) throw ArgumentError("state/operator dimension mismatch");
    std::size_t n = rho.side();
    Complex sum(0, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sum += rho.mat[i * n + j] * op.at(j, i);
    return sum;
}

std::vector<double> jacobi_eigenvalues(std::vector<Complex> a, std::size_t n) {
    if (n == 0) return {};
    if (a.size() != n * n) throw ArgumentError("matrix size mismatch");

    auto off_norm = [&] {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += std::norm(a[i * n + j]);
        return std::sqrt(2 * s);
    };
    double scale = 0;
    for (const Complex& c : a) scale = std::max(scale, std::abs(c));
    if (scale == 0) return std::vector<double>(n, 0.0);

    const double tol = 1e-15 * scale * static_cast<double>(n);
    for (int sweep = 0; sweep < 100 && off_norm() > tol; ++sweep) {
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                Complex apq = a[p * n + q];
                double mag = std::abs(apq);
                if (mag <= tol / static_cast<double>(n)) continue;
                double app = a[p * n + p].real();
                double aqq = a[q * n + q].real();
                Complex phase = apq / mag;
                double theta = 0.5 * std::atan2(2 * mag, app - aqq);
                double c = std::cos(theta);
                Complex s = std::sin(theta) * phase;
                // Apply the plane rotation on rows/columns p and q.
                for (std::size_t k = 0; k < n; ++k) {
                    Complex akp = a[k * n + p];
                    Complex akq = a[k * n + q];
                    a[k * n + p] = c * akp + std::conj(s) * akq;
                    a[k * n + q] = -s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    Complex apk = a[p * n + k];
                    Complex aqk = a[q * n + k];
                    a[p * n + k] = c * apk + s * aqk;
                    a[q * n + k] = -std::conj(s) * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a[i * n + i].real();
    std::sort(ev.begin(), ev.end());
    return ev;
}

} // namespace femto
