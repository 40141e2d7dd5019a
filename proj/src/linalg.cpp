// linalg.cpp: hilbert-core implementation; eigensolvers go through LAPACKE

#include "decowork/linalg.hpp"

#include "decowork/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace decowork {

namespace {

double scale_of(const CMatrix& m) {
    return std::max(1.0, m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff());
}

void require_square(const CMatrix& m, const char* what) {
    if (m.rows() != m.cols()) {
        std::ostringstream os;
        os << what << ": matrix must be square (got " << m.rows() << "x" << m.cols() << ")";
        throw ConfigError(os.str());
    }
    if (m.rows() < 1) {
        throw ConfigError(std::string(what) + ": dimension must be >= 1");
    }
}

// Largest-magnitude component real and positive; earliest index wins ties.
template <typename Vec>
void fix_phase(Vec&& v) {
    const Index n = v.size();
    double best = -1.0;
    Index arg = 0;
    for (Index i = 0; i < n; ++i) {
        const double a = std::abs(v(i));
        if (a > best * (1.0 + 1e-12) + 1e-15) {
            best = a;
            arg = i;
        }
    }
    if (best <= 0.0) return;
    using Scalar = typename std::decay_t<Vec>::Scalar;
    if constexpr (std::is_same_v<Scalar, double>) {
        if (v(arg) < 0.0) v = -v;
    } else {
        const Complex phase = std::conj(v(arg)) / std::abs(v(arg));
        v *= phase;
        v(arg) = Complex(std::abs(v(arg)), 0.0);
    }
}

} // namespace

double hermiticity_defect(const CMatrix& m) {
    if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double unitarity_defect(const CMatrix& u) {
    if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
    return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------- HermitianOperator

HermitianOperator::HermitianOperator(CMatrix m) : m_(std::move(m)) {
    require_square(m_, "HermitianOperator");
    const double defect = hermiticity_defect(m_);
    if (!(defect <= kHermitianTol * scale_of(m_))) {
        std::ostringstream os;
        os << "HermitianOperator: input is not Hermitian (defect " << defect << ")";
        throw ConfigError(os.str());
    }
    real_ = m_.imag().cwiseAbs().maxCoeff() == 0.0;
}

HermitianOperator::HermitianOperator(const RMatrix& m) : HermitianOperator(CMatrix(m.cast<Complex>())) {}

HermitianOperator::HermitianOperator(CMatrix m, Trusted) : m_(std::move(m)) {
    real_ = m_.imag().cwiseAbs().maxCoeff() == 0.0;
}

HermitianOperator HermitianOperator::symmetrized(const CMatrix& m) {
    require_square(m, "HermitianOperator::symmetrized");
    CMatrix h = 0.5 * (m + m.adjoint());
    return HermitianOperator(std::move(h), Trusted{});
}

HermitianOperator HermitianOperator::identity(Index dim) {
    return HermitianOperator(CMatrix(CMatrix::Identity(dim, dim)));
}

HermitianOperator HermitianOperator::zero(Index dim) {
    return HermitianOperator(CMatrix(CMatrix::Zero(dim, dim)));
}

HermitianOperator HermitianOperator::diagonal(const RVector& d) {
    CMatrix m = CMatrix::Zero(d.size(), d.size());
    m.diagonal() = d.cast<Complex>();
    return HermitianOperator(std::move(m));
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const {
    if (o.dim() != dim()) throw ConfigError("HermitianOperator +: dimension mismatch");
    return HermitianOperator(CMatrix(m_ + o.m_), Trusted{});
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& o) const {
    if (o.dim() != dim()) throw ConfigError("HermitianOperator -: dimension mismatch");
    return HermitianOperator(CMatrix(m_ - o.m_), Trusted{});
}

HermitianOperator HermitianOperator::scaled(double s) const {
    return HermitianOperator(CMatrix(s * m_), Trusted{});
}

double HermitianOperator::expectation(const CVector& v) const {
    return v.dot(m_ * v).real();
}

// ---------------------------------------------------------------- UnitaryOperator

UnitaryOperator::UnitaryOperator(CMatrix u) : u_(std::move(u)) {
    require_square(u_, "UnitaryOperator");
    const double defect = unitarity_defect(u_);
    if (!(defect <= kUnitaryTol)) {
        std::ostringstream os;
        os << "UnitaryOperator: U^dagger U deviates from identity by " << defect;
        throw ConfigError(os.str());
    }
}

UnitaryOperator UnitaryOperator::operator*(const UnitaryOperator& o) const {
    if (o.dim() != dim()) throw ConfigError("UnitaryOperator *: dimension mismatch");
    return UnitaryOperator(CMatrix(u_ * o.u_), Trusted{});
}

// ---------------------------------------------------------------- StateVector

StateVector::StateVector(CVector amplitudes) : a_(std::move(amplitudes)) {
    if (a_.size() < 1) throw ConfigError("StateVector: dimension must be >= 1");
    if (!a_.allFinite()) throw NumericalError("StateVector: non-finite amplitudes");
    const double n = a_.norm();
    if (!(std::abs(n - 1.0) <= kNormTol)) {
        std::ostringstream os;
        os << "StateVector: norm " << n << " differs from 1";
        throw ConfigError(os.str());
    }
}

StateVector StateVector::normalized(const CVector& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw ConfigError("StateVector::normalized: zero or non-finite vector");
    return StateVector(CVector(v / n));
}

StateVector StateVector::basis(Index dim, Index k) {
    if (k < 0 || k >= dim) throw ConfigError("StateVector::basis: index out of range");
    CVector v = CVector::Zero(dim);
    v(k) = 1.0;
    return StateVector(std::move(v));
}

// ---------------------------------------------------------------- DensityMatrix

DensityMatrix::DensityMatrix(CMatrix rho) : rho_(std::move(rho)) {
    require_square(rho_, "DensityMatrix");
    const double defect = hermiticity_defect(rho_);
    if (!(defect <= kHermitianTol)) {
        std::ostringstream os;
        os << "DensityMatrix: not Hermitian (defect " << defect << ")";
        throw ConfigError(os.str());
    }
    const Complex tr = rho_.trace();
    if (!(std::abs(tr - Complex(1.0, 0.0)) <= kTraceTol)) {
        std::ostringstream os;
        os << "DensityMatrix: trace " << tr.real() << " differs from 1";
        throw ConfigError(os.str());
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPositivityTol) {
        std::ostringstream os;
        os << "DensityMatrix: negative eigenvalue " << es.eigenvalues().minCoeff();
        throw ConfigError(os.str());
    }
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
    const CVector& a = psi.amplitudes();
    CMatrix rho = a * a.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(std::move(rho));
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
    return DensityMatrix(CMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim)));
}

// ---------------------------------------------------------------- SpectralDecomposition

SpectralDecomposition::SpectralDecomposition(RVector eigenvalues, CMatrix vectors)
    : values_(std::move(eigenvalues)), cvec_(std::move(vectors)), real_(false) {
    if (cvec_.rows() != values_.size() || cvec_.cols() != values_.size())
        throw ConfigError("SpectralDecomposition: shape mismatch");
}

SpectralDecomposition::SpectralDecomposition(RVector eigenvalues, RMatrix vectors)
    : values_(std::move(eigenvalues)), rvec_(std::move(vectors)), real_(true) {
    if (rvec_.rows() != values_.size() || rvec_.cols() != values_.size())
        throw ConfigError("SpectralDecomposition: shape mismatch");
}

CMatrix SpectralDecomposition::eigenvectors() const {
    return real_ ? CMatrix(rvec_.cast<Complex>()) : cvec_;
}

CVector SpectralDecomposition::eigenvector(Index k) const {
    return real_ ? CVector(rvec_.col(k).cast<Complex>()) : CVector(cvec_.col(k));
}

const RMatrix& SpectralDecomposition::real_eigenvectors() const {
    if (!real_) throw ConfigError("SpectralDecomposition: eigenvectors are complex");
    return rvec_;
}

CMatrix SpectralDecomposition::to_eigenbasis(const CMatrix& x) const {
    if (x.rows() != dim()) throw ConfigError("to_eigenbasis: dimension mismatch");
    if (!real_) return cvec_.adjoint() * x;
    const Index k = x.cols();
    RMatrix parts(x.rows(), 2 * k);
    parts.leftCols(k) = x.real();
    parts.rightCols(k) = x.imag();
    const RMatrix out = rvec_.transpose() * parts;
    CMatrix y(dim(), k);
    y.real() = out.leftCols(k);
    y.imag() = out.rightCols(k);
    return y;
}

CMatrix SpectralDecomposition::from_eigenbasis(const CMatrix& y) const {
    if (y.rows() != dim()) throw ConfigError("from_eigenbasis: dimension mismatch");
    if (!real_) return cvec_ * y;
    const Index k = y.cols();
    RMatrix parts(y.rows(), 2 * k);
    parts.leftCols(k) = y.real();
    parts.rightCols(k) = y.imag();
    const RMatrix out = rvec_ * parts;
    CMatrix x(dim(), k);
    x.real() = out.leftCols(k);
    x.imag() = out.rightCols(k);
    return x;
}

CMatrix SpectralDecomposition::apply_function(const std::function<Complex(double)>& f) const {
    CVector fd(dim());
    for (Index i = 0; i < dim(); ++i) fd(i) = f(values_(i));
    if (real_) {
        const CMatrix v = rvec_.cast<Complex>();
        return v * fd.asDiagonal() * v.transpose();
    }
    return cvec_ * fd.asDiagonal() * cvec_.adjoint();
}

CMatrix SpectralDecomposition::reconstruct() const {
    return apply_function([](double e) { return Complex(e, 0.0); });
}

UnitaryOperator SpectralDecomposition::propagator(double dt) const {
    if (!std::isfinite(dt)) throw ConfigError("propagator: time step must be finite");
    return UnitaryOperator(apply_function([dt](double e) { return std::exp(Complex(0.0, -e * dt)); }),
                           UnitaryOperator::Trusted{});
}

// ---------------------------------------------------------------- free functions

CMatrix tensor(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols()) throw ConfigError("tensor: operands must be square");
    const Index na = a.rows();
    const Index nb = b.rows();
    CMatrix out(na * nb, na * nb);
    for (Index j = 0; j < na; ++j)
        for (Index i = 0; i < na; ++i) out.block(i * nb, j * nb, nb, nb) = a(i, j) * b;
    return out;
}

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
    return HermitianOperator(tensor(a.matrix(), b.matrix()), HermitianOperator::Trusted{});
}

DensityMatrix partial_trace_env(const DensityMatrix& rho, Index dim_s, Index dim_e) {
    if (dim_s < 1 || dim_e < 1 || rho.dim() != dim_s * dim_e) {
        std::ostringstream os;
        os << "partial_trace_env: dimension " << rho.dim() << " != " << dim_s << " x " << dim_e;
        throw ConfigError(os.str());
    }
    const CMatrix& r = rho.matrix();
    CMatrix out = CMatrix::Zero(dim_s, dim_s);
    for (Index j = 0; j < dim_s; ++j)
        for (Index i = 0; i < dim_s; ++i) out(i, j) = r.block(i * dim_e, j * dim_e, dim_e, dim_e).trace();
    out = 0.5 * (out + out.adjoint()).eval();
    return DensityMatrix(std::move(out));
}

CMatrix reduced_density(const CVector& psi, Index dim_s, Index dim_e) {
    if (psi.size() != dim_s * dim_e) throw ConfigError("reduced_density: dimension mismatch");
    // column i of m holds the environment amplitudes of system level i
    Eigen::Map<const CMatrix> m(psi.data(), dim_e, dim_s);
    CMatrix rho = m.transpose() * m.conjugate();
    return 0.5 * (rho + rho.adjoint());
}

namespace {

// Some optimized BLAS builds pick kernels that return wrong results on a given
// CPU. One probe per process decides whether LAPACK output can be used.
bool lapack_probe() {
    const lapack_int n = 256;
    RMatrix s(n, n);
    CMatrix c(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j <= i; ++j) {
            const double x = std::sin(0.7 * static_cast<double>(i * n + j) + 0.3);
            const double y = i == j ? 0.0 : std::cos(1.3 * static_cast<double>(i + 2 * j));
            s(i, j) = s(j, i) = x;
            c(i, j) = Complex(x, y);
            c(j, i) = Complex(x, -y);
        }
    RMatrix a = s;
    CMatrix b = c;
    RVector wa(n), wb(n);
    if (LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, wa.data()) != 0) return false;
    if (LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, b.data(), n, wb.data()) != 0) return false;
    const double ra = (a * wa.asDiagonal() * a.transpose() - s).norm() / s.norm();
    const double rb = (b * wb.asDiagonal() * b.adjoint() - c).norm() / c.norm();
    return ra < 1e-10 && rb < 1e-10;
}

bool lapack_usable() {
    static const bool ok = [] {
        const bool good = lapack_probe();
        if (!good)
            std::cerr << "decowork: LAPACK eigensolver failed its accuracy probe; falling back to the built-in "
                         "solver (with OpenBLAS, setting OPENBLAS_CORETYPE=Haswell restores the fast path)\n";
        return good;
    }();
    return ok;
}

} // namespace

bool lapack_eigensolver_active() { return lapack_usable(); }

SpectralDecomposition eig_hermitian(const HermitianOperator& h) {
    const auto n = static_cast<lapack_int>(h.dim());
    RVector w(n);
    const bool fast = lapack_usable();
    if (h.is_real()) {
        RMatrix a = h.matrix().real();
        if (fast) {
            const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, w.data());
            if (info != 0) throw NumericalError("eig_hermitian: dsyevd failed with info " + std::to_string(info));
        } else {
            Eigen::SelfAdjointEigenSolver<RMatrix> es(a);
            if (es.info() != Eigen::Success) throw NumericalError("eig_hermitian: eigensolver did not converge");
            w = es.eigenvalues();
            a = es.eigenvectors();
        }
        for (Index k = 0; k < n; ++k) fix_phase(a.col(k));
        return SpectralDecomposition(std::move(w), std::move(a));
    }
    CMatrix a = h.matrix();
    if (fast) {
        const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, w.data());
        if (info != 0) throw NumericalError("eig_hermitian: zheevd failed with info " + std::to_string(info));
    } else {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
        if (es.info() != Eigen::Success) throw NumericalError("eig_hermitian: eigensolver did not converge");
        w = es.eigenvalues();
        a = es.eigenvectors();
    }
    for (Index k = 0; k < n; ++k) fix_phase(a.col(k));
    return SpectralDecomposition(std::move(w), std::move(a));
}

UnitaryOperator unitary_step(const HermitianOperator& h, double dt) {
    return eig_hermitian(h).propagator(dt);
}

namespace pauli {
CMatrix identity() { return CMatrix::Identity(2, 2); }
CMatrix x() {
    CMatrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}
CMatrix y() {
    CMatrix m(2, 2);
    m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
    return m;
}
CMatrix z() {
    CMatrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}
} // namespace pauli

} // namespace decowork
