// linalg.hpp: dense Hermitian operators, states, spectral decomposition, unitary steps
//
// Composite spaces are ordered system ⊗ environment: basis index i·dim_e + k
// refers to system level i and environment level k. Units have ħ = 1.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>

namespace decowork {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kNormTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPositivityTol = 1e-10;

// max_ij |m_ij - conj(m_ji)|
double hermiticity_defect(const CMatrix& m);
// max_ij |(U†U - I)_ij|
double unitarity_defect(const CMatrix& u);

// Square complex matrix equal to its adjoint. The check is elementwise with
// tolerance kHermitianTol·max(1, max|entry|) so that large-scale baths do not
// fail on the last ulp.
class HermitianOperator {
public:
    explicit HermitianOperator(CMatrix m);
    explicit HermitianOperator(const RMatrix& m);

    // (m + m†)/2 without a tolerance check; for results of basis changes.
    static HermitianOperator symmetrized(const CMatrix& m);
    static HermitianOperator identity(Index dim);
    static HermitianOperator zero(Index dim);
    static HermitianOperator diagonal(const RVector& d);

    Index dim() const noexcept { return m_.rows(); }
    const CMatrix& matrix() const noexcept { return m_; }
    // True when every imaginary part is exactly zero (real symmetric).
    bool is_real() const noexcept { return real_; }
    Complex operator()(Index i, Index j) const { return m_(i, j); }

    HermitianOperator operator+(const HermitianOperator& o) const;
    HermitianOperator operator-(const HermitianOperator& o) const;
    HermitianOperator scaled(double s) const;
    // <v|H|v>
    double expectation(const CVector& v) const;

private:
    struct Trusted {};
    HermitianOperator(CMatrix m, Trusted);
    CMatrix m_;
    bool real_ = false;

    friend HermitianOperator tensor(const HermitianOperator&, const HermitianOperator&);
};

class UnitaryOperator {
public:
    // Validates U†U = I within kUnitaryTol.
    explicit UnitaryOperator(CMatrix u);

    Index dim() const noexcept { return u_.rows(); }
    const CMatrix& matrix() const noexcept { return u_; }
    CVector apply(const CVector& v) const { return u_ * v; }
    UnitaryOperator operator*(const UnitaryOperator& o) const;

private:
    struct Trusted {};
    UnitaryOperator(CMatrix u, Trusted) : u_(std::move(u)) {}
    CMatrix u_;

    friend class SpectralDecomposition;
};

class StateVector {
public:
    // Validates unit norm within kNormTol.
    explicit StateVector(CVector amplitudes);
    static StateVector normalized(const CVector& v);
    static StateVector basis(Index dim, Index k);

    Index dim() const noexcept { return a_.size(); }
    const CVector& amplitudes() const noexcept { return a_; }

private:
    CVector a_;
};

class DensityMatrix {
public:
    // Validates Hermiticity, unit trace and positivity (smallest eigenvalue ≥ -kPositivityTol).
    explicit DensityMatrix(CMatrix rho);
    static DensityMatrix from_pure(const StateVector& psi);
    static DensityMatrix maximally_mixed(Index dim);

    Index dim() const noexcept { return rho_.rows(); }
    const CMatrix& matrix() const noexcept { return rho_; }
    Complex operator()(Index i, Index j) const { return rho_(i, j); }

private:
    CMatrix rho_;
};

// Eigenpairs of a Hermitian operator. Eigenvalues ascend; column k of the
// eigenvector matrix belongs to eigenvalue k and has its largest-magnitude
// component real and positive (first such index on ties). Real symmetric input
// keeps a real eigenvector matrix, which halves the cost of basis changes.
class SpectralDecomposition {
public:
    SpectralDecomposition(RVector eigenvalues, CMatrix vectors);
    SpectralDecomposition(RVector eigenvalues, RMatrix vectors);

    Index dim() const noexcept { return values_.size(); }
    const RVector& eigenvalues() const noexcept { return values_; }
    bool is_real() const noexcept { return real_; }
    CMatrix eigenvectors() const;
    CVector eigenvector(Index k) const;
    // Only valid when is_real().
    const RMatrix& real_eigenvectors() const;

    // V† x and V y for blocks of column vectors.
    CMatrix to_eigenbasis(const CMatrix& x) const;
    CMatrix from_eigenbasis(const CMatrix& y) const;

    // V f(Λ) V†
    CMatrix apply_function(const std::function<Complex(double)>& f) const;
    CMatrix reconstruct() const;
    UnitaryOperator propagator(double dt) const;

private:
    RVector values_;
    RMatrix rvec_;
    CMatrix cvec_;
    bool real_ = false;
};

// Kronecker product; a is the slow (system) factor.
CMatrix tensor(const CMatrix& a, const CMatrix& b);
HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b);

// Tr_E ρ for ρ on a system ⊗ environment space.
DensityMatrix partial_trace_env(const DensityMatrix& rho, Index dim_s, Index dim_e);
// Tr_E |ψ⟩⟨ψ| without forming the full density matrix.
CMatrix reduced_density(const CVector& psi, Index dim_s, Index dim_e);

SpectralDecomposition eig_hermitian(const HermitianOperator& h);
// False when the linked LAPACK failed its accuracy probe and a slower built-in
// solver is used instead.
bool lapack_eigensolver_active();

// exp(-i h dt) = V exp(-iΛdt) V†
UnitaryOperator unitary_step(const HermitianOperator& h, double dt);

// Pauli matrices.
namespace pauli {
CMatrix identity();
CMatrix x();
CMatrix y();
CMatrix z();
} // namespace pauli

} // namespace decowork
