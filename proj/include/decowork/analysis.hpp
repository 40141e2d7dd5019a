// analysis.hpp: bath matrix-element statistics, rate predictions and rate estimators
//
//   V = ⟨β|H_1|β⟩ - ⟨α|H_1|α⟩                  (bath operator)
//   ε_p = σ_v Δ / (2π V̄²_nd)
//   |ρ_αβ(t)| ∝ exp(-ε² σ_v² t² / 2),  R_d = ε σ_v / √2
//   R_E = 2π ε² ρ_E ⟨H²_1,nd⟩
// with ħ = 1 throughout.

#pragma once

#include "decowork/linalg.hpp"
#include "decowork/model.hpp"

#include <vector>

namespace decowork {

struct RateReport {
    double epsilon = 0.0;
    double sigma_v = 0.0;
    double vnd_sq_mean = 0.0;
    double delta_mls = 0.0;
    double epsilon_p = 0.0;
    double r_d_predicted = 0.0;
    double r_d_fitted = 0.0;
    double fit_quality = 0.0;
    double r_e_predicted = 0.0;
    double r_e_fitted = 0.0;
    bool r_e_upper_bound = false;
    double rho_e = 0.0;
    double h1nd_sq_mean = 0.0;
};

// Bath operator ⟨bra|X|ket⟩_S = Σ_ij conj(bra_i) ket_j X_(i,j) for X on system ⊗ bath.
CMatrix partial_matrix_element(const CMatrix& full, const CVector& bra, const CVector& ket, Index dim_s, Index dim_e);

struct VOperator {
    HermitianOperator op;
    // Largest |V_ij|; V vanishes (degenerate coupling) when both levels see the same bath operator.
    double magnitude = 0.0;
    bool degenerate = false;
};

// `basis` is the eigenbasis of H_S^r(t0); alpha and beta index its columns.
VOperator build_v_operator(const PerturbationSplit& split, Index alpha, Index beta, const SpectralDecomposition& basis);

// H_E2 + ε ⟨α|H_1|α⟩
HermitianOperator h_eff_bath(const TotalModel& model, const PerturbationSplit& split, Index alpha,
                             const SpectralDecomposition& basis);

struct MatrixElementStats {
    double sigma_v = 0.0;
    double vnd_sq_mean = 0.0;
    double delta_mls = 0.0;
};

// Statistics of V in the eigenbasis of h_eff over a window of at least 16 states.
MatrixElementStats matrix_element_stats(const HermitianOperator& v, const HermitianOperator& h_eff,
                                        const WindowSpec& window);

// +infinity when vnd_sq_mean is zero.
double perturbative_border(double sigma_v, double delta_mls, double vnd_sq_mean);
double predict_gaussian_decay(double epsilon, double sigma_v, double t);
double predict_decoherence_rate(double epsilon, double sigma_v);
double predict_fgr_rate(double epsilon, double rho_e, double h1nd_sq_mean);
// R_d / R_E from the two predictions; +infinity when R_E vanishes.
double predicted_rate_ratio(double epsilon, double sigma_v, double rho_e, double h1nd_sq_mean);

// Levels of H_0 inside a band of width `fraction`·(populated spread) centred on
// `mean_energy`, divided by the band width.
double estimate_density_of_states(const RVector& h0_levels, const RVector& populated_levels, double mean_energy,
                                  double fraction = 0.1);

// Mean over α ≠ α' of |⟨α'|⟨μ'|H_1|μ⟩|α⟩|² with |μ⟩, |μ'⟩ running over the
// bath window (all ordered pairs). `system_basis` columns are the |α⟩.
double estimate_h1_offdiag_sq(const HermitianOperator& h1, const SpectralDecomposition& system_basis,
                              const SpectralDecomposition& bath, const WindowSpec& window);

struct GaussianFit {
    double rate = 0.0;
    double quality = 0.0;
    Index points = 0;
};

// Least squares of ln(m/m0) against -R² (t - t0)² over the leading stretch with
// m ≥ threshold·m0. Throws InsufficientDecay if m never falls below 0.9·m0.
GaussianFit fit_gaussian_decay(const std::vector<double>& times, const std::vector<double>& magnitudes,
                               double threshold = 0.2);

struct TransitionFit {
    double rate = 0.0;
    bool upper_bound = false;
    Index points = 0;
};

// Slope of a straight-line fit of 1 - p(t) over the leading stretch with
// depletion ≤ max_depletion. When the depletion never exceeds noise_floor the
// result is an upper bound noise_floor / duration.
TransitionFit fit_transition_rate(const std::vector<double>& times, const std::vector<double>& population,
                                  double max_depletion = 0.2, double noise_floor = 1e-4);

} // namespace decowork
