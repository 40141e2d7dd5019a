// analysis.cpp: decoherence-analysis implementation

#include "decowork/analysis.hpp"

#include "decowork/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace decowork {

CMatrix partial_matrix_element(const CMatrix& full, const CVector& bra, const CVector& ket, Index dim_s, Index dim_e) {
    if (full.rows() != dim_s * dim_e || full.cols() != dim_s * dim_e)
        throw ConfigError("partial_matrix_element: operator dimension mismatch");
    if (bra.size() != dim_s || ket.size() != dim_s)
        throw ConfigError("partial_matrix_element: system vector dimension mismatch");
    CMatrix out = CMatrix::Zero(dim_e, dim_e);
    for (Index j = 0; j < dim_s; ++j) {
        if (ket(j) == 0.0) continue;
        for (Index i = 0; i < dim_s; ++i) {
            const Complex w = std::conj(bra(i)) * ket(j);
            if (w == 0.0) continue;
            out += w * full.block(i * dim_e, j * dim_e, dim_e, dim_e);
        }
    }
    return out;
}

namespace {

void require_level(Index level, Index n, const char* what) {
    if (level < 0 || level >= n) {
        std::ostringstream os;
        os << what << ": level index " << level << " outside [0, " << n << ")";
        throw ConfigError(os.str());
    }
}

Index bath_dim(const PerturbationSplit& split, const SpectralDecomposition& basis) {
    const Index ns = basis.dim();
    if (ns < 1 || split.h1.dim() % ns != 0) throw ConfigError("system basis does not divide the total dimension");
    return split.h1.dim() / ns;
}

} // namespace

VOperator build_v_operator(const PerturbationSplit& split, Index alpha, Index beta, const SpectralDecomposition& basis) {
    const Index ns = basis.dim();
    require_level(alpha, ns, "build_v_operator");
    require_level(beta, ns, "build_v_operator");
    if (alpha == beta) throw ConfigError("build_v_operator: alpha and beta must differ (V would vanish identically)");
    const Index ne = bath_dim(split, basis);
    const CVector a = basis.eigenvector(alpha);
    const CVector b = basis.eigenvector(beta);
    const CMatrix& h1 = split.h1.matrix();
    CMatrix v = partial_matrix_element(h1, b, b, ns, ne) - partial_matrix_element(h1, a, a, ns, ne);
    VOperator out{HermitianOperator::symmetrized(v), 0.0, false};
    out.magnitude = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
    const double scale = std::max(1.0, h1.size() ? h1.cwiseAbs().maxCoeff() : 0.0);
    out.degenerate = out.magnitude <= 1e-13 * scale;
    return out;
}

HermitianOperator h_eff_bath(const TotalModel& model, const PerturbationSplit& split, Index alpha,
                             const SpectralDecomposition& basis) {
    require_level(alpha, basis.dim(), "h_eff_bath");
    if (basis.dim() != model.n_s() || split.h1.dim() != model.dim())
        throw ConfigError("h_eff_bath: model, split and basis dimensions disagree");
    if (split.epsilon == 0.0) return model.h_e2();
    const CVector a = basis.eigenvector(alpha);
    const CMatrix shift = partial_matrix_element(split.h1.matrix(), a, a, model.n_s(), model.n_e());
    return HermitianOperator::symmetrized(model.h_e2().matrix() + split.epsilon * shift);
}

MatrixElementStats matrix_element_stats(const HermitianOperator& v, const HermitianOperator& h_eff,
                                        const WindowSpec& window) {
    if (v.dim() != h_eff.dim()) throw ConfigError("matrix_element_stats: operator dimensions differ");
    const SpectralDecomposition sd = eig_hermitian(h_eff);
    const auto r = window.resolve(sd.eigenvalues());
    if (r.count < 16) throw ConfigError("matrix_element_stats: window must hold at least 16 states");

    RMatrix mag2;
    RVector diag;
    if (sd.is_real() && v.is_real()) {
        const RMatrix w = sd.real_eigenvectors().middleCols(r.first, r.count);
        const RMatrix vw = w.transpose() * v.matrix().real() * w;
        mag2 = vw.cwiseAbs2();
        diag = vw.diagonal();
    } else {
        const CMatrix w = sd.eigenvectors().middleCols(r.first, r.count);
        const CMatrix vw = w.adjoint() * v.matrix() * w;
        mag2 = vw.cwiseAbs2();
        diag = vw.diagonal().real();
    }
    const double n = static_cast<double>(r.count);
    const double mean = diag.mean();
    MatrixElementStats out;
    out.sigma_v = std::sqrt((diag.array() - mean).square().sum() / n);
    out.vnd_sq_mean = (mag2.sum() - mag2.diagonal().sum()) / (n * (n - 1.0));
    const RVector& e = sd.eigenvalues();
    out.delta_mls = (e(r.first + r.count - 1) - e(r.first)) / (n - 1.0);
    return out;
}

double perturbative_border(double sigma_v, double delta_mls, double vnd_sq_mean) {
    if (sigma_v < 0.0 || delta_mls < 0.0 || vnd_sq_mean < 0.0)
        throw ConfigError("perturbative_border: inputs must be non-negative");
    if (sigma_v == 0.0) return 0.0;
    if (vnd_sq_mean == 0.0) return std::numeric_limits<double>::infinity();
    return sigma_v * delta_mls / (2.0 * std::numbers::pi * vnd_sq_mean);
}

double predict_gaussian_decay(double epsilon, double sigma_v, double t) {
    const double x = epsilon * sigma_v * t;
    return std::exp(-0.5 * x * x);
}

double predict_decoherence_rate(double epsilon, double sigma_v) {
    if (epsilon < 0.0 || sigma_v < 0.0) throw ConfigError("predict_decoherence_rate: inputs must be non-negative");
    return epsilon * sigma_v / std::numbers::sqrt2;
}

double predict_fgr_rate(double epsilon, double rho_e, double h1nd_sq_mean) {
    if (epsilon < 0.0 || rho_e < 0.0 || h1nd_sq_mean < 0.0)
        throw ConfigError("predict_fgr_rate: inputs must be non-negative");
    return 2.0 * std::numbers::pi * epsilon * epsilon * rho_e * h1nd_sq_mean;
}

double predicted_rate_ratio(double epsilon, double sigma_v, double rho_e, double h1nd_sq_mean) {
    const double re = predict_fgr_rate(epsilon, rho_e, h1nd_sq_mean);
    if (re == 0.0) return std::numeric_limits<double>::infinity();
    return predict_decoherence_rate(epsilon, sigma_v) / re;
}

double estimate_density_of_states(const RVector& h0_levels, const RVector& populated_levels, double mean_energy,
                                  double fraction) {
    if (populated_levels.size() < 2) throw ConfigError("estimate_density_of_states: need at least two populated levels");
    if (!(fraction > 0.0)) throw ConfigError("estimate_density_of_states: fraction must be positive");
    const double spread = populated_levels.maxCoeff() - populated_levels.minCoeff();
    const double width = fraction * spread;
    if (!(width > 0.0)) throw ConfigError("estimate_density_of_states: populated levels have zero spread");
    const double lo = mean_energy - 0.5 * width;
    const double hi = mean_energy + 0.5 * width;
    const auto count = std::count_if(h0_levels.begin(), h0_levels.end(), [&](double e) { return e >= lo && e <= hi; });
    if (count == 0) throw ConfigError("estimate_density_of_states: empty energy window");
    return static_cast<double>(count) / width;
}

double estimate_h1_offdiag_sq(const HermitianOperator& h1, const SpectralDecomposition& system_basis,
                              const SpectralDecomposition& bath, const WindowSpec& window) {
    const Index ns = system_basis.dim();
    const Index ne = bath.dim();
    if (h1.dim() != ns * ne) throw ConfigError("estimate_h1_offdiag_sq: dimension mismatch");
    if (ns < 2) throw ConfigError("estimate_h1_offdiag_sq: needs at least two system levels");
    const auto r = window.resolve(bath.eigenvalues());
    const CMatrix w = bath.eigenvectors().middleCols(r.first, r.count);
    double sum = 0.0;
    Index pairs = 0;
    for (Index a = 0; a < ns; ++a) {
        for (Index b = 0; b < ns; ++b) {
            if (a == b) continue;
            const CMatrix m = partial_matrix_element(h1.matrix(), system_basis.eigenvector(b),
                                                     system_basis.eigenvector(a), ns, ne);
            sum += (w.adjoint() * m * w).cwiseAbs2().mean();
            ++pairs;
        }
    }
    return sum / static_cast<double>(pairs);
}

// ---------------------------------------------------------------- fits

GaussianFit fit_gaussian_decay(const std::vector<double>& times, const std::vector<double>& magnitudes,
                               double threshold) {
    if (times.size() != magnitudes.size()) throw ConfigError("fit_gaussian_decay: series lengths differ");
    if (times.empty() || !(magnitudes.front() > 0.0))
        throw ConfigError("fit_gaussian_decay: series must start with a positive magnitude");
    if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("fit_gaussian_decay: threshold must lie in (0, 1)");
    const double m0 = magnitudes.front();
    const double lowest = *std::min_element(magnitudes.begin(), magnitudes.end());
    if (lowest >= 0.9 * m0) throw InsufficientDecay("insufficient decay: magnitude never fell below 0.9 of initial");

    std::size_t n = 0;
    while (n < magnitudes.size() && magnitudes[n] >= threshold * m0) ++n;
    if (n < 10) {
        std::ostringstream os;
        os << "fit_gaussian_decay: only " << n << " points above " << threshold << " of initial (need 10)";
        throw InsufficientDecay(os.str());
    }
    std::vector<double> x(n), y(n);
    double sxx = 0.0, sxy = 0.0, ysum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = times[i] - times.front();
        x[i] = -dt * dt;
        y[i] = std::log(magnitudes[i] / m0);
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        ysum += y[i];
    }
    const double slope = sxy / sxx;
    const double ymean = ysum / static_cast<double>(n);
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ss_res += (y[i] - slope * x[i]) * (y[i] - slope * x[i]);
        ss_tot += (y[i] - ymean) * (y[i] - ymean);
    }
    GaussianFit fit;
    fit.rate = std::sqrt(std::max(slope, 0.0));
    fit.quality = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
    fit.points = static_cast<Index>(n);
    return fit;
}

TransitionFit fit_transition_rate(const std::vector<double>& times, const std::vector<double>& population,
                                  double max_depletion, double noise_floor) {
    if (times.size() != population.size()) throw ConfigError("fit_transition_rate: series lengths differ");
    if (times.size() < 3) throw ConfigError("fit_transition_rate: need at least three samples");
    if (!(max_depletion > 0.0 && max_depletion <= 1.0))
        throw ConfigError("fit_transition_rate: max_depletion must lie in (0, 1]");
    if (std::abs(population.front() - 1.0) > 0.05)
        throw ConfigError("fit_transition_rate: population must start near 1");

    double deepest = 0.0;
    for (double p : population) deepest = std::max(deepest, 1.0 - p);
    const double duration = times.back() - times.front();
    if (deepest <= noise_floor) return TransitionFit{std::max(deepest, noise_floor) / duration, true, 0};

    std::size_t n = 0;
    while (n < population.size() && 1.0 - population[n] <= max_depletion) ++n;
    if (n < 3) throw InsufficientDecay("fit_transition_rate: fewer than three points before the depletion limit");

    double st = 0.0, sd = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        st += times[i];
        sd += 1.0 - population[i];
    }
    const double tm = st / static_cast<double>(n);
    const double dm = sd / static_cast<double>(n);
    double stt = 0.0, std_ = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        stt += (times[i] - tm) * (times[i] - tm);
        std_ += (times[i] - tm) * (1.0 - population[i] - dm);
    }
    return TransitionFit{std::max(std_ / stt, 0.0), false, static_cast<Index>(n)};
}

} // namespace decowork
