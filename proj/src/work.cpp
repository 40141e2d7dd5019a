// work.cpp: work-accounting implementation

#include "decowork/work.hpp"

#include "decowork/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace decowork {

WorkDistribution WorkDistribution::from_entries(std::vector<Entry> raw) {
    if (raw.empty()) throw ConfigError("WorkDistribution: no entries");
    double total = 0.0;
    for (const auto& e : raw) {
        if (!std::isfinite(e.work) || !std::isfinite(e.probability))
            throw NumericalError("WorkDistribution: non-finite entry");
        if (e.probability < -1e-12) throw NumericalError("WorkDistribution: negative probability");
        total += e.probability;
    }
    if (std::abs(total - 1.0) > 1e-10) {
        std::ostringstream os;
        os << "WorkDistribution: probabilities sum to " << total;
        throw NumericalError(os.str());
    }
    std::stable_sort(raw.begin(), raw.end(), [](const Entry& a, const Entry& b) { return a.work < b.work; });

    WorkDistribution d;
    for (const auto& e : raw) {
        const double p = std::max(e.probability, 0.0);
        if (!d.entries_.empty() && e.work - d.entries_.back().work <= 1e-9) {
            d.entries_.back().probability += p;
        } else {
            d.entries_.push_back({e.work, p});
        }
    }
    for (const auto& e : d.entries_) d.mean_ += e.probability * e.work;
    for (const auto& e : d.entries_) d.variance_ += e.probability * (e.work - d.mean_) * (e.work - d.mean_);
    return d;
}

RVector gibbs_weights(const RVector& energies, double beta) {
    if (!std::isfinite(beta) || beta < 0.0) throw ConfigError("gibbs_state: beta must be finite and >= 0");
    const double e0 = energies.minCoeff();
    RVector w = (-beta * (energies.array() - e0)).exp();
    return w / w.sum();
}

DensityMatrix gibbs_state(const HermitianOperator& h, double beta) {
    const SpectralDecomposition sd = eig_hermitian(h);
    const RVector w = gibbs_weights(sd.eigenvalues(), beta);
    const CMatrix v = sd.eigenvectors();
    const CMatrix rho = v * w.cast<Complex>().asDiagonal() * v.adjoint();
    return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

RVector populations(const CMatrix& rdm_in_basis) {
    if (rdm_in_basis.rows() != rdm_in_basis.cols()) throw ConfigError("populations: matrix must be square");
    RVector p = rdm_in_basis.diagonal().real();
    for (Index i = 0; i < p.size(); ++i) {
        if (p(i) < -1e-8) {
            std::ostringstream os;
            os << "populations: negative population " << p(i) << " at level " << i;
            throw NumericalError(os.str());
        }
    }
    if (std::abs(p.sum() - 1.0) > 1e-10) {
        std::ostringstream os;
        os << "populations: sum " << p.sum() << " differs from 1";
        throw NumericalError(os.str());
    }
    return p;
}

double mixture_work(const RdmTrajectory& traj, const TotalModel& model, double t0, double t1) {
    if (!(t1 > t0)) throw ConfigError("mixture_work: t1 must exceed t0");
    auto energy = [&](double t) {
        const CMatrix in_basis = rdm_in_instantaneous_basis(traj, model, t);
        const RVector e = traj.basis_at(t).eigenvalues();
        const double by_populations = populations(in_basis).dot(e);
        const CMatrix& rho = traj.rdms()[traj.sample_index(t)].matrix();
        const double by_trace = (rho * traj.schedule().h_s_renormalized(t).matrix()).trace().real();
        if (std::abs(by_populations - by_trace) > 1e-10 * std::max(1.0, std::abs(by_trace))) {
            std::ostringstream os;
            os << "mixture_work: population and trace energies disagree at t = " << t;
            throw NumericalError(os.str());
        }
        return by_populations;
    };
    return energy(t1) - energy(t0);
}

StateVector typical_bath_state(const TotalModel& model, std::uint64_t seed, double envelope) {
    if (!(envelope > 0.0)) throw ConfigError("typical_bath_state: envelope must be positive");
    const SpectralDecomposition& bath = model.bath_spectrum();
    const auto r = model.window_range();
    const RVector e = bath.eigenvalues().segment(r.first, r.count);
    const double center = e.mean();
    const double span = r.count > 1 ? e(r.count - 1) - e(0) : 1.0;
    const double sigma = envelope * (span > 0.0 ? span : 1.0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    CVector coeff(r.count);
    for (Index n = 0; n < r.count; ++n) {
        const double d = e(n) - center;
        const double amp = std::exp(-d * d / (4.0 * sigma * sigma));
        coeff(n) = amp * std::exp(Complex(0.0, 2.0 * std::numbers::pi * unit(rng)));
    }
    CVector psi;
    if (bath.is_real()) {
        const RMatrix& v = bath.real_eigenvectors();
        psi = v.middleCols(r.first, r.count).cast<Complex>() * coeff;
    } else {
        psi = bath.eigenvectors().middleCols(r.first, r.count) * coeff;
    }
    return StateVector::normalized(psi);
}

StateVector eigen_bath_state(const TotalModel& model) {
    const auto r = model.window_range();
    return StateVector::normalized(model.bath_spectrum().eigenvector(r.first + r.count / 2));
}

namespace {

CVector product(const CVector& sys, const CVector& bath) {
    CVector out(sys.size() * bath.size());
    for (Index i = 0; i < sys.size(); ++i) out.segment(i * bath.size(), bath.size()) = sys(i) * bath;
    return out;
}

void require_bath(const TotalModel& model, const StateVector& bath_state) {
    if (bath_state.dim() != model.n_e()) throw ConfigError("bath state dimension does not match the bath");
}

} // namespace

std::vector<StateVector> tpm_initial_states(const TotalModel& model, const StateVector& bath_state, double t0) {
    require_bath(model, bath_state);
    const SpectralDecomposition sys = eig_hermitian(h_s_renormalized(model, t0));
    std::vector<StateVector> out;
    for (Index a = 0; a < sys.dim(); ++a)
        out.push_back(StateVector::normalized(product(sys.eigenvector(a), bath_state.amplitudes())));
    return out;
}

StateVector coherent_gibbs_state(const TotalModel& model, const StateVector& bath_state, double beta, double t0) {
    require_bath(model, bath_state);
    const SpectralDecomposition sys = eig_hermitian(h_s_renormalized(model, t0));
    const RVector w = gibbs_weights(sys.eigenvalues(), beta);
    CVector s = CVector::Zero(sys.dim());
    for (Index a = 0; a < sys.dim(); ++a) s += std::sqrt(w(a)) * sys.eigenvector(a);
    return StateVector::normalized(product(s, bath_state.amplitudes()));
}

WorkDistribution tpm_from_branches(const std::vector<RdmTrajectory>& branches, const RVector& initial_weights,
                                   double t0, double t1) {
    if (branches.empty() || static_cast<Index>(branches.size()) != initial_weights.size())
        throw ConfigError("tpm_from_branches: one branch per initial level is required");
    const RdmTrajectory& first = branches.front();
    const SpectralDecomposition start = first.basis_at(t0);
    const SpectralDecomposition end = first.basis_at(t1);
    const CMatrix w1 = end.eigenvectors();
    std::vector<WorkDistribution::Entry> entries;
    for (std::size_t a = 0; a < branches.size(); ++a) {
        const auto& rho = branches[a].rdms()[branches[a].sample_index(t1)].matrix();
        const RVector q = populations(w1.adjoint() * rho * w1);
        for (Index b = 0; b < q.size(); ++b) {
            entries.push_back({end.eigenvalues()(b) - start.eigenvalues()(static_cast<Index>(a)),
                               initial_weights(static_cast<Index>(a)) * q(b)});
        }
    }
    return WorkDistribution::from_entries(std::move(entries));
}

WorkDistribution tpm_work_distribution(const TotalModel& model, double beta, const StateVector& bath_state,
                                       const TimeGrid& grid, const PropagationOptions& options) {
    require_bath(model, bath_state);
    const RVector p = gibbs_weights(eig_hermitian(h_s_renormalized(model, grid.t_start)).eigenvalues(), beta);
    if (grid.t_end == grid.t_start) return WorkDistribution::from_entries({{0.0, 1.0}});
    const auto branches = evolve_batch(model, tpm_initial_states(model, bath_state, grid.t_start), grid, options);
    return tpm_from_branches(branches, p, grid.t_start, grid.t_end);
}

JarzynskiResult jarzynski_check(const WorkDistribution& dist, double beta, const HermitianOperator& h_init,
                                const HermitianOperator& h_final) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("jarzynski_check: beta must be positive");
    auto log_z = [beta](const HermitianOperator& h) {
        const RVector e = eig_hermitian(h).eigenvalues();
        const double e0 = e.minCoeff();
        return -beta * e0 + std::log((-beta * (e.array() - e0)).exp().sum());
    };
    JarzynskiResult r;
    for (const auto& e : dist.entries()) r.lhs += e.probability * std::exp(-beta * e.work);
    r.delta_f = -(log_z(h_final) - log_z(h_init)) / beta;
    const double target = std::exp(-beta * r.delta_f);
    r.relative_deviation = std::abs(r.lhs - target) / target;
    return r;
}

} // namespace decowork
