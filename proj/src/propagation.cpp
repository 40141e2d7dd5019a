// propagation.cpp: piecewise-frozen evolution with lazily applied phases

#include "decowork/propagation.hpp"

#include "decowork/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace decowork {

void TimeGrid::validate() const {
    if (!std::isfinite(t_start) || !std::isfinite(t_end)) throw ConfigError("TimeGrid: non-finite bounds");
    if (!(t_end > t_start)) throw ConfigError("TimeGrid: t_end must exceed t_start");
    if (n_steps < 1) throw ConfigError("TimeGrid: n_steps must be >= 1");
    if (sample_stride < 1) throw ConfigError("TimeGrid: sample_stride must be >= 1");
}

double TimeGrid::time_at(Index step) const {
    if (step == n_steps) return t_end;
    return t_start + static_cast<double>(step) * dt();
}

std::vector<Index> TimeGrid::sample_steps() const {
    std::vector<Index> out;
    for (Index s = 0; s <= n_steps; s += sample_stride) out.push_back(s);
    if (out.back() != n_steps) out.push_back(n_steps);
    return out;
}

TimeGrid TimeGrid::for_model(const TotalModel& model, double t_start, double t_end, Index samples) {
    if (samples < 1) throw ConfigError("TimeGrid: samples must be >= 1");
    const double rho = std::max(spectral_radius_bound(model), 1e-12);
    TimeGrid g;
    g.t_start = t_start;
    g.t_end = t_end;
    g.n_steps = std::max<Index>(1, static_cast<Index>(std::ceil((t_end - t_start) * rho / 0.5)));
    g.sample_stride = std::max<Index>(1, g.n_steps / samples);
    g.validate();
    return g;
}

SystemSchedule SystemSchedule::of(const TotalModel& model) {
    return SystemSchedule{model.h_s(), model.h_is(), model.mean_ie2(), model.protocol()};
}

HermitianOperator SystemSchedule::h_s_renormalized(double t) const {
    return h_s + h_is.scaled(protocol.lambda_at(t) * mean_ie2);
}

// ---------------------------------------------------------------- RdmTrajectory

RdmTrajectory::RdmTrajectory(SystemSchedule schedule, Index dim_s) : schedule_(std::move(schedule)), dim_s_(dim_s) {}

SpectralDecomposition RdmTrajectory::basis_at(double t) const {
    return eig_hermitian(schedule_.h_s_renormalized(t));
}

std::size_t RdmTrajectory::sample_index(double t) const {
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (std::abs(times_[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return i;
    }
    std::ostringstream os;
    os << "time " << t << " is not a recorded sample";
    throw ConfigError(os.str());
}

void RdmTrajectory::append(double t, DensityMatrix rho, std::optional<CVector> state,
                           std::optional<double> bath_energy) {
    if (rho.dim() != dim_s_) throw ConfigError("RdmTrajectory: rdm dimension mismatch");
    if (!times_.empty() && !(t > times_.back())) throw ConfigError("RdmTrajectory: times must increase");
    times_.push_back(t);
    rdms_.push_back(std::move(rho));
    if (state) states_.push_back(std::move(*state));
    if (bath_energy) bath_energies_.push_back(*bath_energy);
}

void RdmTrajectory::set_stats(double norm_drift, Index diagonalizations) {
    norm_drift_ = norm_drift;
    diagonalizations_ = diagonalizations;
}

// ---------------------------------------------------------------- evolve

std::vector<RdmTrajectory> evolve_batch(const TotalModel& model, const std::vector<StateVector>& initial,
                                        const TimeGrid& grid, const PropagationOptions& options) {
    grid.validate();
    if (initial.empty()) throw ConfigError("evolve: no initial states");
    if (!(options.dlambda_max >= 0.0)) throw ConfigError("evolve: dlambda_max must be >= 0");
    const Protocol& p = model.protocol();
    if (!p.contains(grid.t_start) || !p.contains(grid.t_end))
        throw ConfigError("evolve: time grid lies outside the protocol interval");
    const Index dim = model.dim();
    const Index ns = model.n_s();
    const Index ne = model.n_e();
    const Index k = static_cast<Index>(initial.size());

    CMatrix x(dim, k);
    for (Index c = 0; c < k; ++c) {
        if (initial[static_cast<std::size_t>(c)].dim() != dim) {
            std::ostringstream os;
            os << "evolve: initial state dimension " << initial[static_cast<std::size_t>(c)].dim()
               << " != model dimension " << dim;
            throw ConfigError(os.str());
        }
        x.col(c) = initial[static_cast<std::size_t>(c)].amplitudes();
    }

    const SystemSchedule schedule = SystemSchedule::of(model);
    std::vector<RdmTrajectory> out;
    out.reserve(static_cast<std::size_t>(k));
    for (Index c = 0; c < k; ++c) out.emplace_back(schedule, ns);

    double drift = 0.0;
    auto record = [&](double t, const CMatrix& states) {
        for (Index c = 0; c < k; ++c) {
            const auto col = states.col(c);
            if (!col.allFinite()) {
                std::ostringstream os;
                os << "evolve: non-finite amplitudes at t = " << t;
                throw NumericalError(os.str());
            }
            drift = std::max(drift, std::abs(col.norm() - 1.0));
            std::optional<CVector> kept;
            if (options.retain_states) kept = CVector(col);
            std::optional<double> eb;
            if (options.track_bath_energy) {
                Eigen::Map<const CMatrix> m(col.data(), ne, ns);
                eb = (m.adjoint() * model.h_e2().matrix() * m).trace().real();
            }
            out[static_cast<std::size_t>(c)].append(t, DensityMatrix(reduced_density(col, ns, ne)), std::move(kept),
                                                    eb);
        }
    };

    const std::vector<Index> samples = grid.sample_steps();
    std::size_t next_sample = 0;
    if (samples.front() == 0) {
        record(grid.t_start, x);
        ++next_sample;
    }

    const double dt = grid.dt();
    std::optional<SpectralDecomposition> cache;
    double cached_lambda = 0.0;
    CMatrix y;            // coefficients in the cached eigenbasis, up to pending phases
    Index pending = 0;    // steps not yet applied to y
    Index diagonalizations = 0;

    auto flush = [&] {
        if (pending == 0) return;
        const double tau = static_cast<double>(pending) * dt;
        const RVector& e = cache->eigenvalues();
        CVector phase(e.size());
        for (Index i = 0; i < e.size(); ++i) phase(i) = std::exp(Complex(0.0, -e(i) * tau));
        y = phase.asDiagonal() * y;
        pending = 0;
    };

    for (Index step = 0; step < grid.n_steps; ++step) {
        const double t_mid = grid.t_start + (static_cast<double>(step) + 0.5) * dt;
        const double lambda = p.lambda_at(t_mid);
        if (!cache || std::abs(lambda - cached_lambda) > options.dlambda_max) {
            if (cache) {
                flush();
                x = cache->from_eigenbasis(y);
            }
            cache.emplace(eig_hermitian(h_total_at(model, lambda)));
            cached_lambda = lambda;
            ++diagonalizations;
            y = cache->to_eigenbasis(x);
        }
        ++pending;
        if (next_sample < samples.size() && samples[next_sample] == step + 1) {
            flush();
            x = cache->from_eigenbasis(y);
            record(grid.time_at(step + 1), x);
            ++next_sample;
        }
    }

    for (auto& tr : out) tr.set_stats(drift, diagonalizations);
    return out;
}

RdmTrajectory evolve(const TotalModel& model, const StateVector& initial, const TimeGrid& grid,
                     const PropagationOptions& options) {
    auto batch = evolve_batch(model, {initial}, grid, options);
    return std::move(batch.front());
}

// ---------------------------------------------------------------- instantaneous basis

namespace {

CMatrix checked_basis(const RdmTrajectory& traj, double t) {
    const SpectralDecomposition sd = traj.basis_at(t);
    const RVector& e = sd.eigenvalues();
    for (Index i = 1; i < e.size(); ++i) {
        if (e(i) - e(i - 1) < 1e-9) {
            std::ostringstream os;
            os << "instantaneous basis ill-defined: degenerate H_S^r levels at t = " << t;
            throw NumericalError(os.str());
        }
    }
    return sd.eigenvectors();
}

void align_to(CMatrix& w, const CMatrix& previous) {
    for (Index c = 0; c < w.cols(); ++c) {
        const Complex o = previous.col(c).dot(w.col(c));
        if (std::abs(o) > 0.0) w.col(c) *= std::conj(o) / std::abs(o);
    }
}

} // namespace

std::vector<CMatrix> instantaneous_bases(const RdmTrajectory& traj) {
    std::vector<CMatrix> out;
    out.reserve(traj.size());
    for (double t : traj.times()) {
        CMatrix w = checked_basis(traj, t);
        if (!out.empty()) align_to(w, out.back());
        out.push_back(std::move(w));
    }
    return out;
}

CMatrix rdm_in_instantaneous_basis(const RdmTrajectory& traj, const TotalModel& model, double t) {
    if (model.n_s() != traj.dim_s()) throw ConfigError("rdm_in_instantaneous_basis: model does not match trajectory");
    const std::size_t target = traj.sample_index(t);
    CMatrix w;
    for (std::size_t i = 0; i <= target; ++i) {
        CMatrix next = checked_basis(traj, traj.times()[i]);
        if (i > 0) align_to(next, w);
        w = std::move(next);
    }
    return w.adjoint() * traj.rdms()[target].matrix() * w;
}

std::vector<CMatrix> rdms_in_instantaneous_basis(const RdmTrajectory& traj) {
    const auto bases = instantaneous_bases(traj);
    std::vector<CMatrix> out;
    out.reserve(bases.size());
    for (std::size_t i = 0; i < bases.size(); ++i)
        out.push_back(bases[i].adjoint() * traj.rdms()[i].matrix() * bases[i]);
    return out;
}

double coherence_norm(const CMatrix& rdm_in_basis) {
    if (rdm_in_basis.rows() != rdm_in_basis.cols()) throw ConfigError("coherence_norm: matrix must be square");
    double sum = 0.0;
    for (Index j = 0; j < rdm_in_basis.cols(); ++j)
        for (Index i = 0; i < rdm_in_basis.rows(); ++i)
            if (i != j) sum += std::norm(rdm_in_basis(i, j));
    return std::sqrt(sum);
}

RdmTrajectory mix_trajectories(const std::vector<RdmTrajectory>& parts, const std::vector<double>& weights) {
    if (parts.empty() || parts.size() != weights.size()) throw ConfigError("mix_trajectories: size mismatch");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw ConfigError("mix_trajectories: weights must be non-negative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-10) throw ConfigError("mix_trajectories: weights must sum to 1");
    const auto& first = parts.front();
    RdmTrajectory out(first.schedule(), first.dim_s());
    double drift = 0.0;
    Index diag = 0;
    for (const auto& part : parts) {
        if (part.times() != first.times()) throw ConfigError("mix_trajectories: sample times differ");
        drift = std::max(drift, part.norm_drift());
        diag = std::max(diag, part.diagonalizations());
    }
    for (std::size_t i = 0; i < first.size(); ++i) {
        CMatrix rho = CMatrix::Zero(first.dim_s(), first.dim_s());
        for (std::size_t j = 0; j < parts.size(); ++j) rho += weights[j] * parts[j].rdms()[i].matrix();
        out.append(first.times()[i], DensityMatrix(std::move(rho)));
    }
    out.set_stats(drift, diag);
    return out;
}

} // namespace decowork
