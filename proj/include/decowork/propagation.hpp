// propagation.hpp: time evolution of the total state and reduced-density trajectories
//
// H(t) is frozen at the step midpoint and re-diagonalized only when λ has moved
// by more than dλ_max since the cached decomposition. Between cache switches the
// state is kept in the eigenbasis and phases are accumulated lazily, so a step
// that neither samples nor switches costs O(1).

#pragma once

#include "decowork/linalg.hpp"
#include "decowork/model.hpp"

#include <optional>
#include <vector>

namespace decowork {

struct TimeGrid {
    double t_start = 0.0;
    double t_end = 1.0;
    Index n_steps = 1;
    Index sample_stride = 1;

    void validate() const;
    double dt() const { return (t_end - t_start) / static_cast<double>(n_steps); }
    double time_at(Index step) const;
    // Recorded step indices: 0, multiples of the stride, and the final step.
    std::vector<Index> sample_steps() const;

    // Step count from dt·ρ ≤ 0.5 with ρ the Gershgorin bound of the model; the
    // stride is chosen to give roughly `samples` recorded points.
    static TimeGrid for_model(const TotalModel& model, double t_start, double t_end, Index samples);
};

struct PropagationOptions {
    double dlambda_max = 1e-3;
    bool retain_states = false;
    // Record ⟨I ⊗ H_E2⟩ at every sample (system-bath energy exchange diagnostic).
    bool track_bath_energy = false;
};

// System renormalized Hamiltonian along a schedule; small enough to keep with a trajectory.
struct SystemSchedule {
    HermitianOperator h_s;
    HermitianOperator h_is;
    double mean_ie2 = 0.0;
    Protocol protocol;

    static SystemSchedule of(const TotalModel& model);
    HermitianOperator h_s_renormalized(double t) const;
};

class RdmTrajectory {
public:
    RdmTrajectory(SystemSchedule schedule, Index dim_s);

    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<DensityMatrix>& rdms() const noexcept { return rdms_; }
    const std::vector<CVector>& states() const noexcept { return states_; }
    const std::vector<double>& bath_energies() const noexcept { return bath_energies_; }
    std::size_t size() const noexcept { return times_.size(); }
    Index dim_s() const noexcept { return dim_s_; }
    const SystemSchedule& schedule() const noexcept { return schedule_; }

    // Eigenbasis of H_S^r at time t (no continuity alignment).
    SpectralDecomposition basis_at(double t) const;
    // Position of a recorded time; throws when t was not sampled.
    std::size_t sample_index(double t) const;

    // Largest |‖ψ‖ - 1| seen at the recorded samples.
    double norm_drift() const noexcept { return norm_drift_; }
    Index diagonalizations() const noexcept { return diagonalizations_; }

    void append(double t, DensityMatrix rho, std::optional<CVector> state = std::nullopt,
                std::optional<double> bath_energy = std::nullopt);
    void set_stats(double norm_drift, Index diagonalizations);

private:
    SystemSchedule schedule_;
    Index dim_s_;
    std::vector<double> times_;
    std::vector<DensityMatrix> rdms_;
    std::vector<CVector> states_;
    std::vector<double> bath_energies_;
    double norm_drift_ = 0.0;
    Index diagonalizations_ = 0;
};

// Evolve several initial states together. They share every diagonalization of H(t).
std::vector<RdmTrajectory> evolve_batch(const TotalModel& model, const std::vector<StateVector>& initial,
                                        const TimeGrid& grid, const PropagationOptions& options = {});

RdmTrajectory evolve(const TotalModel& model, const StateVector& initial, const TimeGrid& grid,
                     const PropagationOptions& options = {});

// Eigenvectors of H_S^r at every recorded sample, columns ascending in energy and
// phase-aligned with the previous sample. Throws NumericalError on a degenerate spectrum.
std::vector<CMatrix> instantaneous_bases(const RdmTrajectory& traj);

// W† ρ^S(t) W in the continuity-tracked instantaneous basis.
CMatrix rdm_in_instantaneous_basis(const RdmTrajectory& traj, const TotalModel& model, double t);
// Same for every sample in one pass.
std::vector<CMatrix> rdms_in_instantaneous_basis(const RdmTrajectory& traj);

// Frobenius norm of the off-diagonal part.
double coherence_norm(const CMatrix& rdm_in_basis);

// Σ_k w_k ρ_k over trajectories sharing the same sample times.
RdmTrajectory mix_trajectories(const std::vector<RdmTrajectory>& parts, const std::vector<double>& weights);

} // namespace decowork
