// work.hpp: mixture work, two-point-measurement work and the Jarzynski diagnostic

#pragma once

#include "decowork/linalg.hpp"
#include "decowork/model.hpp"
#include "decowork/propagation.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace decowork {

class WorkDistribution {
public:
    struct Entry {
        double work = 0.0;
        double probability = 0.0;
    };

    // Sorts by work value and merges values closer than 1e-9. Probabilities must
    // be non-negative and sum to 1 within 1e-10.
    static WorkDistribution from_entries(std::vector<Entry> raw);

    const std::vector<Entry>& entries() const noexcept { return entries_; }
    double mean() const noexcept { return mean_; }
    double variance() const noexcept { return variance_; }

private:
    std::vector<Entry> entries_;
    double mean_ = 0.0;
    double variance_ = 0.0;
};

struct JarzynskiResult {
    double lhs = 0.0;     // ⟨e^{-βW}⟩
    double delta_f = 0.0; // -(1/β) ln(Z_final / Z_init)
    double relative_deviation = 0.0;
};

struct WorkRecord {
    double mixture_work = 0.0;
    WorkDistribution tpm;
    JarzynskiResult jarzynski;
};

// Boltzmann weights e^{-βE}/Z for the given levels.
RVector gibbs_weights(const RVector& energies, double beta);
DensityMatrix gibbs_state(const HermitianOperator& h, double beta);

// Real diagonal of an RDM expressed in an energy basis.
RVector populations(const CMatrix& rdm_in_basis);

// Σ p(t1)E(t1) - Σ p(t0)E(t0) in the instantaneous basis of H_S^r; the trace form
// Tr ρ^S H_S^r is evaluated as well and must agree within 1e-10.
double mixture_work(const RdmTrajectory& traj, const TotalModel& model, double t0, double t1);

// Gaussian envelope (width `envelope`·window span, centred on the window) times
// seeded random phases over the window eigenstates of H_E2.
StateVector typical_bath_state(const TotalModel& model, std::uint64_t seed, double envelope = 1.0);
// The window's central eigenstate of H_E2.
StateVector eigen_bath_state(const TotalModel& model);

// |α(t0)⟩ ⊗ |bath⟩ for every level α of H_S^r(t0).
std::vector<StateVector> tpm_initial_states(const TotalModel& model, const StateVector& bath_state, double t0);
// Σ_α √p_α |α(t0)⟩ ⊗ |bath⟩: Gibbs populations carried as coherent amplitudes.
StateVector coherent_gibbs_state(const TotalModel& model, const StateVector& bath_state, double beta, double t0);

// Assemble the TPM distribution from per-branch trajectories started in |α(t0)⟩.
WorkDistribution tpm_from_branches(const std::vector<RdmTrajectory>& branches, const RVector& initial_weights,
                                   double t0, double t1);

WorkDistribution tpm_work_distribution(const TotalModel& model, double beta, const StateVector& bath_state,
                                       const TimeGrid& grid, const PropagationOptions& options = {});

JarzynskiResult jarzynski_check(const WorkDistribution& dist, double beta, const HermitianOperator& h_init,
                                const HermitianOperator& h_final);

} // namespace decowork
