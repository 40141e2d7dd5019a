// model.hpp: system + chaotic bath Hamiltonian family, renormalized split,
// control protocol and the frozen perturbation split
//
//   H(t) = H_S ⊗ I + λ(t) H_I^S ⊗ H_I^{E2} + I ⊗ H_{E2}
//        = H_S^r(t) ⊗ I + λ(t) H_I^{r2} + I ⊗ H_{E2}
//   H_S^r(t) = H_S + λ(t) m H_I^S,   H_I^{r2} = H_I^S ⊗ (H_I^{E2} - m I)
//
// with m the per-state mean of H_I^{E2} over a window of H_{E2} eigenstates.

#pragma once

#include "decowork/linalg.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

namespace decowork {

enum class RampShape { constant, linear, smooth };

RampShape parse_ramp_shape(const std::string& name);
std::string to_string(RampShape shape);

struct Protocol {
    double t0 = 0.0;
    double t1 = 1.0;
    double lambda0 = 0.0;
    double lambda1 = 0.0;
    RampShape shape = RampShape::constant;

    void validate() const;
    bool contains(double t) const;
    // Throws ConfigError outside [t0, t1] (a relative slack of 1e-12 is allowed).
    double lambda_at(double t) const;
};

// Contiguous block of eigenstates of a bath Hamiltonian. Without a center the
// block sits at the spectrum midpoint energy.
struct WindowSpec {
    std::optional<double> center_energy;
    std::optional<Index> center_index;
    Index count = 0;

    struct Range {
        Index first = 0;
        Index count = 0;
    };
    // Resolve against ascending eigenvalues.
    Range resolve(const RVector& ascending) const;
};

// [[model-builder]] ---------------------------------------------------------

// GOE: off-diagonal variance scale²/dim, diagonal variance 2·scale²/dim.
HermitianOperator build_goe_bath(Index dim, double scale, std::uint64_t seed);

// Open Ising chain Σ j σz σz + Σ (h_x σx + h_z σz); site 0 is the slowest factor.
HermitianOperator build_spin_chain_bath(int sites, double j_coupling, double h_x, double h_z);

// (1/N_w) Σ_{n∈window} ⟨n|h_ie2|n⟩ with |n⟩ eigenstates of h_e2.
double window_trace(const HermitianOperator& h_ie2, const HermitianOperator& h_e2, const WindowSpec& window);
double window_trace(const HermitianOperator& h_ie2, const SpectralDecomposition& bath, const WindowSpec& window);

// Rescale a bath coupling factor so that its off-diagonal elements between
// window eigenstates of the bath have unit mean square.
HermitianOperator normalize_window_coupling(const HermitianOperator& coupling, const SpectralDecomposition& bath,
                                            const WindowSpec& window);

class TotalModel {
public:
    TotalModel(HermitianOperator h_s, HermitianOperator h_is, HermitianOperator h_e2, HermitianOperator h_ie2,
               WindowSpec window, Protocol protocol);

    Index n_s() const noexcept { return h_s_.dim(); }
    Index n_e() const noexcept { return h_e2_.dim(); }
    Index dim() const noexcept { return n_s() * n_e(); }

    const HermitianOperator& h_s() const noexcept { return h_s_; }
    const HermitianOperator& h_is() const noexcept { return h_is_; }
    const HermitianOperator& h_e2() const noexcept { return h_e2_; }
    const HermitianOperator& h_ie2() const noexcept { return h_ie2_; }
    // Window with the center pinned to an index of the h_e2 spectrum.
    const WindowSpec& window() const noexcept { return window_; }
    WindowSpec::Range window_range() const noexcept { return range_; }
    const Protocol& protocol() const noexcept { return protocol_; }
    double mean_ie2() const noexcept { return mean_ie2_; }
    const SpectralDecomposition& bath_spectrum() const noexcept { return *bath_; }

    // H_I^{E2} - m I
    const HermitianOperator& centered_bath_coupling() const noexcept { return centered_; }

    // Same bath and coupling under a different schedule.
    TotalModel with_protocol(Protocol protocol) const;

private:
    HermitianOperator h_s_;
    HermitianOperator h_is_;
    HermitianOperator h_e2_;
    HermitianOperator h_ie2_;
    std::shared_ptr<const SpectralDecomposition> bath_;
    WindowSpec window_;
    WindowSpec::Range range_;
    Protocol protocol_;
    double mean_ie2_ = 0.0;
    HermitianOperator centered_;
};

// H_S + λ m H_I^S, as a function of the control value.
HermitianOperator h_s_renormalized_at(const TotalModel& model, double lambda);
HermitianOperator h_s_renormalized(const TotalModel& model, double t);
// H_I^S ⊗ (H_I^{E2} - m I)
HermitianOperator h_i_r2(const TotalModel& model);
HermitianOperator h_total_at(const TotalModel& model, double lambda);
HermitianOperator h_total(const TotalModel& model, double t);
// H_S ⊗ I + λ H_I^S ⊗ H_I^{E2} + I ⊗ H_{E2}, assembled without the renormalization.
HermitianOperator h_total_unrenormalized(const TotalModel& model, double lambda);

struct PerturbationSplit {
    HermitianOperator h0;
    HermitianOperator h1;
    double epsilon = 0.0;
    double t0 = 0.0;
};

PerturbationSplit perturbation_split(const TotalModel& model, double t0);
// (λ(t) - λ(t0)) m H_I^S
HermitianOperator delta_h_s(const TotalModel& model, double t);

// Gershgorin bound on the spectral radius of H(t) maximized over the protocol endpoints.
double spectral_radius_bound(const TotalModel& model);

} // namespace decowork
