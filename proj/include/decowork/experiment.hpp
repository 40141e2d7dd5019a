// experiment.hpp: experiment orchestration: decay, scaling, border, adiabatic work,
// window trend, and the synthetic self-test

#pragma once

#include "decowork/analysis.hpp"
#include "decowork/config.hpp"
#include "decowork/work.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace decowork {

// Runs job(i) for i in [0, n) on `workers` threads; results keep index order.
// The first exception thrown by any job is rethrown after all workers stop.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& job);

// Matrix-element statistics of the (alpha, beta) pair at coupling epsilon; h_eff
// uses the given epsilon (zero gives the bare bath).
struct PairStatistics {
    Index alpha = 0;
    Index beta = 1;
    double epsilon = 0.0;
    MatrixElementStats stats;
    double epsilon_p = 0.0;
    bool degenerate = false;
};
PairStatistics pair_statistics(const TotalModel& model, Index alpha, Index beta, double epsilon);

// ---------------------------------------------------------------- decay

struct DecayResult {
    std::uint64_t seed = 0;
    Index alpha = 0;
    Index beta = 1;
    RateReport report;
    bool above_border = false;
    std::vector<double> times;
    std::vector<double> coherence; // |ρ_αβ| in the instantaneous basis
    std::vector<double> predicted; // |ρ_αβ(0)| · Gaussian prediction
    std::vector<double> population_times;
    std::vector<double> population; // ρ_αα for a run started in |α⟩
    double norm_drift = 0.0;
};

// ε_p of the uncoupled model (ε = 0 basis and bare bath).
double bare_border(const ExperimentConfig& config, std::uint64_t seed);

// Self-consistent border: ε_p evaluated at ε = decay.epsilon_factor·ε_p. The
// statistics depend on ε through the renormalized basis and h_eff, so this is
// a damped fixed-point iteration started from the bare border.
double model_border(const ExperimentConfig& config, std::uint64_t seed);

// Coupling ε: explicit value, else decay.epsilon_factor·model_border.
DecayResult run_decay(const ExperimentConfig& config, std::uint64_t seed, std::optional<double> epsilon = std::nullopt);

// ---------------------------------------------------------------- scaling

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double std_error = 0.0;
    double ci_low = 0.0; // 95 %
    double ci_high = 0.0;
    Index points = 0;
};
// Least squares of ln y against ln x; needs at least two points.
SlopeFit loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ScalingPoint {
    double factor = 0.0;
    double epsilon = 0.0;
    double r_d = 0.0; // seed mean of fitted rates
    double r_e = 0.0;
    double r_d_predicted = 0.0;
    double r_e_predicted = 0.0;
    double ratio = 0.0;
    double min_fit_quality = 0.0;
    bool above_border = false;
    bool r_e_upper_bound = false;
    std::vector<DecayResult> runs;
};

struct ScalingResult {
    double epsilon_p = 0.0; // seed mean
    std::vector<double> seed_borders;
    std::vector<ScalingPoint> points;
    std::optional<SlopeFit> r_d_slope;
    std::optional<SlopeFit> r_e_slope;
    std::vector<std::string> warnings;
};

ScalingResult run_scaling(const ExperimentConfig& config, int workers = 1);

// ---------------------------------------------------------------- border

struct BorderResult {
    std::uint64_t seed = 0;
    std::vector<PairStatistics> rows;
};
BorderResult run_border(const ExperimentConfig& config, std::uint64_t seed);

// ---------------------------------------------------------------- adiabatic work

struct RampResult {
    double ramp_time = 0.0;
    std::vector<double> times;
    std::vector<double> lambda;
    std::vector<double> coherence_gibbs;    // branch mixture started from the Gibbs RDM
    std::vector<double> coherence_coherent; // run started with Gibbs amplitudes in superposition
    std::vector<RVector> populations_coherent;
    std::vector<double> bath_energy;        // ⟨I⊗H_E2⟩ along the coherent run
    double mixture_work = 0.0;              // coherent run
    double mixture_work_gibbs = 0.0;        // branch mixture
    double adiabatic_work = 0.0;            // Σ p_α (E_α(t1) - E_α(t0))
    WorkDistribution tpm;
    JarzynskiResult jarzynski;
    double span = 0.0;                      // max spectral width of H_S^r at the endpoints
    double discrepancy = 0.0;               // |mixture - TPM mean|
    double gibbs_max_after_transient = 0.0;
    std::optional<double> coherent_first_below;
    double coherent_max_after_first_below = 0.0;
    double norm_drift = 0.0;
    Index diagonalizations = 0;
};

struct WorkResult {
    std::uint64_t seed = 0;
    std::vector<RampResult> ramps;
};

RampResult run_ramp(const ExperimentConfig& config, std::uint64_t seed, double ramp_time);
WorkResult run_adiabatic_work(const ExperimentConfig& config, std::uint64_t seed, int workers = 1);

// ---------------------------------------------------------------- window trend

struct WindowTrendPoint {
    Index window = 0;
    double coherence = 0.0; // seed mean of the late-time mean coherence norm
    std::vector<double> per_seed;
};
struct WindowTrendResult {
    double epsilon = 0.0;
    std::vector<WindowTrendPoint> points;
    bool monotone = false;
};
WindowTrendResult run_window_trend(const ExperimentConfig& config, int workers = 1);

// ---------------------------------------------------------------- self-test

struct SelfTestLine {
    std::string name;
    bool pass = false;
    std::string detail;
};
std::vector<SelfTestLine> run_self_test();

} // namespace decowork
