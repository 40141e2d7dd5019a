// experiment.cpp: orchestration of the numerical experiments

#include "decowork/experiment.hpp"

#include "decowork/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace decowork {

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& job) {
    if (n == 0) return;
    const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex guard;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            {
                std::lock_guard<std::mutex> lock(guard);
                if (failure) return;
            }
            try {
                job(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(guard);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

namespace {

TimeGrid make_grid(const TotalModel& model, double t0, double t1, Index samples, std::optional<Index> n_steps) {
    Index n = n_steps ? *n_steps : TimeGrid::for_model(model, t0, t1, samples).n_steps;
    n = ((n + samples - 1) / samples) * samples;
    TimeGrid g{t0, t1, n, n / samples};
    g.validate();
    return g;
}

Protocol constant_protocol(double lambda, double duration) {
    return Protocol{0.0, duration, lambda, lambda, RampShape::constant};
}

StateVector bath_state_for(const ExperimentConfig& config, const TotalModel& model, std::uint64_t seed) {
    if (config.initial.bath_state == "eigen") return eigen_bath_state(model);
    return typical_bath_state(model, derive_seed(seed, 3), config.initial.envelope);
}

CVector product(const CVector& sys, const CVector& bath) {
    CVector out(sys.size() * bath.size());
    for (Index i = 0; i < sys.size(); ++i) out.segment(i * bath.size(), bath.size()) = sys(i) * bath;
    return out;
}

PropagationOptions propagation_options(const ExperimentConfig& config) {
    PropagationOptions o;
    o.dlambda_max = config.numerics.dlambda_max;
    return o;
}

std::vector<std::uint64_t> seeds_of(const ExperimentConfig& config) {
    if (!config.sweep.seeds.empty()) return config.sweep.seeds;
    return {config.seed};
}

} // namespace

PairStatistics pair_statistics(const TotalModel& model, Index alpha, Index beta, double epsilon) {
    PairStatistics out;
    out.alpha = alpha;
    out.beta = beta;
    out.epsilon = epsilon;
    const SpectralDecomposition basis = eig_hermitian(h_s_renormalized_at(model, epsilon));
    HermitianOperator v = HermitianOperator::zero(model.n_e());
    HermitianOperator h_eff = model.h_e2();
    if (epsilon != 0.0) {
        const TotalModel frozen = model.with_protocol(Protocol{0.0, 1.0, epsilon, epsilon, RampShape::constant});
        const PerturbationSplit split = perturbation_split(frozen, 0.0);
        VOperator vop = build_v_operator(split, alpha, beta, basis);
        out.degenerate = vop.degenerate;
        v = std::move(vop.op);
        h_eff = h_eff_bath(frozen, split, alpha, basis);
    } else {
        const double a = model.h_is().expectation(basis.eigenvector(alpha));
        const double b = model.h_is().expectation(basis.eigenvector(beta));
        out.degenerate = std::abs(b - a) <= 1e-13 * std::max(1.0, model.h_is().matrix().cwiseAbs().maxCoeff());
        v = model.centered_bath_coupling().scaled(b - a);
    }
    out.stats = matrix_element_stats(v, h_eff, model.window());
    out.epsilon_p = perturbative_border(out.stats.sigma_v, out.stats.delta_mls, out.stats.vnd_sq_mean);
    return out;
}

// ---------------------------------------------------------------- decay

double bare_border(const ExperimentConfig& config, std::uint64_t seed) {
    const TotalModel model = build_model(config, seed, constant_protocol(0.0, 1.0));
    return pair_statistics(model, config.initial.alpha, config.initial.beta, 0.0).epsilon_p;
}

double model_border(const ExperimentConfig& config, std::uint64_t seed) {
    const TotalModel model = build_model(config, seed, constant_protocol(0.0, 1.0));
    const Index a = config.initial.alpha;
    const Index b = config.initial.beta;
    const double f = config.decay.epsilon_factor;
    double ep = pair_statistics(model, a, b, 0.0).epsilon_p;
    for (int it = 0; it < 60; ++it) {
        if (!std::isfinite(ep) || ep <= 0.0)
            throw NumericalError("model_border: perturbative border is not finite and positive");
        const double next = pair_statistics(model, a, b, f * ep).epsilon_p;
        if (std::abs(next - ep) <= 1e-6 * ep) return next;
        ep = 0.5 * (ep + next);
    }
    throw NumericalError("model_border: self-consistent border did not converge");
}

DecayResult run_decay(const ExperimentConfig& config, std::uint64_t seed, std::optional<double> epsilon) {
    const Index alpha = config.initial.alpha;
    const Index beta = config.initial.beta;
    double eps = 0.0;
    if (epsilon) {
        eps = *epsilon;
    } else if (config.decay.epsilon) {
        eps = *config.decay.epsilon;
    } else {
        eps = config.decay.epsilon_factor * model_border(config, seed);
    }
    if (!(eps > 0.0)) throw ConfigError("run_decay: epsilon must be positive");

    // Statistics first: they fix the time scales of both runs.
    const TotalModel probe = build_model(config, seed, constant_protocol(eps, 1.0));
    const PairStatistics ps = pair_statistics(probe, alpha, beta, eps);
    if (ps.degenerate) throw NumericalError("run_decay: V vanishes for this pair (degenerate coupling)");
    const double rd_pred = predict_decoherence_rate(eps, ps.stats.sigma_v);
    const double t_decay = config.decay.duration / rd_pred;
    const double t_pop = config.decay.population_duration / ps.stats.delta_mls;
    const TotalModel model = probe.with_protocol(constant_protocol(eps, std::max(t_decay, t_pop)));

    const StateVector bath = bath_state_for(config, model, seed);
    const SpectralDecomposition basis = eig_hermitian(h_s_renormalized_at(model, eps));
    const CVector a = basis.eigenvector(alpha);
    const CVector b = basis.eigenvector(beta);
    const StateVector sup = StateVector::normalized(product((a + b) / std::sqrt(2.0), bath.amplitudes()));
    const StateVector pure = StateVector::normalized(product(a, bath.amplitudes()));
    const PropagationOptions opts = propagation_options(config);

    DecayResult out;
    out.seed = seed;
    out.alpha = alpha;
    out.beta = beta;

    const TimeGrid g1 = make_grid(model, 0.0, t_decay, config.decay.samples, config.numerics.n_steps);
    const RdmTrajectory tr1 = evolve(model, sup, g1, opts);
    const auto in_basis = rdms_in_instantaneous_basis(tr1);
    out.times = tr1.times();
    for (const auto& r : in_basis) out.coherence.push_back(std::abs(r(alpha, beta)));
    for (double t : out.times)
        out.predicted.push_back(out.coherence.front() * predict_gaussian_decay(eps, ps.stats.sigma_v, t));

    const TimeGrid g2 = make_grid(model, 0.0, t_pop, config.decay.population_samples, config.numerics.n_steps);
    const RdmTrajectory tr2 = evolve(model, pure, g2, opts);
    out.population_times = tr2.times();
    for (const auto& r : rdms_in_instantaneous_basis(tr2)) out.population.push_back(r(alpha, alpha).real());
    out.norm_drift = std::max(tr1.norm_drift(), tr2.norm_drift());

    const GaussianFit gf = fit_gaussian_decay(out.times, out.coherence, config.numerics.decay_threshold);
    const TransitionFit tf = fit_transition_rate(out.population_times, out.population, config.numerics.max_depletion,
                                                 config.numerics.noise_floor);

    // Companion estimators for the golden-rule prediction.
    const PerturbationSplit split = perturbation_split(model, 0.0);
    const RVector& e_bath = model.bath_spectrum().eigenvalues();
    const RVector& e_sys = basis.eigenvalues();
    RVector h0_levels(e_sys.size() * e_bath.size());
    for (Index i = 0; i < e_sys.size(); ++i) h0_levels.segment(i * e_bath.size(), e_bath.size()) = e_bath.array() + e_sys(i);
    const auto r = model.window_range();
    const RVector populated = e_bath.segment(r.first, r.count).array() + e_sys(alpha);
    const double mean_energy = e_sys(alpha) + model.h_e2().expectation(bath.amplitudes());
    const double rho_e = estimate_density_of_states(h0_levels, populated, mean_energy);
    const double h1nd = estimate_h1_offdiag_sq(split.h1, basis, model.bath_spectrum(), model.window());

    RateReport& rep = out.report;
    rep.epsilon = eps;
    rep.sigma_v = ps.stats.sigma_v;
    rep.vnd_sq_mean = ps.stats.vnd_sq_mean;
    rep.delta_mls = ps.stats.delta_mls;
    rep.epsilon_p = ps.epsilon_p;
    rep.r_d_predicted = rd_pred;
    rep.r_d_fitted = gf.rate;
    rep.fit_quality = gf.quality;
    rep.rho_e = rho_e;
    rep.h1nd_sq_mean = h1nd;
    rep.r_e_predicted = predict_fgr_rate(eps, rho_e, h1nd);
    rep.r_e_fitted = tf.rate;
    rep.r_e_upper_bound = tf.upper_bound;
    out.above_border = eps >= ps.epsilon_p;
    return out;
}

// ---------------------------------------------------------------- scaling

SlopeFit loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ConfigError("loglog_slope: series lengths differ");
    if (x.size() < 2) throw ConfigError("loglog_slope: at least two points are required");
    const std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ConfigError("loglog_slope: values must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw ConfigError("loglog_slope: x values must not all coincide");
    SlopeFit f;
    f.points = static_cast<Index>(n);
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (n > 2) {
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = ly[i] - f.intercept - f.slope * lx[i];
            ss += r * r;
        }
        f.std_error = std::sqrt(ss / static_cast<double>(n - 2) / sxx);
        // two-sided 97.5 % Student quantiles for 1..10 degrees of freedom, normal beyond
        static constexpr double kT[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228};
        const std::size_t dof = n - 2;
        const double t = dof <= 10 ? kT[dof - 1] : 1.96;
        f.ci_low = f.slope - t * f.std_error;
        f.ci_high = f.slope + t * f.std_error;
    } else {
        f.ci_low = f.ci_high = f.slope;
    }
    return f;
}

ScalingResult run_scaling(const ExperimentConfig& config, int workers) {
    const auto seeds = seeds_of(config);
    ScalingResult out;
    out.seed_borders.resize(seeds.size());
    parallel_for(seeds.size(), workers, [&](std::size_t i) { out.seed_borders[i] = model_border(config, seeds[i]); });
    double sum = 0.0;
    for (double b : out.seed_borders) {
        if (!std::isfinite(b) || b <= 0.0) throw NumericalError("run_scaling: a seed has no finite positive border");
        sum += b;
    }
    out.epsilon_p = sum / static_cast<double>(seeds.size());

    std::vector<std::pair<double, double>> eps; // (factor, epsilon)
    for (double f : config.sweep.epsilon_factors) eps.emplace_back(f, f * out.epsilon_p);
    for (double e : config.sweep.epsilons) eps.emplace_back(e / out.epsilon_p, e);
    if (eps.empty()) throw ConfigError("run_scaling: sweep.epsilon_factors or sweep.epsilons is required");
    std::sort(eps.begin(), eps.end(), [](const auto& a, const auto& b) { return a.second < b.second; });

    const std::size_t ns = seeds.size();
    std::vector<DecayResult> runs(eps.size() * ns);
    parallel_for(runs.size(), workers, [&](std::size_t job) {
        runs[job] = run_decay(config, seeds[job % ns], eps[job / ns].second);
    });

    for (std::size_t k = 0; k < eps.size(); ++k) {
        ScalingPoint p;
        p.factor = eps[k].first;
        p.epsilon = eps[k].second;
        p.min_fit_quality = 1.0;
        for (std::size_t s = 0; s < ns; ++s) {
            const DecayResult& r = runs[k * ns + s];
            p.r_d += r.report.r_d_fitted / static_cast<double>(ns);
            p.r_e += r.report.r_e_fitted / static_cast<double>(ns);
            p.r_d_predicted += r.report.r_d_predicted / static_cast<double>(ns);
            p.r_e_predicted += r.report.r_e_predicted / static_cast<double>(ns);
            p.min_fit_quality = std::min(p.min_fit_quality, r.report.fit_quality);
            p.above_border = p.above_border || r.above_border;
            p.r_e_upper_bound = p.r_e_upper_bound || r.report.r_e_upper_bound;
            p.runs.push_back(r);
        }
        p.ratio = p.r_e > 0.0 ? p.r_d / p.r_e : std::numeric_limits<double>::infinity();
        if (p.above_border) {
            std::ostringstream os;
            os << "epsilon " << p.epsilon << " is at or above the perturbative border for at least one seed";
            out.warnings.push_back(os.str());
        }
        if (p.r_e_upper_bound) {
            std::ostringstream os;
            os << "transition rate at epsilon " << p.epsilon << " is only an upper bound";
            out.warnings.push_back(os.str());
        }
        out.points.push_back(std::move(p));
    }

    if (out.points.size() < 2) {
        out.warnings.push_back("single-epsilon sweep: no regression performed");
        return out;
    }
    if (out.points.size() < 4) out.warnings.push_back("fewer than four epsilon values in the sweep");
    std::vector<double> x, yd, ye;
    for (const auto& p : out.points) {
        x.push_back(p.epsilon);
        yd.push_back(p.r_d);
        ye.push_back(p.r_e);
    }
    out.r_d_slope = loglog_slope(x, yd);
    if (std::all_of(ye.begin(), ye.end(), [](double v) { return v > 0.0; })) out.r_e_slope = loglog_slope(x, ye);
    else out.warnings.push_back("zero fitted transition rate: no R_E regression");
    return out;
}

// ---------------------------------------------------------------- border

BorderResult run_border(const ExperimentConfig& config, std::uint64_t seed) {
    const TotalModel model = build_model(config, seed, config.protocol);
    const double eps = config.protocol.lambda_at(config.protocol.t0);
    BorderResult out;
    out.seed = seed;
    for (Index a = 0; a < model.n_s(); ++a)
        for (Index b = a + 1; b < model.n_s(); ++b) out.rows.push_back(pair_statistics(model, a, b, eps));
    return out;
}

// ---------------------------------------------------------------- adiabatic work

RampResult run_ramp(const ExperimentConfig& config, std::uint64_t seed, double ramp_time) {
    if (!(ramp_time > 0.0)) throw ConfigError("run_ramp: ramp time must be positive");
    Protocol protocol = config.protocol;
    protocol.t1 = protocol.t0 + ramp_time;
    const TotalModel model = build_model(config, seed, protocol);
    const double beta = config.initial.inverse_temperature;
    const double t0 = protocol.t0;
    const double t1 = protocol.t1;

    const StateVector bath = bath_state_for(config, model, seed);
    std::vector<StateVector> initial = tpm_initial_states(model, bath, t0);
    const std::size_t n_branches = initial.size();
    initial.push_back(coherent_gibbs_state(model, bath, beta, t0));

    PropagationOptions opts = propagation_options(config);
    opts.track_bath_energy = true;
    const TimeGrid grid = make_grid(model, t0, t1, config.numerics.samples, config.numerics.n_steps);
    std::vector<RdmTrajectory> runs = evolve_batch(model, initial, grid, opts);
    const RdmTrajectory coherent = std::move(runs.back());
    runs.pop_back();

    const SpectralDecomposition start = eig_hermitian(h_s_renormalized(model, t0));
    const SpectralDecomposition end = eig_hermitian(h_s_renormalized(model, t1));
    const RVector p = gibbs_weights(start.eigenvalues(), beta);
    const RdmTrajectory ensemble = mix_trajectories(runs, std::vector<double>(p.data(), p.data() + p.size()));
    (void)n_branches;

    RampResult out;
    out.ramp_time = ramp_time;
    out.times = coherent.times();
    for (double t : out.times) out.lambda.push_back(protocol.lambda_at(t));
    for (const auto& r : rdms_in_instantaneous_basis(ensemble)) out.coherence_gibbs.push_back(coherence_norm(r));
    for (const auto& r : rdms_in_instantaneous_basis(coherent)) {
        out.coherence_coherent.push_back(coherence_norm(r));
        out.populations_coherent.push_back(populations(r));
    }
    out.bath_energy = coherent.bath_energies();

    out.mixture_work = mixture_work(coherent, model, t0, t1);
    out.mixture_work_gibbs = mixture_work(ensemble, model, t0, t1);
    out.adiabatic_work = p.dot(end.eigenvalues() - start.eigenvalues());
    out.tpm = tpm_from_branches(runs, p, t0, t1);
    out.jarzynski = jarzynski_check(out.tpm, beta, h_s_renormalized(model, t0), h_s_renormalized(model, t1));
    auto width = [](const RVector& e) { return e.maxCoeff() - e.minCoeff(); };
    out.span = std::max(width(start.eigenvalues()), width(end.eigenvalues()));
    out.discrepancy = std::abs(out.mixture_work - out.tpm.mean());

    const double transient_end = t0 + config.numerics.transient_fraction * ramp_time;
    const double thr = config.numerics.coherence_threshold;
    for (std::size_t i = 0; i < out.times.size(); ++i) {
        if (out.times[i] > transient_end)
            out.gibbs_max_after_transient = std::max(out.gibbs_max_after_transient, out.coherence_gibbs[i]);
        if (!out.coherent_first_below && out.coherence_coherent[i] < thr) out.coherent_first_below = out.times[i];
        if (out.coherent_first_below)
            out.coherent_max_after_first_below = std::max(out.coherent_max_after_first_below, out.coherence_coherent[i]);
    }
    out.norm_drift = std::max(coherent.norm_drift(), ensemble.norm_drift());
    out.diagonalizations = coherent.diagonalizations();
    return out;
}

WorkResult run_adiabatic_work(const ExperimentConfig& config, std::uint64_t seed, int workers) {
    std::vector<double> times = config.sweep.ramp_times;
    if (times.empty()) times.push_back(config.protocol.t1 - config.protocol.t0);
    WorkResult out;
    out.seed = seed;
    out.ramps.resize(times.size());
    parallel_for(times.size(), workers, [&](std::size_t i) { out.ramps[i] = run_ramp(config, seed, times[i]); });
    return out;
}

// ---------------------------------------------------------------- window trend

WindowTrendResult run_window_trend(const ExperimentConfig& config, int workers) {
    std::vector<Index> windows = config.sweep.window_sizes;
    if (windows.empty()) {
        for (Index w : {Index{64}, Index{256}, Index{1024}})
            if (w <= config.model.bath.dim) windows.push_back(w);
    }
    std::sort(windows.begin(), windows.end());
    const auto seeds = seeds_of(config);
    const Index alpha = config.initial.alpha;
    const Index beta = config.initial.beta;

    WindowTrendResult out;
    if (config.decay.epsilon) {
        out.epsilon = *config.decay.epsilon;
    } else {
        double sum = 0.0;
        for (auto s : seeds) sum += model_border(config, s);
        out.epsilon = config.decay.epsilon_factor * sum / static_cast<double>(seeds.size());
    }
    const double eps = out.epsilon;

    std::vector<double> values(windows.size() * seeds.size());
    parallel_for(values.size(), workers, [&](std::size_t job) {
        const Index w = windows[job / seeds.size()];
        const std::uint64_t seed = seeds[job % seeds.size()];
        ModelBuildOptions mo;
        mo.window_count = w;
        mo.normalization_window_count = config.model.window.count;
        const TotalModel probe = build_model(config, seed, constant_protocol(eps, 1.0), mo);
        const PairStatistics ps = pair_statistics(probe, alpha, beta, eps);
        const double duration = config.numerics.steady_duration / predict_decoherence_rate(eps, ps.stats.sigma_v);
        const TotalModel model = probe.with_protocol(constant_protocol(eps, duration));
        const StateVector bath = bath_state_for(config, model, seed);
        const SpectralDecomposition basis = eig_hermitian(h_s_renormalized_at(model, eps));
        const StateVector psi = StateVector::normalized(
            product((basis.eigenvector(alpha) + basis.eigenvector(beta)) / std::sqrt(2.0), bath.amplitudes()));
        const TimeGrid grid = make_grid(model, 0.0, duration, config.numerics.samples, config.numerics.n_steps);
        const auto in_basis = rdms_in_instantaneous_basis(evolve(model, psi, grid, propagation_options(config)));
        const std::size_t half = in_basis.size() / 2;
        double acc = 0.0;
        for (std::size_t i = half; i < in_basis.size(); ++i) acc += coherence_norm(in_basis[i]);
        values[job] = acc / static_cast<double>(in_basis.size() - half);
    });

    for (std::size_t k = 0; k < windows.size(); ++k) {
        WindowTrendPoint p;
        p.window = windows[k];
        for (std::size_t s = 0; s < seeds.size(); ++s) p.per_seed.push_back(values[k * seeds.size() + s]);
        p.coherence = std::accumulate(p.per_seed.begin(), p.per_seed.end(), 0.0) / static_cast<double>(seeds.size());
        out.points.push_back(std::move(p));
    }
    out.monotone = out.points.size() >= 2;
    for (std::size_t k = 1; k < out.points.size(); ++k)
        if (!(out.points[k].coherence < out.points[k - 1].coherence)) out.monotone = false;
    return out;
}

// ---------------------------------------------------------------- self-test

std::vector<SelfTestLine> run_self_test() {
    std::vector<SelfTestLine> lines;
    auto add = [&](std::string name, bool pass, double value) {
        std::ostringstream os;
        os.precision(12);
        os << value;
        lines.push_back({std::move(name), pass, os.str()});
    };

    {
        const double rate = 0.05;
        std::vector<double> t, m;
        for (int i = 0; i <= 200; ++i) {
            t.push_back(0.3 * i);
            m.push_back(std::exp(-rate * rate * t.back() * t.back()));
        }
        const GaussianFit f = fit_gaussian_decay(t, m);
        add("gaussian replay rate", std::abs(f.rate - rate) <= 1e-6 && f.quality > 0.9999, f.rate);
    }
    {
        const std::vector<double> x{1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2};
        std::vector<double> y1, y2;
        for (double v : x) {
            y1.push_back(0.7 * v);
            y2.push_back(3.0 * v * v);
        }
        const double s1 = loglog_slope(x, y1).slope;
        const double s2 = loglog_slope(x, y2).slope;
        add("power-law slope 1", std::abs(s1 - 1.0) <= 1e-6, s1);
        add("power-law slope 2", std::abs(s2 - 2.0) <= 1e-6, s2);
    }
    {
        std::vector<double> t, p;
        for (int i = 0; i <= 100; ++i) {
            t.push_back(0.1 * i);
            p.push_back(std::exp(-0.01 * t.back()));
        }
        const TransitionFit f = fit_transition_rate(t, p);
        add("transition replay rate", !f.upper_bound && std::abs(f.rate - 0.01) <= 0.05 * 0.01, f.rate);
    }
    {
        const double ep = perturbative_border(1.0, 0.01, 1.0);
        add("border arithmetic", std::abs(ep - 0.01 / (2.0 * 3.141592653589793)) <= 1e-15, ep);
    }
    return lines;
}

} // namespace decowork
