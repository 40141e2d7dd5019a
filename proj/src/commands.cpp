// commands.cpp

#include "decowork/commands.hpp"

#include "decowork/experiment.hpp"
#include "decowork/io.hpp"

#include <cmath>

namespace decowork {

using nlohmann::json;

namespace {

std::string dir_of(const ExperimentConfig& c, const RunOptions& o) { return o.out.value_or(c.output.directory); }

// With --seed the run seed changes and a seed sweep collapses to that seed.
ExperimentConfig effective(ExperimentConfig c, const RunOptions& o) {
    if (o.seed) {
        c.seed = *o.seed;
        if (!c.sweep.seeds.empty()) c.sweep.seeds = {*o.seed};
    }
    return c;
}

std::string ramp_tag(double t) {
    std::string s = format_number(t);
    for (char& ch : s)
        if (ch == '.') ch = 'p';
    return "T" + s;
}

void emit_decay(OutputWriter& w, const std::string& p, const ExperimentConfig& c, std::uint64_t seed) {
    const DecayResult r = run_decay(c, seed);
    const auto& f = w.formats();
    if (f.csv) {
        w.write_csv(p + "decay.csv", decay_series_table(r));
        w.write_csv(p + "population.csv", population_series_table(r));
        w.write_csv(p + "rates.csv", rate_report_table({r}));
    }
    if (f.json) {
        json doc = to_json(r);
        doc["times"] = r.times;
        doc["coherence"] = r.coherence;
        doc["predicted"] = r.predicted;
        w.write_json(p + "rates.json", doc);
    }
    if (f.svg) {
        w.write_text(p + "decay.svg", svg_line_plot("Coherence decay", "t", "|rho_ab|",
                                                    {{"simulated", r.times, r.coherence},
                                                     {"Gaussian prediction", r.times, r.predicted}}));
    }
}

void emit_border(OutputWriter& w, const std::string& p, const ExperimentConfig& c, std::uint64_t seed) {
    const BorderResult r = run_border(c, seed);
    if (w.formats().csv) w.write_csv(p + "border.csv", border_table(r));
    if (w.formats().json) w.write_json(p + "border.json", to_json(r));
}

void emit_scaling(OutputWriter& w, const std::string& p, const ExperimentConfig& c, int workers) {
    const ScalingResult r = run_scaling(c, workers);
    const auto& f = w.formats();
    if (f.csv) {
        w.write_csv(p + "scaling.csv", scaling_table(r));
        std::vector<DecayResult> all;
        for (const auto& pt : r.points) all.insert(all.end(), pt.runs.begin(), pt.runs.end());
        w.write_csv(p + "scaling_runs.csv", rate_report_table(all));
    }
    if (f.json) w.write_json(p + "scaling.json", to_json(r));
    if (f.svg) {
        std::vector<double> e, rd, re;
        for (const auto& pt : r.points) {
            e.push_back(pt.epsilon);
            rd.push_back(pt.r_d);
            re.push_back(pt.r_e);
        }
        w.write_text(p + "scaling.svg",
                     svg_line_plot("Rate scaling", "epsilon", "rate", {{"R_d", e, rd}, {"R_E", e, re}}, true, true));
    }
}

void emit_work(OutputWriter& w, const std::string& p, const ExperimentConfig& c, std::uint64_t seed, int workers) {
    const WorkResult r = run_adiabatic_work(c, seed, workers);
    const auto& f = w.formats();
    for (const auto& ramp : r.ramps) {
        const std::string tag = ramp_tag(ramp.ramp_time);
        if (f.csv) {
            w.write_csv(p + "work_" + tag + ".csv", ramp_series_table(ramp));
            w.write_csv(p + "tpm_" + tag + ".csv", work_distribution_table(ramp.tpm));
        }
        if (f.svg)
            w.write_text(p + "coherence_" + tag + ".svg",
                         svg_line_plot("Instantaneous-basis coherence, T = " + format_number(ramp.ramp_time), "t",
                                       "off-diagonal norm",
                                       {{"Gibbs start", ramp.times, ramp.coherence_gibbs},
                                        {"coherent start", ramp.times, ramp.coherence_coherent}}));
    }
    if (f.json) w.write_json(p + "work.json", to_json(r));
}

void emit_trend(OutputWriter& w, const std::string& p, const ExperimentConfig& c, int workers) {
    const WindowTrendResult r = run_window_trend(c, workers);
    if (w.formats().csv) w.write_csv(p + "window_trend.csv", window_trend_table(r));
    if (w.formats().json) w.write_json(p + "window_trend.json", to_json(r));
    if (w.formats().svg) {
        std::vector<double> x, y;
        for (const auto& pt : r.points) {
            x.push_back(static_cast<double>(pt.window));
            y.push_back(pt.coherence);
        }
        w.write_text(p + "window_trend.svg",
                     svg_line_plot("Steady coherence vs window", "N_w", "coherence norm", {{"mean", x, y}}, true, true));
    }
}

} // namespace

std::string command_decay(const ExperimentConfig& config, const RunOptions& options) {
    const ExperimentConfig c = effective(config, options);
    OutputWriter w(dir_of(c, options), c, c.seed, "decay");
    emit_decay(w, "", c, c.seed);
    w.finish();
    return w.directory();
}

std::string command_scaling(const ExperimentConfig& config, const RunOptions& options) {
    const ExperimentConfig c = effective(config, options);
    OutputWriter w(dir_of(c, options), c, c.seed, "scaling");
    emit_scaling(w, "", c, options.workers);
    w.finish();
    return w.directory();
}

std::string command_border(const ExperimentConfig& config, const RunOptions& options) {
    const ExperimentConfig c = effective(config, options);
    OutputWriter w(dir_of(c, options), c, c.seed, "border");
    emit_border(w, "", c, c.seed);
    w.finish();
    return w.directory();
}

std::string command_work(const ExperimentConfig& config, const RunOptions& options) {
    const ExperimentConfig c = effective(config, options);
    OutputWriter w(dir_of(c, options), c, c.seed, "work");
    emit_work(w, "", c, c.seed, options.workers);
    w.finish();
    return w.directory();
}

std::string command_trend(const ExperimentConfig& config, const RunOptions& options) {
    const ExperimentConfig c = effective(config, options);
    OutputWriter w(dir_of(c, options), c, c.seed, "trend");
    emit_trend(w, "", c, options.workers);
    w.finish();
    return w.directory();
}

std::string command_full_suite(const ExperimentConfig& config, const RunOptions& options) {
    const ExperimentConfig c = effective(config, options);
    OutputWriter w(dir_of(c, options), c, c.seed, "full-suite");
    json sections = json::array();
    emit_border(w, "border/", c, c.seed);
    sections.push_back("border");
    emit_decay(w, "decay/", c, c.seed);
    sections.push_back("decay");
    if (!c.sweep.epsilon_factors.empty() || !c.sweep.epsilons.empty()) {
        emit_scaling(w, "scaling/", c, options.workers);
        sections.push_back("scaling");
    }
    emit_work(w, "work/", c, c.seed, options.workers);
    sections.push_back("work");
    if (!c.sweep.window_sizes.empty()) {
        emit_trend(w, "trend/", c, options.workers);
        sections.push_back("trend");
    }
    w.write_json("suite.json", json{{"sections", sections}});
    w.finish();
    return w.directory();
}

} // namespace decowork
