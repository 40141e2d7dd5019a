// io.cpp

#include "decowork/io.hpp"

#include "decowork/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifndef DECOWORK_VERSION
#define DECOWORK_VERSION "0.0.0"
#endif

namespace decowork {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

namespace {

std::string fmt_index(Index i) { return std::to_string(i); }
std::string fmt_bool(bool b) { return b ? "1" : "0"; }

json jnum(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json jarr(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(jnum(x));
    return a;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header.size()) throw std::logic_error("CsvTable: row width does not match the header");
    rows.push_back(std::move(row));
}

std::string CsvTable::str() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_escape(cells[i]);
        os << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return os.str();
}

// ---------------------------------------------------------------- tables

CsvTable decay_series_table(const DecayResult& r) {
    CsvTable t{{"time", "coherence", "predicted"}, {}};
    for (std::size_t i = 0; i < r.times.size(); ++i)
        t.add_row({format_number(r.times[i]), format_number(r.coherence[i]), format_number(r.predicted[i])});
    return t;
}

CsvTable population_series_table(const DecayResult& r) {
    CsvTable t{{"time", "population"}, {}};
    for (std::size_t i = 0; i < r.population_times.size(); ++i)
        t.add_row({format_number(r.population_times[i]), format_number(r.population[i])});
    return t;
}

CsvTable rate_report_table(const std::vector<DecayResult>& runs) {
    CsvTable t{{"seed", "alpha", "beta", "epsilon", "sigma_v", "vnd_sq_mean", "delta_mls", "epsilon_p",
                "r_d_predicted", "r_d_fitted", "fit_quality", "r_e_predicted", "r_e_fitted", "r_e_upper_bound",
                "rho_e", "h1nd_sq_mean", "above_border"},
               {}};
    for (const auto& r : runs) {
        const RateReport& p = r.report;
        t.add_row({std::to_string(r.seed), fmt_index(r.alpha), fmt_index(r.beta), format_number(p.epsilon),
                   format_number(p.sigma_v), format_number(p.vnd_sq_mean), format_number(p.delta_mls),
                   format_number(p.epsilon_p), format_number(p.r_d_predicted), format_number(p.r_d_fitted),
                   format_number(p.fit_quality), format_number(p.r_e_predicted), format_number(p.r_e_fitted),
                   fmt_bool(p.r_e_upper_bound), format_number(p.rho_e), format_number(p.h1nd_sq_mean),
                   fmt_bool(r.above_border)});
    }
    return t;
}

CsvTable scaling_table(const ScalingResult& r) {
    CsvTable t{{"epsilon", "epsilon_factor", "r_d_fitted", "r_e_fitted", "r_d_predicted", "r_e_predicted", "ratio",
                "min_fit_quality", "above_border", "r_e_upper_bound", "seeds"},
               {}};
    for (const auto& p : r.points)
        t.add_row({format_number(p.epsilon), format_number(p.factor), format_number(p.r_d), format_number(p.r_e),
                   format_number(p.r_d_predicted), format_number(p.r_e_predicted), format_number(p.ratio),
                   format_number(p.min_fit_quality), fmt_bool(p.above_border), fmt_bool(p.r_e_upper_bound),
                   std::to_string(p.runs.size())});
    return t;
}

CsvTable border_table(const BorderResult& r) {
    CsvTable t{{"alpha", "beta", "epsilon", "sigma_v", "delta_mls", "vnd_sq_mean", "epsilon_p", "degenerate"}, {}};
    for (const auto& row : r.rows)
        t.add_row({fmt_index(row.alpha), fmt_index(row.beta), format_number(row.epsilon),
                   format_number(row.stats.sigma_v), format_number(row.stats.delta_mls),
                   format_number(row.stats.vnd_sq_mean), format_number(row.epsilon_p), fmt_bool(row.degenerate)});
    return t;
}

CsvTable ramp_series_table(const RampResult& r) {
    CsvTable t{{"time", "lambda", "coherence_gibbs", "coherence_coherent", "bath_energy"}, {}};
    const Index ns = r.populations_coherent.empty() ? 0 : r.populations_coherent.front().size();
    for (Index a = 0; a < ns; ++a) t.header.push_back("population_" + std::to_string(a));
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        std::vector<std::string> row{format_number(r.times[i]), format_number(r.lambda[i]),
                                     format_number(r.coherence_gibbs[i]), format_number(r.coherence_coherent[i]),
                                     format_number(r.bath_energy[i])};
        for (Index a = 0; a < ns; ++a) row.push_back(format_number(r.populations_coherent[i](a)));
        t.add_row(std::move(row));
    }
    return t;
}

CsvTable work_distribution_table(const WorkDistribution& d) {
    CsvTable t{{"work_value", "probability"}, {}};
    for (const auto& e : d.entries()) t.add_row({format_number(e.work), format_number(e.probability)});
    return t;
}

CsvTable window_trend_table(const WindowTrendResult& r) {
    CsvTable t{{"window", "coherence", "seeds"}, {}};
    for (const auto& p : r.points)
        t.add_row({fmt_index(p.window), format_number(p.coherence), std::to_string(p.per_seed.size())});
    return t;
}

// ---------------------------------------------------------------- JSON

json to_json(const RateReport& r) {
    return json{{"epsilon", r.epsilon},
                {"sigma_v", r.sigma_v},
                {"vnd_sq_mean", r.vnd_sq_mean},
                {"delta_mls", r.delta_mls},
                {"epsilon_p", jnum(r.epsilon_p)},
                {"epsilon_p_infinite", std::isinf(r.epsilon_p)},
                {"r_d_predicted", r.r_d_predicted},
                {"r_d_fitted", r.r_d_fitted},
                {"fit_quality", r.fit_quality},
                {"r_e_predicted", r.r_e_predicted},
                {"r_e_fitted", r.r_e_fitted},
                {"r_e_upper_bound", r.r_e_upper_bound},
                {"rho_e", r.rho_e},
                {"h1nd_sq_mean", r.h1nd_sq_mean}};
}

json to_json(const DecayResult& r) {
    return json{{"seed", r.seed},
                {"alpha", r.alpha},
                {"beta", r.beta},
                {"above_border", r.above_border},
                {"norm_drift", r.norm_drift},
                {"report", to_json(r.report)}};
}

namespace {
json slope_json(const std::optional<SlopeFit>& f) {
    if (!f) return nullptr;
    return json{{"slope", f->slope},     {"intercept", f->intercept}, {"std_error", f->std_error},
                {"ci_low", f->ci_low},   {"ci_high", f->ci_high},     {"points", f->points}};
}
} // namespace

json to_json(const ScalingResult& r) {
    json points = json::array();
    for (const auto& p : r.points) {
        json runs = json::array();
        for (const auto& d : p.runs) runs.push_back(to_json(d));
        points.push_back(json{{"epsilon", p.epsilon},
                              {"epsilon_factor", p.factor},
                              {"r_d_fitted", p.r_d},
                              {"r_e_fitted", p.r_e},
                              {"r_d_predicted", p.r_d_predicted},
                              {"r_e_predicted", p.r_e_predicted},
                              {"ratio", jnum(p.ratio)},
                              {"min_fit_quality", p.min_fit_quality},
                              {"above_border", p.above_border},
                              {"r_e_upper_bound", p.r_e_upper_bound},
                              {"runs", runs}});
    }
    return json{{"epsilon_p", r.epsilon_p},          {"seed_borders", jarr(r.seed_borders)},
                {"points", points},                  {"r_d_slope", slope_json(r.r_d_slope)},
                {"r_e_slope", slope_json(r.r_e_slope)}, {"warnings", r.warnings}};
}

json to_json(const BorderResult& r) {
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back(json{{"alpha", row.alpha},
                            {"beta", row.beta},
                            {"epsilon", row.epsilon},
                            {"sigma_v", row.stats.sigma_v},
                            {"delta_mls", row.stats.delta_mls},
                            {"vnd_sq_mean", row.stats.vnd_sq_mean},
                            {"epsilon_p", jnum(row.epsilon_p)},
                            {"epsilon_p_infinite", std::isinf(row.epsilon_p)},
                            {"degenerate", row.degenerate}});
    return json{{"seed", r.seed}, {"rows", rows}};
}

json to_json(const RampResult& r) {
    json tpm = json::array();
    for (const auto& e : r.tpm.entries()) tpm.push_back(json{{"work_value", e.work}, {"probability", e.probability}});
    return json{{"ramp_time", r.ramp_time},
                {"mixture_work", r.mixture_work},
                {"mixture_work_gibbs", r.mixture_work_gibbs},
                {"adiabatic_work", r.adiabatic_work},
                {"tpm", json{{"entries", tpm}, {"mean", r.tpm.mean()}, {"variance", r.tpm.variance()}}},
                {"jarzynski_lhs", r.jarzynski.lhs},
                {"delta_f", r.jarzynski.delta_f},
                {"relative_jarzynski_deviation", r.jarzynski.relative_deviation},
                {"span", r.span},
                {"discrepancy", r.discrepancy},
                {"relative_discrepancy", r.span > 0.0 ? json(r.discrepancy / r.span) : json(nullptr)},
                {"gibbs_coherence_max_after_transient", r.gibbs_max_after_transient},
                {"coherent_first_below", r.coherent_first_below ? json(*r.coherent_first_below) : json(nullptr)},
                {"coherent_max_after_first_below", r.coherent_max_after_first_below},
                {"bath_energy_drift", r.bath_energy.empty() ? 0.0 : r.bath_energy.back() - r.bath_energy.front()},
                {"norm_drift", r.norm_drift},
                {"diagonalizations", r.diagonalizations}};
}

json to_json(const WorkResult& r) {
    json ramps = json::array();
    for (const auto& ramp : r.ramps) ramps.push_back(to_json(ramp));
    return json{{"seed", r.seed}, {"ramps", ramps}};
}

json to_json(const WindowTrendResult& r) {
    json points = json::array();
    for (const auto& p : r.points)
        points.push_back(json{{"window", p.window}, {"coherence", p.coherence}, {"per_seed", jarr(p.per_seed)}});
    return json{{"epsilon", r.epsilon}, {"points", points}, {"monotone", r.monotone}};
}

// ---------------------------------------------------------------- SVG

std::string svg_line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<SvgSeries>& series, bool log_x, bool log_y) {
    constexpr double W = 720, H = 440, L = 80, R = 160, T = 40, B = 60;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
    auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
    auto usable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!log_x || x > 0) && (!log_y || y > 0);
    };

    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series)
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
            if (usable(s.x[i], s.y[i])) {
                x0 = std::min(x0, tx(s.x[i]));
                x1 = std::max(x1, tx(s.x[i]));
                y0 = std::min(y0, ty(s.y[i]));
                y1 = std::max(y1, ty(s.y[i]));
            }
    if (!(x0 <= x1)) x0 = 0, x1 = 1;
    if (!(y0 <= y1)) y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };
    auto label = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", v);
        return std::string(buf);
    };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << xml_escape(title) << "</text>\n";
    os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
        const double vx = log_x ? std::pow(10.0, fx) : fx, vy = log_y ? std::pow(10.0, fy) : fy;
        const double sx = L + (W - L - R) * k / 4.0, sy = H - B - (H - T - B) * k / 4.0;
        os << "<line x1=\"" << sx << "\" y1=\"" << H - B << "\" x2=\"" << sx << "\" y2=\"" << H - B + 5 << "\" stroke=\"black\"/>";
        os << "<text x=\"" << sx << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << label(vx) << "</text>\n";
        os << "<line x1=\"" << L - 5 << "\" y1=\"" << sy << "\" x2=\"" << L << "\" y2=\"" << sy << "\" stroke=\"black\"/>";
        os << "<text x=\"" << L - 8 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\">" << label(vy) << "</text>\n";
    }
    os << "<text x=\"" << L + (W - L - R) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">" << xml_escape(x_label) << "</text>\n";
    os << "<text x=\"18\" y=\"" << T + (H - T - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << T + (H - T - B) / 2 << ")\">" << xml_escape(y_label) << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* colour = palette[s % 6];
        os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
        const auto& sr = series[s];
        for (std::size_t i = 0; i < std::min(sr.x.size(), sr.y.size()); ++i)
            if (usable(sr.x[i], sr.y[i])) os << label(px(sr.x[i])) << ',' << label(py(sr.y[i])) << ' ';
        os << "\"/>\n";
        const double ly = T + 16 + 18.0 * static_cast<double>(s);
        os << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 36 << "\" y2=\"" << ly
           << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>";
        os << "<text x=\"" << W - R + 42 << "\" y=\"" << ly + 4 << "\">" << xml_escape(sr.name) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

// ---------------------------------------------------------------- writer

std::string tool_version() { return DECOWORK_VERSION; }

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

OutputWriter::OutputWriter(std::string directory, const ExperimentConfig& config, std::uint64_t seed,
                           std::string command)
    : directory_(std::move(directory)),
      formats_(config.output),
      config_hash_(config_hash(config.source)),
      config_name_(config.name),
      seed_(seed),
      command_(std::move(command)),
      started_(utc_timestamp()) {
    std::error_code ec;
    fs::create_directories(directory_, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + directory_ + ": " + ec.message());
}

void OutputWriter::write_text(const std::string& relative_path, const std::string& content) {
    const fs::path path = fs::path(directory_) / relative_path;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + path.string());
    auto it = std::find_if(items_.begin(), items_.end(), [&](const Item& i) { return i.path == relative_path; });
    Item item{relative_path, content.size(), fnv1a_hex(content)};
    if (it != items_.end()) *it = item;
    else items_.push_back(item);
}

void OutputWriter::write_csv(const std::string& relative_path, const CsvTable& table) {
    write_text(relative_path, table.str());
}

void OutputWriter::write_json(const std::string& relative_path, const json& doc) {
    write_text(relative_path, doc.dump(2) + "\n");
}

void OutputWriter::finish() {
    json files = json::array();
    for (const auto& i : items_) files.push_back(json{{"path", i.path}, {"bytes", i.bytes}, {"fnv1a", i.fnv1a}});
    const json manifest{{"tool", "decowork"},
                        {"tool_version", tool_version()},
                        {"command", command_},
                        {"config_name", config_name_},
                        {"config_hash", config_hash_},
                        {"seed", seed_},
                        {"started_utc", started_},
                        {"finished_utc", utc_timestamp()},
                        {"files", files}};
    std::ofstream out(fs::path(directory_) / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << "\n";
    if (!out) throw std::runtime_error("cannot write manifest in " + directory_);
}

} // namespace decowork
