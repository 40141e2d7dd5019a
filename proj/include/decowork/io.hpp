// io.hpp: result persistence: CSV tables, JSON reports, run manifests, SVG plots

#pragma once

#include "decowork/config.hpp"
#include "decowork/experiment.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace decowork {

// Numbers are written with 12 significant digits; non-finite values become
// "inf", "-inf" or "nan".
std::string format_number(double x);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
    std::string str() const;
};

// Column names of the tables below; the schemas directory documents the JSON side.
CsvTable decay_series_table(const DecayResult& r);      // time, coherence, predicted
CsvTable population_series_table(const DecayResult& r); // time, population
CsvTable rate_report_table(const std::vector<DecayResult>& runs);
CsvTable scaling_table(const ScalingResult& r);
CsvTable border_table(const BorderResult& r);
CsvTable ramp_series_table(const RampResult& r);
CsvTable work_distribution_table(const WorkDistribution& d); // work_value, probability
CsvTable window_trend_table(const WindowTrendResult& r);

nlohmann::json to_json(const RateReport& r);
nlohmann::json to_json(const DecayResult& r);
nlohmann::json to_json(const ScalingResult& r);
nlohmann::json to_json(const BorderResult& r);
nlohmann::json to_json(const RampResult& r);
nlohmann::json to_json(const WorkResult& r);
nlohmann::json to_json(const WindowTrendResult& r);

struct SvgSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};
// Self-contained line plot; log axes drop non-positive points.
std::string svg_line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<SvgSeries>& series, bool log_x = false, bool log_y = false);

// Collects the files of one run and writes the manifest last.
class OutputWriter {
public:
    OutputWriter(std::string directory, const ExperimentConfig& config, std::uint64_t seed, std::string command);

    void write_text(const std::string& relative_path, const std::string& content);
    void write_csv(const std::string& relative_path, const CsvTable& table);
    void write_json(const std::string& relative_path, const nlohmann::json& doc);

    // Writes manifest.json with the inventory of everything written so far.
    void finish();

    const std::string& directory() const noexcept { return directory_; }
    const OutputConfig& formats() const noexcept { return formats_; }

private:
    struct Item {
        std::string path;
        std::size_t bytes;
        std::string fnv1a;
    };
    std::string directory_;
    OutputConfig formats_;
    std::string config_hash_;
    std::string config_name_;
    std::uint64_t seed_;
    std::string command_;
    std::string started_;
    std::vector<Item> items_;
};

std::string tool_version();
std::string utc_timestamp();

} // namespace decowork
