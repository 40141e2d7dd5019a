// config.hpp: experiment configuration: parsing, validation, model construction
//
// Configurations are JSON documents (see schemas/config.schema.json). Unknown
// keys are rejected so that typos surface before any computation starts.

#pragma once

#include "decowork/linalg.hpp"
#include "decowork/model.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace decowork {

struct BathConfig {
    std::string type = "goe"; // goe | spin-chain
    Index dim = 1024;
    double scale = 400.0;
    int sites = 10;
    double j = 1.0;
    double hx = 0.9;
    double hz = 0.5;
};

struct CouplingConfig {
    std::string type = "goe"; // goe | site
    double scale = 1.0;       // off-diagonal RMS over the window after normalization
    double offset = 0.0;      // added multiple of the identity
    bool normalize = true;
    int site = 0;
    std::string pauli = "z";
};

struct ModelConfig {
    HermitianOperator h_s = HermitianOperator::zero(2);
    HermitianOperator h_is = HermitianOperator::zero(2);
    BathConfig bath;
    CouplingConfig coupling;
    WindowSpec window;
};

struct InitialConfig {
    std::string bath_state = "typical"; // typical | eigen
    double envelope = 1.0;
    Index alpha = 0;
    Index beta = 1;
    double inverse_temperature = 1.0;
};

struct DecayConfig {
    std::optional<double> epsilon;
    double epsilon_factor = 0.5;
    double duration = 2.5;            // in units of 1/R_d (predicted)
    Index samples = 150;
    double population_duration = 3.141592653589793; // in units of 1/Δ
    Index population_samples = 100;
};

struct SweepConfig {
    std::vector<double> epsilon_factors;
    std::vector<double> epsilons;
    std::vector<double> ramp_times;
    std::vector<std::uint64_t> seeds;
    std::vector<Index> window_sizes;
};

struct NumericsConfig {
    std::optional<Index> n_steps;
    Index samples = 200;
    double dlambda_max = 1e-3;
    double decay_threshold = 0.2;
    double max_depletion = 0.2;
    double noise_floor = 1e-4;
    double transient_fraction = 0.1;
    double coherence_threshold = 0.05;
    double steady_duration = 10.0; // window-trend runs, in units of 1/R_d
};

struct OutputConfig {
    std::string directory = "out";
    bool csv = true;
    bool json = true;
    bool svg = false;
};

struct ExperimentConfig {
    std::string name = "experiment";
    std::uint64_t seed = 1;
    ModelConfig model;
    Protocol protocol;
    InitialConfig initial;
    DecayConfig decay;
    SweepConfig sweep;
    NumericsConfig numerics;
    OutputConfig output;
    nlohmann::json source; // the document as read, for hashing and provenance
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

// FNV-1a (64 bit) of the canonical serialization, as 16 hex digits.
std::string config_hash(const nlohmann::json& doc);
std::string fnv1a_hex(const std::string& bytes);

// Independent 64-bit stream seeds from one run seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Parses {"pauli": {...}}, {"diagonal": [...]} or {"real": [[...]], "imag": [[...]]}.
HermitianOperator parse_operator(const nlohmann::json& spec, const std::string& where);

struct ModelBuildOptions {
    std::optional<Index> window_count;
    // Window used to normalize the coupling; defaults to the populated window.
    std::optional<Index> normalization_window_count;
};

TotalModel build_model(const ExperimentConfig& config, std::uint64_t seed, const Protocol& protocol,
                       const ModelBuildOptions& options = {});

} // namespace decowork
