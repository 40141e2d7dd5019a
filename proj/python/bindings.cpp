#include "decowork/analysis.hpp"
#include "decowork/commands.hpp"
#include "decowork/config.hpp"
#include "decowork/errors.hpp"
#include "decowork/experiment.hpp"
#include "decowork/io.hpp"
#include "decowork/propagation.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace decowork;

namespace {

ExperimentConfig config_from_text(const std::string& text) { return parse_config(nlohmann::json::parse(text)); }

std::uint64_t seed_or(const ExperimentConfig& c, std::optional<std::uint64_t> s) { return s.value_or(c.seed); }

RunOptions options(std::optional<std::uint64_t> seed, int workers, std::optional<std::string> out) {
    RunOptions o;
    o.seed = seed;
    o.workers = workers;
    o.out = std::move(out);
    return o;
}

// Results cross the boundary as JSON text; the Python layer decodes it.
template <class R>
std::string dump(const R& r) {
    return to_json(r).dump();
}

py::tuple evolve_rdms(const CMatrix& h_s, const CMatrix& h_is, const CMatrix& h_e2, const CMatrix& h_ie2,
                      Index window_count, double lambda0, double lambda1, double t0, double t1, const CVector& psi0,
                      Index n_steps, Index stride, double dlambda_max) {
    WindowSpec w;
    w.count = window_count;
    const TotalModel m(HermitianOperator(h_s), HermitianOperator(h_is), HermitianOperator(h_e2),
                       HermitianOperator(h_ie2), w, Protocol{t0, t1, lambda0, lambda1, RampShape::linear});
    PropagationOptions o;
    o.dlambda_max = dlambda_max;
    const RdmTrajectory tr = evolve(m, StateVector(psi0), TimeGrid{t0, t1, n_steps, stride}, o);
    std::vector<CMatrix> rdms;
    for (const auto& r : tr.rdms()) rdms.push_back(r.matrix());
    return py::make_tuple(tr.times(), rdms, tr.norm_drift());
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Native core of decowork";
    m.attr("__version__") = DECOWORK_VERSION;

    static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
    static py::exception<NumericalError> numerical_error(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            py::set_error(config_error, e.what());
        } catch (const NumericalError& e) {
            py::set_error(numerical_error, e.what());
        }
    });

    // linear algebra
    m.def("tensor", [](const CMatrix& a, const CMatrix& b) { return tensor(a, b); }, py::arg("a"), py::arg("b"));
    m.def(
        "partial_trace_env",
        [](const CMatrix& rho, Index dim_s, Index dim_e) { return partial_trace_env(DensityMatrix(rho), dim_s, dim_e).matrix(); },
        py::arg("rho"), py::arg("dim_s"), py::arg("dim_e"));
    m.def(
        "eig_hermitian",
        [](const CMatrix& h) {
            const SpectralDecomposition sd = eig_hermitian(HermitianOperator(h));
            return py::make_tuple(RVector(sd.eigenvalues()), sd.eigenvectors());
        },
        py::arg("h"));
    m.def("lapack_eigensolver_active", &lapack_eigensolver_active);

    // model
    m.def("goe_bath", [](Index n, double scale, std::uint64_t seed) { return build_goe_bath(n, scale, seed).matrix(); },
          py::arg("dim"), py::arg("scale"), py::arg("seed"));
    m.def("spin_chain_bath",
          [](int sites, double j, double hx, double hz) { return build_spin_chain_bath(sites, j, hx, hz).matrix(); },
          py::arg("sites"), py::arg("j") = 1.0, py::arg("hx") = 0.9, py::arg("hz") = 0.5);
    m.def("derive_seed", &derive_seed, py::arg("seed"), py::arg("stream"));
    m.def("config_hash", [](const std::string& text) { return config_hash(nlohmann::json::parse(text)); },
          py::arg("config_json"));
    m.def("validate_config", [](const std::string& text) { config_from_text(text); }, py::arg("config_json"));

    // propagation
    m.def("evolve_rdms", &evolve_rdms, py::arg("h_s"), py::arg("h_is"), py::arg("h_e2"), py::arg("h_ie2"),
          py::arg("window_count"), py::arg("lambda0"), py::arg("lambda1"), py::arg("t0"), py::arg("t1"),
          py::arg("psi0"), py::arg("n_steps"), py::arg("stride") = 1, py::arg("dlambda_max") = 1e-3);

    // rates
    m.def("perturbative_border", &perturbative_border, py::arg("sigma_v"), py::arg("delta_mls"),
          py::arg("vnd_sq_mean"));
    m.def("predict_decoherence_rate", &predict_decoherence_rate, py::arg("epsilon"), py::arg("sigma_v"));
    m.def("predict_fgr_rate", &predict_fgr_rate, py::arg("epsilon"), py::arg("rho_e"), py::arg("h1nd_sq_mean"));
    m.def(
        "fit_gaussian_decay",
        [](const std::vector<double>& t, const std::vector<double>& mag, double threshold) {
            const GaussianFit f = fit_gaussian_decay(t, mag, threshold);
            return py::make_tuple(f.rate, f.quality, f.points);
        },
        py::arg("times"), py::arg("magnitudes"), py::arg("threshold") = 0.2);

    // experiments; config arguments are JSON documents as text
    m.def(
        "run_decay",
        [](const std::string& cfg, std::optional<std::uint64_t> seed, std::optional<double> eps) {
            const ExperimentConfig c = config_from_text(cfg);
            const DecayResult r = run_decay(c, seed_or(c, seed), eps);
            nlohmann::json doc = to_json(r);
            doc["times"] = r.times;
            doc["coherence"] = r.coherence;
            doc["predicted"] = r.predicted;
            return doc.dump();
        },
        py::arg("config_json"), py::arg("seed") = py::none(), py::arg("epsilon") = py::none(),
        py::call_guard<py::gil_scoped_release>());
    m.def(
        "run_border",
        [](const std::string& cfg, std::optional<std::uint64_t> seed) {
            const ExperimentConfig c = config_from_text(cfg);
            return dump(run_border(c, seed_or(c, seed)));
        },
        py::arg("config_json"), py::arg("seed") = py::none(), py::call_guard<py::gil_scoped_release>());
    m.def(
        "run_scaling", [](const std::string& cfg, int workers) { return dump(run_scaling(config_from_text(cfg), workers)); },
        py::arg("config_json"), py::arg("workers") = 1, py::call_guard<py::gil_scoped_release>());
    m.def(
        "run_work",
        [](const std::string& cfg, std::optional<std::uint64_t> seed, int workers) {
            const ExperimentConfig c = config_from_text(cfg);
            return dump(run_adiabatic_work(c, seed_or(c, seed), workers));
        },
        py::arg("config_json"), py::arg("seed") = py::none(), py::arg("workers") = 1,
        py::call_guard<py::gil_scoped_release>());
    m.def(
        "run_window_trend",
        [](const std::string& cfg, int workers) { return dump(run_window_trend(config_from_text(cfg), workers)); },
        py::arg("config_json"), py::arg("workers") = 1, py::call_guard<py::gil_scoped_release>());
    m.def("self_test", [] {
        std::vector<py::tuple> out;
        for (const auto& l : run_self_test()) out.push_back(py::make_tuple(l.name, l.pass, l.detail));
        return out;
    });

    // commands writing output directories, as the CLI does
    const auto command = [&m](const char* name, std::string (*fn)(const ExperimentConfig&, const RunOptions&)) {
        m.def(
            name,
            [fn](const std::string& path, std::optional<std::uint64_t> seed, int workers,
                 std::optional<std::string> out) { return fn(load_config(path), options(seed, workers, std::move(out))); },
            py::arg("config_path"), py::arg("seed") = py::none(), py::arg("workers") = 1, py::arg("out") = py::none(),
            py::call_guard<py::gil_scoped_release>());
    };
    command("command_decay", &command_decay);
    command("command_scaling", &command_scaling);
    command("command_border", &command_border);
    command("command_work", &command_work);
    command("command_trend", &command_trend);
    command("command_full_suite", &command_full_suite);
}
