// config.cpp: configuration parsing and model construction

#include "decowork/config.hpp"

#include "decowork/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace decowork {

using nlohmann::json;

namespace {

// Typed access to one JSON object; remembers consumed keys so that leftovers
// can be reported as unknown.
class Reader {
public:
    Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return obj_.contains(key) && !obj_.at(key).is_null();
    }

    const json& raw(const std::string& key) {
        if (!has(key)) throw ConfigError(where(key) + ": required key missing");
        return obj_.at(key);
    }

    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }
    double number(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(where(key) + ": must be finite");
        return x;
    }

    Index integer(const std::string& key, Index fallback) { return has(key) ? integer(key) : fallback; }
    Index integer(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
        return v.get<Index>();
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
            throw ConfigError(where(key) + ": expected a non-negative integer");
        return v.get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_boolean()) throw ConfigError(where(key) + ": expected true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key) {
        std::vector<double> out;
        if (!has(key)) return out;
        const json& v = raw(key);
        if (!v.is_array()) throw ConfigError(where(key) + ": expected an array of numbers");
        for (const auto& x : v) {
            if (!x.is_number() || !std::isfinite(x.get<double>()))
                throw ConfigError(where(key) + ": expected finite numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    std::vector<Index> integers(const std::string& key) {
        std::vector<Index> out;
        if (!has(key)) return out;
        const json& v = raw(key);
        if (!v.is_array()) throw ConfigError(where(key) + ": expected an array of integers");
        for (const auto& x : v) {
            if (!x.is_number_integer()) throw ConfigError(where(key) + ": expected integers");
            out.push_back(x.get<Index>());
        }
        return out;
    }

    Reader child(const std::string& key) { return Reader(raw(key), where(key)); }
    std::optional<Reader> optional_child(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return Reader(raw(key), where(key));
    }

    std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!seen_.count(it.key())) throw ConfigError(where(it.key()) + ": unknown key");
        }
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

RMatrix parse_rows(const json& rows, const std::string& where) {
    if (!rows.is_array() || rows.empty()) throw ConfigError(where + ": expected a non-empty array of rows");
    const Index n = static_cast<Index>(rows.size());
    RMatrix m(n, n);
    for (Index i = 0; i < n; ++i) {
        const json& row = rows.at(static_cast<std::size_t>(i));
        if (!row.is_array() || static_cast<Index>(row.size()) != n)
            throw ConfigError(where + ": matrix must be square");
        for (Index j = 0; j < n; ++j) {
            const json& x = row.at(static_cast<std::size_t>(j));
            if (!x.is_number()) throw ConfigError(where + ": entries must be numbers");
            m(i, j) = x.get<double>();
        }
    }
    return m;
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

} // namespace

HermitianOperator parse_operator(const json& spec, const std::string& where) {
    Reader r(spec, where);
    HermitianOperator out = HermitianOperator::zero(1);
    int forms = 0;
    if (r.has("pauli")) {
        ++forms;
        Reader p = r.child("pauli");
        CMatrix m = p.number("i", 0.0) * pauli::identity() + p.number("x", 0.0) * pauli::x() +
                    p.number("y", 0.0) * pauli::y() + p.number("z", 0.0) * pauli::z();
        p.finish();
        out = HermitianOperator(m);
    }
    if (r.has("diagonal")) {
        ++forms;
        const auto d = r.numbers("diagonal");
        require(!d.empty(), where + ".diagonal: must not be empty");
        out = HermitianOperator::diagonal(Eigen::Map<const RVector>(d.data(), static_cast<Index>(d.size())));
    }
    if (r.has("real")) {
        ++forms;
        const RMatrix re = parse_rows(r.raw("real"), where + ".real");
        CMatrix m = re.cast<Complex>();
        if (r.has("imag")) {
            const RMatrix im = parse_rows(r.raw("imag"), where + ".imag");
            require(im.rows() == re.rows(), where + ": real and imag parts differ in size");
            m.imag() = im;
        }
        try {
            out = HermitianOperator(m);
        } catch (const ConfigError& e) {
            throw ConfigError(where + ": " + e.what());
        }
    }
    r.finish();
    require(forms == 1, where + ": give exactly one of pauli, diagonal, real");
    return out;
}

ExperimentConfig parse_config(const json& doc) {
    ExperimentConfig c;
    c.source = doc;
    Reader top(doc, "");
    c.name = top.string("name", c.name);
    c.seed = top.unsigned_integer("seed", c.seed);
    top.has("description");
    top.has("$schema");

    {
        Reader m = top.child("model");
        {
            Reader s = m.child("system");
            c.model.h_s = parse_operator(s.raw("h_s"), "model.system.h_s");
            c.model.h_is = parse_operator(s.raw("h_is"), "model.system.h_is");
            s.finish();
            require(c.model.h_s.dim() == c.model.h_is.dim(), "model.system: h_s and h_is dimensions differ");
            require(c.model.h_s.dim() >= 2, "model.system: system dimension must be at least 2");
        }
        {
            Reader b = m.child("bath");
            BathConfig& bc = c.model.bath;
            bc.type = b.string("type", bc.type);
            require(bc.type == "goe" || bc.type == "spin-chain", "model.bath.type: expected goe or spin-chain");
            bc.dim = b.integer("dim", bc.dim);
            bc.scale = b.number("scale", bc.scale);
            bc.sites = static_cast<int>(b.integer("sites", bc.sites));
            bc.j = b.number("j", bc.j);
            bc.hx = b.number("hx", bc.hx);
            bc.hz = b.number("hz", bc.hz);
            b.finish();
            if (bc.type == "goe") {
                require(bc.dim >= 16, "model.bath.dim: must be at least 16");
                require(bc.scale > 0.0, "model.bath.scale: must be positive");
            } else {
                require(bc.sites >= 4 && bc.sites <= 12, "model.bath.sites: must lie in [4, 12]");
                bc.dim = Index{1} << bc.sites;
            }
        }
        {
            Reader k = m.child("coupling");
            CouplingConfig& cc = c.model.coupling;
            cc.type = k.string("type", cc.type);
            require(cc.type == "goe" || cc.type == "site", "model.coupling.type: expected goe or site");
            cc.scale = k.number("scale", cc.scale);
            cc.offset = k.number("offset", cc.offset);
            cc.normalize = k.boolean("normalize", cc.normalize);
            cc.site = static_cast<int>(k.integer("site", cc.site));
            cc.pauli = k.string("pauli", cc.pauli);
            k.finish();
            require(cc.scale > 0.0, "model.coupling.scale: must be positive");
            require(cc.pauli == "x" || cc.pauli == "y" || cc.pauli == "z", "model.coupling.pauli: expected x, y or z");
            if (cc.type == "site") {
                require(c.model.bath.type == "spin-chain", "model.coupling: site coupling needs a spin-chain bath");
                require(cc.site >= 0 && cc.site < c.model.bath.sites, "model.coupling.site: out of range");
            }
        }
        {
            Reader w = m.child("window");
            WindowSpec& ws = c.model.window;
            ws.count = w.integer("count");
            if (w.has("center_energy")) ws.center_energy = w.number("center_energy");
            if (w.has("center_index")) ws.center_index = w.integer("center_index");
            w.finish();
            require(ws.count >= 1 && ws.count <= c.model.bath.dim,
                    "model.window.count: must lie in [1, bath dimension]");
        }
        m.finish();
    }

    {
        Reader p = top.child("protocol");
        c.protocol.shape = parse_ramp_shape(p.string("shape", "linear"));
        c.protocol.lambda0 = p.number("lambda0");
        c.protocol.lambda1 = p.number("lambda1", c.protocol.lambda0);
        c.protocol.t0 = p.number("t0", 0.0);
        c.protocol.t1 = p.number("t1");
        p.finish();
        c.protocol.validate();
    }

    if (auto r = top.optional_child("initial")) {
        InitialConfig& ic = c.initial;
        ic.bath_state = r->string("bath_state", ic.bath_state);
        ic.envelope = r->number("envelope", ic.envelope);
        ic.alpha = r->integer("alpha", ic.alpha);
        ic.beta = r->integer("beta", ic.beta);
        ic.inverse_temperature = r->number("inverse_temperature", ic.inverse_temperature);
        r->finish();
        require(ic.bath_state == "typical" || ic.bath_state == "eigen", "initial.bath_state: expected typical or eigen");
        require(ic.envelope > 0.0, "initial.envelope: must be positive");
        require(ic.inverse_temperature > 0.0, "initial.inverse_temperature: must be positive");
    }
    const Index ns = c.model.h_s.dim();
    require(c.initial.alpha >= 0 && c.initial.alpha < ns && c.initial.beta >= 0 && c.initial.beta < ns &&
                c.initial.alpha != c.initial.beta,
            "initial: alpha and beta must be distinct system levels");

    if (auto r = top.optional_child("decay")) {
        DecayConfig& d = c.decay;
        if (r->has("epsilon")) d.epsilon = r->number("epsilon");
        d.epsilon_factor = r->number("epsilon_factor", d.epsilon_factor);
        d.duration = r->number("duration", d.duration);
        d.samples = r->integer("samples", d.samples);
        d.population_duration = r->number("population_duration", d.population_duration);
        d.population_samples = r->integer("population_samples", d.population_samples);
        r->finish();
        require(!d.epsilon || *d.epsilon > 0.0, "decay.epsilon: must be positive");
        require(d.epsilon_factor > 0.0, "decay.epsilon_factor: must be positive");
        require(d.duration > 0.0 && d.population_duration > 0.0, "decay: durations must be positive");
        require(d.samples >= 10 && d.population_samples >= 3, "decay: too few samples");
    }

    if (auto r = top.optional_child("sweep")) {
        SweepConfig& s = c.sweep;
        s.epsilon_factors = r->numbers("epsilon_factors");
        s.epsilons = r->numbers("epsilons");
        s.ramp_times = r->numbers("ramp_times");
        for (Index v : r->integers("seeds")) {
            require(v >= 0, "sweep.seeds: seeds must be non-negative");
            s.seeds.push_back(static_cast<std::uint64_t>(v));
        }
        s.window_sizes = r->integers("window_sizes");
        r->finish();
        for (double e : s.epsilon_factors) require(e > 0.0, "sweep.epsilon_factors: values must be positive");
        for (double e : s.epsilons) require(e > 0.0, "sweep.epsilons: values must be positive");
        for (double t : s.ramp_times) require(t > 0.0, "sweep.ramp_times: values must be positive");
        for (Index w : s.window_sizes)
            require(w >= 16 && w <= c.model.bath.dim, "sweep.window_sizes: values must lie in [16, bath dimension]");
    }

    if (auto r = top.optional_child("numerics")) {
        NumericsConfig& n = c.numerics;
        if (r->has("n_steps")) n.n_steps = r->integer("n_steps");
        n.samples = r->integer("samples", n.samples);
        n.dlambda_max = r->number("dlambda_max", n.dlambda_max);
        n.decay_threshold = r->number("decay_threshold", n.decay_threshold);
        n.max_depletion = r->number("max_depletion", n.max_depletion);
        n.noise_floor = r->number("noise_floor", n.noise_floor);
        n.transient_fraction = r->number("transient_fraction", n.transient_fraction);
        n.coherence_threshold = r->number("coherence_threshold", n.coherence_threshold);
        n.steady_duration = r->number("steady_duration", n.steady_duration);
        r->finish();
        require(!n.n_steps || *n.n_steps >= 1, "numerics.n_steps: must be >= 1");
        require(n.samples >= 2, "numerics.samples: must be >= 2");
        require(n.dlambda_max >= 0.0, "numerics.dlambda_max: must be >= 0");
        require(n.decay_threshold > 0.0 && n.decay_threshold < 1.0, "numerics.decay_threshold: must lie in (0, 1)");
        require(n.max_depletion > 0.0 && n.max_depletion <= 1.0, "numerics.max_depletion: must lie in (0, 1]");
        require(n.noise_floor > 0.0, "numerics.noise_floor: must be positive");
        require(n.transient_fraction >= 0.0 && n.transient_fraction < 1.0,
                "numerics.transient_fraction: must lie in [0, 1)");
        require(n.coherence_threshold > 0.0, "numerics.coherence_threshold: must be positive");
        require(n.steady_duration > 0.0, "numerics.steady_duration: must be positive");
    }

    if (auto r = top.optional_child("output")) {
        OutputConfig& o = c.output;
        o.directory = r->string("directory", o.directory);
        if (r->has("formats")) {
            o.csv = o.json = o.svg = false;
            const json& f = r->raw("formats");
            require(f.is_array(), "output.formats: expected an array");
            for (const auto& x : f) {
                require(x.is_string(), "output.formats: expected strings");
                const auto s = x.get<std::string>();
                if (s == "csv") o.csv = true;
                else if (s == "json") o.json = true;
                else if (s == "svg") o.svg = true;
                else throw ConfigError("output.formats: unknown format '" + s + "'");
            }
        }
        r->finish();
    }

    top.finish();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string config_hash(const json& doc) { return fnv1a_hex(doc.dump()); }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

HermitianOperator site_operator(int sites, int site, const std::string& which) {
    CMatrix p = which == "x" ? pauli::x() : which == "y" ? pauli::y() : pauli::z();
    CMatrix out = CMatrix::Identity(1, 1);
    for (int k = 0; k < sites; ++k) out = tensor(out, k == site ? p : pauli::identity());
    return HermitianOperator(out);
}

} // namespace

TotalModel build_model(const ExperimentConfig& config, std::uint64_t seed, const Protocol& protocol,
                       const ModelBuildOptions& options) {
    const ModelConfig& mc = config.model;
    const BathConfig& bc = mc.bath;
    HermitianOperator h_e2 = bc.type == "goe" ? build_goe_bath(bc.dim, bc.scale, derive_seed(seed, 1))
                                              : build_spin_chain_bath(bc.sites, bc.j, bc.hx, bc.hz);
    const CouplingConfig& cc = mc.coupling;
    HermitianOperator raw = cc.type == "goe" ? build_goe_bath(h_e2.dim(), 1.0, derive_seed(seed, 2))
                                             : site_operator(bc.sites, cc.site, cc.pauli);

    WindowSpec window = mc.window;
    if (options.window_count) window.count = *options.window_count;
    const SpectralDecomposition bath = eig_hermitian(h_e2);
    if (cc.normalize) {
        WindowSpec norm_window = mc.window;
        if (options.normalization_window_count) norm_window.count = *options.normalization_window_count;
        raw = normalize_window_coupling(raw, bath, norm_window);
    }
    HermitianOperator h_ie2 = raw.scaled(cc.scale) + HermitianOperator::identity(h_e2.dim()).scaled(cc.offset);
    return TotalModel(mc.h_s, mc.h_is, std::move(h_e2), std::move(h_ie2), window, protocol);
}

} // namespace decowork
