// model.cpp: model-builder implementation

#include "decowork/model.hpp"

#include "decowork/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace decowork {

RampShape parse_ramp_shape(const std::string& name) {
    if (name == "constant") return RampShape::constant;
    if (name == "linear" || name == "linear-ramp") return RampShape::linear;
    if (name == "smooth" || name == "smooth-ramp") return RampShape::smooth;
    throw ConfigError("unknown protocol shape '" + name + "' (expected constant, linear, smooth)");
}

std::string to_string(RampShape shape) {
    switch (shape) {
    case RampShape::constant: return "constant";
    case RampShape::linear: return "linear";
    case RampShape::smooth: return "smooth";
    }
    return "unknown";
}

// ---------------------------------------------------------------- Protocol

void Protocol::validate() const {
    if (!std::isfinite(t0) || !std::isfinite(t1) || !std::isfinite(lambda0) || !std::isfinite(lambda1))
        throw ConfigError("protocol: non-finite parameter");
    if (!(t1 > t0)) throw ConfigError("protocol: t1 must be greater than t0");
    if (shape == RampShape::constant && lambda0 != lambda1)
        throw ConfigError("protocol: a constant schedule needs lambda1 == lambda0");
}

bool Protocol::contains(double t) const {
    const double slack = 1e-12 * std::max({1.0, std::abs(t0), std::abs(t1)});
    return t >= t0 - slack && t <= t1 + slack;
}

double Protocol::lambda_at(double t) const {
    if (!contains(t)) {
        std::ostringstream os;
        os << "protocol: time " << t << " outside [" << t0 << ", " << t1 << "]";
        throw ConfigError(os.str());
    }
    const double s = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
    switch (shape) {
    case RampShape::constant: return lambda0;
    case RampShape::linear: return lambda0 + (lambda1 - lambda0) * s;
    case RampShape::smooth: return lambda0 + (lambda1 - lambda0) * 0.5 * (1.0 - std::cos(std::numbers::pi * s));
    }
    return lambda0;
}

// ---------------------------------------------------------------- WindowSpec

WindowSpec::Range WindowSpec::resolve(const RVector& ascending) const {
    const Index n = ascending.size();
    if (count < 1) throw ConfigError("window: empty window (count must be >= 1)");
    if (count > n) {
        std::ostringstream os;
        os << "window: count " << count << " exceeds bath dimension " << n;
        throw ConfigError(os.str());
    }
    Index center = 0;
    if (center_index) {
        if (*center_index < 0 || *center_index >= n) throw ConfigError("window: center_index out of range");
        center = *center_index;
    } else {
        const double target = center_energy ? *center_energy : 0.5 * (ascending(0) + ascending(n - 1));
        (ascending.array() - target).abs().minCoeff(&center);
    }
    Index first = center - count / 2;
    first = std::clamp<Index>(first, 0, n - count);
    return Range{first, count};
}

// ---------------------------------------------------------------- baths

HermitianOperator build_goe_bath(Index dim, double scale, std::uint64_t seed) {
    if (dim < 2) throw ConfigError("build_goe_bath: dim must be >= 2");
    if (!(scale > 0.0)) throw ConfigError("build_goe_bath: scale must be positive");
    std::mt19937_64 rng(seed);
    const double sd_off = scale / std::sqrt(static_cast<double>(dim));
    std::normal_distribution<double> off(0.0, sd_off);
    std::normal_distribution<double> diag(0.0, std::sqrt(2.0) * sd_off);
    RMatrix m(dim, dim);
    for (Index i = 0; i < dim; ++i) {
        for (Index j = i + 1; j < dim; ++j) {
            const double v = off(rng);
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    for (Index i = 0; i < dim; ++i) m(i, i) = diag(rng);
    return HermitianOperator(m);
}

HermitianOperator build_spin_chain_bath(int sites, double j_coupling, double h_x, double h_z) {
    if (sites < 2 || sites > 12) throw ConfigError("build_spin_chain_bath: sites must be between 2 and 12");
    const Index dim = Index{1} << sites;
    RMatrix m = RMatrix::Zero(dim, dim);
    auto spin = [sites](Index state, int site) {
        return ((state >> (sites - 1 - site)) & 1) ? -1.0 : 1.0;
    };
    for (Index s = 0; s < dim; ++s) {
        double d = 0.0;
        for (int k = 0; k + 1 < sites; ++k) d += j_coupling * spin(s, k) * spin(s, k + 1);
        for (int k = 0; k < sites; ++k) {
            d += h_z * spin(s, k);
            const Index flipped = s ^ (Index{1} << (sites - 1 - k));
            m(flipped, s) += h_x;
        }
        m(s, s) += d;
    }
    return HermitianOperator(m);
}

double window_trace(const HermitianOperator& h_ie2, const SpectralDecomposition& bath, const WindowSpec& window) {
    if (h_ie2.dim() != bath.dim()) throw ConfigError("window_trace: operator dimensions differ");
    const auto r = window.resolve(bath.eigenvalues());
    double sum = 0.0;
    for (Index n = r.first; n < r.first + r.count; ++n) sum += h_ie2.expectation(bath.eigenvector(n));
    return sum / static_cast<double>(r.count);
}

double window_trace(const HermitianOperator& h_ie2, const HermitianOperator& h_e2, const WindowSpec& window) {
    if (h_ie2.dim() != h_e2.dim()) throw ConfigError("window_trace: operator dimensions differ");
    return window_trace(h_ie2, eig_hermitian(h_e2), window);
}

HermitianOperator normalize_window_coupling(const HermitianOperator& coupling, const SpectralDecomposition& bath,
                                            const WindowSpec& window) {
    if (coupling.dim() != bath.dim()) throw ConfigError("normalize_window_coupling: dimension mismatch");
    const auto r = window.resolve(bath.eigenvalues());
    if (r.count < 2) throw ConfigError("normalize_window_coupling: window needs at least two states");
    const CMatrix w = bath.eigenvectors().middleCols(r.first, r.count);
    const CMatrix bw = w.adjoint() * coupling.matrix() * w;
    const double total = bw.cwiseAbs2().sum();
    const double diag = bw.diagonal().cwiseAbs2().sum();
    const double pairs = static_cast<double>(r.count) * static_cast<double>(r.count - 1);
    const double mean_sq = (total - diag) / pairs;
    if (!(mean_sq > 0.0)) throw ConfigError("normalize_window_coupling: coupling has no off-diagonal window elements");
    return coupling.scaled(1.0 / std::sqrt(mean_sq));
}

// ---------------------------------------------------------------- TotalModel

namespace {

std::shared_ptr<const SpectralDecomposition> checked_bath(const HermitianOperator& h_s, const HermitianOperator& h_is,
                                                          const HermitianOperator& h_e2,
                                                          const HermitianOperator& h_ie2) {
    if (h_s.dim() != h_is.dim()) throw ConfigError("TotalModel: H_S and H_I^S dimensions differ");
    if (h_e2.dim() != h_ie2.dim()) throw ConfigError("TotalModel: H_E2 and H_I^E2 dimensions differ");
    return std::make_shared<const SpectralDecomposition>(eig_hermitian(h_e2));
}

} // namespace

TotalModel::TotalModel(HermitianOperator h_s, HermitianOperator h_is, HermitianOperator h_e2, HermitianOperator h_ie2,
                       WindowSpec window, Protocol protocol)
    : h_s_(std::move(h_s)),
      h_is_(std::move(h_is)),
      h_e2_(std::move(h_e2)),
      h_ie2_(std::move(h_ie2)),
      bath_(checked_bath(h_s_, h_is_, h_e2_, h_ie2_)),
      window_(window),
      range_(window.resolve(bath_->eigenvalues())),
      protocol_(protocol),
      mean_ie2_(window_trace(h_ie2_, *bath_, window)),
      centered_(h_ie2_ - HermitianOperator::identity(h_ie2_.dim()).scaled(mean_ie2_)) {
    protocol_.validate();
    window_.center_energy.reset();
    window_.center_index = range_.first + range_.count / 2;
}

TotalModel TotalModel::with_protocol(Protocol protocol) const {
    protocol.validate();
    TotalModel copy = *this;
    copy.protocol_ = protocol;
    return copy;
}

HermitianOperator h_s_renormalized_at(const TotalModel& model, double lambda) {
    return model.h_s() + model.h_is().scaled(lambda * model.mean_ie2());
}

HermitianOperator h_s_renormalized(const TotalModel& model, double t) {
    return h_s_renormalized_at(model, model.protocol().lambda_at(t));
}

HermitianOperator h_i_r2(const TotalModel& model) {
    return tensor(model.h_is(), model.centered_bath_coupling());
}

namespace {

// Σ_ij |i⟩⟨j| ⊗ (a_ij I + c b_ij B + δ_ij E)
HermitianOperator assemble(const HermitianOperator& a, const HermitianOperator& b, double c, const CMatrix& bath_factor,
                           const CMatrix& bath_self) {
    const Index ns = a.dim();
    const Index ne = bath_self.rows();
    CMatrix out(ns * ne, ns * ne);
    for (Index j = 0; j < ns; ++j) {
        for (Index i = 0; i < ns; ++i) {
            auto blk = out.block(i * ne, j * ne, ne, ne);
            blk = (c * b(i, j)) * bath_factor;
            blk.diagonal().array() += a(i, j);
            if (i == j) blk += bath_self;
        }
    }
    return HermitianOperator::symmetrized(out);
}

} // namespace

HermitianOperator h_total_at(const TotalModel& model, double lambda) {
    return assemble(h_s_renormalized_at(model, lambda), model.h_is(), lambda, model.centered_bath_coupling().matrix(),
                    model.h_e2().matrix());
}

HermitianOperator h_total(const TotalModel& model, double t) {
    return h_total_at(model, model.protocol().lambda_at(t));
}

HermitianOperator h_total_unrenormalized(const TotalModel& model, double lambda) {
    return assemble(model.h_s(), model.h_is(), lambda, model.h_ie2().matrix(), model.h_e2().matrix());
}

PerturbationSplit perturbation_split(const TotalModel& model, double t0) {
    const Protocol& p = model.protocol();
    if (std::abs(t0 - p.t0) > 1e-12 * std::max(1.0, std::abs(p.t0)))
        throw ConfigError("perturbation_split: freeze time must be the protocol start");
    const double eps = p.lambda_at(t0);
    const bool coupled = model.h_is().matrix().cwiseAbs().maxCoeff() > 0.0 &&
                         model.centered_bath_coupling().matrix().cwiseAbs().maxCoeff() > 0.0;
    if (eps == 0.0 && coupled)
        throw ConfigError("perturbation_split: lambda(t0) = 0 leaves the perturbation scale undefined");
    const Index ns = model.n_s();
    const Index ne = model.n_e();
    HermitianOperator h0 = tensor(h_s_renormalized_at(model, eps), HermitianOperator::identity(ne)) +
                           tensor(HermitianOperator::identity(ns), model.h_e2());
    return PerturbationSplit{std::move(h0), h_i_r2(model), eps, t0};
}

HermitianOperator delta_h_s(const TotalModel& model, double t) {
    const Protocol& p = model.protocol();
    const double dl = p.lambda_at(t) - p.lambda_at(p.t0);
    return model.h_is().scaled(dl * model.mean_ie2());
}

double spectral_radius_bound(const TotalModel& model) {
    const double bath_rows = model.h_e2().matrix().cwiseAbs().rowwise().sum().maxCoeff();
    const double coupling_rows = model.centered_bath_coupling().matrix().cwiseAbs().rowwise().sum().maxCoeff();
    const RVector is_rows = model.h_is().matrix().cwiseAbs().rowwise().sum();
    double best = 0.0;
    for (double lambda : {model.protocol().lambda0, model.protocol().lambda1}) {
        const RVector hs_rows = h_s_renormalized_at(model, lambda).matrix().cwiseAbs().rowwise().sum();
        const double r = (hs_rows + std::abs(lambda) * coupling_rows * is_rows).maxCoeff() + bath_rows;
        best = std::max(best, r);
    }
    return best;
}

} // namespace decowork
