#include "helpers.hpp"

#include "decowork/errors.hpp"

#include <doctest.h>

using namespace decowork;
using namespace testing;

TEST_CASE("ramp shapes") {
    CHECK(parse_ramp_shape("linear") == RampShape::linear);
    CHECK(parse_ramp_shape("smooth") == RampShape::smooth);
    CHECK(parse_ramp_shape("constant") == RampShape::constant);
    CHECK_THROWS_AS(parse_ramp_shape("cubic"), ConfigError);

    const Protocol lin = ramp(0.0, 10.0, 0.02, 0.03);
    CHECK(lin.lambda_at(0.0) == doctest::Approx(0.02));
    CHECK(lin.lambda_at(5.0) == doctest::Approx(0.025));
    CHECK(lin.lambda_at(10.0) == doctest::Approx(0.03));
    CHECK_THROWS_AS(lin.lambda_at(10.5), ConfigError);
    CHECK_THROWS_AS(lin.lambda_at(-1.0), ConfigError);

    const Protocol smooth = ramp(0.0, 2.0, 1.0, 3.0, RampShape::smooth);
    CHECK(smooth.lambda_at(1.0) == doctest::Approx(2.0));
    CHECK(smooth.lambda_at(0.0) == doctest::Approx(1.0));
    CHECK(smooth.lambda_at(2.0) == doctest::Approx(3.0));
    CHECK(smooth.lambda_at(0.5) < 1.5);

    CHECK_THROWS_AS(ramp(1.0, 1.0, 0.0, 1.0).validate(), ConfigError);
}

TEST_CASE("window resolution") {
    RVector e = RVector::LinSpaced(100, -1.0, 1.0);
    WindowSpec w;
    w.count = 10;
    auto r = w.resolve(e);
    CHECK(r.count == 10);
    CHECK(r.first == 44); // centre 49 (first of the two nearest to 0)
    w.center_energy = 1.0;
    CHECK(w.resolve(e).first == 90);
    w.center_energy.reset();
    w.center_index = 0;
    CHECK(w.resolve(e).first == 0);
    w.count = 101;
    CHECK_THROWS_AS(w.resolve(e), ConfigError);
    w.count = 0;
    CHECK_THROWS_AS(w.resolve(e), ConfigError);
}

TEST_CASE("GOE bath statistics and determinism") {
    const Index n = 400;
    const HermitianOperator a = build_goe_bath(n, 3.0, 42);
    const HermitianOperator b = build_goe_bath(n, 3.0, 42);
    const HermitianOperator c = build_goe_bath(n, 3.0, 43);
    CHECK(a.is_real());
    CHECK(max_abs(a.matrix() - b.matrix()) == 0.0);
    CHECK(max_abs(a.matrix() - c.matrix()) > 0.0);
    double off = 0.0, diag = 0.0;
    for (Index i = 0; i < n; ++i) {
        diag += std::norm(a(i, i));
        for (Index j = i + 1; j < n; ++j) off += std::norm(a(i, j));
    }
    off /= static_cast<double>(n * (n - 1) / 2);
    diag /= static_cast<double>(n);
    CHECK(off == doctest::Approx(9.0 / n).epsilon(0.05));
    CHECK(diag == doctest::Approx(18.0 / n).epsilon(0.2));
    // semicircle radius 2·scale
    const RVector ev = eig_hermitian(a).eigenvalues();
    CHECK(ev(n - 1) == doctest::Approx(6.0).epsilon(0.1));
    CHECK(ev(0) == doctest::Approx(-6.0).epsilon(0.1));
}

TEST_CASE("spin chain matches a brute-force Kronecker sum") {
    const int sites = 5;
    const double j = 1.0, hx = 0.9, hz = 0.5;
    const Index dim = Index{1} << sites;
    auto site_op = [&](int k, const CMatrix& p) {
        CMatrix out = CMatrix::Identity(1, 1);
        for (int s = 0; s < sites; ++s) out = tensor(out, s == k ? p : pauli::identity());
        return out;
    };
    CMatrix h = CMatrix::Zero(dim, dim);
    for (int k = 0; k + 1 < sites; ++k) h += j * site_op(k, pauli::z()) * site_op(k + 1, pauli::z());
    for (int k = 0; k < sites; ++k) h += hx * site_op(k, pauli::x()) + hz * site_op(k, pauli::z());
    const HermitianOperator chain = build_spin_chain_bath(sites, j, hx, hz);
    CHECK(max_abs(chain.matrix() - h) <= 1e-12);
    CHECK_THROWS_AS(build_spin_chain_bath(1, j, hx, hz), ConfigError);
    CHECK_THROWS_AS(build_spin_chain_bath(13, j, hx, hz), ConfigError);
}

TEST_CASE("window trace over the full space is the normalized trace") {
    std::mt19937_64 rng(5);
    const HermitianOperator e2 = random_hermitian(30, rng);
    const HermitianOperator ie2 = random_hermitian(30, rng);
    WindowSpec w;
    w.count = 30;
    CHECK(window_trace(ie2, e2, w) == doctest::Approx(ie2.matrix().trace().real() / 30.0).epsilon(1e-12));
    w.count = 5;
    const SpectralDecomposition sd = eig_hermitian(e2);
    double s = 0.0;
    const auto r = w.resolve(sd.eigenvalues());
    for (Index n = r.first; n < r.first + 5; ++n) {
        const CVector v = sd.eigenvector(n);
        s += (v.adjoint() * ie2.matrix() * v)(0).real();
    }
    CHECK(window_trace(ie2, sd, w) == doctest::Approx(s / 5.0));
}

TEST_CASE("normalized coupling has unit off-diagonal mean square in the window") {
    const HermitianOperator e2 = build_goe_bath(120, 5.0, 1);
    const HermitianOperator g = build_goe_bath(120, 1.0, 2);
    const SpectralDecomposition sd = eig_hermitian(e2);
    WindowSpec w;
    w.count = 40;
    const HermitianOperator n = normalize_window_coupling(g, sd, w);
    const auto r = w.resolve(sd.eigenvalues());
    const CMatrix v = sd.eigenvectors().middleCols(r.first, r.count);
    const CMatrix b = v.adjoint() * n.matrix() * v;
    double s = 0.0;
    for (Index i = 0; i < 40; ++i)
        for (Index k = 0; k < 40; ++k)
            if (i != k) s += std::norm(b(i, k));
    CHECK(s / (40.0 * 39.0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("renormalized system Hamiltonian arithmetic") {
    // H_S = σz, H_I^S = σx, λ = 0.1, m = 2 → σz + 0.2σx
    const Index ne = 8;
    const HermitianOperator e2 = HermitianOperator::diagonal(RVector::LinSpaced(ne, 0.0, 1.0));
    const HermitianOperator ie2 = HermitianOperator::identity(ne).scaled(2.0);
    WindowSpec w;
    w.count = ne;
    const TotalModel m(HermitianOperator(pauli::z()), HermitianOperator(pauli::x()), e2, ie2, w,
                       ramp(0.0, 1.0, 0.1, 0.1, RampShape::constant));
    CHECK(m.mean_ie2() == doctest::Approx(2.0));
    CHECK(max_abs(h_s_renormalized(m, 0.5).matrix() - (pauli::z() + 0.2 * pauli::x())) <= 1e-14);
    CHECK(max_abs(m.centered_bath_coupling().matrix()) <= 1e-14);
    CHECK(max_abs(h_i_r2(m).matrix()) <= 1e-14);
}

TEST_CASE("traceless coupling leaves H_S unrenormalized") {
    const Index ne = 6;
    const HermitianOperator e2 = HermitianOperator::diagonal(RVector::LinSpaced(ne, 0.0, 1.0));
    const HermitianOperator ie2 = HermitianOperator::diagonal((RVector(6) << 1, -1, 1, -1, 1, -1).finished());
    WindowSpec w;
    w.count = ne;
    const TotalModel m(HermitianOperator(pauli::z()), HermitianOperator(pauli::x()), e2, ie2, w,
                       ramp(0.0, 1.0, 0.0, 1.0));
    CHECK(max_abs(h_s_renormalized(m, 0.7).matrix() - pauli::z()) <= 1e-14);
    CHECK(max_abs(h_i_r2(m).matrix() - tensor(pauli::x(), ie2.matrix())) <= 1e-14);
}

TEST_CASE("total Hamiltonian matches the explicit Kronecker assembly") {
    const TotalModel m = small_model(12, 3, ramp(0.0, 4.0, 0.1, 0.4));
    const double lambda = m.protocol().lambda_at(1.5);
    const CMatrix expect = tensor(m.h_s().matrix(), CMatrix::Identity(12, 12)) +
                           lambda * tensor(m.h_is().matrix(), m.h_ie2().matrix()) +
                           tensor(CMatrix::Identity(2, 2), m.h_e2().matrix());
    CHECK(max_abs(h_total(m, 1.5).matrix() - expect) <= 1e-12);
    CHECK(max_abs(h_total_unrenormalized(m, lambda).matrix() - expect) <= 1e-12);
    const CMatrix renorm = tensor(h_s_renormalized_at(m, lambda).matrix(), CMatrix::Identity(12, 12)) +
                           lambda * h_i_r2(m).matrix() + tensor(CMatrix::Identity(2, 2), m.h_e2().matrix());
    CHECK(max_abs(renorm - expect) <= 1e-12);
}

TEST_CASE("perturbation split") {
    const TotalModel m = small_model(10, 4, ramp(2.0, 6.0, 0.2, 0.5));
    const PerturbationSplit s = perturbation_split(m, 2.0);
    CHECK(s.epsilon == doctest::Approx(0.2));
    CHECK(max_abs((s.h0 + s.h1.scaled(s.epsilon)).matrix() - h_total(m, 2.0).matrix()) <= 1e-12);
    CHECK_THROWS_AS(perturbation_split(m, 3.0), ConfigError);
    const TotalModel zero = m.with_protocol(ramp(0.0, 1.0, 0.0, 0.5));
    CHECK_THROWS_AS(perturbation_split(zero, 0.0), ConfigError);
    // ΔH_S(t1) = (λ1 - λ0) m H_I^S
    CHECK(max_abs(delta_h_s(m, 6.0).matrix() - 0.3 * m.mean_ie2() * m.h_is().matrix()) <= 1e-14);
}

TEST_CASE("Gershgorin bound dominates the spectral radius") {
    const TotalModel m = small_model(16, 5, ramp(0.0, 1.0, -0.5, 0.8));
    const double bound = spectral_radius_bound(m);
    for (double t : {0.0, 0.5, 1.0}) {
        const RVector ev = eig_hermitian(h_total(m, t)).eigenvalues();
        CHECK(std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1))) <= bound);
    }
}

TEST_CASE("model validation") {
    const HermitianOperator e2 = build_goe_bath(8, 1.0, 1);
    WindowSpec w;
    w.count = 4;
    CHECK_THROWS_AS(TotalModel(HermitianOperator(pauli::z()), HermitianOperator::identity(3), e2, e2, w,
                               ramp(0.0, 1.0, 0.0, 0.1)),
                    ConfigError);
    CHECK_THROWS_AS(TotalModel(HermitianOperator(pauli::z()), HermitianOperator(pauli::x()), e2,
                               HermitianOperator::identity(4), w, ramp(0.0, 1.0, 0.0, 0.1)),
                    ConfigError);
    w.count = 9;
    CHECK_THROWS_AS(TotalModel(HermitianOperator(pauli::z()), HermitianOperator(pauli::x()), e2, e2, w,
                               ramp(0.0, 1.0, 0.0, 0.1)),
                    ConfigError);
}
