#include "helpers.hpp"

#include "decowork/errors.hpp"
#include "decowork/propagation.hpp"

#include <doctest.h>

using namespace decowork;
using namespace testing;

namespace {

// Classical fourth-order Runge-Kutta on i dψ/dt = H(t) ψ, H(t) = A + λ(t) B.
CVector rk4_oracle(const TotalModel& m, const CVector& psi0, double t0, double t1, Index steps) {
    const Index ns = m.n_s(), ne = m.n_e();
    const CMatrix a = tensor(m.h_s().matrix(), CMatrix::Identity(ne, ne)) +
                      tensor(CMatrix::Identity(ns, ns), m.h_e2().matrix());
    const CMatrix b = tensor(m.h_is().matrix(), m.h_ie2().matrix());
    const Complex mi(0.0, -1.0);
    auto f = [&](double t, const CVector& y) -> CVector {
        return mi * (a * y + m.protocol().lambda_at(t) * (b * y));
    };
    const double h = (t1 - t0) / static_cast<double>(steps);
    CVector y = psi0;
    for (Index k = 0; k < steps; ++k) {
        const double t = t0 + static_cast<double>(k) * h;
        const double tn = k + 1 == steps ? t1 : t + h;
        const CVector k1 = f(t, y);
        const CVector k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
        const CVector k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
        const CVector k4 = f(tn, y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return y;
}

PropagationOptions keep_states(double dlambda = 1e-3) {
    PropagationOptions o;
    o.retain_states = true;
    o.dlambda_max = dlambda;
    return o;
}

} // namespace

TEST_CASE("time grid") {
    TimeGrid g{0.0, 1.0, 10, 3};
    CHECK(g.dt() == doctest::Approx(0.1));
    const auto s = g.sample_steps();
    CHECK(s == std::vector<Index>{0, 3, 6, 9, 10});
    CHECK(g.time_at(10) == 1.0);
    CHECK_THROWS_AS((TimeGrid{1.0, 1.0, 10, 1}.validate()), ConfigError);
    CHECK_THROWS_AS((TimeGrid{0.0, 1.0, 0, 1}.validate()), ConfigError);
    const TotalModel m = small_model(8, 1, ramp(0.0, 5.0, 0.1, 0.2));
    const TimeGrid auto_grid = TimeGrid::for_model(m, 0.0, 5.0, 10);
    CHECK(auto_grid.dt() * spectral_radius_bound(m) <= 0.5 + 1e-12);
}

TEST_CASE("constant coupling: evolve matches a fine-step Runge-Kutta oracle") {
    const TotalModel m = small_model(16, 2, ramp(0.0, 3.0, 0.4, 0.4, RampShape::constant));
    std::mt19937_64 rng(1);
    const StateVector psi = random_state(32, rng);
    const RdmTrajectory tr = evolve(m, psi, TimeGrid{0.0, 3.0, 7, 7}, keep_states());
    const CVector oracle = rk4_oracle(m, psi.amplitudes(), 0.0, 3.0, 30000);
    CHECK((tr.states().back() - oracle).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(tr.diagonalizations() == 1);
}

TEST_CASE("linear ramp: evolve matches the oracle when every step is re-diagonalized") {
    const TotalModel m = small_model(16, 3, ramp(0.0, 2.0, 0.1, 0.3));
    std::mt19937_64 rng(2);
    const StateVector psi = random_state(32, rng);
    const RdmTrajectory tr = evolve(m, psi, TimeGrid{0.0, 2.0, 8000, 8000}, keep_states(0.0));
    const CVector oracle = rk4_oracle(m, psi.amplitudes(), 0.0, 2.0, 40000);
    CHECK((tr.states().back() - oracle).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("dimension-64 system: four-level system with a 16-state bath") {
    std::mt19937_64 rng(3);
    const HermitianOperator hs = random_hermitian(4, rng);
    const HermitianOperator his = random_hermitian(4, rng);
    WindowSpec w;
    w.count = 16;
    const TotalModel m(hs, his, build_goe_bath(16, 1.5, 9), build_goe_bath(16, 0.4, 10), w,
                       ramp(0.0, 1.5, 0.2, 0.2, RampShape::constant));
    const StateVector psi = random_state(64, rng);
    const RdmTrajectory tr = evolve(m, psi, TimeGrid{0.0, 1.5, 3, 1}, keep_states());
    const CVector oracle = rk4_oracle(m, psi.amplitudes(), 0.0, 1.5, 30000);
    CHECK((tr.states().back() - oracle).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("norm is conserved and RDMs are valid") {
    const TotalModel m = small_model(24, 4, ramp(0.0, 40.0, 0.1, 0.6));
    std::mt19937_64 rng(4);
    const RdmTrajectory tr = evolve(m, random_state(48, rng), TimeGrid{0.0, 40.0, 400, 10});
    CHECK(tr.norm_drift() <= 1e-9);
    CHECK(tr.size() == 41);
    for (const auto& r : tr.rdms()) {
        CHECK(std::abs(r.matrix().trace() - Complex(1.0)) <= 1e-10);
        CHECK(hermiticity_defect(r.matrix()) <= 1e-12);
    }
}

TEST_CASE("batched evolution equals separate runs") {
    const TotalModel m = small_model(12, 5, ramp(0.0, 5.0, 0.0, 0.5));
    std::mt19937_64 rng(5);
    const StateVector a = random_state(24, rng), b = random_state(24, rng);
    const TimeGrid g{0.0, 5.0, 100, 20};
    const auto both = evolve_batch(m, {a, b}, g, keep_states());
    const RdmTrajectory sa = evolve(m, a, g, keep_states());
    const RdmTrajectory sb = evolve(m, b, g, keep_states());
    CHECK((both[0].states().back() - sa.states().back()).norm() <= 1e-12);
    CHECK((both[1].states().back() - sb.states().back()).norm() <= 1e-12);
}

TEST_CASE("sampling stride does not change the state") {
    const TotalModel m = small_model(12, 6, ramp(0.0, 5.0, 0.0, 0.5));
    std::mt19937_64 rng(6);
    const StateVector a = random_state(24, rng);
    const RdmTrajectory fine = evolve(m, a, TimeGrid{0.0, 5.0, 200, 1}, keep_states());
    const RdmTrajectory coarse = evolve(m, a, TimeGrid{0.0, 5.0, 200, 50}, keep_states());
    CHECK((fine.states().back() - coarse.states().back()).norm() <= 1e-12);
    CHECK(fine.diagonalizations() == coarse.diagonalizations());
}

TEST_CASE("re-diagonalization follows the dλ threshold") {
    const TotalModel m = small_model(8, 7, ramp(0.0, 1.0, 0.0, 0.1));
    std::mt19937_64 rng(7);
    const StateVector a = random_state(16, rng);
    const RdmTrajectory tr = evolve(m, a, TimeGrid{0.0, 1.0, 1000, 100}, keep_states(0.01));
    CHECK(tr.diagonalizations() >= 9);
    CHECK(tr.diagonalizations() <= 11);
}

TEST_CASE("determinism") {
    const TotalModel m = small_model(16, 8, ramp(0.0, 3.0, 0.1, 0.2));
    std::mt19937_64 r1(9), r2(9);
    const RdmTrajectory a = evolve(m, random_state(32, r1), TimeGrid{0.0, 3.0, 50, 5});
    const RdmTrajectory b = evolve(m, random_state(32, r2), TimeGrid{0.0, 3.0, 50, 5});
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(max_abs(a.rdms()[i].matrix() - b.rdms()[i].matrix()) == 0.0);
}

TEST_CASE("decoupled eigenstate stays diagonal in the instantaneous basis") {
    const Index ne = 10;
    const HermitianOperator e2 = build_goe_bath(ne, 1.0, 3);
    WindowSpec w;
    w.count = ne;
    // h_ie2 = 2 I: no residual coupling, H_S^r rotates with λ
    const TotalModel m(HermitianOperator(pauli::z()), HermitianOperator(pauli::x()), e2,
                       HermitianOperator::identity(ne).scaled(2.0), w, ramp(0.0, 200.0, 0.0, 0.5));
    const SpectralDecomposition b0 = eig_hermitian(h_s_renormalized(m, 0.0));
    const SpectralDecomposition be = eig_hermitian(e2);
    const CVector s0 = b0.eigenvector(0), e3 = be.eigenvector(3);
    CVector amp(2 * ne);
    for (Index i = 0; i < 2; ++i) amp.segment(i * ne, ne) = s0(i) * e3;
    const StateVector psi(amp);
    const RdmTrajectory tr = evolve(m, psi, TimeGrid{0.0, 200.0, 2000, 100}, keep_states(1e-4));
    const auto inst = rdms_in_instantaneous_basis(tr);
    for (const auto& r : inst) CHECK(coherence_norm(r) <= 1e-2);
    CHECK(inst.back()(0, 0).real() >= 0.999);
    const CMatrix last = rdm_in_instantaneous_basis(tr, m, 200.0);
    CHECK(max_abs(last - inst.back()) <= 1e-12);
}

TEST_CASE("instantaneous basis columns keep their phase between samples") {
    const TotalModel m = small_model(8, 9, ramp(0.0, 10.0, -2.0, 2.0));
    std::mt19937_64 rng(10);
    const RdmTrajectory tr = evolve(m, random_state(16, rng), TimeGrid{0.0, 10.0, 100, 2});
    const auto bases = instantaneous_bases(tr);
    for (std::size_t i = 1; i < bases.size(); ++i)
        for (Index k = 0; k < 2; ++k) {
            const Complex o = bases[i - 1].col(k).dot(bases[i].col(k));
            CHECK(o.real() > 0.0);
            CHECK(std::abs(o.imag()) <= 1e-12);
        }
}

TEST_CASE("degenerate system spectrum is reported") {
    const Index ne = 6;
    WindowSpec w;
    w.count = ne;
    const TotalModel m(HermitianOperator::zero(2), HermitianOperator(pauli::x()), build_goe_bath(ne, 1.0, 1),
                       build_goe_bath(ne, 1.0, 2), w, ramp(0.0, 1.0, 0.0, 0.0, RampShape::constant));
    std::mt19937_64 rng(11);
    const RdmTrajectory tr = evolve(m, random_state(12, rng), TimeGrid{0.0, 1.0, 4, 1});
    CHECK_THROWS_AS(rdms_in_instantaneous_basis(tr), NumericalError);
}

TEST_CASE("coherence norm and trajectory mixing") {
    CMatrix r(2, 2);
    r << 0.5, Complex(0.3, 0.4), Complex(0.3, -0.4), 0.5;
    CHECK(coherence_norm(r) == doctest::Approx(std::sqrt(0.5)));

    const TotalModel m = small_model(8, 12, ramp(0.0, 2.0, 0.1, 0.2));
    std::mt19937_64 rng(12);
    const TimeGrid g{0.0, 2.0, 20, 5};
    const auto runs = evolve_batch(m, {random_state(16, rng), random_state(16, rng)}, g);
    const RdmTrajectory mix = mix_trajectories(runs, {0.25, 0.75});
    for (std::size_t i = 0; i < mix.size(); ++i) {
        const CMatrix expect = 0.25 * runs[0].rdms()[i].matrix() + 0.75 * runs[1].rdms()[i].matrix();
        CHECK(max_abs(mix.rdms()[i].matrix() - expect) <= 1e-15);
    }
    CHECK_THROWS_AS(mix_trajectories(runs, {0.5, 0.6}), ConfigError);
}

TEST_CASE("bath energy tracking") {
    const TotalModel m = small_model(12, 13, ramp(0.0, 2.0, 0.0, 0.0, RampShape::constant));
    std::mt19937_64 rng(13);
    const StateVector psi = random_state(24, rng);
    PropagationOptions o;
    o.track_bath_energy = true;
    const RdmTrajectory tr = evolve(m, psi, TimeGrid{0.0, 2.0, 10, 5}, o);
    const CMatrix he = tensor(CMatrix::Identity(2, 2), m.h_e2().matrix());
    const Complex e0 = psi.amplitudes().dot(he * psi.amplitudes());
    REQUIRE(tr.bath_energies().size() == tr.size());
    CHECK(tr.bath_energies().front() == doctest::Approx(e0.real()).epsilon(1e-12));
    // λ = 0: bath energy is conserved
    CHECK(tr.bath_energies().back() == doctest::Approx(e0.real()).epsilon(1e-10));
}
