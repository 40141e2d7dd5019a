#include "helpers.hpp"

#include "decowork/errors.hpp"
#include "decowork/work.hpp"

#include <doctest.h>

#include <cmath>

using namespace decowork;
using namespace testing;

namespace {

// Decoupled model: H_S = diag(0, 1), H_I^S = diag(1, 2), bath coupling = identity.
TotalModel decoupled(double l0, double l1, double duration = 10.0) {
    const Index ne = 6;
    WindowSpec w;
    w.count = ne;
    return TotalModel(HermitianOperator::diagonal((RVector(2) << 0.0, 1.0).finished()),
                      HermitianOperator::diagonal((RVector(2) << 1.0, 2.0).finished()), build_goe_bath(ne, 1.0, 4),
                      HermitianOperator::identity(ne), w, ramp(0.0, duration, l0, l1));
}

} // namespace

TEST_CASE("Gibbs weights") {
    const RVector w = gibbs_weights((RVector(2) << 0.0, 2.0).finished(), 1.0);
    CHECK(w(0) == doctest::Approx(0.8808).epsilon(1e-4));
    CHECK(w.sum() == doctest::Approx(1.0));
    const RVector flat = gibbs_weights((RVector(3) << 1.0, 5.0, 9.0).finished(), 0.0);
    CHECK(flat(2) == doctest::Approx(1.0 / 3.0));
    // huge β does not overflow
    const RVector cold = gibbs_weights((RVector(2) << 0.0, 1.0).finished(), 1e4);
    CHECK(cold(0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(gibbs_weights(RVector::Zero(2), -1.0), ConfigError);

    const DensityMatrix g = gibbs_state(HermitianOperator(pauli::z()), 1.0);
    CHECK(g(0, 0).real() == doctest::Approx(std::exp(-1.0) / (std::exp(-1.0) + std::exp(1.0))));
    CHECK(std::abs(g(0, 1)) <= 1e-15);
}

TEST_CASE("populations") {
    CMatrix r(2, 2);
    r << 0.7, 0.1, 0.1, 0.3;
    const RVector p = populations(r);
    CHECK(p(0) == 0.7);
    CHECK(p(1) == 0.3);
    CHECK_THROWS_AS(populations(CMatrix::Zero(2, 3)), ConfigError);
}

TEST_CASE("mixture work of a decoupled diagonal ramp") {
    const TotalModel m = decoupled(0.0, 0.1);
    const StateVector bath = eigen_bath_state(m);
    const StateVector psi = coherent_gibbs_state(m, bath, 1.0, 0.0);
    const RdmTrajectory tr = evolve(m, psi, TimeGrid{0.0, 10.0, 200, 10});
    const double p0 = 1.0 / (1.0 + std::exp(-1.0));
    const double expect = p0 * 0.1 + (1.0 - p0) * 0.2;
    CHECK(mixture_work(tr, m, 0.0, 10.0) == doctest::Approx(expect).epsilon(1e-10));
    CHECK(expect == doctest::Approx(0.13).epsilon(0.03));
    CHECK_THROWS_AS(mixture_work(tr, m, 5.0, 5.0), ConfigError);
}

TEST_CASE("mixture work is additive over sub-intervals") {
    const TotalModel m = small_model(16, 7, ramp(0.0, 20.0, 0.0, 0.6));
    std::mt19937_64 rng(7);
    const RdmTrajectory tr = evolve(m, random_state(32, rng), TimeGrid{0.0, 20.0, 400, 20});
    const double whole = mixture_work(tr, m, 0.0, 20.0);
    const double parts = mixture_work(tr, m, 0.0, 8.0) + mixture_work(tr, m, 8.0, 20.0);
    CHECK(std::abs(whole - parts) <= 1e-9);
}

TEST_CASE("TPM over zero time is a delta at zero") {
    const TotalModel m = small_model(8, 8, ramp(0.0, 1.0, 0.0, 0.2));
    const WorkDistribution d = tpm_work_distribution(m, 1.0, eigen_bath_state(m), TimeGrid{0.0, 0.0, 1, 1});
    REQUIRE(d.entries().size() == 1);
    CHECK(d.entries()[0].work == 0.0);
    CHECK(d.entries()[0].probability == 1.0);
}

TEST_CASE("TPM distribution normalization, mean and phase invariance") {
    const TotalModel m = small_model(16, 9, ramp(0.0, 6.0, 0.0, 0.8));
    const double beta = 0.7;
    const StateVector bath = typical_bath_state(m, 99);
    const TimeGrid g{0.0, 6.0, 300, 30};
    const WorkDistribution d = tpm_work_distribution(m, beta, bath, g);

    double total = 0.0;
    for (const auto& e : d.entries()) total += e.probability;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));

    // mean against the ensemble trace difference
    const auto branches = evolve_batch(m, tpm_initial_states(m, bath, 0.0), g);
    const RVector p = gibbs_weights(eig_hermitian(h_s_renormalized(m, 0.0)).eigenvalues(), beta);
    const RdmTrajectory ens = mix_trajectories(branches, {p(0), p(1)});
    const double trace_diff =
        (ens.rdms().back().matrix() * h_s_renormalized(m, 6.0).matrix()).trace().real() -
        (ens.rdms().front().matrix() * h_s_renormalized(m, 0.0).matrix()).trace().real();
    CHECK(std::abs(d.mean() - trace_diff) <= 1e-8);
    CHECK(std::abs(d.mean() - mixture_work(ens, m, 0.0, 6.0)) <= 1e-8);

    // mean by double loop over branches
    double loop = 0.0;
    const SpectralDecomposition s0 = eig_hermitian(h_s_renormalized(m, 0.0));
    const SpectralDecomposition s1 = eig_hermitian(h_s_renormalized(m, 6.0));
    for (Index a = 0; a < 2; ++a)
        for (Index b = 0; b < 2; ++b) {
            const CVector v = s1.eigenvector(b);
            const double q = v.dot(branches[a].rdms().back().matrix() * v).real();
            loop += p(a) * q * (s1.eigenvalues()(b) - s0.eigenvalues()(a));
        }
    CHECK(d.mean() == doctest::Approx(loop).epsilon(1e-10));

    const StateVector rotated(bath.amplitudes() * std::exp(Complex(0.0, 1.3)));
    const WorkDistribution d2 = tpm_work_distribution(m, beta, rotated, g);
    REQUIRE(d2.entries().size() == d.entries().size());
    for (std::size_t i = 0; i < d.entries().size(); ++i) {
        CHECK(d2.entries()[i].work == doctest::Approx(d.entries()[i].work).epsilon(1e-12));
        CHECK(std::abs(d2.entries()[i].probability - d.entries()[i].probability) <= 1e-12);
    }
}

TEST_CASE("Jarzynski identity holds exactly for a decoupled ramp") {
    const TotalModel m = decoupled(0.0, 0.3);
    const double beta = 1.2;
    const WorkDistribution d = tpm_work_distribution(m, beta, eigen_bath_state(m), TimeGrid{0.0, 10.0, 100, 10});
    const JarzynskiResult j = jarzynski_check(d, beta, h_s_renormalized(m, 0.0), h_s_renormalized(m, 10.0));
    CHECK(j.relative_deviation <= 1e-12);
    // H_S^r: diag(λ, 1 + 2λ)
    const double z0 = 1.0 + std::exp(-beta);
    const double z1 = std::exp(-beta * 0.3) + std::exp(-beta * 1.6);
    CHECK(j.delta_f == doctest::Approx(-std::log(z1 / z0) / beta).epsilon(1e-12));

    const JarzynskiResult shifted = jarzynski_check(
        d, beta, h_s_renormalized(m, 0.0), h_s_renormalized(m, 10.0) + HermitianOperator::identity(2).scaled(0.5));
    CHECK(shifted.delta_f == doctest::Approx(j.delta_f + 0.5).epsilon(1e-12));
    CHECK(shifted.relative_deviation > 0.5);
    CHECK_THROWS_AS(jarzynski_check(d, 0.0, h_s_renormalized(m, 0.0), h_s_renormalized(m, 10.0)), ConfigError);
}

TEST_CASE("Jarzynski identity for a coupled closed ramp starting in an eigenstate") {
    const TotalModel m = small_model(24, 10, ramp(0.0, 5.0, 0.0, 0.5));
    const double beta = 1.0;
    const WorkDistribution d = tpm_work_distribution(m, beta, eigen_bath_state(m), TimeGrid{0.0, 5.0, 500, 50});
    const JarzynskiResult j = jarzynski_check(d, beta, h_s_renormalized(m, 0.0), h_s_renormalized(m, 5.0));
    CHECK(std::isfinite(j.relative_deviation));
    CHECK(j.lhs > 0.0);
}

TEST_CASE("work distribution merging and moments") {
    const WorkDistribution d = WorkDistribution::from_entries(
        {{0.1, 0.3}, {-0.5, 0.5}, {0.1 + 1e-12, 0.2}});
    REQUIRE(d.entries().size() == 2);
    CHECK(d.entries()[0].work == -0.5);
    CHECK(d.entries()[1].probability == doctest::Approx(0.5));
    CHECK(d.mean() == doctest::Approx(-0.2));
    CHECK(d.variance() == doctest::Approx(0.09));
    CHECK_THROWS_AS(WorkDistribution::from_entries({{0.0, 0.4}}), NumericalError);
    CHECK_THROWS_AS(WorkDistribution::from_entries({{0.0, 1.5}, {1.0, -0.5}}), NumericalError);
    CHECK_THROWS_AS(WorkDistribution::from_entries({}), ConfigError);
}

TEST_CASE("bath states") {
    const TotalModel m = small_model(32, 11, ramp(0.0, 1.0, 0.0, 0.1), 10);
    const StateVector a = typical_bath_state(m, 5);
    const StateVector b = typical_bath_state(m, 5);
    const StateVector c = typical_bath_state(m, 6);
    CHECK((a.amplitudes() - b.amplitudes()).norm() == 0.0);
    CHECK((a.amplitudes() - c.amplitudes()).norm() > 0.1);
    CHECK(a.amplitudes().norm() == doctest::Approx(1.0));
    // support inside the window
    const SpectralDecomposition& bath = m.bath_spectrum();
    const auto r = m.window_range();
    const CVector coeff = bath.eigenvectors().adjoint() * a.amplitudes();
    CHECK(coeff.segment(r.first, r.count).norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(typical_bath_state(m, 5, 0.0), ConfigError);
    CHECK_THROWS_AS(tpm_initial_states(m, StateVector::normalized(CVector::Ones(3)), 0.0), ConfigError);
}
