// Randomized invariant checks over many small models.

#include "helpers.hpp"

#include "decowork/analysis.hpp"
#include "decowork/config.hpp"
#include "decowork/work.hpp"

#include <doctest.h>

#include <cmath>

using namespace decowork;
using namespace testing;

namespace {

TotalModel random_model(std::mt19937_64& rng, const Protocol& protocol) {
    std::uniform_int_distribution<int> ns_pick(2, 3), ne_pick(4, 9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Index ns = ns_pick(rng), ne = ne_pick(rng);
    const HermitianOperator e2 = random_hermitian(ne, rng);
    const HermitianOperator ie2 = random_hermitian(ne, rng) + HermitianOperator::identity(ne).scaled(2.0 * u(rng));
    WindowSpec w;
    w.count = std::uniform_int_distribution<Index>(1, ne)(rng);
    return TotalModel(random_hermitian(ns, rng), random_hermitian(ns, rng), e2, ie2, w, protocol);
}

} // namespace

TEST_CASE("renormalized reassembly on 100 random models") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0, worst_split = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const double l0 = u(rng), l1 = u(rng);
        const TotalModel m = random_model(rng, ramp(0.0, 1.0, l0, l1));
        const Index ns = m.n_s(), ne = m.n_e();
        const double t = 0.5 * (u(rng) + 1.0);
        const double lambda = m.protocol().lambda_at(t);
        const CMatrix parts = tensor(h_s_renormalized(m, t).matrix(), CMatrix::Identity(ne, ne)) +
                              lambda * h_i_r2(m).matrix() + tensor(CMatrix::Identity(ns, ns), m.h_e2().matrix());
        worst = std::max(worst, max_abs(parts - h_total_unrenormalized(m, lambda).matrix()));
        if (l0 != 0.0) {
            const PerturbationSplit s = perturbation_split(m, 0.0);
            worst_split = std::max(worst_split, max_abs((s.h0 + s.h1.scaled(s.epsilon)).matrix() - h_total(m, 0.0).matrix()));
        }
    }
    CHECK(worst <= 1e-12);
    CHECK(worst_split <= 1e-12);
}

TEST_CASE("random evolutions keep norm and RDM validity") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const TotalModel m = random_model(rng, ramp(0.0, 5.0, u(rng), u(rng)));
        const RdmTrajectory tr = evolve(m, random_state(m.dim(), rng), TimeGrid{0.0, 5.0, 100, 10});
        CHECK(tr.norm_drift() <= 1e-9);
        for (const auto& r : tr.rdms()) {
            CHECK(std::abs(r.matrix().trace() - Complex(1.0)) <= 1e-10);
            CHECK(hermiticity_defect(r.matrix()) <= 1e-12);
            CHECK(eig_hermitian(HermitianOperator::symmetrized(r.matrix())).eigenvalues().minCoeff() >= -1e-12);
        }
    }
}

TEST_CASE("Kronecker mixed-product and partial-trace identities") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix a = random_complex(2, 2, rng), b = random_complex(3, 3, rng);
        const CMatrix c = random_complex(2, 2, rng), d = random_complex(3, 3, rng);
        CHECK(max_abs(tensor(a, b) * tensor(c, d) - tensor(a * c, b * d)) <= 1e-12);

        const CMatrix rho = random_density(6, rng);
        const CMatrix x = random_hermitian(2, rng).matrix();
        const CMatrix lhs = partial_trace_env(DensityMatrix(rho), 2, 3).matrix();
        // Tr_E[(X⊗I)ρ] = X Tr_E ρ
        CMatrix left = tensor(x, CMatrix::Identity(3, 3)) * rho;
        CMatrix traced = CMatrix::Zero(2, 2);
        for (Index i = 0; i < 2; ++i)
            for (Index j = 0; j < 2; ++j)
                for (Index k = 0; k < 3; ++k) traced(i, j) += left(i * 3 + k, j * 3 + k);
        CHECK(max_abs(traced - x * lhs) <= 1e-12);
    }
}

TEST_CASE("seeded constructions are bitwise reproducible") {
    for (std::uint64_t s : {1ULL, 17ULL, 123456789ULL}) {
        const HermitianOperator a = build_goe_bath(64, 2.0, derive_seed(s, 1));
        const HermitianOperator b = build_goe_bath(64, 2.0, derive_seed(s, 1));
        CHECK(max_abs(a.matrix() - b.matrix()) == 0.0);
        const SpectralDecomposition ea = eig_hermitian(a), eb = eig_hermitian(b);
        CHECK((ea.eigenvalues() - eb.eigenvalues()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("TPM probabilities are normalized for random models") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0), b(0.1, 3.0);
    for (int trial = 0; trial < 10; ++trial) {
        const TotalModel m = random_model(rng, ramp(0.0, 3.0, u(rng), u(rng)));
        const WorkDistribution d =
            tpm_work_distribution(m, b(rng), random_state(m.n_e(), rng), TimeGrid{0.0, 3.0, 60, 60});
        double sum = 0.0;
        for (const auto& e : d.entries()) {
            CHECK(e.probability >= -1e-12);
            sum += e.probability;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("border and rate homogeneity") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> pos(0.1, 5.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double s = pos(rng), d = pos(rng), v = pos(rng), c = pos(rng);
        CHECK(perturbative_border(c * s, d, c * c * v) == doctest::Approx(perturbative_border(s, d, v) / c));
        const double e = pos(rng);
        CHECK(predict_decoherence_rate(c * e, s) == doctest::Approx(c * predict_decoherence_rate(e, s)));
        CHECK(predict_fgr_rate(c * e, d, v) == doctest::Approx(c * c * predict_fgr_rate(e, d, v)));
    }
}

TEST_CASE("Gaussian fit is invariant under amplitude rescaling") {
    std::vector<double> t, m;
    for (int i = 0; i < 200; ++i) {
        t.push_back(0.05 * i);
        m.push_back(std::exp(-0.3 * t.back() * t.back()) * (1.0 + 0.01 * std::sin(7.0 * i)));
    }
    const GaussianFit a = fit_gaussian_decay(t, m);
    for (double& x : m) x *= 0.37;
    const GaussianFit b = fit_gaussian_decay(t, m);
    CHECK(a.rate == doctest::Approx(b.rate).epsilon(1e-12));
}
