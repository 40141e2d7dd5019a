// Shared fixtures for the unit tests.

#pragma once

#include "decowork/linalg.hpp"
#include "decowork/model.hpp"

#include <random>

namespace testing {

using namespace decowork;

inline CMatrix random_complex(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    CMatrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = Complex(n(rng), n(rng));
    return m;
}

inline HermitianOperator random_hermitian(Index dim, std::mt19937_64& rng, bool real = false) {
    CMatrix a = random_complex(dim, dim, rng);
    if (real) a = a.real().cast<Complex>();
    return HermitianOperator::symmetrized(a);
}

inline StateVector random_state(Index dim, std::mt19937_64& rng) {
    return StateVector::normalized(random_complex(dim, 1, rng).col(0));
}

inline CMatrix random_density(Index dim, std::mt19937_64& rng) {
    const CMatrix a = random_complex(dim, dim, rng);
    CMatrix rho = a * a.adjoint();
    rho /= rho.trace().real();
    return 0.5 * (rho + rho.adjoint());
}

inline Protocol ramp(double t0, double t1, double l0, double l1, RampShape shape = RampShape::linear) {
    return Protocol{t0, t1, l0, l1, shape};
}

// Qubit + small GOE bath with an offset coupling; fully seeded.
inline TotalModel small_model(Index ne, std::uint64_t seed, const Protocol& protocol, Index window = 0,
                              double offset = 0.7) {
    const CMatrix hs = 0.5 * pauli::z();
    const CMatrix his = pauli::x() + 0.3 * pauli::z();
    HermitianOperator e2 = build_goe_bath(ne, 2.0, seed);
    HermitianOperator ie2 = build_goe_bath(ne, 0.5, seed + 1000) + HermitianOperator::identity(ne).scaled(offset);
    WindowSpec w;
    w.count = window > 0 ? window : ne;
    return TotalModel(HermitianOperator(hs), HermitianOperator(his), std::move(e2), std::move(ie2), w, protocol);
}

inline double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

} // namespace testing
