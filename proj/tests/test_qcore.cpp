#include "doctest.h"

#include "qanneal/qcore.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

using namespace qa::qcore;
using std::numbers::pi;

namespace {

const Complex kI{0.0, 1.0};

Matrix random_hermitian(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix A(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) A(i, j) = Complex(nd(rng), nd(rng));
    return Matrix(0.5 * (A + A.adjoint()));
}

Vector random_state(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = Complex(nd(rng), nd(rng));
    v.normalize();
    return v;
}

Matrix lz_matrix(double v, double g, double t) {
    Matrix H(2, 2);
    H << 0.5 * v * t, 0.5 * g, 0.5 * g, -0.5 * v * t;
    return H;
}

}  // namespace

TEST_CASE("hermitian_eig: sigma_z eigenpairs in ascending order") {
    auto e = hermitian_eig(HermitianOperator(pauli('z')));
    CHECK(e.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(e.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-14));
    // Lowest eigenvector is |1>, highest is |0>, phase-fixed positive.
    CHECK(std::abs(e.eigenvectors(1, 0) - 1.0) < 1e-12);
    CHECK(std::abs(e.eigenvectors(0, 0)) < 1e-12);
    CHECK(std::abs(e.eigenvectors(0, 1) - 1.0) < 1e-12);
}

TEST_CASE("hermitian_eig: sigma_x eigenvectors are the balanced superpositions") {
    auto e = hermitian_eig(HermitianOperator(pauli('x')));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(e.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(e.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-14));
    // (|0> - |1>)/sqrt(2) with the largest-magnitude component positive.
    CHECK(std::abs(e.eigenvectors(0, 0) - r) < 1e-12);
    CHECK(std::abs(e.eigenvectors(1, 0) + r) < 1e-12);
    CHECK(std::abs(e.eigenvectors(0, 1) - r) < 1e-12);
    CHECK(std::abs(e.eigenvectors(1, 1) - r) < 1e-12);
}

TEST_CASE("hermitian_eig: sweep Hamiltonian at the crossing has eigenvalues +-g/2") {
    auto e = hermitian_eig(HermitianOperator(lz_matrix(1.0, 1.0, 0.0)));
    CHECK(e.eigenvalues(0) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(e.eigenvalues(1) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("hermitian_eig: non-Hermitian input is rejected") {
    Matrix M(2, 2);
    M << 0.0, 1.0, 0.0, 0.0;
    CHECK_THROWS(HermitianOperator(M));
}

TEST_CASE("hermitian_eig: reconstruction property across dimensions") {
    std::mt19937_64 rng(42);
    for (int dim : {2, 3, 8, 16, 64}) {
        Matrix M = random_hermitian(dim, rng);
        auto e = hermitian_eig(HermitianOperator(M));
        Matrix rec = e.eigenvectors *
                     e.eigenvalues.cast<Complex>().asDiagonal() *
                     e.eigenvectors.adjoint();
        double scale = M.cwiseAbs().maxCoeff();
        CHECK((rec - M).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, scale));
        // Orthonormality.
        Matrix g = e.eigenvectors.adjoint() * e.eigenvectors;
        CHECK((g - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-12);
        // Ascending order.
        for (int k = 1; k < dim; ++k)
            CHECK(e.eigenvalues(k) >= e.eigenvalues(k - 1));
    }
}

TEST_CASE("expm_unitary: closed-form exponentials") {
    Matrix I2 = identity(2);
    CHECK((expm_unitary(HermitianOperator(Matrix::Zero(2, 2)), 1.0) - I2)
              .cwiseAbs()
              .maxCoeff() < 1e-14);
    // exp(-i sz pi) = -I
    CHECK((expm_unitary(HermitianOperator(pauli('z')), pi) + I2)
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    // exp(-i sx pi/2) = -i sx
    Matrix want = -kI * pauli('x');
    CHECK((expm_unitary(HermitianOperator(pauli('x')), pi / 2) - want)
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("expm_unitary: unitarity on random Hermitian matrices") {
    std::mt19937_64 rng(7);
    for (int dim : {2, 4, 16}) {
        Matrix H = random_hermitian(dim, rng);
        Matrix U = expm_unitary(HermitianOperator(H), 0.37);
        CHECK((U.adjoint() * U - identity(dim)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("propagate: eigenstate acquires exactly the phase exp(-i E dt)") {
    // Constant H = sigma_z, start in |0> (eigenvalue +1).
    HamiltonianFn H = [](double) { return pauli('z'); };
    Vector psi0(2);
    psi0 << 1.0, 0.0;
    double t0 = 0.2, t1 = 1.7;
    auto traj = propagate(H, StateVector(psi0), t0, t1, 50);
    Complex want = std::exp(-kI * (t1 - t0));
    CHECK(std::abs(traj.states.back()(0) - want) < 1e-12);
    CHECK(std::abs(traj.states.back()(1)) < 1e-14);
    CHECK(traj.states.size() == 51);
    CHECK(traj.times.front() == t0);
    CHECK(traj.times.back() == doctest::Approx(t1).epsilon(1e-14));
}

TEST_CASE("propagate: norm is preserved at every recorded state") {
    HamiltonianFn H = [](double t) { return lz_matrix(1.0, 1.0, t); };
    Vector psi0(2);
    psi0 << 1.0, 0.0;
    auto traj = propagate(H, StateVector(psi0), -3.0, 3.0, 200);
    for (const auto& st : traj.states) CHECK(std::abs(st.norm() - 1.0) < 1e-12);
}

TEST_CASE("propagate: step-doubling error shrinks like dt^2") {
    HamiltonianFn H = [](double t) { return lz_matrix(2.0, 1.0, t); };
    auto e0 = hermitian_eig(HermitianOperator(H(-5.0)));
    StateVector psi0(e0.eigenvectors.col(0));
    auto fine = propagate(H, psi0, -5.0, 5.0, 16000).states.back();
    auto a = propagate(H, psi0, -5.0, 5.0, 250).states.back();
    auto b = propagate(H, psi0, -5.0, 5.0, 500).states.back();
    double ea = (a - fine).norm();
    double eb = (b - fine).norm();
    CHECK(ea / eb > 3.0);  // second-order stepping: halving dt ~ quarters error
}

TEST_CASE("propagate: sweep ground-state transfer matches the closed form within 5%") {
    double v = 1.0, g = 1.0;
    HamiltonianFn H = [&](double t) { return lz_matrix(v, g, t); };
    auto e0 = hermitian_eig(HermitianOperator(H(-10.0 / v)));
    auto traj = propagate(H, StateVector(e0.eigenvectors.col(0)), -10.0 / v,
                          10.0 / v, 8000);
    auto e1 = hermitian_eig(HermitianOperator(H(10.0 / v)));
    double F = std::norm(e1.eigenvectors.col(0).dot(traj.states.back()));
    // closed form: 1 - exp(-pi (g/2)^2 / (v/2))
    double want = 1.0 - std::exp(-pi * (g / 2.0) * (g / 2.0) / (v / 2.0));
    CHECK(std::abs(F - want) / want < 0.05);
}

TEST_CASE("evolve_family: single column reproduces plain propagation") {
    HamiltonianFn Hs = [](double u) { return lz_matrix(1.0, 1.0, 20.0 * u - 10.0); };
    auto e0 = hermitian_eig(HermitianOperator(Hs(0.0)));
    Vector psi0 = e0.eigenvectors.col(0);
    int steps = 400;
    auto fam = evolve_family(Hs, psi0, {{20.0, 1.0}}, steps);
    // Equivalent direct propagation in physical time t = 20 u.
    HamiltonianFn Ht = [&](double t) { return Hs(t / 20.0); };
    auto traj = propagate(Ht, StateVector(psi0), 0.0, 20.0, steps);
    CHECK((fam[0] - traj.states.back()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("evolve_family: scale and duration enter only through their product") {
    // Column (T, s) and column (sT, 1) must be bit-identical: the phase per
    // slice is lambda * scale * duration / steps in both cases.
    HamiltonianFn Hs = [](double u) { return lz_matrix(1.0, 0.7, 20.0 * u - 10.0); };
    std::mt19937_64 rng(3);
    Vector psi0 = random_state(2, rng);
    for (double T : {1.0, 4.0, 13.7}) {
        for (double s : {1.5, 2.0, 3.0}) {
            auto out = evolve_family(Hs, psi0, {{T, s}, {s * T, 1.0}}, 300);
            CHECK((out[0] - out[1]).cwiseAbs().maxCoeff() == 0.0);
        }
    }
}

TEST_CASE("evolve_family: zero scale leaves the state unchanged") {
    HamiltonianFn Hs = [](double u) { return lz_matrix(1.0, 1.0, 20.0 * u - 10.0); };
    std::mt19937_64 rng(5);
    Vector psi0 = random_state(2, rng);
    auto out = evolve_family(Hs, psi0, {{5.0, 0.0}}, 50);
    CHECK((out[0] - psi0).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("tensor: identity products and computational-basis action") {
    CHECK((tensor(identity(2), identity(2)) - identity(4)).cwiseAbs().maxCoeff() ==
          0.0);
    // (sz (x) sz) |1>|1> = +|1>|1>
    Vector one(2);
    one << 0.0, 1.0;
    Vector v11 = tensor(one, one);
    Vector w = tensor(pauli('z'), pauli('z')) * v11;
    CHECK((w - v11).cwiseAbs().maxCoeff() < 1e-15);
    // System factor is the slow (most significant) index.
    Matrix M = tensor(pauli('z'), identity(2));
    CHECK(M(0, 0) == Complex(1.0, 0.0));
    CHECK(M(3, 3) == Complex(-1.0, 0.0));
}

TEST_CASE("partial_trace_meter: product states and the maximally entangled pair") {
    std::mt19937_64 rng(11);
    Vector a = random_state(4, rng), b = random_state(2, rng);
    Matrix rho = tensor(a, b) * tensor(a, b).adjoint();
    Matrix red = partial_trace_meter(rho, 4, 2);
    CHECK((red - a * a.adjoint()).cwiseAbs().maxCoeff() < 1e-14);

    Vector bell(4);
    bell << 1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);
    Matrix rb = partial_trace_meter(Matrix(bell * bell.adjoint()), 2, 2);
    CHECK((rb - 0.5 * identity(2)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("partial_trace_meter: trace preservation on random states") {
    std::mt19937_64 rng(13);
    Vector psi = random_state(12, rng);
    Matrix rho = psi * psi.adjoint();
    Matrix red = partial_trace_meter(rho, 4, 3);
    CHECK(std::abs(red.trace() - rho.trace()) < 1e-13);
    CHECK((red - red.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("partial_trace_meter: density-matrix overload keeps validity") {
    Vector bell(4);
    bell << 1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);
    DensityMatrix rho(Matrix(bell * bell.adjoint()));
    DensityMatrix red = partial_trace_meter(rho, 2, 2);
    CHECK(red.purity() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("pauli_string: single site and two-site parity diagonal") {
    CHECK((pauli_string(1, {{0, 'z'}}) - pauli('z')).cwiseAbs().maxCoeff() == 0.0);
    Matrix zz = pauli_string(2, {{0, 'z'}, {1, 'z'}});
    const double d[4] = {1.0, -1.0, -1.0, 1.0};
    for (int i = 0; i < 4; ++i) {
        CHECK(zz(i, i) == Complex(d[i], 0.0));
        for (int j = 0; j < 4; ++j)
            if (i != j) CHECK(zz(i, j) == Complex(0.0, 0.0));
    }
}

TEST_CASE("pauli_string: three-site parity picks out odd-weight states") {
    Matrix zzz = pauli_string(3, {{0, 'z'}, {1, 'z'}, {2, 'z'}});
    for (int b = 0; b < 8; ++b) {
        int pop = __builtin_popcount(static_cast<unsigned>(b));
        double want = (pop % 2 == 0) ? 1.0 : -1.0;
        CHECK(zzz(b, b) == Complex(want, 0.0));
    }
    // |001>, |010>, |100>, |111> carry eigenvalue -1.
    for (int b : {1, 2, 4, 7}) CHECK(zzz(b, b).real() == -1.0);
}

TEST_CASE("pauli_string: qubit 0 is the most significant bit") {
    Matrix z0 = pauli_string(2, {{0, 'z'}});
    // Basis |10> = index 2 has qubit 0 in |1>: eigenvalue -1.
    CHECK(z0(2, 2) == Complex(-1.0, 0.0));
    CHECK(z0(1, 1) == Complex(1.0, 0.0));
}

TEST_CASE("pauli_string: duplicate or out-of-range sites are rejected") {
    CHECK_THROWS(pauli_string(2, {{0, 'z'}, {0, 'x'}}));
    CHECK_THROWS(pauli_string(2, {{2, 'z'}}));
    CHECK_THROWS(pauli_string(2, {{0, 'q'}}));
}

TEST_CASE("StateVector and DensityMatrix validate their inputs") {
    Vector bad(2);
    bad << 1.0, 1.0;  // norm sqrt(2)
    CHECK_THROWS(StateVector(bad));
    Matrix notrace = 2.0 * identity(2);
    CHECK_THROWS(DensityMatrix(notrace));
    Matrix neg(2, 2);
    neg << 1.5, 0.0, 0.0, -0.5;
    CHECK_THROWS(DensityMatrix(neg));
    DensityMatrix ok(Matrix(0.5 * identity(2)));
    CHECK(ok.purity() == doctest::Approx(0.5).epsilon(1e-14));
}
