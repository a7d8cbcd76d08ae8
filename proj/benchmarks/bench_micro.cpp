// Microbenchmarks for the hot numerical kernels: eigendecomposition,
// unitary exponentials, trajectory stepping, family sweeps, partial trace,
// and instance generation.

#include <benchmark/benchmark.h>

#include "qanneal/bench.hpp"

#include <random>

using namespace qa;
using qcore::Complex;
using qcore::FamilyColumn;
using qcore::HamiltonianFn;
using qcore::Matrix;
using qcore::Vector;

namespace {

Matrix random_hermitian(int dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix A(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) A(i, j) = Complex(nd(rng), nd(rng));
    return Matrix(0.5 * (A + A.adjoint()));
}

Vector ground_state(const Matrix& H) {
    return qcore::eig_unchecked(H).eigenvectors.col(0);
}

void bm_hermitian_eig(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    Matrix H = random_hermitian(dim, 1);
    for (auto _ : state) {
        auto e = qcore::eig_unchecked(H);
        benchmark::DoNotOptimize(e.eigenvalues.data());
    }
}
BENCHMARK(bm_hermitian_eig)->Arg(4)->Arg(16)->Arg(32)->Arg(64);

void bm_expm_unitary(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    Matrix H = random_hermitian(dim, 2);
    for (auto _ : state) {
        Matrix U = qcore::expm_unitary_unchecked(H, 0.01);
        benchmark::DoNotOptimize(U.data());
    }
}
BENCHMARK(bm_expm_unitary)->Arg(4)->Arg(16)->Arg(32);

void bm_propagate(benchmark::State& state) {
    const int steps = static_cast<int>(state.range(0));
    model::AnnealSetup s = model::AnnealSetup::lz(1.0, 1.0);
    HamiltonianFn H = [&s](double t) {
        return model::system_hamiltonian(s, t);
    };
    qcore::StateVector psi0{
        ground_state(model::system_hamiltonian(s, s.t_begin()))};
    for (auto _ : state) {
        auto traj = qcore::propagate(H, psi0, -10.0, 10.0, steps);
        benchmark::DoNotOptimize(traj.states.back().data());
    }
}
BENCHMARK(bm_propagate)->Arg(1000)->Arg(4000);

void bm_evolve_family(benchmark::State& state) {
    const int n_cols = static_cast<int>(state.range(0));
    model::IsingProblem prob = bench::random_ising(3, 7);
    model::AnnealSetup s = model::AnnealSetup::ising(prob, 1.0);
    auto path = channel::system_path(s);
    Vector psi0 = ground_state(path(0.0));
    std::vector<FamilyColumn> cols;
    for (int k = 0; k < n_cols; ++k)
        cols.push_back({1.0 + k, 1.0 + 0.1 * k});
    for (auto _ : state) {
        auto out = qcore::evolve_family(path, psi0, cols, 1000);
        benchmark::DoNotOptimize(out.back().data());
    }
}
BENCHMARK(bm_evolve_family)->Arg(1)->Arg(8)->Arg(48);

void bm_partial_trace(benchmark::State& state) {
    const int ds = static_cast<int>(state.range(0));
    Matrix rho = random_hermitian(2 * ds, 3);
    rho = rho * rho.adjoint();
    rho /= rho.trace();
    for (auto _ : state) {
        Matrix red = qcore::partial_trace_meter(rho, ds, 2);
        benchmark::DoNotOptimize(red.data());
    }
}
BENCHMARK(bm_partial_trace)->Arg(8)->Arg(32);

void bm_random_ising(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto p = bench::random_ising(N, ++seed);
        benchmark::DoNotOptimize(p.J.data());
    }
}
BENCHMARK(bm_random_ising)->Arg(5)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
