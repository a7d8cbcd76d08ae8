#pragma once

// Dense complex linear algebra substrate: Hermitian eigendecomposition,
// unitary propagation, tensor products, partial trace. All energies are
// dimensionless (hbar = 1); propagators use the exp(-i H t) convention.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace qa::qcore {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// Validated dense Hermitian operator. Construction rejects matrices whose
// max |A - A^dagger| entry exceeds `tol` (absolute), reporting the asymmetry.
struct HermitianOperator {
    Matrix m;
    explicit HermitianOperator(Matrix in, double tol = 1e-12);
    Eigen::Index dim() const { return m.rows(); }
};

// Normalized pure state: ||v||_2 = 1 within tol.
struct StateVector {
    Vector v;
    explicit StateVector(Vector in, double tol = 1e-10);
    Eigen::Index dim() const { return v.size(); }
};

// Valid density matrix: Hermitian (1e-12), unit trace (1e-10),
// eigenvalues >= -1e-10.
struct DensityMatrix {
    Matrix m;
    explicit DensityMatrix(Matrix in);
    Eigen::Index dim() const { return m.rows(); }
    double purity() const;  // Tr(rho^2)
};

// Ascending eigenvalues; orthonormal eigenvector columns with each column's
// largest-magnitude component made real and positive.
struct EigenDecomposition {
    RealVector eigenvalues;
    Matrix eigenvectors;
};

// Eigendecomposition of a Hermitian matrix with the phase convention above.
EigenDecomposition hermitian_eig(const HermitianOperator& M);
// Unchecked variant for hot paths (input assumed Hermitian).
EigenDecomposition eig_unchecked(const Matrix& M);

// exp(-i H dt) via eigendecomposition; unitary to machine precision.
Matrix expm_unitary(const HermitianOperator& H, double dt);
Matrix expm_unitary_unchecked(const Matrix& H, double dt);

// Time-dependent Hamiltonian source.
using HamiltonianFn = std::function<Matrix(double)>;

// Time-ordered pure states on a grid, with the stepping metadata used to
// produce them.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    int steps = 0;
    std::uint64_t seed = 0;
    std::string tag;
};

// Midpoint piecewise-constant exponential stepping of i d/dt psi = H(t) psi
// over [t0, t1] with `steps` slices; records every intermediate state
// (steps + 1 entries including the initial one). Norm is preserved by
// construction (each slice is exactly unitary up to rounding).
Trajectory propagate(const HamiltonianFn& H_of_t, const StateVector& psi0,
                     double t0, double t1, int steps);

// One column of a family evolution: a total duration and a scale factor
// applied to the Hamiltonian. The phase advance per slice is
// lambda * scale * duration / steps, so two columns with equal
// scale*duration products produce bit-identical phases.
struct FamilyColumn {
    double duration;
    double scale;
};

// Evolves one initial state under H(s), s in [0,1] sampled at slice
// midpoints, simultaneously for many (duration, scale) columns. Each slice
// performs a single eigendecomposition shared by all columns. Returns the
// final state per column.
std::vector<Vector> evolve_family(const HamiltonianFn& H_of_s,
                                  const Vector& psi0,
                                  const std::vector<FamilyColumn>& cols,
                                  int steps);

// Kronecker products; system factor first, meter factor second (fixed
// global ordering convention).
Matrix tensor(const Matrix& A, const Matrix& B);
Vector tensor(const Vector& a, const Vector& b);

// Tr_M rho for rho on system (x) meter; trace-preserving.
Matrix partial_trace_meter(const Matrix& rho, int system_dim, int meter_dim);
DensityMatrix partial_trace_meter(const DensityMatrix& rho, int system_dim,
                                  int meter_dim);

// Tensor product of single-site Paulis with identities elsewhere.
// Axis is one of 'x', 'y', 'z'; sites must be distinct and in range.
// Qubit 0 is the most significant bit of the basis index.
Matrix pauli_string(int n_qubits,
                    const std::vector<std::pair<int, char>>& factors);

// 2x2 building blocks.
Matrix pauli(char axis);
Matrix identity(int dim);

}  // namespace qa::qcore
