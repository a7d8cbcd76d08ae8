#pragma once

// Problem and Hamiltonian constructors: QUBO -> Ising mapping, transverse
// field, annealing interpolation, Landau-Zener sweeps, system (x) meter
// totals (full and final-Hamiltonian-only coupling), the counterdiabatic
// comparator, and the three-body -> two-body ancilla gadget.
//
// Spin/bit convention: binary x_i = (1 + s_i)/2, so bit 0 of a basis index
// means s_i = +1 (qubit |0>, sigma_z eigenvalue +1) and bit 1 means
// s_i = -1. Qubit 0 is the most significant bit.

#include "qanneal/qcore.hpp"

#include <array>
#include <optional>
#include <variant>

namespace qa::model {

using qcore::Matrix;
using qcore::RealMatrix;
using qcore::RealVector;
using qcore::Vector;

struct QuboProblem {
    int n_vars;
    RealMatrix Q;  // square; symmetrized as (Q + Q^T)/2 before mapping
    QuboProblem(int n, RealMatrix q);
};

struct ThreeBodyTerm {
    std::array<int, 3> sites;
    double c;  // adds c * sz_i sz_j sz_k to the diagonal energy
};

struct IsingProblem {
    int n_qubits;
    RealMatrix J;   // symmetric, zero diagonal; operator term is 2*J_ij sz sz
    RealVector h;
    double offset = 0.0;  // classical energy offset recorded by qubo_to_ising
    std::vector<ThreeBodyTerm> three_body;
    // term index -> ancilla qubit index, filled by gadget_decompose
    std::vector<std::pair<ThreeBodyTerm, int>> ancilla_map;

    IsingProblem(int n, RealMatrix j, RealVector hh);
    // classical energy of basis state b (spins from bits, offset excluded)
    double energy(int basis_state) const;
};

// Switching function f with f(0) = 0, f(T) = 1, monotone. Stored as a
// normalized path u in [0,1] -> f so rescaling the duration preserves the
// path; empty table means f(t) = t/T.
struct Schedule {
    double T;
    std::vector<std::pair<double, double>> path_table;  // (u, f), u in [0,1]

    double f(double t) const;
    double dfdt(double t) const;
    double path(double u) const;        // f as a function of u = t/T
    double dpath(double u) const;       // d f / d u
    static Schedule linear(double T);
    static Schedule tabulated(double T,
                              std::vector<std::pair<double, double>> pts);
};

// Meter: coupling operator X_M, inherent Hamiltonian H_M, initial state.
// x0 and omega are the named scalars of the qubit presets X_M = x0 sigma_z,
// H_M = omega sigma_x.
struct MeterSpec {
    int meter_dim;
    Matrix X_M;
    Matrix H_M;
    Matrix initial_state;  // density matrix
    double x0 = 0.0;
    double omega = 0.0;

    static MeterSpec qubit(double x0, double omega, const Vector& initial);
    static MeterSpec qubit_zero(double x0);   // H_M = 0, meter |0>
    static MeterSpec qubit_plus(double x0);   // H_M = 0, meter |+>
};

enum class InteractionMode { none, full_qnd, constrained };

struct LzProblem {
    double v;  // sweep rate; ramp runs t in [-10/v, +10/v], so T = 20/v
    double g;  // minimum gap
};

// One protocol run: problem + schedule + optional meter + coupling mode.
struct AnnealSetup {
    std::variant<IsingProblem, LzProblem> problem;
    Schedule schedule;
    std::optional<MeterSpec> meter;
    InteractionMode mode = InteractionMode::none;

    double t_begin() const;  // 0 for annealing, -10/v for the sweep
    double t_end() const;
    int system_dim() const;
    int total_dim() const;

    static AnnealSetup lz(double v, double g);
    static AnnealSetup ising(IsingProblem p, double T);
    // Same problem and path, different total duration (for the sweep
    // problem this re-derives v = 20/T).
    AnnealSetup with_duration(double T) const;
    AnnealSetup with_meter(MeterSpec m, InteractionMode mode) const;
};

// J = Q/4 off-diagonal (after symmetrization), h_i = sum_j Q_ij / 2 (row sum
// including the diagonal, since x^2 = x for binaries), offset recorded so
// Ising energies + offset reproduce the binary objective on every bitstring.
IsingProblem qubo_to_ising(const QuboProblem& q);

// sum_{i<j} 2 J_ij sz_i sz_j + sum_i h_i sz_i + three-body terms, diagonal.
Matrix ising_hamiltonian(const IsingProblem& p);
// The diagonal alone (classical energies in basis order, offset excluded).
RealVector ising_diagonal(const IsingProblem& p);

// sum_i sx_i; ground state |->^n with energy -n.
Matrix transverse_hamiltonian(int n);

// Annealing: (1 - f(t)) H_T + f(t) H_I. Sweep: (v t / 2) sz + (g / 2) sx
// with t the physical time in [-10/v, 10/v].
Matrix system_hamiltonian(const AnnealSetup& s, double t);

// none: H_S. full coupling: H_S (x) 1 + H_S (x) X_M + 1 (x) H_M.
// constrained (final Hamiltonian only): H_S (x) 1 + f(t) H_f (x) X_M
// + 1 (x) H_M; requires an Ising problem.
Matrix total_hamiltonian(const AnnealSetup& s, double t);

// H_LZ(t) + (dtheta/dt / 2) sigma_y with dtheta/dt = -g v / (v^2 t^2 + g^2);
// exact counterdiabatic driving for the sweep. Rejects g = 0, t = 0.
Matrix cd_hamiltonian_lz(double v, double g, double t);

// Y = (E1 - E0)(|psi1><psi1| - |psi0><psi0|) from the two lowest
// instantaneous eigenstates; commutes with the source Hamiltonian by
// construction. Rejects a ground gap below 1e-9.
Matrix gap_targeting_interaction(const qcore::EigenDecomposition& eig);

// Replaces each three-body term c * sz1 sz2 sz3 by the coefficient-scaled
// two-body gadget sz1 sz2 + sz2 sz3 + sz1 sz3 - sum_i (2 sz_i sz_a - sz_i)
// - 2 sz_a on a fresh ancilla qubit a, recording the term -> ancilla map.
// Validity of the ground-manifold correspondence is checked by
// bench::gadget_verify, not assumed (notably for negative coefficients).
IsingProblem gadget_decompose(const IsingProblem& p);

// Problem file schema: {"n": int, "Q": [[...]]} or
// {"n": int, "J": [[...]], "h": [...], "three_body": [{"sites":[i,j,k],
// "c": real}]}. Exact field names. QUBO input is mapped on load.
IsingProblem problem_from_json(const std::string& text);
std::string problem_to_json(const IsingProblem& p);

}  // namespace qa::model
