#pragma once

// Reduced (meter-traced) dynamics: rescaled propagators, Kraus operators,
// reduced density-matrix evolution, the instantaneous-basis correction
// verifier, and the coherence/spectrum diagnostics.

#include "qanneal/model.hpp"

namespace qa::channel {

using model::AnnealSetup;
using qcore::DensityMatrix;
using qcore::Matrix;
using qcore::RealVector;
using qcore::StateVector;
using qcore::Vector;

// Kraus family; completeness sum K^dagger K = I is enforced within 1e-9
// at construction.
struct KrausSet {
    std::vector<Matrix> operators;
    explicit KrausSet(std::vector<Matrix> ops, double tol = 1e-9);
};

// One meter branch of a commuting meter ([X_M, H_M] = 0): the X_M
// eigenvalue m, the energy shift <m|H_M|m>, and the population weight
// <m|rho_M(0)|m>.
struct MeterBranch {
    double m;
    double energy_shift;
    double weight;
};

// Simultaneous eigenbasis branches of (X_M, H_M); throws if the two do not
// commute (max commutator entry reported).
std::vector<MeterBranch> meter_branches(const model::MeterSpec& spec,
                                        double tol = 1e-10);
bool meter_commuting(const model::MeterSpec& spec, double tol = 1e-10);

// H_S as a function of the normalized path parameter u in [0, 1]; this
// representation is duration-independent, so family sweeps over durations
// can share eigendecompositions.
qcore::HamiltonianFn system_path(const AnnealSetup& s);

// One unitary branch of a block-diagonal (commuting-meter) evolution: the
// Hamiltonian along the path, a multiplier applied in the phases, a constant
// energy shift, the population weight, and the meter eigenvalue.
struct BranchEvolution {
    qcore::HamiltonianFn H_of_s;
    double scale;
    double energy_shift;
    double weight;
    double m;
};

// Branch decomposition of the configured evolution: one bare branch without
// a meter; (1 + m)-rescaled copies of the system path for full coupling;
// per-branch path Hamiltonians for the constrained coupling. Throws for
// non-commuting meters.
std::vector<BranchEvolution> branch_evolutions(const AnnealSetup& s);

// Propagator of one branch from path parameter u0 to u1, midpoint slices in
// physical time for a total duration T. The scale and shift enter only
// through the phases, so runs differing only in scale share all
// eigendecompositions.
Matrix branch_propagator(const BranchEvolution& b, double T, double u0,
                         double u1, int steps);

// Propagator of scale * H_S(t) from t0 to t1 (midpoint slices). scale is
// 1 + m for a meter eigenvalue m in the fully coupled case; 1 recovers the
// bare propagator and 0 the identity.
Matrix rescaled_propagator(const AnnealSetup& s, double scale, double t0,
                           double t1, int steps);

// K_j = sqrt(<m_j|rho_M(0)|m_j>) * U_j with U_j the branch propagator from
// t_begin to t; valid when [X_M, H_M] = 0 (checked; otherwise refused).
// For the |+> qubit meter with H_M = 0 the pair in the measurement basis is
// (U+ + U-)/2 and (U+ - U-)/2.
KrausSet kraus_operators(const AnnealSetup& s, double t, int steps = 4000);
// The measurement-basis pair for the |+> qubit meter preset.
KrausSet kraus_pair_plus(const AnnealSetup& s, double t, int steps = 4000);

// rho_S(t) = sum_j K_j rho_S(0) K_j^dagger for commuting meters; falls back
// to full tensor propagation + partial trace otherwise. The system and
// meter start in product form by construction (rho_S0 (x) meter initial).
DensityMatrix reduced_evolution(const AnnealSetup& s,
                                const DensityMatrix& rho_S0, double t,
                                int steps = 4000);
// Direct tensor-propagation path (always valid); used as the cross-check
// oracle for the Kraus path.
DensityMatrix reduced_evolution_tensor(const AnnealSetup& s,
                                       const DensityMatrix& rho_S0, double t,
                                       int steps = 4000);

// |<psi_m(t)| rho_S(t) |psi_n(t)>| in the instantaneous eigenbasis of
// H_S(t), per grid time. psi0 is the initial system state; the meter (if
// any) starts in its configured state. substeps integration slices are
// used per grid interval. Rejects degenerate levels at (m, n).
std::vector<double> coherence_trace(const AnnealSetup& s,
                                    const StateVector& psi0,
                                    const std::vector<double>& times,
                                    int m = 0, int n = 1, int substeps = 4);

enum class SpectrumMode { bare, qnd, cd };

// Instantaneous eigenvalues along the time grid. bare: H_S(t). qnd: all
// meter branches of the fully coupled total, branch-blocked in ascending
// meter-eigenvalue order (branch j occupies entries [j*d, (j+1)*d)). cd:
// the counterdiabatic comparator (sweep problem only). Within each block,
// levels are tracked continuously by eigenvector overlap with the previous
// grid point.
std::vector<RealVector> spectrum_trace(const AnnealSetup& s,
                                       const std::vector<double>& times,
                                       SpectrumMode mode);

// Verifies the instantaneous-basis equation of motion for the |+> qubit
// meter with H_M = 0: in the eigenbasis of H_S(t) (frozen at t), the
// central-difference derivative of rho_S must match
//   -i (E_m - E_n) rho_mn - i (x0/2) (E_m - E_n) (rho^+ - rho^-)_mn,
// where rho^+/- are the two rescaled-branch evolutions. Returns the
// max-norm residual, O(h^2) when resolved. Branch histories up to t - h are
// shared between the three sample times so the residual has no coarse-grid
// floor; h must satisfy t_begin < t - h and t + h < t_end.
double correction_term_check(const AnnealSetup& s, const DensityMatrix& rho_S0,
                             double t, double h, int coarse_steps = 4000,
                             int fine_steps = 64);

}  // namespace qa::channel
