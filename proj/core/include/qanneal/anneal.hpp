#pragma once

// Single-protocol drivers and figures of merit: fidelity, ground-subspace
// success probability, the sweep closed form, the adiabaticity factor, and
// the locally adiabatic (gap-dependent) schedule.

#include "qanneal/channel.hpp"

namespace qa::anneal {

using model::AnnealSetup;
using qcore::DensityMatrix;
using qcore::Matrix;
using qcore::Vector;

struct AnnealResult {
    DensityMatrix rho_final;   // reduced system state at t_end
    double fidelity;           // <psi0(T)| rho |psi0(T)>
    double success_prob;       // ground-subspace population (1e-9 * ||H|| tol)
    double T;
    int steps;                 // slices actually used
    bool converged;            // step-doubling disagreement <= 1e-6
    double step_disagreement;  // |F(steps) - F(steps/2)|, 0 for fixed steps
};

struct StepControl {
    int initial = 4000;
    int max = 65536;
    double fid_tol = 1e-8;  // doubling stops when |dF| < fid_tol
};

// Initializes the total state as ground(H_S(t_begin)) (x) meter initial and
// propagates to t_end under the configured coupling mode; commuting meters
// take the branch (Kraus) path, non-commuting ones the full tensor path.
// steps = 0 selects automatic step doubling per `ctrl`; an explicit `steps`
// runs once at that resolution.
AnnealResult run_anneal(const AnnealSetup& s, double T, int steps = 0,
                        const StepControl& ctrl = {});

// exp[-pi (g/2)^2 / (v/2)]: final infidelity of the sweep in the
// infinite-ramp limit.
double lz_infidelity(double v, double g);

struct Adiabaticity {
    double matrix_element;  // |<psi_k| dH/ds |psi_0>| at the queried s
    double gap;             // E_k - E_0
    double factor;          // matrix_element / gap^2
    int level;              // k
};

// Matrix element of dH/ds (analytic path derivative, s the normalized
// schedule parameter) between the instantaneous ground state and `level`;
// level = -1 picks the lowest level with a non-vanishing element (throws if
// all vanish). For a commuting meter prepared in an X_M eigenstate m the
// factor is computed on that branch (reduced by 1 + m versus bare).
Adiabaticity adiabaticity_factor(const AnnealSetup& s, double sched_s,
                                 int level = -1);

// Integrates ds/dt = eps * gap(s)^2 / |M(s)| from s = 0 to 1 on the given
// path and returns the tabulated monotone schedule (total duration = its T).
// Refuses paths whose scanned gap drops below 1e-9.
model::Schedule local_adiabatic_schedule_path(
    const qcore::HamiltonianFn& H_of_s, const qcore::HamiltonianFn& dH_ds,
    double eps, int grid = 2000);
model::Schedule local_adiabatic_schedule(const AnnealSetup& s,
                                         double eps = 0.1, int grid = 2000);

}  // namespace qa::anneal
