#include "qanneal/anneal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace qa::anneal {

using channel::branch_evolutions;
using channel::branch_propagator;
using channel::BranchEvolution;
using channel::system_path;
using model::InteractionMode;
using qcore::Complex;
using qcore::EigenDecomposition;
using qcore::eig_unchecked;

namespace {

struct Outcome {
    Matrix rho;
    double fidelity;
    double success;
};

Outcome run_once(const AnnealSetup& s, int steps) {
    const int ds = s.system_dim();
    EigenDecomposition e0 = eig_unchecked(model::system_hamiltonian(s, s.t_begin()));
    const qcore::Vector psi0 = e0.eigenvectors.col(0);

    Matrix rho = Matrix::Zero(ds, ds);
    const bool tensor_path = s.meter && s.mode != InteractionMode::none &&
                             !channel::meter_commuting(*s.meter);
    if (!tensor_path) {
        auto branches = branch_evolutions(s);
        if (s.mode == InteractionMode::full_qnd) {
            // all branches share the system path: one family sweep
            std::vector<qcore::FamilyColumn> cols;
            std::vector<double> weights;
            for (const auto& b : branches) {
                if (b.weight <= 0.0) continue;
                cols.push_back({s.schedule.T, b.scale});
                weights.push_back(b.weight);
            }
            auto states = qcore::evolve_family(branches.front().H_of_s,
                                               psi0, cols,
                                               steps);
            for (size_t j = 0; j < states.size(); ++j)
                rho += weights[j] * (states[j] * states[j].adjoint());
        } else {
            for (const auto& b : branches) {
                if (b.weight <= 0.0) continue;
                Matrix U = branch_propagator(b, s.schedule.T, 0.0, 1.0, steps);
                qcore::Vector psi = U * psi0;
                rho += b.weight * (psi * psi.adjoint());
            }
        }
    } else {
        // non-commuting meter: propagate each pure meter component of the
        // full tensor state and trace
        EigenDecomposition em = eig_unchecked(s.meter->initial_state);
        const double t0 = s.t_begin();
        const double dt = (s.t_end() - t0) / steps;
        for (Eigen::Index a = 0; a < em.eigenvalues.size(); ++a) {
            const double w = em.eigenvalues(a);
            if (w <= 1e-14) continue;
            qcore::Vector psi = qcore::tensor(psi0, qcore::Vector(em.eigenvectors.col(a)));
            for (int k = 0; k < steps; ++k)
                psi = qcore::expm_unitary_unchecked(
                          model::total_hamiltonian(s, t0 + (k + 0.5) * dt), dt) *
                      psi;
            Matrix rho_tot = psi * psi.adjoint();
            rho += w * qcore::partial_trace_meter(rho_tot, ds,
                                                  s.meter->meter_dim);
        }
    }

    EigenDecomposition ef = eig_unchecked(model::system_hamiltonian(s, s.t_end()));
    const double norm = std::max(std::abs(ef.eigenvalues(0)),
                                 std::abs(ef.eigenvalues(ds - 1)));
    Outcome out;
    out.rho = rho;
    out.fidelity =
        std::real(Complex(ef.eigenvectors.col(0).adjoint() * rho *
                          ef.eigenvectors.col(0)));
    out.success = 0.0;
    for (Eigen::Index k = 0; k < ds; ++k) {
        if (ef.eigenvalues(k) - ef.eigenvalues(0) > 1e-9 * std::max(1.0, norm))
            break;
        out.success += std::real(Complex(ef.eigenvectors.col(k).adjoint() *
                                         rho * ef.eigenvectors.col(k)));
    }
    return out;
}

}  // namespace

AnnealResult run_anneal(const AnnealSetup& s, double T, int steps,
                        const StepControl& ctrl) {
    if (T <= 0.0) throw std::invalid_argument("run_anneal: T must be > 0");
    const AnnealSetup setup = s.with_duration(T);
    AnnealResult r{DensityMatrix(Matrix::Identity(1, 1)), 0, 0, T, 0, false, 0};
    if (steps > 0) {
        Outcome o = run_once(setup, steps);
        r.rho_final = DensityMatrix(o.rho);
        r.fidelity = o.fidelity;
        r.success_prob = o.success;
        r.steps = steps;
        r.converged = true;
        r.step_disagreement = 0.0;
        return r;
    }
    int n = ctrl.initial;
    Outcome prev = run_once(setup, n);
    double disagreement = std::numeric_limits<double>::infinity();
    while (n < ctrl.max) {
        Outcome next = run_once(setup, 2 * n);
        disagreement = std::abs(next.fidelity - prev.fidelity);
        n *= 2;
        prev = next;
        if (disagreement < ctrl.fid_tol) break;
    }
    r.rho_final = DensityMatrix(prev.rho);
    r.fidelity = prev.fidelity;
    r.success_prob = prev.success;
    r.steps = n;
    r.converged = disagreement <= 1e-6;
    r.step_disagreement = disagreement;
    return r;
}

double lz_infidelity(double v, double g) {
    if (v <= 0.0) throw std::invalid_argument("lz_infidelity: v must be > 0");
    return std::exp(-std::numbers::pi * (g / 2.0) * (g / 2.0) / (v / 2.0));
}

namespace {

// Path and analytic path derivative of the branch the setup actually
// evolves on (bare when no meter; otherwise the meter initial state must be
// an X_M eigenstate and that branch is used).
struct PathPair {
    qcore::HamiltonianFn H;
    qcore::HamiltonianFn dH;
};

PathPair branch_path_pair(const AnnealSetup& s) {
    const bool lz = std::holds_alternative<model::LzProblem>(s.problem);
    qcore::HamiltonianFn base = system_path(s);
    qcore::HamiltonianFn dbase;
    if (lz) {
        // H(u) = ((20u - 10)/2) sz + (g/2) sx  =>  dH/du = 10 sz
        dbase = [](double) { return Matrix(10.0 * qcore::pauli('z')); };
    } else {
        const auto& p = std::get<model::IsingProblem>(s.problem);
        Matrix D = model::ising_hamiltonian(p) -
                   model::transverse_hamiltonian(p.n_qubits);
        model::Schedule sched = s.schedule;
        dbase = [D, sched](double u) { return Matrix(sched.dpath(u) * D); };
    }
    if (!s.meter || s.mode == InteractionMode::none) return {base, dbase};

    auto branches = branch_evolutions(s);
    const BranchEvolution* active = nullptr;
    for (const auto& b : branches)
        if (b.weight > 1.0 - 1e-9) active = &b;
    if (!active)
        throw std::invalid_argument(
            "adiabaticity: meter initial state must be an X_M eigenstate");
    if (s.mode == InteractionMode::full_qnd) {
        const double sc = active->scale;
        auto H = [base, sc](double u) { return Matrix(sc * base(u)); };
        auto dH = [dbase, sc](double u) { return Matrix(sc * dbase(u)); };
        return {H, dH};
    }
    // constrained: H(u) = base(u) + f(u) m H_f
    const auto& p = std::get<model::IsingProblem>(s.problem);
    Matrix Hf = model::ising_hamiltonian(p);
    model::Schedule sched = s.schedule;
    const double m = active->m;
    auto H = active->H_of_s;
    auto dH = [dbase, Hf, sched, m](double u) {
        return Matrix(dbase(u) + (sched.dpath(u) * m) * Hf);
    };
    return {H, dH};
}

}  // namespace

Adiabaticity adiabaticity_factor(const AnnealSetup& s, double sched_s,
                                 int level) {
    if (sched_s < 0.0 || sched_s > 1.0)
        throw std::invalid_argument("adiabaticity_factor: s outside [0, 1]");
    PathPair pp = branch_path_pair(s);
    EigenDecomposition e = eig_unchecked(pp.H(sched_s));
    const Matrix dH = pp.dH(sched_s);
    const int d = static_cast<int>(e.eigenvalues.size());
    if (level >= d)
        throw std::invalid_argument("adiabaticity_factor: level out of range");
    const double scale = std::max(1.0, dH.cwiseAbs().maxCoeff());
    auto element = [&](int k) {
        return std::abs(Complex(e.eigenvectors.col(k).adjoint() * dH *
                                e.eigenvectors.col(0)));
    };
    int k = level;
    if (k < 0) {
        k = 0;
        for (int c = 1; c < d; ++c)
            if (element(c) > 1e-12 * scale) {
                k = c;
                break;
            }
        if (k == 0)
            throw std::invalid_argument(
                "adiabaticity_factor: all matrix elements vanish");
    }
    Adiabaticity a;
    a.level = k;
    a.matrix_element = element(k);
    a.gap = e.eigenvalues(k) - e.eigenvalues(0);
    if (a.gap < 1e-12)
        throw std::invalid_argument(
            "adiabaticity_factor: vanishing gap at the queried point");
    a.factor = a.matrix_element / (a.gap * a.gap);
    return a;
}

model::Schedule local_adiabatic_schedule_path(const qcore::HamiltonianFn& H_of_s,
                                              const qcore::HamiltonianFn& dH_ds,
                                              double eps, int grid) {
    if (eps <= 0.0) throw std::invalid_argument("schedule: eps must be > 0");
    if (grid < 2) throw std::invalid_argument("schedule: grid must be >= 2");
    // dt/ds = |M(s)| / (eps * gap(s)^2), integrated with midpoint samples
    std::vector<double> t(grid + 1, 0.0);
    const double du = 1.0 / grid;
    for (int k = 0; k < grid; ++k) {
        const double u = (k + 0.5) * du;
        EigenDecomposition e = eig_unchecked(H_of_s(u));
        const double gap = e.eigenvalues(1) - e.eigenvalues(0);
        if (gap < 1e-9)
            throw std::invalid_argument(
                "schedule: gap below 1e-9 along the path");
        const double M = std::abs(Complex(e.eigenvectors.col(1).adjoint() *
                                          dH_ds(u) * e.eigenvectors.col(0)));
        t[k + 1] = t[k] + du * M / (eps * gap * gap);
    }
    const double T = t[grid];
    if (T <= 0.0)
        throw std::invalid_argument("schedule: degenerate total duration");
    std::vector<std::pair<double, double>> table;
    table.reserve(grid + 1);
    for (int k = 0; k <= grid; ++k)
        table.emplace_back(t[k] / T, static_cast<double>(k) / grid);
    return model::Schedule::tabulated(T, table);
}

model::Schedule local_adiabatic_schedule(const AnnealSetup& s, double eps,
                                         int grid) {
    PathPair pp = branch_path_pair(s);
    return local_adiabatic_schedule_path(pp.H, pp.dH, eps, grid);
}

}  // namespace qa::anneal
