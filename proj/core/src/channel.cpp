#include "qanneal/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qa::channel {

using model::InteractionMode;
using qcore::Complex;
using qcore::EigenDecomposition;
using qcore::eig_unchecked;

qcore::HamiltonianFn system_path(const AnnealSetup& s) {
    if (std::holds_alternative<model::LzProblem>(s.problem)) {
        const double g = std::get<model::LzProblem>(s.problem).g;
        return [g](double u) {
            return Matrix(((20.0 * u - 10.0) / 2.0) * qcore::pauli('z') +
                          (g / 2.0) * qcore::pauli('x'));
        };
    }
    const auto& p = std::get<model::IsingProblem>(s.problem);
    Matrix HT = model::transverse_hamiltonian(p.n_qubits);
    Matrix HI = model::ising_hamiltonian(p);
    model::Schedule sched = s.schedule;
    return [HT, HI, sched](double u) {
        const double f = sched.path(u);
        return Matrix((1.0 - f) * HT + f * HI);
    };
}

std::vector<BranchEvolution> branch_evolutions(const AnnealSetup& s) {
    std::vector<BranchEvolution> out;
    if (s.mode == InteractionMode::none || !s.meter) {
        out.push_back({system_path(s), 1.0, 0.0, 1.0, 0.0});
        return out;
    }
    auto mb = meter_branches(*s.meter);
    if (s.mode == InteractionMode::full_qnd) {
        auto base = system_path(s);
        for (const auto& b : mb)
            out.push_back({base, 1.0 + b.m, b.energy_shift, b.weight, b.m});
        return out;
    }
    // constrained: H_S(s) + f(s) * m * H_f (+ shift)
    const auto& p = std::get<model::IsingProblem>(s.problem);
    Matrix Hf = model::ising_hamiltonian(p);
    auto base = system_path(s);
    model::Schedule sched = s.schedule;
    for (const auto& b : mb) {
        const double m = b.m;
        auto fn = [base, Hf, sched, m](double u) {
            return Matrix(base(u) + (sched.path(u) * m) * Hf);
        };
        out.push_back({fn, 1.0, b.energy_shift, b.weight, m});
    }
    return out;
}

Matrix branch_propagator(const BranchEvolution& b, double T, double u0,
                         double u1, int steps) {
    const int d = static_cast<int>(b.H_of_s(u0).rows());
    Matrix U = Matrix::Identity(d, d);
    const double du = (u1 - u0) / steps;
    const double dt = du * T;
    for (int k = 0; k < steps; ++k) {
        const double u = u0 + (k + 0.5) * du;
        EigenDecomposition e = eig_unchecked(b.H_of_s(u));
        qcore::Vector ph(e.eigenvalues.size());
        for (Eigen::Index i = 0; i < ph.size(); ++i)
            ph(i) = std::exp(Complex(
                0, -(e.eigenvalues(i) * b.scale + b.energy_shift) * dt));
        U = (e.eigenvectors * ph.asDiagonal() * e.eigenvectors.adjoint()) * U;
    }
    return U;
}

namespace {

bool is_plus_preset(const model::MeterSpec& m) {
    if (m.meter_dim != 2) return false;
    if (m.H_M.cwiseAbs().maxCoeff() > 1e-12) return false;
    Matrix plus(2, 2);
    plus << 0.5, 0.5, 0.5, 0.5;
    return (m.initial_state - plus).cwiseAbs().maxCoeff() < 1e-10;
}

}  // namespace

KrausSet::KrausSet(std::vector<Matrix> ops, double tol)
    : operators(std::move(ops)) {
    if (operators.empty())
        throw std::invalid_argument("KrausSet: no operators");
    const auto d = operators.front().rows();
    Matrix sum = Matrix::Zero(d, d);
    for (const auto& K : operators) sum += K.adjoint() * K;
    const double dev = (sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
    if (dev > tol)
        throw std::invalid_argument(
            "KrausSet: completeness violated by " + std::to_string(dev));
}

bool meter_commuting(const model::MeterSpec& spec, double tol) {
    const Matrix comm = spec.X_M * spec.H_M - spec.H_M * spec.X_M;
    const double scale =
        std::max(1.0, spec.X_M.cwiseAbs().maxCoeff() *
                          std::max(1.0, spec.H_M.cwiseAbs().maxCoeff()));
    return comm.cwiseAbs().maxCoeff() <= tol * scale;
}

std::vector<MeterBranch> meter_branches(const model::MeterSpec& spec,
                                        double tol) {
    if (!meter_commuting(spec, tol))
        throw std::invalid_argument(
            "meter_branches: [X_M, H_M] != 0 (max entry " +
            std::to_string(
                (spec.X_M * spec.H_M - spec.H_M * spec.X_M).cwiseAbs().maxCoeff()) +
            "); use tensor propagation");
    EigenDecomposition ex = eig_unchecked(spec.X_M);
    const double span =
        std::max(1.0, std::abs(ex.eigenvalues(ex.eigenvalues.size() - 1) -
                               ex.eigenvalues(0)));
    std::vector<MeterBranch> out;
    Eigen::Index i = 0;
    while (i < ex.eigenvalues.size()) {
        Eigen::Index j = i;
        while (j + 1 < ex.eigenvalues.size() &&
               ex.eigenvalues(j + 1) - ex.eigenvalues(i) < 1e-12 * span)
            ++j;
        const Eigen::Index g = j - i + 1;
        Matrix P = ex.eigenvectors.middleCols(i, g);
        // refine the degenerate X_M subspace by the projected H_M
        EigenDecomposition eh = eig_unchecked(Matrix(P.adjoint() * spec.H_M * P));
        Matrix U = P * eh.eigenvectors;
        for (Eigen::Index k = 0; k < g; ++k) {
            const qcore::Vector u = U.col(k);
            MeterBranch b;
            b.m = ex.eigenvalues(i);
            b.energy_shift = eh.eigenvalues(k);
            b.weight = std::real(Complex(u.adjoint() * spec.initial_state * u));
            out.push_back(b);
        }
        i = j + 1;
    }
    return out;
}

Matrix rescaled_propagator(const AnnealSetup& s, double scale, double t0,
                           double t1, int steps) {
    BranchEvolution b{system_path(s), scale, 0.0, 1.0, 0.0};
    const double span = s.t_end() - s.t_begin();
    return branch_propagator(b, s.schedule.T, (t0 - s.t_begin()) / span,
                             (t1 - s.t_begin()) / span, steps);
}

KrausSet kraus_operators(const AnnealSetup& s, double t, int steps) {
    if (!s.meter || s.mode == InteractionMode::none)
        throw std::invalid_argument("kraus_operators: setup has no meter");
    auto branches = branch_evolutions(s);  // throws when not commuting
    const double span = s.t_end() - s.t_begin();
    const double u1 = (t - s.t_begin()) / span;
    std::vector<Matrix> ops;
    for (const auto& b : branches)
        ops.push_back(std::sqrt(std::max(0.0, b.weight)) *
                      branch_propagator(b, s.schedule.T, 0.0, u1, steps));
    return KrausSet(std::move(ops));
}

KrausSet kraus_pair_plus(const AnnealSetup& s, double t, int steps) {
    if (!s.meter || !is_plus_preset(*s.meter) ||
        s.mode != InteractionMode::full_qnd)
        throw std::invalid_argument(
            "kraus_pair_plus: requires the |+> qubit meter with H_M = 0 and "
            "full coupling");
    const double x0 = s.meter->x0;
    Matrix Up = rescaled_propagator(s, 1.0 + x0, s.t_begin(), t, steps);
    Matrix Um = rescaled_propagator(s, 1.0 - x0, s.t_begin(), t, steps);
    std::vector<Matrix> ops;
    ops.push_back(0.5 * (Up + Um));
    ops.push_back(0.5 * (Up - Um));
    return KrausSet(std::move(ops));
}

DensityMatrix reduced_evolution_tensor(const AnnealSetup& s,
                                       const DensityMatrix& rho_S0, double t,
                                       int steps) {
    if (!s.meter || s.mode == InteractionMode::none) {
        // no meter: plain unitary evolution of the system state
        BranchEvolution b{system_path(s), 1.0, 0.0, 1.0, 0.0};
        const double span = s.t_end() - s.t_begin();
        Matrix U = branch_propagator(b, s.schedule.T, 0.0,
                                     (t - s.t_begin()) / span, steps);
        return DensityMatrix(U * rho_S0.m * U.adjoint());
    }
    const int ds = s.system_dim();
    const int dm = s.meter->meter_dim;
    Matrix rho = qcore::tensor(rho_S0.m, s.meter->initial_state);
    const double t0 = s.t_begin();
    const double dt = (t - t0) / steps;
    for (int k = 0; k < steps; ++k) {
        Matrix U = qcore::expm_unitary_unchecked(
            model::total_hamiltonian(s, t0 + (k + 0.5) * dt), dt);
        rho = U * rho * U.adjoint();
    }
    return qcore::partial_trace_meter(DensityMatrix(rho), ds, dm);
}

DensityMatrix reduced_evolution(const AnnealSetup& s,
                                const DensityMatrix& rho_S0, double t,
                                int steps) {
    if (!s.meter || s.mode == InteractionMode::none ||
        meter_commuting(*s.meter)) {
        auto branches = branch_evolutions(s);
        const double span = s.t_end() - s.t_begin();
        const double u1 = (t - s.t_begin()) / span;
        Matrix rho = Matrix::Zero(rho_S0.dim(), rho_S0.dim());
        for (const auto& b : branches) {
            if (b.weight <= 0.0) continue;
            Matrix U = branch_propagator(b, s.schedule.T, 0.0, u1, steps);
            rho += b.weight * (U * rho_S0.m * U.adjoint());
        }
        return DensityMatrix(rho);
    }
    return reduced_evolution_tensor(s, rho_S0, t, steps);
}

std::vector<double> coherence_trace(const AnnealSetup& s,
                                    const StateVector& psi0,
                                    const std::vector<double>& times, int m,
                                    int n, int substeps) {
    if (times.size() < 2)
        throw std::invalid_argument("coherence_trace: need >= 2 times");
    const int ds = s.system_dim();
    const double span = s.t_end() - s.t_begin();
    const Matrix rho0 = psi0.v * psi0.v.adjoint();

    const bool tensor_path = s.meter && s.mode != InteractionMode::none &&
                             !meter_commuting(*s.meter);
    std::vector<BranchEvolution> branches;
    std::vector<Matrix> branch_U;
    Matrix rho_tot;
    if (!tensor_path) {
        branches = branch_evolutions(s);
        for (const auto& b : branches)
            branch_U.push_back(Matrix::Identity(ds, ds));
    } else {
        rho_tot = qcore::tensor(rho0, s.meter->initial_state);
    }

    std::vector<double> out;
    out.reserve(times.size());
    for (size_t idx = 0; idx < times.size(); ++idx) {
        const double t = times[idx];
        // reduced state at t
        Matrix rho;
        if (!tensor_path) {
            rho = Matrix::Zero(ds, ds);
            for (size_t j = 0; j < branches.size(); ++j)
                if (branches[j].weight > 0.0)
                    rho += branches[j].weight *
                           (branch_U[j] * rho0 * branch_U[j].adjoint());
        } else {
            rho = qcore::partial_trace_meter(rho_tot, ds,
                                             s.meter->meter_dim);
        }
        EigenDecomposition e = eig_unchecked(model::system_hamiltonian(s, t));
        const double norm = std::max(std::abs(e.eigenvalues(0)),
                                     std::abs(e.eigenvalues(ds - 1)));
        if (std::abs(e.eigenvalues(n) - e.eigenvalues(m)) <
            1e-9 * std::max(1.0, norm))
            throw std::invalid_argument(
                "coherence_trace: requested levels degenerate at t = " +
                std::to_string(t));
        const Complex el = e.eigenvectors.col(m).adjoint() * rho *
                           e.eigenvectors.col(n);
        out.push_back(std::abs(el));
        if (idx + 1 == times.size()) break;
        // advance to the next grid time
        const double ta = times[idx], tb = times[idx + 1];
        if (!tensor_path) {
            const double ua = (ta - s.t_begin()) / span;
            const double ub = (tb - s.t_begin()) / span;
            for (size_t j = 0; j < branches.size(); ++j)
                branch_U[j] = branch_propagator(branches[j], s.schedule.T, ua,
                                                ub, substeps) *
                              branch_U[j];
        } else {
            const double dt = (tb - ta) / substeps;
            for (int k = 0; k < substeps; ++k) {
                Matrix U = qcore::expm_unitary_unchecked(
                    model::total_hamiltonian(s, ta + (k + 0.5) * dt), dt);
                rho_tot = U * rho_tot * U.adjoint();
            }
        }
    }
    return out;
}

std::vector<RealVector> spectrum_trace(const AnnealSetup& s,
                                       const std::vector<double>& times,
                                       SpectrumMode mode) {
    std::vector<RealVector> out;
    out.reserve(times.size());
    Matrix prev_vecs;  // per-mode or per-branch concatenation for tracking

    auto tracked = [&](const Matrix& H, Matrix& prev) {
        EigenDecomposition e = eig_unchecked(H);
        const auto d = e.eigenvalues.size();
        RealVector vals = e.eigenvalues;
        Matrix vecs = e.eigenvectors;
        if (prev.size() > 0) {
            // greedy overlap matching against the previous grid point
            std::vector<bool> used(d, false);
            RealVector tv(d);
            Matrix tvec(vecs.rows(), d);
            for (Eigen::Index k = 0; k < d; ++k) {
                double best = -1.0;
                Eigen::Index arg = 0;
                for (Eigen::Index l = 0; l < d; ++l) {
                    if (used[l]) continue;
                    const double ov = std::abs(
                        Complex(prev.col(k).adjoint() * vecs.col(l)));
                    if (ov > best) {
                        best = ov;
                        arg = l;
                    }
                }
                used[arg] = true;
                tv(k) = vals(arg);
                tvec.col(k) = vecs.col(arg);
            }
            prev = tvec;
            return tv;
        }
        prev = vecs;
        return vals;
    };

    if (mode == SpectrumMode::cd) {
        if (!std::holds_alternative<model::LzProblem>(s.problem))
            throw std::invalid_argument(
                "spectrum_trace: cd mode requires the sweep problem");
        const auto& lz = std::get<model::LzProblem>(s.problem);
        for (double t : times)
            out.push_back(tracked(model::cd_hamiltonian_lz(lz.v, lz.g, t),
                                  prev_vecs));
        return out;
    }
    if (mode == SpectrumMode::bare) {
        for (double t : times)
            out.push_back(tracked(model::system_hamiltonian(s, t), prev_vecs));
        return out;
    }
    // qnd: all commuting-meter branches of the fully coupled total,
    // blocked in ascending meter-eigenvalue order
    if (!s.meter)
        throw std::invalid_argument("spectrum_trace: qnd mode needs a meter");
    auto mb = meter_branches(*s.meter);
    const int ds = s.system_dim();
    std::vector<Matrix> prev_per_branch(mb.size());
    const bool constrained = s.mode == InteractionMode::constrained;
    Matrix Hf;
    if (constrained)
        Hf = model::ising_hamiltonian(std::get<model::IsingProblem>(s.problem));
    for (double t : times) {
        RealVector row(static_cast<Eigen::Index>(mb.size()) * ds);
        Matrix Hs = model::system_hamiltonian(s, t);
        for (size_t j = 0; j < mb.size(); ++j) {
            Matrix Hb;
            if (constrained)
                Hb = Hs + (s.schedule.f(t - s.t_begin()) * mb[j].m) * Hf +
                     mb[j].energy_shift * Matrix::Identity(ds, ds);
            else
                Hb = (1.0 + mb[j].m) * Hs +
                     mb[j].energy_shift * Matrix::Identity(ds, ds);
            row.segment(static_cast<Eigen::Index>(j) * ds, ds) =
                tracked(Hb, prev_per_branch[j]);
        }
        out.push_back(row);
    }
    return out;
}

double correction_term_check(const AnnealSetup& s, const DensityMatrix& rho_S0,
                             double t, double h, int coarse_steps,
                             int fine_steps) {
    if (!s.meter || !is_plus_preset(*s.meter) ||
        s.mode != InteractionMode::full_qnd)
        throw std::invalid_argument(
            "correction_term_check: requires the |+> qubit meter with "
            "H_M = 0 and full coupling");
    if (h <= 0.0 || t - h <= s.t_begin() || t + h >= s.t_end())
        throw std::invalid_argument(
            "correction_term_check: need t_begin < t - h and t + h < t_end "
            "with h > 0");
    const double x0 = s.meter->x0;
    const double span = s.t_end() - s.t_begin();
    auto u_of = [&](double tt) { return (tt - s.t_begin()) / span; };
    BranchEvolution bp{system_path(s), 1.0 + x0, 0.0, 0.5, x0};
    BranchEvolution bm{system_path(s), 1.0 - x0, 0.0, 0.5, -x0};

    // shared coarse history to t - h, then fine steps across the window;
    // the identity is local, so coarse-grid error common to the three
    // sample times cancels in the difference quotient
    const int nc = std::max(
        1, static_cast<int>(std::lround(coarse_steps * u_of(t - h))));
    Matrix Up = branch_propagator(bp, s.schedule.T, 0.0, u_of(t - h), nc);
    Matrix Um = branch_propagator(bm, s.schedule.T, 0.0, u_of(t - h), nc);
    Matrix Up1 =
        branch_propagator(bp, s.schedule.T, u_of(t - h), u_of(t), fine_steps) *
        Up;
    Matrix Um1 =
        branch_propagator(bm, s.schedule.T, u_of(t - h), u_of(t), fine_steps) *
        Um;
    Matrix Up2 =
        branch_propagator(bp, s.schedule.T, u_of(t), u_of(t + h), fine_steps) *
        Up1;
    Matrix Um2 =
        branch_propagator(bm, s.schedule.T, u_of(t), u_of(t + h), fine_steps) *
        Um1;

    auto mix = [&](const Matrix& P, const Matrix& M) {
        return Matrix(0.5 * (P * rho_S0.m * P.adjoint() +
                             M * rho_S0.m * M.adjoint()));
    };
    EigenDecomposition e = eig_unchecked(model::system_hamiltonian(s, t));
    const Matrix& V = e.eigenvectors;
    auto frozen = [&](const Matrix& A) { return Matrix(V.adjoint() * A * V); };

    Matrix D = (frozen(mix(Up2, Um2)) - frozen(mix(Up, Um))) / (2.0 * h);
    Matrix r0 = frozen(mix(Up1, Um1));
    Matrix rp = frozen(Matrix(Up1 * rho_S0.m * Up1.adjoint()));
    Matrix rm = frozen(Matrix(Um1 * rho_S0.m * Um1.adjoint()));
    Matrix rhs(D.rows(), D.cols());
    for (Eigen::Index a = 0; a < D.rows(); ++a)
        for (Eigen::Index b = 0; b < D.cols(); ++b) {
            const double dE = e.eigenvalues(a) - e.eigenvalues(b);
            rhs(a, b) = Complex(0, -dE) * r0(a, b) +
                        Complex(0, -dE * x0 / 2.0) * (rp(a, b) - rm(a, b));
        }
    return (D - rhs).cwiseAbs().maxCoeff();
}

}  // namespace qa::channel
