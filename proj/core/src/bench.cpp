#include "qanneal/bench.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

namespace qa::bench {

using channel::BranchEvolution;
using channel::system_path;
using qcore::Complex;
using qcore::EigenDecomposition;
using qcore::eig_unchecked;
using qcore::FamilyColumn;
using qcore::Matrix;
using qcore::RealVector;
using qcore::StateVector;
using qcore::Vector;

IsingProblem random_ising(int N, std::uint64_t seed) {
    if (N < 1) throw std::invalid_argument("random_ising: N must be >= 1");
    std::mt19937_64 rng(seed);
    auto uniform01 = [&rng]() {
        return static_cast<double>(rng() >> 11) *
               (1.0 / 9007199254740992.0);  // 2^-53
    };
    RealMatrix J = RealMatrix::Zero(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j) {
            const double v = uniform01();
            J(i, j) = v;
            J(j, i) = v;
        }
    RealVector h(N);
    for (int i = 0; i < N; ++i) h(i) = uniform01();
    return IsingProblem(N, J, h);
}

InstanceSet InstanceSet::generate(int N, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("InstanceSet: n must be >= 1");
    InstanceSet set;
    set.n_qubits = N;
    set.count = n;
    set.seed = seed;
    set.instances.reserve(n);
    for (int k = 0; k < n; ++k)
        set.instances.push_back(random_ising(N, seed + static_cast<std::uint64_t>(k)));
    return set;
}

double extrapolate_duration(double T_guess, double p_guess) {
    if (T_guess <= 0.0)
        throw std::invalid_argument("extrapolate_duration: T_guess <= 0");
    if (!(p_guess > 0.0 && p_guess < 1.0))
        throw std::invalid_argument(
            "extrapolate_duration: p_guess outside (0, 1)");
    const double p = std::clamp(p_guess, 0.01, 0.99);
    return T_guess * std::log(1.0 - p) / std::log(0.5);
}

std::vector<double> duration_grid(double T_ext, int n_T) {
    if (T_ext <= 0.0) throw std::invalid_argument("duration_grid: T_ext <= 0");
    if (n_T < 2) throw std::invalid_argument("duration_grid: n_T must be >= 2");
    std::vector<double> g(n_T);
    for (int k = 0; k < n_T; ++k)
        g[k] = 0.1 * T_ext *
               std::pow(100.0, static_cast<double>(k) / (n_T - 1));
    g.front() = 0.1 * T_ext;
    g.back() = 10.0 * T_ext;
    return g;
}

TtsEntry tts_from_curve(const std::vector<double>& grid,
                        const std::vector<double>& p_single, double p_target) {
    if (grid.empty() || grid.size() != p_single.size())
        throw std::invalid_argument("tts_from_curve: size mismatch");
    if (!(p_target > 0.0 && p_target < 1.0))
        throw std::invalid_argument("tts_from_curve: p_target outside (0, 1)");
    TtsEntry e;
    e.grid = grid;
    e.p_single = p_single;
    const double lt = std::log(1.0 - p_target);
    for (size_t i = 0; i < grid.size(); ++i) {
        const double T = grid[i];
        const double p = p_single[i];
        double cand;
        if (p >= 1.0 - 1e-12)
            cand = T;
        else if (p <= 1e-12)
            cand = kInf;
        else
            cand = T * std::max(1.0, lt / std::log(1.0 - p));
        if (cand < e.tts) {
            e.tts = cand;
            e.argmin = static_cast<int>(i);
            e.T_min = T;
        }
    }
    e.defined = e.tts < kInf;
    if (!e.defined) {
        e.argmin = -1;
        e.T_min = 0.0;
    }
    return e;
}

TtsEntry time_to_solution(const AnnealSetup& s, double p_target,
                          const std::vector<double>& grid, int steps) {
    std::vector<double> p;
    p.reserve(grid.size());
    for (double T : grid)
        p.push_back(anneal::run_anneal(s, T, steps).success_prob);
    return tts_from_curve(grid, p, p_target);
}

namespace {

// |-(x)|^N: amplitude (-1)^popcount(b) / sqrt(2^N) -- the ground state of
// the transverse-field start Hamiltonian, already phase-fixed.
Vector minus_product_state(int N) {
    const int dim = 1 << N;
    Vector v(dim);
    const double a = 1.0 / std::sqrt(static_cast<double>(dim));
    for (int b = 0; b < dim; ++b)
        v(b) = (__builtin_popcount(static_cast<unsigned>(b)) % 2 == 0) ? a : -a;
    return v;
}

std::vector<int> ground_indices(const RealVector& diag) {
    const double lo = diag.minCoeff();
    const double scale = std::max(1.0, diag.cwiseAbs().maxCoeff());
    std::vector<int> idx;
    for (Eigen::Index b = 0; b < diag.size(); ++b)
        if (diag(b) - lo <= 1e-9 * scale) idx.push_back(static_cast<int>(b));
    return idx;
}

double subspace_population(const Vector& psi, const std::vector<int>& idx) {
    double p = 0.0;
    for (int b : idx) p += std::norm(psi(b));
    return p;
}

bool all_below(const std::vector<double>& p, double thr) {
    return std::all_of(p.begin(), p.end(),
                       [thr](double x) { return x < thr; });
}

}  // namespace

TtsAggregate tts_ratio_sweep(int N, int n, double x0, InteractionMode mode,
                             std::uint64_t seed, const TtsSweepOptions& opt) {
    if (mode == InteractionMode::none)
        throw std::invalid_argument(
            "tts_ratio_sweep: pick a meter coupling mode");
    TtsAggregate agg;
    agg.N = N;
    agg.n = n;
    agg.seed = seed;
    agg.x0 = x0;
    agg.mode = mode;
    agg.p_target = opt.p_target;

    const Vector psi0 = minus_product_state(N);
    for (int k = 0; k < n; ++k) {
        const std::uint64_t iseed = seed + static_cast<std::uint64_t>(k);
        IsingProblem prob = random_ising(N, iseed);
        AnnealSetup base = AnnealSetup::ising(prob, 1.0);
        auto path = system_path(base);
        const std::vector<int> gs = ground_indices(model::ising_diagonal(prob));

        TtsInstanceRow row;
        row.seed = iseed;

        // coherent calibration run at the guess duration
        auto guess = qcore::evolve_family(path, psi0,
                                          {{opt.T_guess, 1.0}},
                                          opt.guess_steps);
        row.p_guess = subspace_population(guess[0], gs);
        row.T_ext = extrapolate_duration(opt.T_guess, row.p_guess);
        const std::vector<double> grid = duration_grid(row.T_ext, opt.n_T);
        const size_t nT = grid.size();

        std::vector<double> pc(nT), pp(nT);
        if (mode == InteractionMode::full_qnd) {
            // coherent and rescaled columns share one family sweep
            std::vector<FamilyColumn> cols;
            for (double T : grid) cols.push_back({T, 1.0});
            for (double T : grid) cols.push_back({T, 1.0 + x0});
            auto states =
                qcore::evolve_family(path, psi0, cols, opt.steps);
            for (size_t i = 0; i < nT; ++i) {
                pc[i] = subspace_population(states[i], gs);
                pp[i] = subspace_population(states[nT + i], gs);
            }
        } else {
            std::vector<FamilyColumn> cols;
            for (double T : grid) cols.push_back({T, 1.0});
            auto coh =
                qcore::evolve_family(path, psi0, cols, opt.steps);
            Matrix Hf = model::ising_hamiltonian(prob);
            model::Schedule sched = base.schedule;
            auto cpath = [path, Hf, sched, x0](double u) {
                return Matrix(path(u) + (sched.path(u) * x0) * Hf);
            };
            auto pro = qcore::evolve_family(cpath, psi0, cols,
                                            opt.steps);
            for (size_t i = 0; i < nT; ++i) {
                pc[i] = subspace_population(coh[i], gs);
                pp[i] = subspace_population(pro[i], gs);
            }
        }
        row.coherent = tts_from_curve(grid, pc, opt.p_target);
        row.protocol = tts_from_curve(grid, pp, opt.p_target);

        if (!row.coherent.defined || !row.protocol.defined) {
            row.excluded = true;
            row.exclude_reason = "undefined_tts";
        } else if (all_below(pc, 1e-6) || all_below(pp, 1e-6)) {
            row.excluded = true;
            row.exclude_reason = "all_probabilities_below_threshold";
        } else if (row.coherent.argmin == 0) {
            row.excluded = true;
            row.exclude_reason = "grid_edge_minimum";
        } else {
            row.ratio = row.protocol.tts / row.coherent.tts;
        }
        agg.rows.push_back(std::move(row));
    }

    double sum = 0.0;
    for (const auto& r : agg.rows) {
        if (r.excluded) {
            ++agg.excluded;
            continue;
        }
        ++agg.kept;
        sum += r.ratio;
    }
    if (agg.kept > 0) agg.mean_ratio = sum / agg.kept;
    if (agg.kept > 1) {
        double ss = 0.0;
        for (const auto& r : agg.rows)
            if (!r.excluded)
                ss += (r.ratio - agg.mean_ratio) * (r.ratio - agg.mean_ratio);
        agg.sd_ratio = std::sqrt(ss / (agg.kept - 1));
    }
    return agg;
}

FidelityScan fidelity_scan(const AnnealSetup& base,
                           const std::vector<double>& T_grid,
                           const std::vector<double>& x0_grid, int steps) {
    if (T_grid.empty() || x0_grid.empty())
        throw std::invalid_argument("fidelity_scan: empty grid");
    FidelityScan scan;
    scan.T_grid = T_grid;
    scan.x0_grid = x0_grid;
    const auto nT = static_cast<Eigen::Index>(T_grid.size());
    const auto nX = static_cast<Eigen::Index>(x0_grid.size());
    scan.F.resize(nT, nX);
    scan.F_baseline.resize(nT, nX);
    scan.residual_aligned.resize(nT, nX);
    scan.residual_interp.resize(nT, nX);

    auto path = channel::system_path(base);
    EigenDecomposition e0 = eig_unchecked(path(0.0));
    EigenDecomposition e1 = eig_unchecked(path(1.0));
    const Vector psi0 = e0.eigenvectors.col(0);
    const Vector gsf = e1.eigenvectors.col(0);

    // deduplicated (duration, scale) columns: rescaled run, stretched
    // baseline, and the plain baseline on the T grid for interpolation
    std::map<std::pair<double, double>, int> col_of;
    std::vector<FamilyColumn> cols;
    auto add = [&](double T, double sc) {
        auto key = std::make_pair(T, sc);
        auto it = col_of.find(key);
        if (it != col_of.end()) return it->second;
        const int idx = static_cast<int>(cols.size());
        cols.push_back({T, sc});
        col_of.emplace(key, idx);
        return idx;
    };
    std::vector<std::pair<int, int>> cell(nT * nX);  // (rescaled, stretched)
    std::vector<int> base_col(nT);
    for (Eigen::Index i = 0; i < nT; ++i) {
        base_col[i] = add(T_grid[i], 1.0);
        for (Eigen::Index j = 0; j < nX; ++j) {
            const double sc = 1.0 + x0_grid[j];
            cell[i * nX + j] = {add(T_grid[i], sc),
                               add(T_grid[i] * sc, 1.0)};
        }
    }
    auto states = qcore::evolve_family(path, psi0, cols, steps);
    auto fid = [&](int c) { return std::norm(Complex(gsf.adjoint() * states[c])); };

    std::vector<double> logT(nT), Fb(nT);
    for (Eigen::Index i = 0; i < nT; ++i) {
        logT[i] = std::log(T_grid[i]);
        Fb[i] = fid(base_col[i]);
    }
    auto interp = [&](double T) {
        const double x = std::log(T);
        if (x < logT.front() || x > logT.back())
            return std::numeric_limits<double>::quiet_NaN();
        auto it = std::upper_bound(logT.begin(), logT.end(), x);
        if (it == logT.begin()) return Fb.front();
        if (it == logT.end()) return Fb.back();
        const auto hi = static_cast<size_t>(it - logT.begin());
        const auto lo = hi - 1;
        const double w = (x - logT[lo]) / (logT[hi] - logT[lo]);
        return (1.0 - w) * Fb[lo] + w * Fb[hi];
    };

    for (Eigen::Index i = 0; i < nT; ++i)
        for (Eigen::Index j = 0; j < nX; ++j) {
            const auto [ca, cb] = cell[i * nX + j];
            scan.F(i, j) = fid(ca);
            scan.F_baseline(i, j) = fid(cb);
            scan.residual_aligned(i, j) =
                std::abs(scan.F(i, j) - scan.F_baseline(i, j));
            const double ref = interp(T_grid[i] * (1.0 + x0_grid[j]));
            scan.residual_interp(i, j) = std::abs(scan.F(i, j) - ref);
        }
    return scan;
}

OmegaScan omega_scan(const AnnealSetup& base, const std::vector<double>& T_grid,
                     const std::vector<double>& omega_grid, double x0,
                     int steps) {
    if (T_grid.empty() || omega_grid.empty())
        throw std::invalid_argument("omega_scan: empty grid");
    OmegaScan scan;
    scan.T_grid = T_grid;
    scan.omega_grid = omega_grid;
    const auto nT = static_cast<Eigen::Index>(T_grid.size());
    const auto nW = static_cast<Eigen::Index>(omega_grid.size());
    scan.q.resize(nT, nW);
    scan.diff.resize(nT, nW);

    const int ds = base.system_dim();
    auto spath = channel::system_path(base);
    EigenDecomposition e0 = eig_unchecked(spath(0.0));
    EigenDecomposition e1 = eig_unchecked(spath(1.0));
    const Vector psi0 = e0.eigenvectors.col(0);
    const Vector gsf = e1.eigenvectors.col(0);
    Vector chi0(2);
    chi0 << 1.0, 0.0;

    std::vector<FamilyColumn> cols;
    for (double T : T_grid) cols.push_back({T, 1.0});

    auto column = [&](double omega, RealVector& out) {
        AnnealSetup s =
            base.with_meter(model::MeterSpec::qubit(x0, omega, chi0),
                            InteractionMode::full_qnd)
                .with_duration(1.0);
        auto tpath = [s](double u) {
            return model::total_hamiltonian(s, s.t_begin() + u);
        };
        const Vector psi_tot0 = qcore::tensor(psi0, chi0);
        auto states =
            qcore::evolve_family(tpath, psi_tot0, cols, steps);
        out.resize(nT);
        for (Eigen::Index i = 0; i < nT; ++i) {
            Matrix rho_tot = states[i] * states[i].adjoint();
            Matrix rho = qcore::partial_trace_meter(rho_tot, ds, 2);
            out(i) = std::real(Complex(gsf.adjoint() * rho * gsf));
        }
    };

    // reference column at omega = 0 (reused when the grid contains 0)
    RealVector qref;
    int j0 = -1;
    for (Eigen::Index j = 0; j < nW; ++j)
        if (omega_grid[j] == 0.0) j0 = static_cast<int>(j);
    if (j0 < 0) column(0.0, qref);

    std::vector<RealVector> qcols(nW);
    for (Eigen::Index j = 0; j < nW; ++j) column(omega_grid[j], qcols[j]);
    if (j0 >= 0) qref = qcols[j0];

    scan.max_diff = -kInf;
    for (Eigen::Index j = 0; j < nW; ++j)
        for (Eigen::Index i = 0; i < nT; ++i) {
            scan.q(i, j) = qcols[j](i);
            scan.diff(i, j) = qcols[j](i) - qref(i);
            scan.max_diff = std::max(scan.max_diff, scan.diff(i, j));
        }
    return scan;
}

X0Scan x0_scan_constrained(int N, const std::vector<double>& x0_grid, int n,
                           std::uint64_t seed, double T_guess, int steps) {
    if (x0_grid.empty())
        throw std::invalid_argument("x0_scan_constrained: empty x0 grid");
    X0Scan scan;
    scan.x0_grid = x0_grid;
    const auto nX = static_cast<Eigen::Index>(x0_grid.size());
    scan.F.resize(n, nX);
    scan.T_ext.resize(n);
    scan.mean_F.assign(nX, 0.0);

    const Vector psi0 = minus_product_state(N);
    for (int k = 0; k < n; ++k) {
        IsingProblem prob =
            random_ising(N, seed + static_cast<std::uint64_t>(k));
        AnnealSetup base = AnnealSetup::ising(prob, 1.0);
        auto path = channel::system_path(base);
        const std::vector<int> gs = ground_indices(model::ising_diagonal(prob));

        auto guess =
            qcore::evolve_family(path, psi0, {{T_guess, 1.0}}, steps);
        const double p_guess = subspace_population(guess[0], gs);
        scan.T_ext[k] = extrapolate_duration(T_guess, p_guess);

        Matrix Hf = model::ising_hamiltonian(prob);
        model::Schedule sched = base.schedule;
        for (Eigen::Index j = 0; j < nX; ++j) {
            const double x0 = x0_grid[j];
            qcore::HamiltonianFn p = path;
            if (x0 != 0.0)
                p = [path, Hf, sched, x0](double u) {
                    return Matrix(path(u) + (sched.path(u) * x0) * Hf);
                };
            auto st = qcore::evolve_family(p, psi0,
                                           {{scan.T_ext[k], 1.0}}, steps);
            scan.F(k, j) = subspace_population(st[0], gs);
            scan.mean_F[j] += scan.F(k, j) / n;
        }
    }
    return scan;
}

GadgetReport gadget_verify(const std::array<int, 3>& sites, double c) {
    if (sites[0] == sites[1] || sites[0] == sites[2] || sites[1] == sites[2])
        throw std::invalid_argument("gadget_verify: sites must be distinct");
    GadgetReport rep;

    IsingProblem orig(3, RealMatrix::Zero(3, 3), RealVector::Zero(3));
    orig.three_body.push_back({{0, 1, 2}, c});
    IsingProblem dec = model::gadget_decompose(orig);

    auto levels = [](const IsingProblem& p) {
        std::vector<double> e(static_cast<size_t>(1) << p.n_qubits);
        for (size_t b = 0; b < e.size(); ++b)
            e[b] = p.energy(static_cast<int>(b));
        return e;
    };
    auto gap = [](const std::vector<double>& e) {
        std::vector<double> s(e);
        std::sort(s.begin(), s.end());
        const double tol = 1e-12 * std::max(1.0, std::abs(s.back()));
        for (double v : s)
            if (v - s.front() > tol) return v - s.front();
        return std::numeric_limits<double>::quiet_NaN();
    };
    auto ground_set = [](const std::vector<double>& e) {
        const double lo = *std::min_element(e.begin(), e.end());
        double hi = 0.0;
        for (double v : e) hi = std::max(hi, std::abs(v));
        std::vector<int> g;
        for (size_t b = 0; b < e.size(); ++b)
            if (e[b] - lo <= 1e-12 * std::max(1.0, hi))
                g.push_back(static_cast<int>(b));
        return g;
    };

    const auto eo = levels(orig);
    const auto ed = levels(dec);
    rep.original_ground = ground_set(eo);
    rep.decomposed_ground = ground_set(ed);

    std::set<int> so(rep.original_ground.begin(), rep.original_ground.end());
    std::set<int> sd;
    for (int b : rep.decomposed_ground) sd.insert(b >> 1);  // drop ancilla bit
    for (int b : so)
        if (!sd.count(b)) rep.missing.push_back(b);
    for (int b : sd)
        if (!so.count(b)) rep.extraneous.push_back(b);
    rep.manifold_ok = rep.missing.empty() && rep.extraneous.empty();
    const double go = gap(eo), gd = gap(ed);
    rep.gap_ratio = gd / go;  // NaN propagates when either side is gapless
    return rep;
}

}  // namespace qa::bench
