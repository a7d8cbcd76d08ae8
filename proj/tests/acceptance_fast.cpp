// Acceptance gate, fast suite: one line per criterion, exit code = number
// of failed criteria. The slow time-to-solution criterion lives in a
// separate binary.

#include "qanneal/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <vector>

using namespace qa;
using model::AnnealSetup;
using model::InteractionMode;
using model::IsingProblem;
using model::MeterSpec;
using qcore::Complex;
using qcore::DensityMatrix;
using qcore::HermitianOperator;
using qcore::Matrix;
using qcore::StateVector;
using qcore::Vector;
using qcore::hermitian_eig;

namespace {

int g_failures = 0;

void report(int idx, bool pass, const char* what, double measured,
            double bound) {
    std::printf("CRITERION %d %s — %s (measured=%.3g, bound=%.3g)\n", idx,
                pass ? "PASS" : "FAIL", what, measured, bound);
    if (!pass) ++g_failures;
}

std::vector<double> geomspace(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int k = 0; k < n; ++k)
        g[k] = lo * std::exp(std::log(hi / lo) * k / (n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

Vector ground_of(const Matrix& H) {
    return hermitian_eig(HermitianOperator(H)).eigenvectors.col(0);
}

// --- 1: reduced channel vs full tensor propagation --------------------------

void criterion_channel_equivalence() {
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> ux(0.0, 3.0);
    std::uniform_real_distribution<double> uT(2.0, 8.0);
    std::uniform_real_distribution<double> uu(0.3, 1.0);
    std::uniform_int_distribution<int> uN(1, 3);
    std::uniform_int_distribution<int> ustate(0, 2);
    std::normal_distribution<double> nd(0.0, 1.0);

    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const int N = uN(rng);
        const double T = uT(rng);
        const double x0 = ux(rng);
        IsingProblem prob = bench::random_ising(N, 5000 + k);

        Vector chi(2);
        switch (ustate(rng)) {
            case 0: chi << 1.0, 0.0; break;
            case 1: chi << 0.0, 1.0; break;
            default: chi << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0); break;
        }
        AnnealSetup s = AnnealSetup::ising(prob, T).with_meter(
            MeterSpec::qubit(x0, 0.0, chi), InteractionMode::full_qnd);

        Vector psi(s.system_dim());
        for (int i = 0; i < s.system_dim(); ++i)
            psi(i) = Complex(nd(rng), nd(rng));
        psi.normalize();
        DensityMatrix rho0{Matrix(psi * psi.adjoint())};

        const double t = s.t_begin() + uu(rng) * (s.t_end() - s.t_begin());
        DensityMatrix a = channel::reduced_evolution(s, rho0, t, 1200);
        DensityMatrix b = channel::reduced_evolution_tensor(s, rho0, t, 1200);
        worst = std::max(worst, (a.m - b.m).cwiseAbs().maxCoeff());
    }
    report(1, worst <= 1e-8,
           "reduced channel equals tensor propagation plus trace on 50 random "
           "meter setups",
           worst, 1e-8);
}

// --- 2: duration-rescaling law across both presets --------------------------

void criterion_rescaling_law() {
    const std::vector<double> T_grid = geomspace(1.0, 40.0, 12);
    const std::vector<double> x0_grid{0.0, 1.0, 2.0, 3.0};

    double worst = 0.0;
    double minF = 1.0;
    for (int preset = 0; preset < 2; ++preset) {
        AnnealSetup base = (preset == 0)
                               ? AnnealSetup::lz(1.0, 1.0)
                               : AnnealSetup::ising(bench::random_ising(3, 7),
                                                    1.0);
        bench::FidelityScan scan =
            bench::fidelity_scan(base, T_grid, x0_grid, 4000);
        worst = std::max(worst, scan.residual_aligned.maxCoeff());
        minF = std::min(minF, scan.F.minCoeff());
    }
    const bool covers_nonadiabatic = minF < 0.9;
    report(2, worst <= 1e-6 && covers_nonadiabatic,
           "fidelity is invariant under duration-for-coupling exchange on "
           "both presets incl. non-adiabatic cells",
           worst, 1e-6);
}

// --- 3: two-level sweep closed form ------------------------------------------

void criterion_lz_closed_form() {
    const double g = 1.0;
    double worst = 0.0;
    for (double x0 : {0.0, 1.0, 2.0, 3.0}) {
        for (double q : {1e-3, 1e-2, 1e-1, 0.5}) {
            const double v_eff = std::numbers::pi / (2.0 * std::log(1.0 / q));
            const double v = (1.0 + x0) * v_eff;
            AnnealSetup s = AnnealSetup::lz(v, g);
            if (x0 > 0.0)
                s = s.with_meter(MeterSpec::qubit_zero(x0),
                                 InteractionMode::full_qnd);
            anneal::AnnealResult r = anneal::run_anneal(s, 20.0 / v, 4000);
            const double want = anneal::lz_infidelity(v / (1.0 + x0), g);
            worst = std::max(worst,
                             std::abs((1.0 - r.fidelity) - want) / want);
        }
    }
    report(3, worst <= 0.05,
           "sweep infidelity matches the closed form at the rescaled rate "
           "for couplings 0..3",
           worst, 0.05);
}

// --- 4: non-commuting meter never gains fidelity -----------------------------

void criterion_omega_bound() {
    const std::vector<double> T_grid = geomspace(1.0, 40.0, 10);
    const std::vector<double> omega_grid{0.0, 0.25, 0.5, 1.0, 2.0};
    double worst = -bench::kInf;
    for (int preset = 0; preset < 2; ++preset) {
        AnnealSetup base = (preset == 0)
                               ? AnnealSetup::lz(1.0, 1.0)
                               : AnnealSetup::ising(bench::random_ising(3, 7),
                                                    1.0);
        bench::OmegaScan scan =
            bench::omega_scan(base, T_grid, omega_grid, 1.0, 4000);
        worst = std::max(worst, scan.max_diff);
    }
    report(4, worst <= 1e-9,
           "meter self-dynamics never raises ground fidelity over the static "
           "meter on either preset",
           worst, 1e-9);
}

// --- 6: instantaneous-basis equation of motion -------------------------------

void criterion_correction_term() {
    AnnealSetup s = AnnealSetup::lz(1.0, 1.0).with_meter(
        MeterSpec::qubit_plus(2.0), InteractionMode::full_qnd);
    Vector psi0 = ground_of(model::system_hamiltonian(s, s.t_begin()));
    DensityMatrix rho0{Matrix(psi0 * psi0.adjoint())};

    double worst_res = 0.0;
    double worst_ratio = bench::kInf;
    // Sample the window at and after the avoided crossing: well before it the
    // state is stationary in the instantaneous basis, the finite-difference
    // truncation term underflows the integrator's roundoff floor, and the
    // convergence ratio would measure noise instead of the h^2 law.
    for (double t : {0.0, 0.5, 1.0, 1.5, 2.0}) {
        const double r1 = channel::correction_term_check(s, rho0, t, 1e-4);
        const double r2 = channel::correction_term_check(s, rho0, t, 0.5e-4);
        worst_res = std::max(worst_res, r1);
        worst_ratio = std::min(worst_ratio, r1 / r2);
    }
    const bool pass = worst_res <= 1e-6 && worst_ratio >= 3.5;
    report(6, pass,
           "dephasing correction term satisfies the eigenbasis equation of "
           "motion with quadratic step convergence",
           worst_res, 1e-6);
}

// --- 7: three-body gadget ----------------------------------------------------

void criterion_gadget() {
    bench::GadgetReport rep = bench::gadget_verify({0, 1, 2}, 1.0);
    const bool manifold =
        rep.manifold_ok &&
        rep.original_ground == std::vector<int>({1, 2, 4, 7});
    const double dev = std::abs(rep.gap_ratio - 1.0);
    report(7, manifold && dev <= 1e-12,
           "two-body gadget reproduces the three-body ground manifold with "
           "unit gap ratio",
           dev, 1e-12);
}

// --- 8: dephasing signature ---------------------------------------------------

void criterion_dephasing_signature() {
    Vector plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);

    // Time-averaged coherence, coherent vs meter, for both named sweep
    // presets (the long ramp and the short fixed-duration variant).
    double min_separation = bench::kInf;
    for (double v : {1.0, 4.0}) {  // durations 20 and 5
        AnnealSetup bare = AnnealSetup::lz(v, 1.0);
        AnnealSetup met = bare.with_meter(MeterSpec::qubit_plus(2.0),
                                          InteractionMode::full_qnd);
        std::vector<double> times;
        const int n = 80;
        for (int k = 0; k <= n; ++k)
            times.push_back(bare.t_begin() +
                            (bare.t_end() - bare.t_begin()) * k / n);
        auto cb = channel::coherence_trace(bare, StateVector(plus), times, 0,
                                           1, 50);
        auto cm = channel::coherence_trace(met, StateVector(plus), times, 0,
                                           1, 50);
        double ab = 0.0, am = 0.0;
        for (size_t k = 0; k < times.size(); ++k) {
            ab += cb[k] / times.size();
            am += cm[k] / times.size();
        }
        min_separation = std::min(min_separation, ab - am);
    }

    // Positive-coupling branch of the meter spectrum is exactly 3x bare.
    AnnealSetup spec_setup = AnnealSetup::lz(1.0, 1.0).with_meter(
        MeterSpec::qubit_plus(2.0), InteractionMode::full_qnd);
    std::vector<double> times;
    for (int k = 0; k <= 40; ++k) times.push_back(-10.0 + 0.5 * k);
    auto bare = channel::spectrum_trace(AnnealSetup::lz(1.0, 1.0), times,
                                        channel::SpectrumMode::bare);
    auto qnd = channel::spectrum_trace(spec_setup, times,
                                       channel::SpectrumMode::qnd);
    double worst_dev = 0.0;
    for (size_t k = 0; k < times.size(); ++k)
        for (int lvl = 0; lvl < 2; ++lvl)
            worst_dev = std::max(
                worst_dev, std::abs(qnd[k](2 + lvl) - 3.0 * bare[k](lvl)));

    const bool pass = min_separation > 0.0 && worst_dev <= 1e-10;
    report(8, pass,
           "meter strictly lowers time-averaged coherence and its positive "
           "branch spectrum is exactly 3x bare",
           worst_dev, 1e-10);
}

// --- 9: purity at the optimal meter state -------------------------------------

void criterion_purity_optimum() {
    double worst = 0.0;
    std::vector<AnnealSetup> setups;
    setups.push_back(AnnealSetup::lz(1.0, 1.0).with_meter(
        MeterSpec::qubit_zero(2.0), InteractionMode::full_qnd));
    setups.push_back(AnnealSetup::ising(bench::random_ising(2, 3), 6.0)
                         .with_meter(MeterSpec::qubit_zero(1.3),
                                     InteractionMode::full_qnd));
    for (const auto& s : setups) {
        Vector psi0 = ground_of(model::system_hamiltonian(s, s.t_begin()));
        DensityMatrix rho0{Matrix(psi0 * psi0.adjoint())};
        for (int k = 0; k <= 20; ++k) {
            const double t =
                s.t_begin() + (s.t_end() - s.t_begin()) * k / 20.0;
            DensityMatrix rho = channel::reduced_evolution(s, rho0, t, 800);
            worst = std::max(worst, std::abs(rho.purity() - 1.0));
        }
    }
    report(9, worst <= 1e-8,
           "maximal-eigenvalue meter eigenstate keeps the reduced state pure "
           "throughout",
           worst, 1e-8);
}

}  // namespace

int main() {
    criterion_channel_equivalence();
    criterion_rescaling_law();
    criterion_lz_closed_form();
    criterion_omega_bound();
    criterion_correction_term();
    criterion_gadget();
    criterion_dephasing_signature();
    criterion_purity_optimum();
    return g_failures;
}
