#include "qanneal/model.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qa::model {

using qcore::Complex;
using json = nlohmann::json;

QuboProblem::QuboProblem(int n, RealMatrix q) : n_vars(n), Q(std::move(q)) {
    if (Q.rows() != n || Q.cols() != n)
        throw std::invalid_argument("QuboProblem: Q must be n x n");
}

IsingProblem::IsingProblem(int n, RealMatrix j, RealVector hh)
    : n_qubits(n), J(std::move(j)), h(std::move(hh)) {
    if (J.rows() != n || J.cols() != n || h.size() != n)
        throw std::invalid_argument("IsingProblem: shape mismatch");
    if ((J - J.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("IsingProblem: J must be symmetric");
    if (J.diagonal().cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("IsingProblem: J diagonal must be zero");
}

double IsingProblem::energy(int b) const {
    auto spin = [&](int i) { return 1 - 2 * ((b >> (n_qubits - 1 - i)) & 1); };
    double e = 0.0;
    for (int i = 0; i < n_qubits; ++i) {
        for (int j = i + 1; j < n_qubits; ++j)
            e += 2.0 * J(i, j) * spin(i) * spin(j);
        e += h(i) * spin(i);
    }
    for (const auto& t : three_body)
        e += t.c * spin(t.sites[0]) * spin(t.sites[1]) * spin(t.sites[2]);
    return e;
}

Schedule Schedule::linear(double T) {
    if (T <= 0) throw std::invalid_argument("Schedule: T must be positive");
    return Schedule{T, {}};
}

Schedule Schedule::tabulated(double T, std::vector<std::pair<double, double>> pts) {
    if (T <= 0) throw std::invalid_argument("Schedule: T must be positive");
    if (pts.size() < 2) throw std::invalid_argument("Schedule: table too short");
    std::sort(pts.begin(), pts.end());
    if (pts.front().first != 0.0 || pts.back().first != 1.0 ||
        pts.front().second != 0.0 || pts.back().second != 1.0)
        throw std::invalid_argument(
            "Schedule: table must span (0,0) to (1,1) exactly");
    for (size_t i = 1; i < pts.size(); ++i)
        if (pts[i].second < pts[i - 1].second)
            throw std::invalid_argument("Schedule: table not monotone");
    return Schedule{T, std::move(pts)};
}

double Schedule::path(double u) const {
    if (path_table.empty()) return u;
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    auto it = std::upper_bound(
        path_table.begin(), path_table.end(), u,
        [](double val, const auto& p) { return val < p.first; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double w = (u - lo.first) / (hi.first - lo.first);
    return lo.second + w * (hi.second - lo.second);
}

double Schedule::dpath(double u) const {
    if (path_table.empty()) return 1.0;
    u = std::clamp(u, 0.0, 1.0);
    auto it = std::upper_bound(
        path_table.begin(), path_table.end(), u,
        [](double val, const auto& p) { return val < p.first; });
    if (it == path_table.begin()) ++it;
    if (it == path_table.end()) --it;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    return (hi.second - lo.second) / (hi.first - lo.first);
}

double Schedule::f(double t) const { return path(t / T); }
double Schedule::dfdt(double t) const { return dpath(t / T) / T; }

MeterSpec MeterSpec::qubit(double x0, double omega, const Vector& initial) {
    if (initial.size() != 2)
        throw std::invalid_argument("MeterSpec: qubit initial state must be 2d");
    Vector psi = initial / initial.norm();
    MeterSpec m;
    m.meter_dim = 2;
    m.X_M = x0 * qcore::pauli('z');
    m.H_M = omega * qcore::pauli('x');
    m.initial_state = psi * psi.adjoint();
    m.x0 = x0;
    m.omega = omega;
    return m;
}

MeterSpec MeterSpec::qubit_zero(double x0) {
    Vector v(2);
    v << 1, 0;
    return qubit(x0, 0.0, v);
}

MeterSpec MeterSpec::qubit_plus(double x0) {
    Vector v(2);
    v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    return qubit(x0, 0.0, v);
}

double AnnealSetup::t_begin() const {
    if (std::holds_alternative<LzProblem>(problem))
        return -10.0 / std::get<LzProblem>(problem).v;
    return 0.0;
}

double AnnealSetup::t_end() const { return t_begin() + schedule.T; }

int AnnealSetup::system_dim() const {
    if (std::holds_alternative<LzProblem>(problem)) return 2;
    return 1 << std::get<IsingProblem>(problem).n_qubits;
}

int AnnealSetup::total_dim() const {
    return system_dim() * (meter && mode != InteractionMode::none
                               ? meter->meter_dim
                               : 1);
}

AnnealSetup AnnealSetup::lz(double v, double g) {
    if (v <= 0) throw std::invalid_argument("lz: v must be positive");
    AnnealSetup s{LzProblem{v, g}, Schedule::linear(20.0 / v), std::nullopt,
                  InteractionMode::none};
    return s;
}

AnnealSetup AnnealSetup::ising(IsingProblem p, double T) {
    return AnnealSetup{std::move(p), Schedule::linear(T), std::nullopt,
                       InteractionMode::none};
}

AnnealSetup AnnealSetup::with_duration(double T) const {
    AnnealSetup s = *this;
    s.schedule.T = T;
    if (std::holds_alternative<LzProblem>(s.problem))
        std::get<LzProblem>(s.problem).v = 20.0 / T;
    return s;
}

AnnealSetup AnnealSetup::with_meter(MeterSpec m, InteractionMode md) const {
    if (md == InteractionMode::constrained &&
        !std::holds_alternative<IsingProblem>(problem))
        throw std::invalid_argument(
            "constrained coupling requires an Ising problem (needs a final "
            "Hamiltonian)");
    AnnealSetup s = *this;
    s.meter = std::move(m);
    s.mode = md;
    return s;
}

IsingProblem qubo_to_ising(const QuboProblem& q) {
    const int n = q.n_vars;
    RealMatrix S = 0.5 * (q.Q + q.Q.transpose());
    RealMatrix J = RealMatrix::Zero(n, n);
    RealVector h = RealVector::Zero(n);
    double offset = 0.25 * S.sum() + 0.25 * S.diagonal().sum();
    for (int i = 0; i < n; ++i) {
        h(i) = 0.5 * S.row(i).sum();
        for (int j = 0; j < n; ++j)
            if (i != j) J(i, j) = 0.25 * S(i, j);
    }
    IsingProblem p(n, J, h);
    p.offset = offset;
    return p;
}

RealVector ising_diagonal(const IsingProblem& p) {
    const int dim = 1 << p.n_qubits;
    RealVector d(dim);
    for (int b = 0; b < dim; ++b) d(b) = p.energy(b);
    return d;
}

Matrix ising_hamiltonian(const IsingProblem& p) {
    return ising_diagonal(p).cast<Complex>().asDiagonal();
}

Matrix transverse_hamiltonian(int n) {
    const int dim = 1 << n;
    Matrix H = Matrix::Zero(dim, dim);
    // sum of sigma_x^i: couples b to b with bit i flipped
    for (int b = 0; b < dim; ++b)
        for (int i = 0; i < n; ++i) H(b ^ (1 << (n - 1 - i)), b) += 1.0;
    return H;
}

Matrix system_hamiltonian(const AnnealSetup& s, double t) {
    if (std::holds_alternative<LzProblem>(s.problem)) {
        const auto& lz = std::get<LzProblem>(s.problem);
        return (lz.v * t / 2.0) * qcore::pauli('z') +
               (lz.g / 2.0) * qcore::pauli('x');
    }
    const auto& p = std::get<IsingProblem>(s.problem);
    const double f = s.schedule.f(t - s.t_begin());
    return (1.0 - f) * transverse_hamiltonian(p.n_qubits) +
           f * ising_hamiltonian(p);
}

Matrix total_hamiltonian(const AnnealSetup& s, double t) {
    Matrix Hs = system_hamiltonian(s, t);
    if (s.mode == InteractionMode::none || !s.meter) return Hs;
    const auto& m = *s.meter;
    Matrix Im = qcore::identity(m.meter_dim);
    Matrix Is = qcore::identity(static_cast<int>(Hs.rows()));
    if (s.mode == InteractionMode::full_qnd)
        return qcore::tensor(Hs, Im) + qcore::tensor(Hs, m.X_M) +
               qcore::tensor(Is, m.H_M);
    if (!std::holds_alternative<IsingProblem>(s.problem))
        throw std::invalid_argument(
            "constrained coupling requires an Ising problem");
    Matrix Hf = ising_hamiltonian(std::get<IsingProblem>(s.problem));
    const double f = s.schedule.f(t - s.t_begin());
    return qcore::tensor(Hs, Im) + f * qcore::tensor(Hf, m.X_M) +
           qcore::tensor(Is, m.H_M);
}

Matrix cd_hamiltonian_lz(double v, double g, double t) {
    if (g == 0.0 && t == 0.0)
        throw std::invalid_argument(
            "cd_hamiltonian_lz: dtheta/dt singular at g = 0, t = 0");
    const double thetadot = -g * v / (v * v * t * t + g * g);
    return (v * t / 2.0) * qcore::pauli('z') + (g / 2.0) * qcore::pauli('x') +
           (thetadot / 2.0) * qcore::pauli('y');
}

Matrix gap_targeting_interaction(const qcore::EigenDecomposition& eig) {
    if (eig.eigenvalues.size() < 2)
        throw std::invalid_argument("gap_targeting_interaction: need >= 2 levels");
    const double gap = eig.eigenvalues(1) - eig.eigenvalues(0);
    if (gap < 1e-9)
        throw std::invalid_argument(
            "gap_targeting_interaction: ground state degenerate (gap " +
            std::to_string(gap) + ")");
    const Vector& p0 = eig.eigenvectors.col(0);
    const Vector& p1 = eig.eigenvectors.col(1);
    return gap * (p1 * p1.adjoint() - p0 * p0.adjoint());
}

IsingProblem gadget_decompose(const IsingProblem& p) {
    const int extra = static_cast<int>(p.three_body.size());
    const int n = p.n_qubits + extra;
    RealMatrix J = RealMatrix::Zero(n, n);
    RealVector h = RealVector::Zero(n);
    J.topLeftCorner(p.n_qubits, p.n_qubits) = p.J;
    h.head(p.n_qubits) = p.h;
    IsingProblem out(n, J, h);
    out.offset = p.offset;
    int a = p.n_qubits;
    for (const auto& term : p.three_body) {
        const double c = term.c;
        auto add_pair = [&](int i, int j, double coupling) {
            // operator convention carries 2*J_ij, so J gets coupling/2
            out.J(i, j) += 0.5 * coupling;
            out.J(j, i) += 0.5 * coupling;
        };
        const auto& st = term.sites;
        add_pair(st[0], st[1], c);
        add_pair(st[1], st[2], c);
        add_pair(st[0], st[2], c);
        for (int i : st) {
            add_pair(i, a, -2.0 * c);
            out.h(i) += c;
        }
        out.h(a) += -2.0 * c;
        out.ancilla_map.emplace_back(term, a);
        ++a;
    }
    return out;
}

IsingProblem problem_from_json(const std::string& text) {
    json j = json::parse(text);
    const int n = j.at("n").get<int>();
    if (j.contains("Q")) {
        auto rows = j.at("Q").get<std::vector<std::vector<double>>>();
        RealMatrix Q(n, n);
        if (static_cast<int>(rows.size()) != n)
            throw std::invalid_argument("problem_from_json: Q row count != n");
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(rows[i].size()) != n)
                throw std::invalid_argument("problem_from_json: Q not square");
            for (int k = 0; k < n; ++k) Q(i, k) = rows[i][k];
        }
        return qubo_to_ising(QuboProblem(n, Q));
    }
    auto jrows = j.at("J").get<std::vector<std::vector<double>>>();
    auto hvec = j.at("h").get<std::vector<double>>();
    RealMatrix J(n, n);
    RealVector h(n);
    if (static_cast<int>(jrows.size()) != n ||
        static_cast<int>(hvec.size()) != n)
        throw std::invalid_argument("problem_from_json: J/h shape mismatch");
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(jrows[i].size()) != n)
            throw std::invalid_argument("problem_from_json: J not square");
        for (int k = 0; k < n; ++k) J(i, k) = jrows[i][k];
        h(i) = hvec[i];
    }
    IsingProblem p(n, J, h);
    if (j.contains("three_body")) {
        for (const auto& t : j.at("three_body")) {
            auto sites = t.at("sites").get<std::vector<int>>();
            if (sites.size() != 3 || sites[0] == sites[1] ||
                sites[1] == sites[2] || sites[0] == sites[2])
                throw std::invalid_argument(
                    "problem_from_json: three_body needs 3 distinct sites");
            for (int s : sites)
                if (s < 0 || s >= n)
                    throw std::invalid_argument(
                        "problem_from_json: three_body site out of range");
            p.three_body.push_back(
                ThreeBodyTerm{{sites[0], sites[1], sites[2]},
                              t.at("c").get<double>()});
        }
    }
    return p;
}

std::string problem_to_json(const IsingProblem& p) {
    json j;
    j["n"] = p.n_qubits;
    std::vector<std::vector<double>> rows(p.n_qubits,
                                          std::vector<double>(p.n_qubits));
    for (int i = 0; i < p.n_qubits; ++i)
        for (int k = 0; k < p.n_qubits; ++k) rows[i][k] = p.J(i, k);
    j["J"] = rows;
    std::vector<double> h(p.h.data(), p.h.data() + p.h.size());
    j["h"] = h;
    json tb = json::array();
    for (const auto& t : p.three_body)
        tb.push_back({{"sites", {t.sites[0], t.sites[1], t.sites[2]}},
                      {"c", t.c}});
    j["three_body"] = tb;
    return j.dump(2) + "\n";
}

}  // namespace qa::model
