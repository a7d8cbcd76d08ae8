#include "qanneal/qcore.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qa::qcore {

namespace {

double max_asymmetry(const Matrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void fix_phases(Matrix& V) {
    for (Eigen::Index k = 0; k < V.cols(); ++k) {
        Eigen::Index imax = 0;
        V.col(k).cwiseAbs().maxCoeff(&imax);
        Complex z = V(imax, k);
        double a = std::abs(z);
        if (a > 0) V.col(k) *= std::conj(z) / a;
    }
}

}  // namespace

HermitianOperator::HermitianOperator(Matrix in, double tol) : m(std::move(in)) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("HermitianOperator: matrix not square");
    double asym = max_asymmetry(m);
    if (asym > tol) {
        std::ostringstream os;
        os << "HermitianOperator: max |A - A^dagger| = " << asym
           << " exceeds tolerance " << tol;
        throw std::invalid_argument(os.str());
    }
}

StateVector::StateVector(Vector in, double tol) : v(std::move(in)) {
    if (std::abs(v.norm() - 1.0) > tol)
        throw std::invalid_argument("StateVector: norm deviates from 1 by " +
                                    std::to_string(std::abs(v.norm() - 1.0)));
}

DensityMatrix::DensityMatrix(Matrix in) : m(std::move(in)) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("DensityMatrix: matrix not square");
    if (max_asymmetry(m) > 1e-12)
        throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(m.trace().real() - 1.0) > 1e-10 ||
        std::abs(m.trace().imag()) > 1e-10)
        throw std::invalid_argument("DensityMatrix: trace deviates from 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw std::invalid_argument("DensityMatrix: negative eigenvalue " +
                                    std::to_string(es.eigenvalues().minCoeff()));
}

double DensityMatrix::purity() const { return (m * m).trace().real(); }

EigenDecomposition eig_unchecked(const Matrix& M) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(M);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition failed to converge");
    EigenDecomposition out{es.eigenvalues(), es.eigenvectors()};
    fix_phases(out.eigenvectors);
    return out;
}

EigenDecomposition hermitian_eig(const HermitianOperator& M) {
    return eig_unchecked(M.m);
}

Matrix expm_unitary_unchecked(const Matrix& H, double dt) {
    EigenDecomposition e = eig_unchecked(H);
    Vector phases(e.eigenvalues.size());
    for (Eigen::Index i = 0; i < phases.size(); ++i)
        phases(i) = std::exp(Complex(0, -e.eigenvalues(i) * dt));
    return e.eigenvectors * phases.asDiagonal() * e.eigenvectors.adjoint();
}

Matrix expm_unitary(const HermitianOperator& H, double dt) {
    if (!std::isfinite(dt))
        throw std::invalid_argument("expm_unitary: dt not finite");
    return expm_unitary_unchecked(H.m, dt);
}

Trajectory propagate(const HamiltonianFn& H_of_t, const StateVector& psi0,
                     double t0, double t1, int steps) {
    if (steps < 1) throw std::invalid_argument("propagate: steps < 1");
    Trajectory out;
    out.steps = steps;
    out.times.reserve(steps + 1);
    out.states.reserve(steps + 1);
    out.times.push_back(t0);
    out.states.push_back(psi0.v);
    Vector psi = psi0.v;
    const double dt = (t1 - t0) / steps;
    for (int k = 0; k < steps; ++k) {
        Matrix H = H_of_t(t0 + (k + 0.5) * dt);
        if (H.rows() != psi.size())
            throw std::invalid_argument("propagate: dimension mismatch");
        EigenDecomposition e = eig_unchecked(H);
        Vector proj = e.eigenvectors.adjoint() * psi;
        for (Eigen::Index i = 0; i < proj.size(); ++i)
            proj(i) *= std::exp(Complex(0, -e.eigenvalues(i) * dt));
        psi = e.eigenvectors * proj;
        out.times.push_back(t0 + (k + 1) * dt);
        out.states.push_back(psi);
    }
    return out;
}

std::vector<Vector> evolve_family(const HamiltonianFn& H_of_s,
                                  const Vector& psi0,
                                  const std::vector<FamilyColumn>& cols,
                                  int steps) {
    if (steps < 1) throw std::invalid_argument("evolve_family: steps < 1");
    const auto ncols = static_cast<Eigen::Index>(cols.size());
    Matrix PSI(psi0.size(), ncols);
    for (Eigen::Index c = 0; c < ncols; ++c) PSI.col(c) = psi0;
    std::vector<double> dteff(cols.size());
    for (size_t c = 0; c < cols.size(); ++c)
        dteff[c] = cols[c].duration * cols[c].scale / steps;
    for (int k = 0; k < steps; ++k) {
        const double s = (k + 0.5) / steps;
        EigenDecomposition e = eig_unchecked(H_of_s(s));
        Matrix P = e.eigenvectors.adjoint() * PSI;
        for (Eigen::Index c = 0; c < ncols; ++c)
            for (Eigen::Index i = 0; i < P.rows(); ++i)
                P(i, c) *= std::exp(Complex(0, -e.eigenvalues(i) * dteff[c]));
        PSI = e.eigenvectors * P;
    }
    std::vector<Vector> out(cols.size());
    for (Eigen::Index c = 0; c < ncols; ++c) out[c] = PSI.col(c);
    return out;
}

Matrix tensor(const Matrix& A, const Matrix& B) {
    Matrix out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) =
                A(i, j) * B;
    return out;
}

Vector tensor(const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

Matrix partial_trace_meter(const Matrix& rho, int system_dim, int meter_dim) {
    if (rho.rows() != static_cast<Eigen::Index>(system_dim) * meter_dim ||
        rho.rows() != rho.cols())
        throw std::invalid_argument("partial_trace_meter: dimension mismatch");
    Matrix out = Matrix::Zero(system_dim, system_dim);
    for (int s = 0; s < system_dim; ++s)
        for (int sp = 0; sp < system_dim; ++sp)
            for (int m = 0; m < meter_dim; ++m)
                out(s, sp) += rho(s * meter_dim + m, sp * meter_dim + m);
    return out;
}

DensityMatrix partial_trace_meter(const DensityMatrix& rho, int system_dim,
                                  int meter_dim) {
    return DensityMatrix(partial_trace_meter(rho.m, system_dim, meter_dim));
}

Matrix pauli(char axis) {
    Matrix m(2, 2);
    switch (axis) {
        case 'x': m << 0, 1, 1, 0; break;
        case 'y': m << 0, Complex(0, -1), Complex(0, 1), 0; break;
        case 'z': m << 1, 0, 0, -1; break;
        default: throw std::invalid_argument("pauli: axis must be x, y or z");
    }
    return m;
}

Matrix identity(int dim) { return Matrix::Identity(dim, dim); }

Matrix pauli_string(int n_qubits,
                    const std::vector<std::pair<int, char>>& factors) {
    std::vector<char> site_axis(n_qubits, 0);
    for (const auto& [site, axis] : factors) {
        if (site < 0 || site >= n_qubits)
            throw std::invalid_argument("pauli_string: site out of range");
        if (site_axis[site] != 0)
            throw std::invalid_argument("pauli_string: duplicate site");
        site_axis[site] = axis;
    }
    Matrix out = Matrix::Identity(1, 1);
    for (int q = 0; q < n_qubits; ++q)
        out = tensor(out, site_axis[q] ? pauli(site_axis[q]) : identity(2));
    return out;
}

}  // namespace qa::qcore
