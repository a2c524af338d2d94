// Test-only dense oracles: Kronecker-product realizations of Pauli words,
// direct gate-matrix circuit products, and Hermitian matrix exponentials.
// Independent of the statevector fast paths they are used to check.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <vector>

#include "spindle/circuit.hpp"
#include "spindle/pauli.hpp"

namespace spindle::testing {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using complexd = std::complex<double>;

inline Matrix pauli_matrix(PauliOp p) {
    Matrix m(2, 2);
    const complexd i1(0, 1);
    switch (p) {
        case PauliOp::I: m << 1, 0, 0, 1; break;
        case PauliOp::X: m << 0, 1, 1, 0; break;
        case PauliOp::Y: m << 0, -i1, i1, 0; break;
        case PauliOp::Z: m << 1, 0, 0, -1; break;
    }
    return m;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Kronecker product with qubit 0 as the leftmost (most significant) factor.
inline Matrix word_matrix(const PauliWord& w) {
    Matrix m = Matrix::Identity(1, 1);
    for (int q = 0; q < w.qubit_count; ++q) m = kron(m, pauli_matrix(w.op(q)));
    return m;
}

inline Matrix sum_matrix(const PauliSum& h) {
    const Eigen::Index dim = Eigen::Index(1) << h.qubit_count();
    Matrix m = Matrix::Zero(dim, dim);
    for (const auto& t : h.terms()) m += t.coeff * word_matrix(t.word);
    return m;
}

inline Matrix gate_matrix(const Gate& g, int n) {
    const Eigen::Index dim = Eigen::Index(1) << n;
    const complexd i1(0, 1);
    Matrix local(2, 2);
    switch (g.kind) {
        case GateKind::H: local << 1, 1, 1, -1; local /= std::sqrt(2.0); break;
        case GateKind::S: local << 1, 0, 0, i1; break;
        case GateKind::Sdg: local << 1, 0, 0, -i1; break;
        case GateKind::X: local = pauli_matrix(PauliOp::X); break;
        case GateKind::Y: local = pauli_matrix(PauliOp::Y); break;
        case GateKind::Z: local = pauli_matrix(PauliOp::Z); break;
        case GateKind::Rx:
            local << std::cos(g.angle / 2), -i1 * std::sin(g.angle / 2),
                     -i1 * std::sin(g.angle / 2), std::cos(g.angle / 2);
            break;
        case GateKind::Ry:
            local << std::cos(g.angle / 2), -std::sin(g.angle / 2),
                     std::sin(g.angle / 2), std::cos(g.angle / 2);
            break;
        case GateKind::Rz:
            local << std::exp(-i1 * g.angle / 2.0), 0, 0, std::exp(i1 * g.angle / 2.0);
            break;
        case GateKind::CNOT: {
            Matrix m = Matrix::Zero(dim, dim);
            for (Eigen::Index col = 0; col < dim; ++col) {
                const uint64_t cbit = 1ull << (n - 1 - g.q0);
                const uint64_t tbit = 1ull << (n - 1 - g.q1);
                const uint64_t row = (uint64_t(col) & cbit) ? (uint64_t(col) ^ tbit) : uint64_t(col);
                m(Eigen::Index(row), col) = 1;
            }
            return m;
        }
    }
    if (g.controlled) {
        Matrix m = Matrix::Identity(dim, dim);
        const uint64_t cbit = 1ull << (n - 1 - g.q0);
        const uint64_t tbit = 1ull << (n - 1 - g.q1);
        for (Eigen::Index col = 0; col < dim; ++col) {
            if (!(uint64_t(col) & cbit)) continue;
            m(col, col) = 0;
        }
        for (Eigen::Index col = 0; col < dim; ++col) {
            if (!(uint64_t(col) & cbit)) continue;
            const int b = (uint64_t(col) & tbit) ? 1 : 0;
            const Eigen::Index other = Eigen::Index(uint64_t(col) ^ tbit);
            m(col, col) = local(b, b);
            m(other, col) = local(1 - b, b);
        }
        return m;
    }
    // Single-qubit gate expanded on the full register.
    Matrix m = Matrix::Zero(dim, dim);
    const uint64_t bit = 1ull << (n - 1 - g.q0);
    for (Eigen::Index col = 0; col < dim; ++col) {
        const int b = (uint64_t(col) & bit) ? 1 : 0;
        m(col, col) = local(b, b);
        m(Eigen::Index(uint64_t(col) ^ bit), col) = local(1 - b, b);
    }
    return m;
}

inline Matrix circuit_matrix(const Circuit& c) {
    const Eigen::Index dim = Eigen::Index(1) << c.qubit_count;
    Matrix m = Matrix::Identity(dim, dim);
    for (const auto& g : c.gates) m = gate_matrix(g, c.qubit_count) * m;
    return std::exp(complexd(0, c.global_phase)) * m;
}

/// exp(-i t H) for Hermitian H by eigendecomposition.
inline Matrix expm_herm(const Matrix& h, double t) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Matrix d = Matrix::Zero(h.rows(), h.cols());
    for (Eigen::Index k = 0; k < h.rows(); ++k)
        d(k, k) = std::exp(complexd(0, -es.eigenvalues()(k) * t));
    return es.eigenvectors() * d * es.eigenvectors().adjoint();
}

/// Operator distance up to global phase: min_phi || A - e^{i phi} B ||.
inline double distance_up_to_phase(const Matrix& a, const Matrix& b) {
    const complexd tr = (b.adjoint() * a).trace();
    const complexd phase = std::abs(tr) > 1e-14 ? tr / std::abs(tr) : complexd(1, 0);
    return (a - phase * b).norm();
}

inline PauliSum random_pauli_sum(int qubits, int terms, uint64_t seed, bool hermitian = true) {
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<int> opdist(0, 3);
    std::uniform_real_distribution<double> cdist(-1.0, 1.0);
    PauliSum h(qubits);
    for (int t = 0; t < terms; ++t) {
        PauliWord w(qubits);
        for (int q = 0; q < qubits; ++q) w.set(q, static_cast<PauliOp>(opdist(gen)));
        h.add(hermitian ? complexd(cdist(gen), 0) : complexd(cdist(gen), cdist(gen)), w);
    }
    return h.simplify();
}

inline Matrix random_hermitian(int dim, uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = complexd(dist(gen), dist(gen));
    return 0.5 * (m + Matrix(m.adjoint()));
}

}  // namespace spindle::testing
