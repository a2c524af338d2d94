#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spindle/pauli.hpp"

namespace spindle {

using Matrix = Eigen::MatrixXcd;

/// Standard reflected Gray code of k rendered as `bits` binary digits,
/// most-significant first.
inline std::string gray_code(uint64_t k, int bits) {
    if (bits < 1 || bits > 63 || k >= (1ull << bits))
        throw std::out_of_range("gray_code: k out of range");
    const uint64_t g = k ^ (k >> 1);
    std::string s(static_cast<size_t>(bits), '0');
    for (int b = 0; b < bits; ++b)
        if (g & (1ull << (bits - 1 - b))) s[static_cast<size_t>(b)] = '1';
    return s;
}

/// Dense d-level operator; units GHz where it enters a Hamiltonian,
/// dimensionless for bare spin/boson operators.
struct QuditOperator {
    int dim = 0;
    Matrix matrix;

    QuditOperator() = default;
    QuditOperator(int d, Matrix m) : dim(d), matrix(std::move(m)) {
        if (dim < 2 || matrix.rows() != dim || matrix.cols() != dim)
            throw std::invalid_argument("QuditOperator: bad dimensions");
    }

    static QuditOperator identity(int d) { return {d, Matrix::Identity(d, d)}; }

    bool is_hermitian(double tol = 1e-12) const {
        return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff() <= tol;
    }
};

/// Reflected-Gray level-to-bitstring map for a d-level system on
/// ceil(log2 d) qubits.
struct CodeMap {
    int dim = 0;
    int qubits = 0;
    std::vector<std::string> level_to_bits;

    static CodeMap gray(int dim) {
        if (dim < 2) throw std::invalid_argument("CodeMap: dim must be >= 2");
        CodeMap m;
        m.dim = dim;
        m.qubits = 1;
        while ((1 << m.qubits) < dim) ++m.qubits;
        for (int k = 0; k < dim; ++k)
            m.level_to_bits.push_back(gray_code(static_cast<uint64_t>(k), m.qubits));
        return m;
    }

    /// Basis index (MSB-first) of a level's codeword.
    uint64_t level_index(int level) const {
        const auto& bits = level_to_bits.at(static_cast<size_t>(level));
        uint64_t idx = 0;
        for (char c : bits) idx = (idx << 1) | static_cast<uint64_t>(c == '1');
        return idx;
    }

    std::vector<uint64_t> used_indices() const {
        std::vector<uint64_t> v;
        for (int k = 0; k < dim; ++k) v.push_back(level_index(k));
        return v;
    }
};

/// Spin-1 matrices in the basis ordered by ascending magnetic quantum number
/// (level 0 <-> m=-1, level 2 <-> m=+1); [Sx,Sy] = i Sz.
struct Spin1 {
    QuditOperator sx, sy, sz;
};

inline Spin1 spin1_operators() {
    const double r = 1.0 / std::sqrt(2.0);
    Matrix sx = Matrix::Zero(3, 3), sy = Matrix::Zero(3, 3), sz = Matrix::Zero(3, 3);
    sx(0, 1) = sx(1, 0) = sx(1, 2) = sx(2, 1) = r;
    const complexd i1(0, 1);
    sy(0, 1) = i1 * r;
    sy(1, 0) = -i1 * r;
    sy(1, 2) = i1 * r;
    sy(2, 1) = -i1 * r;
    sz(0, 0) = -1;
    sz(2, 2) = 1;
    return {{3, sx}, {3, sy}, {3, sz}};
}

struct BosonOperators {
    QuditOperator b, b_dag, number;
};

/// Truncated ladder operators with b[k-1,k] = sqrt(k); number = diag(0..dim-1).
inline BosonOperators boson_operators(int dim) {
    if (dim < 2) throw std::invalid_argument("boson_operators: dim must be >= 2");
    Matrix b = Matrix::Zero(dim, dim), n = Matrix::Zero(dim, dim);
    for (int k = 1; k < dim; ++k) b(k - 1, k) = std::sqrt(double(k));
    for (int k = 0; k < dim; ++k) n(k, k) = k;
    return {{dim, b}, {dim, Matrix(b.adjoint())}, {dim, n}};
}

/// Exact Pauli decomposition of the Gray-embedded, zero-padded operator via
/// Hilbert-Schmidt projection: the coefficient of word P is Tr(P M)/2^q.
/// Unused bitstrings are exact dark states (eigenvalue 0) of the result.
inline PauliSum encode(const QuditOperator& op, const CodeMap& map) {
    if (op.dim != map.dim) throw std::invalid_argument("encode: dimension mismatch");
    const int q = map.qubits;
    const size_t dim2 = size_t(1) << q;

    Matrix padded = Matrix::Zero(static_cast<Eigen::Index>(dim2), static_cast<Eigen::Index>(dim2));
    for (int r = 0; r < op.dim; ++r)
        for (int c = 0; c < op.dim; ++c)
            padded(static_cast<Eigen::Index>(map.level_index(r)),
                   static_cast<Eigen::Index>(map.level_index(c))) = op.matrix(r, c);

    PauliSum out(q);
    const size_t words = size_t(1) << (2 * q);
    for (size_t wcode = 0; wcode < words; ++wcode) {
        PauliWord w(q);
        size_t code = wcode;
        for (int qi = 0; qi < q; ++qi) {
            w.set(qi, static_cast<PauliOp>(code & 3));
            code >>= 2;
        }
        // Tr(P M) using the one-entry-per-column structure of Pauli words.
        uint64_t flip = 0, zmask = 0;
        for (int qi = 0; qi < q; ++qi) {
            const uint64_t bit = 1ull << (q - 1 - qi);
            if ((w.x >> qi) & 1u) flip |= bit;
            if ((w.z >> qi) & 1u) zmask |= bit;
        }
        const int ycount = __builtin_popcountll(w.x & w.z);
        static const complexd kI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        complexd tr = 0;
        for (size_t col = 0; col < dim2; ++col) {
            const complexd entry = padded(static_cast<Eigen::Index>(col ^ flip),
                                          static_cast<Eigen::Index>(col));
            if (entry == complexd(0, 0)) continue;
            const int sign = __builtin_popcountll(col & zmask) & 1;
            tr += (sign ? -kI[ycount & 3] : kI[ycount & 3]) * entry;
        }
        const complexd coeff = tr / double(dim2);
        if (std::abs(coeff) > PauliSum::kDefaultDropTolerance) out.add(coeff, w);
    }
    return out.simplify();
}

/// Dense matrix of the encoded sum on the full 2^q register (test oracle
/// counterpart of encode; also used by small-system checks).
inline Matrix dense_matrix(const PauliSum& h) {
    const int n = h.qubit_count();
    if (n > 14) throw std::invalid_argument("dense_matrix: register too large");
    const size_t dim = size_t(1) << n;
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    static const complexd kI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (const auto& t : h.terms()) {
        uint64_t flip = 0, zmask = 0;
        for (int qi = 0; qi < n; ++qi) {
            const uint64_t bit = 1ull << (n - 1 - qi);
            if ((t.word.x >> qi) & 1u) flip |= bit;
            if ((t.word.z >> qi) & 1u) zmask |= bit;
        }
        const int ycount = __builtin_popcountll(t.word.x & t.word.z);
        const complexd base = t.coeff * kI[ycount & 3];
        for (size_t col = 0; col < dim; ++col) {
            const int sign = __builtin_popcountll(col & zmask) & 1;
            m(static_cast<Eigen::Index>(col ^ flip), static_cast<Eigen::Index>(col)) +=
                sign ? -base : base;
        }
    }
    return m;
}

/// Concatenation of per-site Gray codewords in register order.
inline std::string encode_bitstring_state(const std::vector<int>& level_assignments,
                                          const std::vector<CodeMap>& maps) {
    if (level_assignments.size() != maps.size())
        throw std::invalid_argument("encode_bitstring_state: size mismatch");
    std::string out;
    for (size_t i = 0; i < maps.size(); ++i) {
        const int level = level_assignments[i];
        if (level < 0 || level >= maps[i].dim)
            throw std::out_of_range("encode_bitstring_state: level out of range");
        out += maps[i].level_to_bits[static_cast<size_t>(level)];
    }
    return out;
}

}  // namespace spindle
