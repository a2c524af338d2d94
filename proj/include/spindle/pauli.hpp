#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spindle/circuit.hpp"

namespace spindle {

using complexd = std::complex<double>;

enum class PauliOp : uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline char pauli_char(PauliOp p) { return "IXYZ"[static_cast<int>(p)]; }

inline PauliOp pauli_from_char(char c) {
    switch (c) {
        case 'I': return PauliOp::I;
        case 'X': return PauliOp::X;
        case 'Y': return PauliOp::Y;
        case 'Z': return PauliOp::Z;
        default: throw std::invalid_argument(std::string("bad Pauli letter: ") + c);
    }
}

/// A Pauli word over `qubit_count` qubits in the symplectic representation:
/// qubit q carries X iff bit q of `x` is set, Z iff bit q of `z` is set,
/// Y iff both. Identity on all other qubits.
struct PauliWord {
    uint64_t x = 0;
    uint64_t z = 0;
    int qubit_count = 0;

    PauliWord() = default;
    explicit PauliWord(int n) : qubit_count(n) {
        if (n < 0 || n > 63) throw std::invalid_argument("qubit_count out of range");
    }

    static PauliWord from_string(const std::string& s) {
        PauliWord w(static_cast<int>(s.size()));
        for (size_t q = 0; q < s.size(); ++q) w.set(static_cast<int>(q), pauli_from_char(s[q]));
        return w;
    }

    /// Single-factor convenience constructor, e.g. PauliWord::single(n, q, PauliOp::X).
    static PauliWord single(int n, int q, PauliOp p) {
        PauliWord w(n);
        w.set(q, p);
        return w;
    }

    PauliOp op(int q) const {
        int xb = (x >> q) & 1u, zb = (z >> q) & 1u;
        if (xb && zb) return PauliOp::Y;
        if (xb) return PauliOp::X;
        if (zb) return PauliOp::Z;
        return PauliOp::I;
    }

    void set(int q, PauliOp p) {
        if (q < 0 || q >= qubit_count) throw std::out_of_range("qubit index out of range");
        uint64_t bit = 1ull << q;
        x &= ~bit;
        z &= ~bit;
        if (p == PauliOp::X || p == PauliOp::Y) x |= bit;
        if (p == PauliOp::Z || p == PauliOp::Y) z |= bit;
    }

    bool is_identity() const { return x == 0 && z == 0; }
    bool is_diagonal() const { return x == 0; }
    uint64_t support() const { return x | z; }
    int weight() const { return __builtin_popcountll(support()); }

    /// Word with every qubit index shifted by `offset` inside a register of
    /// `total` qubits.
    PauliWord embedded(int offset, int total) const {
        if (offset < 0 || offset + qubit_count > total)
            throw std::out_of_range("embedding does not fit");
        PauliWord w(total);
        w.x = x << offset;
        w.z = z << offset;
        return w;
    }

    /// Spelled with qubit 0 leftmost, e.g. "XIZY".
    std::string str() const {
        std::string s(static_cast<size_t>(qubit_count), 'I');
        for (int q = 0; q < qubit_count; ++q) s[static_cast<size_t>(q)] = pauli_char(op(q));
        return s;
    }

    bool operator==(const PauliWord& o) const {
        return x == o.x && z == o.z && qubit_count == o.qubit_count;
    }
    bool operator!=(const PauliWord& o) const { return !(*this == o); }

    /// Lexicographic order on the spelled word (I < X < Y < Z per qubit).
    bool operator<(const PauliWord& o) const {
        for (int q = 0; q < std::max(qubit_count, o.qubit_count); ++q) {
            auto a = q < qubit_count ? op(q) : PauliOp::I;
            auto b = q < o.qubit_count ? o.op(q) : PauliOp::I;
            if (a != b) return static_cast<int>(a) < static_cast<int>(b);
        }
        return false;
    }
};

/// Product of two Pauli words: a*b = phase * word with phase in {1, i, -1, -i}.
struct WordProduct {
    complexd phase;
    PauliWord word;
};

inline WordProduct multiply(const PauliWord& a, const PauliWord& b) {
    if (a.qubit_count != b.qubit_count)
        throw std::invalid_argument("multiply: mismatched qubit_count");
    // Phase exponent table for i^k, indexed [a][b] over I,X,Y,Z.
    static constexpr int kPhaseExp[4][4] = {
        {0, 0, 0, 0},   // I*
        {0, 0, 1, 3},   // X*: XY=iZ, XZ=-iY
        {0, 3, 0, 1},   // Y*: YX=-iZ, YZ=iX
        {0, 1, 3, 0},   // Z*: ZX=iY, ZY=-iX
    };
    PauliWord out(a.qubit_count);
    out.x = a.x ^ b.x;
    out.z = a.z ^ b.z;
    int k = 0;
    uint64_t both = a.support() & b.support();
    for (uint64_t m = both; m; m &= m - 1) {
        int q = __builtin_ctzll(m);
        k += kPhaseExp[static_cast<int>(a.op(q))][static_cast<int>(b.op(q))];
    }
    static const complexd kI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return {kI[k & 3], out};
}

/// True iff the two words commute qubit-wise: on every qubit the factors are
/// equal or at least one is identity. Stricter than full commutation.
inline bool qwc(const PauliWord& a, const PauliWord& b) {
    if (a.qubit_count != b.qubit_count)
        throw std::invalid_argument("qwc: mismatched qubit_count");
    uint64_t overlap = a.support() & b.support();
    uint64_t differ = (a.x ^ b.x) | (a.z ^ b.z);
    return (overlap & differ) == 0;
}

struct PauliTerm {
    complexd coeff;  // angular-frequency units of GHz when part of a Hamiltonian
    PauliWord word;
};

/// Sparse weighted sum of Pauli words; the universal operator representation.
class PauliSum {
public:
    static constexpr double kDefaultDropTolerance = 1e-12;

    PauliSum() = default;
    explicit PauliSum(int n) : qubit_count_(n) {}

    int qubit_count() const { return qubit_count_; }
    const std::vector<PauliTerm>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    size_t size() const { return terms_.size(); }

    void add(complexd coeff, const PauliWord& word) {
        if (word.qubit_count != qubit_count_)
            throw std::invalid_argument("term qubit_count mismatch");
        terms_.push_back({coeff, word});
        simplified_ = false;
    }

    void add(complexd coeff, const std::string& word) { add(coeff, PauliWord::from_string(word)); }

    PauliSum& operator+=(const PauliSum& o) {
        if (o.qubit_count_ != qubit_count_)
            throw std::invalid_argument("sum qubit_count mismatch");
        terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
        simplified_ = false;
        return *this;
    }

    PauliSum scaled(complexd f) const {
        PauliSum out = *this;
        for (auto& t : out.terms_) t.coeff *= f;
        return out;
    }

    /// Exact operator product, term by term.
    PauliSum product(const PauliSum& o) const {
        if (o.qubit_count_ != qubit_count_)
            throw std::invalid_argument("product qubit_count mismatch");
        PauliSum out(qubit_count_);
        out.terms_.reserve(terms_.size() * o.terms_.size());
        for (const auto& a : terms_)
            for (const auto& b : o.terms_) {
                auto p = multiply(a.word, b.word);
                out.terms_.push_back({a.coeff * b.coeff * p.phase, p.word});
            }
        return out;
    }

    /// Embed onto a wider register with all qubit indices shifted by `offset`.
    PauliSum embedded(int offset, int total) const {
        PauliSum out(total);
        out.terms_.reserve(terms_.size());
        for (const auto& t : terms_) out.terms_.push_back({t.coeff, t.word.embedded(offset, total)});
        out.simplified_ = false;
        return out;
    }

    /// Combines duplicate words, drops coefficients below `drop_tol`, and
    /// orders terms lexicographically on the spelled word. Idempotent.
    PauliSum& simplify(double drop_tol = kDefaultDropTolerance) {
        std::sort(terms_.begin(), terms_.end(), [](const PauliTerm& a, const PauliTerm& b) {
            return a.word < b.word;
        });
        std::vector<PauliTerm> merged;
        merged.reserve(terms_.size());
        for (const auto& t : terms_) {
            if (!merged.empty() && merged.back().word == t.word)
                merged.back().coeff += t.coeff;
            else
                merged.push_back(t);
        }
        terms_.clear();
        for (const auto& t : merged)
            if (std::abs(t.coeff) > drop_tol) terms_.push_back(t);
        simplified_ = true;
        return *this;
    }

    bool is_simplified() const { return simplified_; }

    /// Coefficient of the identity word (0 if absent).
    complexd identity_coefficient() const {
        complexd c = 0;
        for (const auto& t : terms_)
            if (t.word.is_identity()) c += t.coeff;
        return c;
    }

    /// All coefficients real within `tol` (Hermitian sum of self-adjoint words).
    bool is_hermitian(double tol = 1e-9) const {
        for (const auto& t : terms_)
            if (std::abs(t.coeff.imag()) > tol) return false;
        return true;
    }

    std::string to_text() const {
        std::ostringstream out;
        out.precision(17);
        for (const auto& t : terms_)
            out << t.coeff.real() << ' ' << t.coeff.imag() << ' ' << t.word.str() << '\n';
        return out.str();
    }

    static PauliSum from_text(const std::string& text) {
        std::istringstream in(text);
        double re, im;
        std::string word;
        std::vector<std::pair<complexd, std::string>> rows;
        while (in >> re >> im >> word) rows.emplace_back(complexd(re, im), word);
        if (rows.empty()) return PauliSum(0);
        PauliSum out(static_cast<int>(rows.front().second.size()));
        for (auto& [c, w] : rows) out.add(c, w);
        return out;
    }

private:
    int qubit_count_ = 0;
    std::vector<PauliTerm> terms_;
    bool simplified_ = false;
};

/// Sum of |coeff| over all non-identity words. The identity coefficient is
/// excluded; it contributes only a global phase to dynamics.
inline double one_norm(const PauliSum& h) {
    double s = 0;
    for (const auto& t : h.terms())
        if (!t.word.is_identity()) s += std::abs(t.coeff);
    return s;
}

/// Sum of |coeff| over all words, identity included. This is the value the
/// reported Hamiltonian norms and the tau bound are based on.
inline double one_norm_with_identity(const PauliSum& h) {
    double s = 0;
    for (const auto& t : h.terms()) s += std::abs(t.coeff);
    return s;
}

/// Partition of a simplified sum into qubit-wise commuting groups by greedy
/// largest-degree-first coloring of the conflict graph. Deterministic given
/// the canonical term ordering.
inline std::vector<PauliSum> qwc_partition(const PauliSum& h) {
    const auto& terms = h.terms();
    const int n = static_cast<int>(terms.size());
    if (n == 0) return {};

    std::vector<std::vector<int>> conflict(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (!qwc(terms[static_cast<size_t>(i)].word, terms[static_cast<size_t>(j)].word)) {
                conflict[static_cast<size_t>(i)].push_back(j);
                conflict[static_cast<size_t>(j)].push_back(i);
            }

    std::vector<int> order(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        size_t da = conflict[static_cast<size_t>(a)].size();
        size_t db = conflict[static_cast<size_t>(b)].size();
        return da != db ? da > db : a < b;
    });

    std::vector<int> color(static_cast<size_t>(n), -1);
    int colors = 0;
    std::vector<char> used;
    for (int v : order) {
        used.assign(static_cast<size_t>(colors) + 1, 0);
        for (int w : conflict[static_cast<size_t>(v)])
            if (color[static_cast<size_t>(w)] >= 0) used[static_cast<size_t>(color[static_cast<size_t>(w)])] = 1;
        int c = 0;
        while (used[static_cast<size_t>(c)]) ++c;
        color[static_cast<size_t>(v)] = c;
        colors = std::max(colors, c + 1);
    }

    std::vector<PauliSum> groups(static_cast<size_t>(colors), PauliSum(h.qubit_count()));
    for (int i = 0; i < n; ++i)
        groups[static_cast<size_t>(color[static_cast<size_t>(i)])].add(terms[static_cast<size_t>(i)].coeff,
                                                                       terms[static_cast<size_t>(i)].word);
    for (auto& g : groups) g.simplify();
    return groups;
}

/// Single-qubit Clifford layer diagonalizing a QWC group, plus the
/// conjugated all-Z/I sum with unchanged coefficients. Per qubit at most one
/// basis rotation: H for X, (Sdg, H) for Y.
struct DiagonalizedGroup {
    Circuit layer;        // rotates into the Z basis; apply before the diagonal part
    PauliSum diagonal;    // Z/I words only
    PauliSum original;
};

inline DiagonalizedGroup diagonalizing_rotations(const PauliSum& group) {
    const int n = group.qubit_count();
    std::vector<PauliOp> basis(static_cast<size_t>(n), PauliOp::I);
    for (const auto& t : group.terms())
        for (int q = 0; q < n; ++q) {
            PauliOp p = t.word.op(q);
            if (p == PauliOp::I) continue;
            if (basis[static_cast<size_t>(q)] == PauliOp::I)
                basis[static_cast<size_t>(q)] = p;
            else if (basis[static_cast<size_t>(q)] != p)
                throw std::invalid_argument("diagonalizing_rotations: group is not QWC");
        }

    DiagonalizedGroup out{Circuit(n), PauliSum(n), group};
    for (int q = 0; q < n; ++q) {
        if (basis[static_cast<size_t>(q)] == PauliOp::X) {
            out.layer.h(q);
        } else if (basis[static_cast<size_t>(q)] == PauliOp::Y) {
            out.layer.sdg(q);  // H Sdg maps Y to Z
            out.layer.h(q);
        }
    }
    for (const auto& t : group.terms()) {
        PauliWord w(n);
        w.z = t.word.support();
        out.diagonal.add(t.coeff, w);
    }
    out.diagonal.simplify();
    return out;
}

}  // namespace spindle
