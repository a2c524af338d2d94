#pragma once

#include <boost/numeric/odeint.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "spindle/encoding.hpp"
#include "spindle/pauli.hpp"
#include "spindle/statevector.hpp"

namespace spindle {

/// Exact sparse realization of a PauliSum, rows compressed. Entries sharing
/// a (row, col) pair are merged, so the non-zero count per row is bounded by
/// the number of distinct flip masks of the sum.
struct SparseOperator {
    size_t dimension = 0;
    std::vector<size_t> row_start;          // size dimension+1
    std::vector<size_t> col;
    std::vector<complexd> val;

    void matvec(const complexd* x, complexd* y) const {
        for (size_t r = 0; r < dimension; ++r) {
            complexd acc = 0;
            for (size_t k = row_start[r]; k < row_start[r + 1]; ++k) acc += val[k] * x[col[k]];
            y[r] = acc;
        }
    }

    std::vector<complexd> apply(const std::vector<complexd>& x) const {
        std::vector<complexd> y(dimension);
        matvec(x.data(), y.data());
        return y;
    }
};

inline SparseOperator to_sparse(const PauliSum& h) {
    const int n = h.qubit_count();
    if (n > 16) throw std::invalid_argument("to_sparse: qubit_count above the desk-scale guard (16)");
    const size_t dim = size_t(1) << n;

    struct CompiledWord {
        uint64_t flip, zmask;
        complexd base;
    };
    // Group terms by flip mask; phases per column resolve at fill time.
    std::map<uint64_t, std::vector<CompiledWord>> by_flip;
    static const complexd kI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (const auto& t : h.terms()) {
        uint64_t flip = 0, zmask = 0;
        for (int q = 0; q < n; ++q) {
            const uint64_t bit = 1ull << (n - 1 - q);
            if ((t.word.x >> q) & 1u) flip |= bit;
            if ((t.word.z >> q) & 1u) zmask |= bit;
        }
        const int ycount = __builtin_popcountll(t.word.x & t.word.z);
        by_flip[flip].push_back({flip, zmask, t.coeff * kI[ycount & 3]});
    }

    SparseOperator sp;
    sp.dimension = dim;
    sp.row_start.assign(dim + 1, 0);
    const size_t flips = by_flip.size();
    sp.col.reserve(dim * flips);
    sp.val.reserve(dim * flips);
    for (size_t row = 0; row < dim; ++row) {
        sp.row_start[row] = sp.col.size();
        for (const auto& [flip, words] : by_flip) {
            const size_t c = row ^ flip;
            complexd v = 0;
            for (const auto& w : words) {
                const int sign = __builtin_popcountll(c & w.zmask) & 1;
                v += sign ? -w.base : w.base;
            }
            if (v != complexd(0, 0)) {
                sp.col.push_back(c);
                sp.val.push_back(v);
            }
        }
    }
    sp.row_start[dim] = sp.col.size();
    return sp;
}

/// Solves i dpsi/dt = H psi with an adaptive controlled Dormand-Prince
/// stepper at absolute tolerance 1e-5 and relative tolerance 1e-6 (the
/// reference solver settings), sampling the state at the requested times.
class ExactPropagator {
public:
    ExactPropagator(SparseOperator op, double abs_tol = 1e-5, double rel_tol = 1e-6)
        : op_(std::move(op)), abs_tol_(abs_tol), rel_tol_(rel_tol) {}

    std::vector<StateVector> propagate(const StateVector& psi0,
                                       const std::vector<double>& times_ns) const {
        if (psi0.amps.size() != op_.dimension)
            throw std::invalid_argument("exact_propagate: dimension mismatch");
        if (times_ns.empty()) return {};
        for (size_t i = 0; i + 1 < times_ns.size(); ++i)
            if (times_ns[i + 1] <= times_ns[i])
                throw std::invalid_argument("exact_propagate: times must be strictly increasing");
        if (times_ns.front() < 0) throw std::invalid_argument("exact_propagate: negative time");

        using state_type = std::vector<complexd>;
        namespace ode = boost::numeric::odeint;

        auto rhs = [this](const state_type& x, state_type& dxdt, double) {
            dxdt.resize(x.size());
            op_.matvec(x.data(), dxdt.data());
            const complexd mi(0, -1);
            for (auto& v : dxdt) v *= mi;
        };

        std::vector<StateVector> out;
        out.reserve(times_ns.size());
        state_type psi = psi0.amps;
        double t = 0.0;
        auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<state_type>>(abs_tol_, rel_tol_);
        for (double target : times_ns) {
            if (target > t) {
                ode::integrate_adaptive(stepper, rhs, psi, t, target,
                                        std::min(0.01, (target - t) / 2));
                t = target;
            }
            StateVector s(psi0.qubit_count);
            s.amps = psi;
            out.push_back(std::move(s));
        }
        return out;
    }

private:
    SparseOperator op_;
    double abs_tol_, rel_tol_;
};

inline std::vector<StateVector> exact_propagate(const SparseOperator& op, const StateVector& psi0,
                                                const std::vector<double>& times_ns) {
    return ExactPropagator(op).propagate(psi0, times_ns);
}

/// Closed-form propagator by dense eigendecomposition; exact to machine
/// precision, for registers small enough to diagonalize.
class DenseEvolver {
public:
    explicit DenseEvolver(const PauliSum& h) {
        if (h.qubit_count() > 12)
            throw std::invalid_argument("DenseEvolver: register too large to diagonalize");
        Eigen::SelfAdjointEigenSolver<Matrix> es(dense_matrix(h));
        if (es.info() != Eigen::Success) throw std::runtime_error("DenseEvolver: eigensolve failed");
        evals_ = es.eigenvalues();
        evecs_ = es.eigenvectors();
        qubit_count_ = h.qubit_count();
    }

    /// exp(-i H t) |psi>
    StateVector evolve(const StateVector& psi, double t_ns) const {
        if (psi.qubit_count != qubit_count_)
            throw std::invalid_argument("DenseEvolver: qubit_count mismatch");
        Eigen::Map<const Eigen::VectorXcd> v(psi.amps.data(),
                                             static_cast<Eigen::Index>(psi.amps.size()));
        Eigen::VectorXcd w = evecs_.adjoint() * v;
        for (Eigen::Index k = 0; k < w.size(); ++k)
            w(k) *= std::exp(complexd(0, -evals_(k) * t_ns));
        Eigen::VectorXcd res = evecs_ * w;
        StateVector out(qubit_count_);
        for (size_t i = 0; i < out.amps.size(); ++i) out.amps[i] = res(static_cast<Eigen::Index>(i));
        return out;
    }

private:
    int qubit_count_ = 0;
    Eigen::VectorXd evals_;
    Matrix evecs_;
};

/// l1-norm of coherence of a pure state: sum of |rho_ij| off-diagonals in
/// the computational basis, computed as (sum |psi_i|)^2 - sum |psi_i|^2.
inline double l1_coherence_state(const StateVector& s) {
    double abs_sum = 0, sq_sum = 0;
    for (const auto& a : s.amps) {
        const double m = std::abs(a);
        abs_sum += m;
        sq_sum += m * m;
    }
    return abs_sum * abs_sum - sq_sum;
}

/// l1 coherence of the reduced state over the leading `a_qubits` qubits
/// (subsystem A contiguous at the top of the register).
inline double l1_coherence_reduced(const StateVector& s, int a_qubits) {
    const size_t dim_a = size_t(1) << a_qubits;
    const size_t dim_b = s.amps.size() >> a_qubits;
    double total = 0;
    for (size_t i = 0; i < dim_a; ++i)
        for (size_t j = i + 1; j < dim_a; ++j) {
            complexd rho_ij = 0;
            for (size_t b = 0; b < dim_b; ++b)
                rho_ij += s.amps[i * dim_b + b] * std::conj(s.amps[j * dim_b + b]);
            total += 2.0 * std::abs(rho_ij);
        }
    return total;
}

struct OracleSeries {
    std::vector<double> times_ns;
    std::vector<double> autocorrelation;
    std::vector<complexd> z;
    std::vector<double> l1_coherence;
};

/// Direct observable evaluation on exact trajectories: C_Q(t), Z(t) via a
/// second propagation of Mx|psi0>, and the reduced l1 coherence.
inline OracleSeries oracle_observables(const SparseOperator& op, const StateVector& psi0,
                                       const PauliSum& mx, int a_qubits,
                                       const std::vector<double>& times_ns) {
    OracleSeries out;
    out.times_ns = times_ns;
    auto psi_t = exact_propagate(op, psi0, times_ns);
    StateVector eta0 = apply_pauli_sum(psi0, mx);
    const double eta_norm = eta0.norm();
    std::vector<StateVector> eta_t;
    if (eta_norm > 1e-14) {
        StateVector eta0n = eta0;
        for (auto& a : eta0n.amps) a /= eta_norm;
        eta_t = exact_propagate(op, eta0n, times_ns);
    }
    for (size_t k = 0; k < times_ns.size(); ++k) {
        const complexd overlap = dot(psi0, psi_t[k]);
        out.autocorrelation.push_back(std::norm(overlap));
        if (!eta_t.empty()) {
            StateVector mx_eta = apply_pauli_sum(eta_t[k], mx);
            out.z.push_back(eta_norm * dot(psi_t[k], mx_eta));
        } else {
            out.z.push_back(0.0);
        }
        out.l1_coherence.push_back(l1_coherence_reduced(psi_t[k], a_qubits));
    }
    return out;
}

}  // namespace spindle
