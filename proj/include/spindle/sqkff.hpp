#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spindle/circuit.hpp"
#include "spindle/oracle.hpp"
#include "spindle/parallel.hpp"
#include "spindle/pauli.hpp"
#include "spindle/statevector.hpp"
#include "spindle/trotter.hpp"

namespace spindle {

/// Raised when the projected problem degenerates (e.g. empty retained
/// subspace); the CLI maps it to the numerical-failure exit code.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Krylov fast-forwarding configuration. `trotter_steps` is the step count
/// n for the longest evolution (M-1)*tau; element evolutions use
/// ceil(n/(M-1)) steps per tau so that U(k tau) = U(tau)^k holds exactly
/// and the Toeplitz fill stays consistent with the group property.
struct KrylovConfig {
    int M = 10;
    int R = 1;
    double tau_ns = 0.0;
    double h_norm = 0.0;  // reported Hamiltonian 1-norm the tau bound refers to
    double s_threshold = 1e-8;
    ShotPlan element_plan = ShotPlan::exact();
    int trotter_steps = 9;
    bool exact_evolution = false;
    bool keep_states = true;

    static double default_tau(double h_norm) { return std::numbers::pi / (10.0 * h_norm); }

    int steps_per_tau() const {
        const int window = std::max(1, M - 1);
        return std::max(1, (trotter_steps + window - 1) / window);
    }

    double epsilon_t() const {
        return trotter_error_bound(h_norm, (M - 1) * tau_ns, trotter_steps);
    }

    void validate() const {
        if (M < 1 || R < 1) throw std::invalid_argument("KrylovConfig: M and R must be >= 1");
        if (tau_ns <= 0) throw std::invalid_argument("KrylovConfig: tau must be positive");
        if (h_norm > 0 && tau_ns > std::numbers::pi / (2.0 * h_norm) + 1e-15)
            throw std::invalid_argument("KrylovConfig: tau exceeds pi/(2 ||H||_1)");
        if (trotter_steps < 1) throw std::invalid_argument("KrylovConfig: trotter_steps must be >= 1");
    }
};

/// A Krylov reference: the initial-state preparation circuit, a bitstring,
/// or an explicitly prepared state (used for the normalized Mx|psi0>).
struct Reference {
    enum class Kind { circuit, bitstring, state };
    Kind kind = Kind::bitstring;
    Circuit prep;
    std::string bits;
    StateVector state;

    static Reference from_circuit(const Circuit& c) {
        Reference r;
        r.kind = Kind::circuit;
        r.prep = c;
        return r;
    }
    static Reference from_bitstring(const std::string& b) {
        Reference r;
        r.kind = Kind::bitstring;
        r.bits = b;
        return r;
    }
    static Reference from_state(const StateVector& s) {
        Reference r;
        r.kind = Kind::state;
        r.state = s;
        return r;
    }

    StateVector make_state(int qubit_count) const {
        switch (kind) {
            case Kind::circuit:
                return apply_circuit(StateVector::zero_state(qubit_count), prep);
            case Kind::bitstring:
                if (static_cast<int>(bits.size()) != qubit_count)
                    throw std::invalid_argument("reference bitstring length mismatch");
                return StateVector::from_bitstring(bits);
            case Kind::state:
                if (state.qubit_count != qubit_count)
                    throw std::invalid_argument("reference state qubit_count mismatch");
                return state;
        }
        throw std::logic_error("unreachable");
    }

    std::string id() const {
        switch (kind) {
            case Kind::circuit: return "psi0";
            case Kind::bitstring: return "b:" + bits;
            case Kind::state: return "state";
        }
        return "?";
    }
};

struct ReferenceSet {
    std::vector<Reference> entries;        // first = initial state
    std::vector<double> probabilities;     // observed at selection time
    int padded = 0;                        // references filled from unseen bitstrings
};

/// Applies e^{-i tau H}, either through the compiled Trotter step or the
/// exact propagator.
class TauEvolver {
public:
    TauEvolver(const PauliSum& h, double tau_ns, int steps_per_tau, bool exact)
        : qubit_count_(h.qubit_count()), tau_ns_(tau_ns) {
        if (exact) {
            if (qubit_count_ <= 12) {
                dense_ = std::make_unique<DenseEvolver>(h);
            } else {
                sparse_ = std::make_unique<ExactPropagator>(to_sparse(h));
                sparse_back_ = std::make_unique<ExactPropagator>(to_sparse(h.scaled(-1.0)));
            }
        } else {
            circuit_ = compile_evolution(h, tau_ns, steps_per_tau, true);
            inverse_ = circuit_.inverse();
        }
    }

    StateVector forward(const StateVector& s) const { return step(s, tau_ns_); }
    StateVector backward(const StateVector& s) const { return step(s, -tau_ns_); }

private:
    StateVector step(const StateVector& s, double dt) const {
        if (dense_) return dense_->evolve(s, dt);
        if (sparse_) {
            // exp(+i|dt|H) = exp(-i|dt|(-H)), so backward steps run the
            // negated operator forward.
            if (dt >= 0) return sparse_->propagate(s, {dt}).front();
            return sparse_back_->propagate(s, {-dt}).front();
        }
        StateVector out = s;
        apply_circuit_inplace(out, dt >= 0 ? circuit_ : inverse_);
        return out;
    }

    int qubit_count_;
    double tau_ns_;
    Circuit circuit_;
    Circuit inverse_;
    std::unique_ptr<DenseEvolver> dense_;
    std::unique_ptr<ExactPropagator> sparse_;
    std::unique_ptr<ExactPropagator> sparse_back_;
};

/// Chooses the R-1 bitstrings with the largest measurement probabilities of
/// the state e^{-i(M-1)tau H}|psi0>, ties broken by ascending bitstring
/// value; pads from ascending unseen bitstrings when the distribution has
/// fewer outcomes.
inline ReferenceSet select_references(const PauliSum& h, const Reference& psi0,
                                      const KrylovConfig& cfg) {
    cfg.validate();
    const int n = h.qubit_count();
    if (cfg.R > (1 << n)) throw std::invalid_argument("select_references: R exceeds basis size");

    ReferenceSet out;
    out.entries.push_back(psi0);
    out.probabilities.push_back(1.0);
    if (cfg.R == 1) return out;

    TauEvolver evolver(h, cfg.tau_ns, cfg.steps_per_tau(), cfg.exact_evolution);
    StateVector s = psi0.make_state(n);
    for (int k = 0; k < cfg.M - 1; ++k) s = evolver.forward(s);

    struct Outcome {
        uint64_t index;
        double weight;
    };
    std::vector<Outcome> outcomes;
    if (cfg.element_plan.mode == ShotPlan::Mode::exact) {
        for (size_t i = 0; i < s.amps.size(); ++i) {
            const double p = std::norm(s.amps[i]);
            if (p > 1e-15) outcomes.push_back({i, p});
        }
    } else {
        auto counts = sample_bitstrings(s, cfg.element_plan.shots,
                                        rng::derive_seed(cfg.element_plan.seed, "select"));
        for (const auto& [bits, c] : counts) {
            uint64_t idx = 0;
            for (char ch : bits) idx = (idx << 1) | static_cast<uint64_t>(ch == '1');
            outcomes.push_back({idx, double(c)});
        }
    }
    std::sort(outcomes.begin(), outcomes.end(), [](const Outcome& a, const Outcome& b) {
        return a.weight != b.weight ? a.weight > b.weight : a.index < b.index;
    });

    std::vector<char> taken(s.amps.size(), 0);
    for (const auto& o : outcomes) {
        if (static_cast<int>(out.entries.size()) >= cfg.R) break;
        out.entries.push_back(Reference::from_bitstring(index_to_bitstring(o.index, n)));
        out.probabilities.push_back(o.weight);
        taken[o.index] = 1;
    }
    // Pad from ascending unseen bitstrings if the distribution ran out.
    for (uint64_t i = 0; static_cast<int>(out.entries.size()) < cfg.R; ++i) {
        if (taken[i]) continue;
        out.entries.push_back(Reference::from_bitstring(index_to_bitstring(i, n)));
        out.probabilities.push_back(0.0);
        ++out.padded;
    }
    return out;
}

/// Assembled MR x MR overlap and Hamiltonian matrices, block-indexed with
/// basis index = r*M + m. The phi states are retained for amplitude-table
/// consumers when `keep_states` is set.
struct KrylovMatrices {
    Eigen::MatrixXcd s;
    Eigen::MatrixXcd h;
    int m = 0;
    int r = 0;
    long evaluated_s = 0;
    long evaluated_h = 0;
    std::vector<std::vector<StateVector>> phi;  // phi[r][m]

    int index(int m_idx, int r_idx) const { return r_idx * m + m_idx; }
};

namespace detail {

inline complexd element_amplitude(const StateVector& bra, const StateVector& ket,
                                  const ShotPlan& plan, const std::string& id) {
    return hadamard_test_amplitude(bra, ket, plan.for_task(id));
}

/// <bra| H U |ket> with the LCU reduction in sampled mode: one Hadamard test
/// per Pauli term of H.
inline complexd element_h_amplitude(const StateVector& bra, const StateVector& uket,
                                    const PauliSum& h, const ShotPlan& plan,
                                    const std::string& id) {
    if (plan.mode == ShotPlan::Mode::exact) return dot(bra, apply_pauli_sum(uket, h));
    complexd acc = 0;
    int j = 0;
    for (const auto& t : h.terms()) {
        StateVector pket(uket.qubit_count);
        accumulate_pauli_word(uket, t.word, 1.0, pket);
        acc += t.coeff *
               hadamard_test_amplitude(bra, pket, plan.for_task(id + "/t" + std::to_string(j)));
        ++j;
    }
    return acc;
}

}  // namespace detail

/// Evaluates only the distinct Toeplitz generators -- k in [0, M) on the
/// diagonal blocks (Hermitian fill below) and k in (-M, M) for each
/// unordered reference pair -- and fills the full arrays by the Toeplitz
/// rule S_{m'r',mr} = G_{r'r}(m - m').
inline KrylovMatrices assemble(const PauliSum& h, const ReferenceSet& refs,
                               const KrylovConfig& cfg) {
    cfg.validate();
    const int n = h.qubit_count();
    const int M = cfg.M, R = static_cast<int>(refs.entries.size());
    if (R != cfg.R) throw std::invalid_argument("assemble: reference count mismatch");

    TauEvolver evolver(h, cfg.tau_ns, cfg.steps_per_tau(), cfg.exact_evolution);

    // phi[r][m] = U(tau)^m |r>, built incrementally per reference.
    std::vector<std::vector<StateVector>> phi(static_cast<size_t>(R));
    parallel_for(static_cast<size_t>(R), [&](size_t r) {
        phi[r].reserve(static_cast<size_t>(M));
        phi[r].push_back(refs.entries[r].make_state(n));
        for (int m = 1; m < M; ++m) phi[r].push_back(evolver.forward(phi[r].back()));
    });

    // H phi[r][m], needed for the H-matrix generators.
    std::vector<std::vector<StateVector>> hphi(static_cast<size_t>(R),
                                               std::vector<StateVector>(static_cast<size_t>(M)));
    parallel_for(static_cast<size_t>(R) * static_cast<size_t>(M), [&](size_t idx) {
        const size_t r = idx / static_cast<size_t>(M), m = idx % static_cast<size_t>(M);
        hphi[r][m] = apply_pauli_sum(phi[r][m], h);
    });

    KrylovMatrices out;
    out.m = M;
    out.r = R;
    const int dim = M * R;
    out.s = Eigen::MatrixXcd::Zero(dim, dim);
    out.h = Eigen::MatrixXcd::Zero(dim, dim);

    auto ref_id = [&](int a) { return refs.entries[static_cast<size_t>(a)].id(); };

    // Generators G^s_{ab}(k) = <a|U^k|b>, G^h_{ab}(k) = <a|H U^k|b>.
    // Negative k reuses U(-tau) = U(tau)^dagger exactly:
    //   <a|U^{-k}|b> = <U^k a|b>,  <a|H U^{-k}|b> = <U^k a|H b>.
    auto gen_s = [&](int a, int b, int k, const std::string& id) {
        return k >= 0 ? detail::element_amplitude(phi[size_t(a)][0], phi[size_t(b)][size_t(k)],
                                                  cfg.element_plan, id)
                      : detail::element_amplitude(phi[size_t(a)][size_t(-k)], phi[size_t(b)][0],
                                                  cfg.element_plan, id);
    };
    auto gen_h = [&](int a, int b, int k, const std::string& id) {
        if (cfg.element_plan.mode == ShotPlan::Mode::exact)
            return k >= 0 ? dot(phi[size_t(a)][0], hphi[size_t(b)][size_t(k)])
                          : dot(phi[size_t(a)][size_t(-k)], hphi[size_t(b)][0]);
        return k >= 0 ? detail::element_h_amplitude(phi[size_t(a)][0], phi[size_t(b)][size_t(k)], h,
                                                    cfg.element_plan, id)
                      : detail::element_h_amplitude(phi[size_t(a)][size_t(-k)], phi[size_t(b)][0], h,
                                                    cfg.element_plan, id);
    };

    auto fill_block = [&](int a, int b, const std::vector<complexd>& gs,
                          const std::vector<complexd>& gh, int k0) {
        // gs[i] = G_ab(k0 + i)
        for (int mp = 0; mp < M; ++mp)
            for (int m = 0; m < M; ++m) {
                const int k = m - mp;
                if (k < k0 || k - k0 >= static_cast<int>(gs.size())) continue;
                out.s(out.index(mp, a), out.index(m, b)) = gs[size_t(k - k0)];
                out.h(out.index(mp, a), out.index(m, b)) = gh[size_t(k - k0)];
            }
    };

    for (int a = 0; a < R; ++a) {
        std::vector<complexd> gs(static_cast<size_t>(M)), gh(static_cast<size_t>(M));
        for (int k = 0; k < M; ++k) {
            const std::string id = "S/" + ref_id(a) + "/" + ref_id(a) + "/k" + std::to_string(k);
            gs[size_t(k)] = gen_s(a, a, k, id);
            gh[size_t(k)] = gen_h(a, a, k, "H/" + id);
        }
        out.evaluated_s += M;
        out.evaluated_h += M;
        std::vector<complexd> full_s(static_cast<size_t>(2 * M - 1)), full_h(full_s.size());
        for (int k = -(M - 1); k <= M - 1; ++k) {
            full_s[size_t(k + M - 1)] = k >= 0 ? gs[size_t(k)] : std::conj(gs[size_t(-k)]);
            full_h[size_t(k + M - 1)] = k >= 0 ? gh[size_t(k)] : std::conj(gh[size_t(-k)]);
        }
        fill_block(a, a, full_s, full_h, -(M - 1));
    }

    for (int a = 0; a < R; ++a)
        for (int b = a + 1; b < R; ++b) {
            std::vector<complexd> gs(static_cast<size_t>(2 * M - 1)), gh(gs.size());
            for (int k = -(M - 1); k <= M - 1; ++k) {
                const std::string id = "S/" + ref_id(a) + "/" + ref_id(b) + "/k" + std::to_string(k);
                gs[size_t(k + M - 1)] = gen_s(a, b, k, id);
                gh[size_t(k + M - 1)] = gen_h(a, b, k, "H/" + id);
            }
            out.evaluated_s += 2 * M - 1;
            out.evaluated_h += 2 * M - 1;
            fill_block(a, b, gs, gh, -(M - 1));
            // Hermitian fill of the transposed block.
            std::vector<complexd> rs(gs.size()), rh(gh.size());
            for (int k = -(M - 1); k <= M - 1; ++k) {
                rs[size_t(k + M - 1)] = std::conj(gs[size_t(-k + M - 1)]);
                rh[size_t(k + M - 1)] = std::conj(gh[size_t(-k + M - 1)]);
            }
            fill_block(b, a, rs, rh, -(M - 1));
        }

    if (cfg.keep_states) out.phi = std::move(phi);
    return out;
}

/// Projection onto the S eigenspace above threshold * lambda_max, returned
/// as the whitening map B with B^dag S B = I on the retained subspace.
struct Regularized {
    Eigen::MatrixXcd whitener;  // MR x d
    Eigen::VectorXd eigenvalues;
    int retained = 0;
};

inline Regularized regularize(const Eigen::MatrixXcd& s, double threshold) {
    Eigen::MatrixXcd sh = 0.5 * (s + s.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sh);
    if (es.info() != Eigen::Success) throw NumericalError("regularize: eigensolve failed");
    const auto& vals = es.eigenvalues();
    const double cutoff = threshold * vals.maxCoeff();
    std::vector<int> keep;
    for (int i = 0; i < vals.size(); ++i)
        if (vals(i) > cutoff && vals(i) > 0) keep.push_back(i);
    Regularized out;
    out.retained = static_cast<int>(keep.size());
    if (out.retained == 0) throw NumericalError("regularize: empty retained subspace");
    out.whitener.resize(s.rows(), out.retained);
    out.eigenvalues.resize(out.retained);
    for (int j = 0; j < out.retained; ++j) {
        out.whitener.col(j) = es.eigenvectors().col(keep[size_t(j)]) / std::sqrt(vals(keep[size_t(j)]));
        out.eigenvalues(j) = vals(keep[size_t(j)]);
    }
    return out;
}

/// Time grid, coefficient vectors, derived autocorrelation and the retained
/// subspace dimension after regularization.
struct TrajectoryResult {
    std::vector<double> times_ns;
    Eigen::MatrixXcd coefficients;  // MR x T, original basis
    std::vector<double> autocorrelation;
    int retained_dim = 0;
};

/// Projected Schrodinger propagation in closed form: the whitened
/// Hamiltonian is diagonalized once and c(t) evolves exactly, with no
/// step-size error.
inline TrajectoryResult propagate(const KrylovMatrices& mats, int c0_index,
                                  const std::vector<double>& times_ns, const KrylovConfig& cfg) {
    if (times_ns.empty() || times_ns.front() != 0.0)
        throw std::invalid_argument("propagate: times must start at 0");
    for (size_t i = 0; i + 1 < times_ns.size(); ++i)
        if (times_ns[i + 1] <= times_ns[i])
            throw std::invalid_argument("propagate: times must be sorted");

    auto reg = regularize(mats.s, cfg.s_threshold);
    const auto& B = reg.whitener;
    Eigen::MatrixXcd ht = B.adjoint() * mats.h * B;
    ht = 0.5 * (ht + ht.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ht);
    if (es.info() != Eigen::Success) throw NumericalError("propagate: eigensolve failed");

    Eigen::VectorXcd c0 = Eigen::VectorXcd::Zero(mats.s.rows());
    c0(c0_index) = 1.0;
    Eigen::VectorXcd y0 = B.adjoint() * (mats.s * c0);
    Eigen::VectorXcd w = es.eigenvectors().adjoint() * y0;
    Eigen::MatrixXcd bv = B * es.eigenvectors();

    TrajectoryResult out;
    out.times_ns = times_ns;
    out.retained_dim = reg.retained;
    out.coefficients.resize(mats.s.rows(), static_cast<Eigen::Index>(times_ns.size()));
    for (size_t ti = 0; ti < times_ns.size(); ++ti) {
        Eigen::VectorXcd phase(w.size());
        for (Eigen::Index k = 0; k < w.size(); ++k)
            phase(k) = std::exp(complexd(0, -es.eigenvalues()(k) * times_ns[ti])) * w(k);
        out.coefficients.col(static_cast<Eigen::Index>(ti)) = bv * phase;
    }
    out.autocorrelation.assign(times_ns.size(), 0.0);
    for (size_t ti = 0; ti < times_ns.size(); ++ti) {
        const complexd overlap =
            (mats.s.row(c0_index) * out.coefficients.col(static_cast<Eigen::Index>(ti)))(0, 0);
        out.autocorrelation[ti] = std::norm(overlap);
    }
    return out;
}

/// C(t) = |<psi0|psi(t)>|^2 = |sum_mr c_mr(t) S_{(0,0),(m,r)}|^2.
inline std::vector<double> autocorrelation(const KrylovMatrices& mats,
                                           const TrajectoryResult& traj, int c0_index = 0) {
    std::vector<double> out(traj.times_ns.size(), 0.0);
    for (size_t ti = 0; ti < traj.times_ns.size(); ++ti) {
        const complexd overlap =
            (mats.s.row(c0_index) * traj.coefficients.col(static_cast<Eigen::Index>(ti)))(0, 0);
        out[ti] = std::norm(overlap);
    }
    return out;
}

}  // namespace spindle
