#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "spindle/circuit.hpp"
#include "spindle/pauli.hpp"

namespace spindle {

/// Canonical circuit for exp(-i * angle * word) with `word` a non-identity
/// Z/I string: CNOT ladder onto the last participating qubit, Rz(2*angle)
/// there, mirrored ladder.
inline Circuit exp_diagonal_word(const PauliWord& word, double angle) {
    if (!word.is_diagonal()) throw std::invalid_argument("exp_diagonal_word: word not diagonal");
    if (word.is_identity()) throw std::invalid_argument("exp_diagonal_word: identity word");
    Circuit c(word.qubit_count);
    std::vector<int> qs;
    for (int q = 0; q < word.qubit_count; ++q)
        if (word.op(q) == PauliOp::Z) qs.push_back(q);
    for (size_t i = 0; i + 1 < qs.size(); ++i) c.cnot(qs[i], qs[i + 1]);
    c.rz(qs.back(), 2.0 * angle);
    for (size_t i = qs.size() - 1; i-- > 0;) c.cnot(qs[i], qs[i + 1]);
    return c;
}

namespace detail {

struct GroupApplication {
    int group;
    double dt;
};

/// Emits layer / diagonal exponentials / inverse layer per application,
/// after collapsing adjacent applications of the same group (their
/// exponentials commute, so summing dt is exact). This is where adjacent
/// adjoint layers between Trotter half-steps and steps disappear.
inline Circuit emit_group_sequence(int qubit_count, const std::vector<DiagonalizedGroup>& groups,
                                   std::vector<GroupApplication> seq, double identity_phase_angle) {
    std::vector<GroupApplication> merged;
    for (const auto& app : seq) {
        if (!merged.empty() && merged.back().group == app.group)
            merged.back().dt += app.dt;
        else
            merged.push_back(app);
    }
    Circuit out(qubit_count);
    for (const auto& app : merged) {
        const auto& g = groups[static_cast<size_t>(app.group)];
        out.append(g.layer);
        for (const auto& t : g.diagonal.terms()) {
            if (t.word.is_identity()) {
                out.global_phase += -t.coeff.real() * app.dt;
                continue;
            }
            out.append(exp_diagonal_word(t.word, t.coeff.real() * app.dt));
        }
        out.append(g.layer.inverse());
    }
    out.global_phase += identity_phase_angle;
    return out;
}

}  // namespace detail

/// One symmetric (Strang) step: groups forward at dt/2 then in reversed
/// order at dt/2. A single group collapses to full-dt rotations.
inline Circuit trotter_step(const std::vector<DiagonalizedGroup>& groups, double dt) {
    if (groups.empty()) return Circuit(0);
    const int n = groups.front().original.qubit_count();
    std::vector<detail::GroupApplication> seq;
    const int m = static_cast<int>(groups.size());
    for (int g = 0; g < m; ++g) seq.push_back({g, dt / 2});
    for (int g = m - 1; g >= 0; --g) seq.push_back({g, dt / 2});
    return detail::emit_group_sequence(n, groups, seq, 0.0);
}

/// Removes adjacent mutually-inverse gate pairs on identical qubit sets
/// (H.H, X.X, Y.Y, Z.Z, CNOT.CNOT, S.Sdg) and merges adjacent same-kind
/// rotations on the same qubit, where "adjacent" means no intervening gate
/// touches the qubits involved. Dense matrix unchanged up to global phase.
inline Circuit optimize_cancellation(const Circuit& c) {
    struct Slot {
        Gate gate;
        bool alive = true;
        std::array<int, 2> prev{-1, -1};  // previous live gate per operand qubit
    };
    std::vector<Slot> out;
    out.reserve(c.gates.size());
    std::vector<int> last(static_cast<size_t>(c.qubit_count), -1);

    auto qubits_of = [](const Gate& g) {
        std::array<int, 2> q{g.q0, -1};
        if (g.two_qubit()) q[1] = g.q1;
        return q;
    };
    auto same_operands = [](const Gate& a, const Gate& b) {
        return a.q0 == b.q0 && a.q1 == b.q1 && a.controlled == b.controlled;
    };
    auto inverse_pair = [&](const Gate& a, const Gate& b) {
        if (!same_operands(a, b)) return false;
        if (a.kind == b.kind)
            return a.kind == GateKind::H || a.kind == GateKind::X || a.kind == GateKind::Y ||
                   a.kind == GateKind::Z || a.kind == GateKind::CNOT;
        return (a.kind == GateKind::S && b.kind == GateKind::Sdg) ||
               (a.kind == GateKind::Sdg && b.kind == GateKind::S);
    };
    auto mergeable_rotation = [&](const Gate& a, const Gate& b) {
        return a.kind == b.kind && is_rotation(a.kind) && same_operands(a, b);
    };
    auto remove_slot = [&](int idx) {
        out[static_cast<size_t>(idx)].alive = false;
        const auto qs = qubits_of(out[static_cast<size_t>(idx)].gate);
        for (int k = 0; k < 2; ++k)
            if (qs[static_cast<size_t>(k)] >= 0)
                last[static_cast<size_t>(qs[static_cast<size_t>(k)])] =
                    out[static_cast<size_t>(idx)].prev[static_cast<size_t>(k)];
    };

    for (const auto& g : c.gates) {
        const auto qs = qubits_of(g);
        // Candidate for cancellation: the most recent gate must be the same
        // on every operand qubit.
        int cand = last[static_cast<size_t>(qs[0])];
        bool uniform = true;
        for (int k = 0; k < 2; ++k)
            if (qs[static_cast<size_t>(k)] >= 0 &&
                last[static_cast<size_t>(qs[static_cast<size_t>(k)])] != cand)
                uniform = false;
        if (uniform && cand >= 0) {
            Gate& prev_gate = out[static_cast<size_t>(cand)].gate;
            const auto pqs = qubits_of(prev_gate);
            const bool covers = pqs == qs;
            if (covers && inverse_pair(prev_gate, g)) {
                remove_slot(cand);
                continue;
            }
            if (covers && mergeable_rotation(prev_gate, g)) {
                prev_gate.angle += g.angle;
                if (prev_gate.angle == 0.0) remove_slot(cand);
                continue;
            }
        }
        Slot s;
        s.gate = g;
        for (int k = 0; k < 2; ++k)
            if (qs[static_cast<size_t>(k)] >= 0)
                s.prev[static_cast<size_t>(k)] = last[static_cast<size_t>(qs[static_cast<size_t>(k)])];
        out.push_back(s);
        const int idx = static_cast<int>(out.size()) - 1;
        for (int k = 0; k < 2; ++k)
            if (qs[static_cast<size_t>(k)] >= 0) last[static_cast<size_t>(qs[static_cast<size_t>(k)])] = idx;
    }

    Circuit result(c.qubit_count);
    result.global_phase = c.global_phase;
    for (const auto& s : out)
        if (s.alive) result.gates.push_back(s.gate);
    return result;
}

/// Diagonalized QWC groups of a Hamiltonian, largest first; the identity
/// coefficient is returned separately as a global-phase generator.
struct CompiledGroups {
    std::vector<DiagonalizedGroup> groups;
    double identity_coefficient = 0.0;
    int qubit_count = 0;
};

inline CompiledGroups prepare_groups(const PauliSum& h, bool use_qwc) {
    PauliSum work = h;
    work.simplify();
    CompiledGroups out;
    out.qubit_count = h.qubit_count();
    out.identity_coefficient = work.identity_coefficient().real();

    PauliSum stripped(work.qubit_count());
    for (const auto& t : work.terms())
        if (!t.word.is_identity()) stripped.add(t.coeff, t.word);
    stripped.simplify();
    if (stripped.empty()) return out;

    std::vector<PauliSum> groups;
    if (use_qwc) {
        groups = qwc_partition(stripped);
        std::stable_sort(groups.begin(), groups.end(),
                         [](const PauliSum& a, const PauliSum& b) { return a.size() > b.size(); });
    } else {
        // One exponential per Pauli term in fixed lexicographic order.
        for (const auto& t : stripped.terms()) {
            PauliSum single(stripped.qubit_count());
            single.add(t.coeff, t.word);
            groups.push_back(single.simplify());
        }
    }
    for (const auto& g : groups) out.groups.push_back(diagonalizing_rotations(g));
    return out;
}

/// n repetitions of the symmetric Trotter step for time t, followed by the
/// cancellation pass. Adjacent same-group half-steps across step boundaries
/// are collapsed before emission.
inline Circuit compile_evolution(const PauliSum& h, double t_ns, int steps, bool use_qwc = true) {
    if (steps < 1) throw std::invalid_argument("compile_evolution: steps must be >= 1");
    auto prep = prepare_groups(h, use_qwc);
    const double phase = -prep.identity_coefficient * t_ns;
    if (prep.groups.empty() || t_ns == 0.0) {
        Circuit c(prep.qubit_count);
        c.global_phase = phase;
        return c;
    }
    const double dt = t_ns / steps;
    std::vector<detail::GroupApplication> seq;
    const int m = static_cast<int>(prep.groups.size());
    for (int s = 0; s < steps; ++s) {
        for (int g = 0; g < m; ++g) seq.push_back({g, dt / 2});
        for (int g = m - 1; g >= 0; --g) seq.push_back({g, dt / 2});
    }
    Circuit c = detail::emit_group_sequence(prep.qubit_count, prep.groups, seq, phase);
    return optimize_cancellation(c);
}

/// 1-norm Trotter error bound c_bound * (t * ||H||_1)^3 / n^2 for the
/// second-order decomposition, with t the longest Krylov evolution (M-1)tau.
inline double trotter_error_bound(double h_one_norm, double t_ns, int steps,
                                  double c_bound = 1.5) {
    if (steps < 1) throw std::invalid_argument("trotter_error_bound: steps must be >= 1");
    const double x = t_ns * h_one_norm;
    return c_bound * x * x * x / (double(steps) * double(steps));
}

inline double trotter_error_bound(const PauliSum& h, double t_ns, int steps,
                                  double c_bound = 1.5) {
    return trotter_error_bound(one_norm_with_identity(h), t_ns, steps, c_bound);
}

/// Fault-tolerant resource counts. Each rotation contributes
/// round(a * log2(1/eps)) T gates; depth is greedy as-soon-as-possible
/// layering with unit gate weight.
struct ResourceReport {
    long hadamard_count = 0;
    long cnot_count = 0;
    long t_count = 0;
    long depth = 0;
    long rotation_count = 0;
};

inline long t_gates_per_rotation(double rz_precision, double a = 3.0) {
    if (rz_precision <= 0 || rz_precision >= 1)
        throw std::invalid_argument("rz precision must be in (0,1)");
    return static_cast<long>(std::llround(a * std::log2(1.0 / rz_precision)));
}

inline ResourceReport count_resources(const Circuit& c, double rz_precision = 1e-6,
                                      double t_per_rz_coefficient = 3.0) {
    ResourceReport r;
    const long t_per_rz = t_gates_per_rotation(rz_precision, t_per_rz_coefficient);
    std::vector<long> qubit_depth(static_cast<size_t>(c.qubit_count), 0);
    for (const auto& g : c.gates) {
        if (!g.controlled && g.kind == GateKind::H) ++r.hadamard_count;
        if (!g.controlled && g.kind == GateKind::CNOT) ++r.cnot_count;
        if (is_rotation(g.kind)) {
            ++r.rotation_count;
            r.t_count += t_per_rz;
        }
        long d = qubit_depth[static_cast<size_t>(g.q0)];
        if (g.two_qubit()) d = std::max(d, qubit_depth[static_cast<size_t>(g.q1)]);
        ++d;
        qubit_depth[static_cast<size_t>(g.q0)] = d;
        if (g.two_qubit()) qubit_depth[static_cast<size_t>(g.q1)] = d;
        r.depth = std::max(r.depth, d);
    }
    return r;
}

/// Hadamard-test circuit around a compiled evolution: ancilla H, the
/// controlled evolution, ancilla H. Compiled evolutions reduce to the
/// identity when every rotation angle is zero, so only the rotations (and
/// the global phase) need controlling; controlled rotations are emitted
/// decomposed as Rz-CNOT-Rz-CNOT.
inline Circuit hadamard_test_circuit(const Circuit& u) {
    Circuit out(u.qubit_count + 1);
    const int anc = u.qubit_count;
    out.h(anc);
    auto controlled_rz = [&](int q, double angle) {
        out.rz(q, angle / 2);
        out.cnot(anc, q);
        out.rz(q, -angle / 2);
        out.cnot(anc, q);
    };
    for (const auto& g : u.gates) {
        if (is_rotation(g.kind) && !g.controlled) {
            // Rx = H Rz H, Ry = S H Rz H Sdg; only the Rz core needs control.
            if (g.kind == GateKind::Ry) out.s(g.q0);
            if (g.kind != GateKind::Rz) out.h(g.q0);
            controlled_rz(g.q0, g.angle);
            if (g.kind != GateKind::Rz) out.h(g.q0);
            if (g.kind == GateKind::Ry) out.sdg(g.q0);
        } else {
            out.push(g);
        }
    }
    if (u.global_phase != 0.0) {
        out.rz(anc, u.global_phase);
        out.global_phase += u.global_phase / 2;
    }
    out.h(anc);
    return out;
}

}  // namespace spindle
