#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace spindle {

enum class GateKind { H, S, Sdg, X, Y, Z, CNOT, Rx, Ry, Rz };

inline const char* gate_name(GateKind k) {
    switch (k) {
        case GateKind::H: return "H";
        case GateKind::S: return "S";
        case GateKind::Sdg: return "SDG";
        case GateKind::X: return "X";
        case GateKind::Y: return "Y";
        case GateKind::Z: return "Z";
        case GateKind::CNOT: return "CNOT";
        case GateKind::Rx: return "RX";
        case GateKind::Ry: return "RY";
        case GateKind::Rz: return "RZ";
    }
    return "?";
}

inline bool is_rotation(GateKind k) {
    return k == GateKind::Rx || k == GateKind::Ry || k == GateKind::Rz;
}

/// One gate of the circuit IR. Single-qubit gates use q0; CNOT uses
/// (q0 = control, q1 = target); a controlled rotation sets `controlled`
/// with q0 the control and q1 the target.
struct Gate {
    GateKind kind;
    int q0 = 0;
    int q1 = -1;
    double angle = 0.0;
    bool controlled = false;

    static Gate single(GateKind k, int q) { return Gate{k, q, -1, 0.0, false}; }
    static Gate cnot(int control, int target) {
        return Gate{GateKind::CNOT, control, target, 0.0, false};
    }
    static Gate rotation(GateKind k, int q, double angle) {
        return Gate{k, q, -1, angle, false};
    }
    static Gate controlled_rotation(GateKind k, int control, int target, double angle) {
        return Gate{k, control, target, angle, true};
    }

    bool two_qubit() const { return kind == GateKind::CNOT || controlled; }

    bool touches(int q) const { return q0 == q || (two_qubit() && q1 == q); }
};

/// Gate-level intermediate representation. `global_phase` is a scalar
/// e^{i*global_phase} carried alongside the gate list so that compiled
/// time-evolution circuits reproduce exp(-iHt) exactly, identity term
/// included.
struct Circuit {
    int qubit_count = 0;
    std::vector<Gate> gates;
    double global_phase = 0.0;

    Circuit() = default;
    explicit Circuit(int n) : qubit_count(n) {}

    void check_gate(const Gate& g) const {
        if (g.q0 < 0 || g.q0 >= qubit_count ||
            (g.two_qubit() && (g.q1 < 0 || g.q1 >= qubit_count)))
            throw std::out_of_range("gate qubit index out of range");
        if (g.two_qubit() && g.q0 == g.q1)
            throw std::invalid_argument("two-qubit gate needs distinct qubits");
    }

    void push(const Gate& g) {
        check_gate(g);
        gates.push_back(g);
    }

    void h(int q) { push(Gate::single(GateKind::H, q)); }
    void s(int q) { push(Gate::single(GateKind::S, q)); }
    void sdg(int q) { push(Gate::single(GateKind::Sdg, q)); }
    void x(int q) { push(Gate::single(GateKind::X, q)); }
    void y(int q) { push(Gate::single(GateKind::Y, q)); }
    void z(int q) { push(Gate::single(GateKind::Z, q)); }
    void cnot(int c, int t) { push(Gate::cnot(c, t)); }
    void rx(int q, double a) { push(Gate::rotation(GateKind::Rx, q, a)); }
    void ry(int q, double a) { push(Gate::rotation(GateKind::Ry, q, a)); }
    void rz(int q, double a) { push(Gate::rotation(GateKind::Rz, q, a)); }

    void append(const Circuit& other) {
        if (other.qubit_count > qubit_count)
            throw std::invalid_argument("appended circuit does not fit");
        for (const auto& g : other.gates) push(g);
        global_phase += other.global_phase;
    }

    /// Adjoint circuit: reversed gate order with each gate inverted.
    Circuit inverse() const {
        Circuit inv(qubit_count);
        inv.global_phase = -global_phase;
        inv.gates.reserve(gates.size());
        for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
            Gate g = *it;
            switch (g.kind) {
                case GateKind::S: g.kind = GateKind::Sdg; break;
                case GateKind::Sdg: g.kind = GateKind::S; break;
                case GateKind::Rx:
                case GateKind::Ry:
                case GateKind::Rz: g.angle = -g.angle; break;
                default: break;  // H, X, Y, Z, CNOT are self-inverse
            }
            inv.gates.push_back(g);
        }
        return inv;
    }

    std::string to_text() const {
        std::ostringstream out;
        out.precision(17);
        for (const auto& g : gates) {
            if (g.controlled) {
                out << 'C' << gate_name(g.kind) << ' ' << g.q0 << ' ' << g.q1 << ' '
                    << g.angle << '\n';
            } else if (g.kind == GateKind::CNOT) {
                out << "CNOT " << g.q0 << ' ' << g.q1 << '\n';
            } else if (is_rotation(g.kind)) {
                out << gate_name(g.kind) << ' ' << g.q0 << ' ' << g.angle << '\n';
            } else {
                out << gate_name(g.kind) << ' ' << g.q0 << '\n';
            }
        }
        return out.str();
    }
};

}  // namespace spindle
