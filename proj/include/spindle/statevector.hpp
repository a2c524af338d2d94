#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "spindle/circuit.hpp"
#include "spindle/pauli.hpp"

namespace spindle {

namespace rng {

inline uint64_t splitmix64(uint64_t& s) {
    uint64_t z = (s += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

/// Deterministic per-task seed derived from (seed, task id).
inline uint64_t derive_seed(uint64_t seed, const std::string& id) {
    uint64_t s = seed ^ fnv1a(id);
    return splitmix64(s);
}

/// Deterministic binomial draw; counts raw 64-bit comparisons so results do
/// not depend on the standard library's distribution implementation.
inline long binomial_draw(long shots, double p, std::mt19937_64& gen) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return shots;
    const double scale = 18446744073709551616.0;  // 2^64
    const uint64_t threshold = static_cast<uint64_t>(p * scale);
    long count = 0;
    for (long i = 0; i < shots; ++i)
        if (gen() < threshold) ++count;
    return count;
}

}  // namespace rng

/// Dense complex statevector with the bitstring read most-significant-qubit
/// first as the binary index (qubit 0 is the MSB).
struct StateVector {
    int qubit_count = 0;
    std::vector<complexd> amps;

    StateVector() = default;
    explicit StateVector(int n) : qubit_count(n), amps(size_t(1) << n, complexd(0, 0)) {
        if (n < 0 || n > 30) throw std::invalid_argument("qubit_count out of range");
    }

    static StateVector zero_state(int n) {
        StateVector s(n);
        s.amps[0] = 1.0;
        return s;
    }

    static StateVector basis_state(int n, uint64_t index) {
        StateVector s(n);
        s.amps.at(index) = 1.0;
        return s;
    }

    static StateVector from_bitstring(const std::string& bits) {
        StateVector s(static_cast<int>(bits.size()));
        uint64_t idx = 0;
        for (char c : bits) idx = (idx << 1) | static_cast<uint64_t>(c == '1');
        s.amps[idx] = 1.0;
        return s;
    }

    size_t dim() const { return amps.size(); }

    double norm() const {
        double s = 0;
        for (const auto& a : amps) s += std::norm(a);
        return std::sqrt(s);
    }

    void normalize() {
        double n = norm();
        if (n == 0) throw std::runtime_error("cannot normalize zero state");
        for (auto& a : amps) a /= n;
    }

    /// Index bit mask of a qubit under the MSB-first layout.
    uint64_t qubit_mask(int q) const { return 1ull << (qubit_count - 1 - q); }
};

/// <bra|ket>
inline complexd dot(const StateVector& bra, const StateVector& ket) {
    if (bra.qubit_count != ket.qubit_count)
        throw std::invalid_argument("dot: qubit_count mismatch");
    complexd s = 0;
    for (size_t i = 0; i < bra.amps.size(); ++i) s += std::conj(bra.amps[i]) * ket.amps[i];
    return s;
}

namespace detail {

inline void apply_single(StateVector& s, int q, complexd m00, complexd m01, complexd m10,
                         complexd m11) {
    const uint64_t bit = s.qubit_mask(q);
    const size_t n = s.amps.size();
    for (size_t base = 0; base < n; base += 2 * bit)
        for (size_t i = base; i < base + bit; ++i) {
            const complexd a0 = s.amps[i];
            const complexd a1 = s.amps[i + bit];
            s.amps[i] = m00 * a0 + m01 * a1;
            s.amps[i + bit] = m10 * a0 + m11 * a1;
        }
}

inline void apply_controlled_single(StateVector& s, int control, int target, complexd m00,
                                    complexd m01, complexd m10, complexd m11) {
    const uint64_t cbit = s.qubit_mask(control);
    const uint64_t tbit = s.qubit_mask(target);
    const size_t n = s.amps.size();
    for (size_t i = 0; i < n; ++i) {
        if ((i & cbit) == 0 || (i & tbit) != 0) continue;
        const complexd a0 = s.amps[i];
        const complexd a1 = s.amps[i | tbit];
        s.amps[i] = m00 * a0 + m01 * a1;
        s.amps[i | tbit] = m10 * a0 + m11 * a1;
    }
}

}  // namespace detail

inline void apply_gate_inplace(StateVector& s, const Gate& g) {
    using std::cos;
    using std::sin;
    const complexd i1(0, 1);
    const double invr2 = 1.0 / std::sqrt(2.0);
    if (g.controlled) {
        const double h = g.angle / 2;
        switch (g.kind) {
            case GateKind::Rx:
                detail::apply_controlled_single(s, g.q0, g.q1, cos(h), -i1 * sin(h), -i1 * sin(h), cos(h));
                return;
            case GateKind::Ry:
                detail::apply_controlled_single(s, g.q0, g.q1, cos(h), -sin(h), sin(h), cos(h));
                return;
            case GateKind::Rz:
                detail::apply_controlled_single(s, g.q0, g.q1, std::exp(-i1 * h), 0, 0, std::exp(i1 * h));
                return;
            default:
                throw std::invalid_argument("unsupported controlled gate");
        }
    }
    switch (g.kind) {
        case GateKind::H:
            detail::apply_single(s, g.q0, invr2, invr2, invr2, -invr2);
            return;
        case GateKind::S:
            detail::apply_single(s, g.q0, 1, 0, 0, i1);
            return;
        case GateKind::Sdg:
            detail::apply_single(s, g.q0, 1, 0, 0, -i1);
            return;
        case GateKind::X:
            detail::apply_single(s, g.q0, 0, 1, 1, 0);
            return;
        case GateKind::Y:
            detail::apply_single(s, g.q0, 0, -i1, i1, 0);
            return;
        case GateKind::Z:
            detail::apply_single(s, g.q0, 1, 0, 0, -1);
            return;
        case GateKind::Rx: {
            const double h = g.angle / 2;
            detail::apply_single(s, g.q0, cos(h), -i1 * sin(h), -i1 * sin(h), cos(h));
            return;
        }
        case GateKind::Ry: {
            const double h = g.angle / 2;
            detail::apply_single(s, g.q0, cos(h), -sin(h), sin(h), cos(h));
            return;
        }
        case GateKind::Rz: {
            const double h = g.angle / 2;
            detail::apply_single(s, g.q0, std::exp(-i1 * h), 0, 0, std::exp(i1 * h));
            return;
        }
        case GateKind::CNOT: {
            const uint64_t cbit = s.qubit_mask(g.q0);
            const uint64_t tbit = s.qubit_mask(g.q1);
            for (size_t i = 0; i < s.amps.size(); ++i)
                if ((i & cbit) && !(i & tbit)) std::swap(s.amps[i], s.amps[i | tbit]);
            return;
        }
    }
    throw std::invalid_argument("unknown gate kind");
}

inline void apply_circuit_inplace(StateVector& s, const Circuit& c) {
    if (c.qubit_count > s.qubit_count)
        throw std::invalid_argument("circuit does not fit state");
    for (const auto& g : c.gates) apply_gate_inplace(s, g);
    if (c.global_phase != 0.0) {
        const complexd f = std::exp(complexd(0, c.global_phase));
        for (auto& a : s.amps) a *= f;
    }
}

inline StateVector apply_circuit(const StateVector& s, const Circuit& c) {
    StateVector out = s;
    apply_circuit_inplace(out, c);
    return out;
}

/// c * P |s> accumulated into `out`.
inline void accumulate_pauli_word(const StateVector& s, const PauliWord& w, complexd c,
                                  StateVector& out) {
    const int n = s.qubit_count;
    uint64_t flip = 0, zmask = 0;
    for (int q = 0; q < n; ++q) {
        const uint64_t bit = 1ull << (n - 1 - q);
        if ((w.x >> q) & 1u) flip |= bit;
        if ((w.z >> q) & 1u) zmask |= bit;
    }
    const int ycount = __builtin_popcountll(w.x & w.z);
    static const complexd kI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const complexd base = c * kI[ycount & 3];
    for (size_t i = 0; i < s.amps.size(); ++i) {
        const int sign = __builtin_popcountll(i & zmask) & 1;
        out.amps[i ^ flip] += (sign ? -base : base) * s.amps[i];
    }
}

/// Sum_j c_j P_j |s>; linear, not norm-preserving.
inline StateVector apply_pauli_sum(const StateVector& s, const PauliSum& h) {
    if (h.qubit_count() != s.qubit_count)
        throw std::invalid_argument("apply_pauli_sum: qubit_count mismatch");
    StateVector out(s.qubit_count);
    for (const auto& t : h.terms()) accumulate_pauli_word(s, t.word, t.coeff, out);
    return out;
}

/// Shot plan for Hadamard tests and sampling. Exact mode returns amplitudes
/// to machine precision; sampled mode adds the binomial noise of the
/// two-test (real/imaginary ancilla) estimator.
struct ShotPlan {
    enum class Mode { exact, sampled };
    Mode mode = Mode::exact;
    long shots = 0;
    uint64_t seed = 0;

    static ShotPlan exact() { return {}; }
    static ShotPlan sampled(long shots, uint64_t seed) {
        if (shots < 1) throw std::invalid_argument("sampled mode needs shots >= 1");
        return {Mode::sampled, shots, seed};
    }

    /// Same plan with a task-specific substream.
    ShotPlan for_task(const std::string& id) const {
        ShotPlan p = *this;
        p.seed = rng::derive_seed(seed, id);
        return p;
    }
};

inline complexd hadamard_test_amplitude(const StateVector& bra, const StateVector& ket,
                                        const ShotPlan& plan) {
    complexd a = dot(bra, ket);
    if (plan.mode == ShotPlan::Mode::exact) return a;
    std::mt19937_64 gen_re(rng::derive_seed(plan.seed, "re"));
    std::mt19937_64 gen_im(rng::derive_seed(plan.seed, "im"));
    const double p_re = std::clamp((1.0 + a.real()) / 2.0, 0.0, 1.0);
    const double p_im = std::clamp((1.0 + a.imag()) / 2.0, 0.0, 1.0);
    const double est_re = 2.0 * double(rng::binomial_draw(plan.shots, p_re, gen_re)) / double(plan.shots) - 1.0;
    const double est_im = 2.0 * double(rng::binomial_draw(plan.shots, p_im, gen_im)) / double(plan.shots) - 1.0;
    return {est_re, est_im};
}

/// Estimates <0|prep_bra^dag . U . prep_ket|0>, the vacuum expectation of the
/// composite unitary W = prep_bra^dag U prep_ket, via real- and
/// imaginary-part ancilla tests.
inline complexd hadamard_test(const Circuit& prep_bra, const Circuit& prep_ket, const Circuit& u,
                              const ShotPlan& plan = ShotPlan::exact()) {
    if (prep_bra.qubit_count != prep_ket.qubit_count || u.qubit_count != prep_ket.qubit_count)
        throw std::invalid_argument("hadamard_test: qubit_count mismatch");
    StateVector bra = apply_circuit(StateVector::zero_state(prep_bra.qubit_count), prep_bra);
    StateVector ket = apply_circuit(StateVector::zero_state(prep_ket.qubit_count), prep_ket);
    apply_circuit_inplace(ket, u);
    return hadamard_test_amplitude(bra, ket, plan);
}

inline std::string index_to_bitstring(uint64_t idx, int qubit_count) {
    std::string s(static_cast<size_t>(qubit_count), '0');
    for (int q = 0; q < qubit_count; ++q)
        if (idx & (1ull << (qubit_count - 1 - q))) s[static_cast<size_t>(q)] = '1';
    return s;
}

/// i.i.d. computational-basis draws from |amplitude|^2; deterministic given
/// the seed.
inline std::map<std::string, long> sample_bitstrings(const StateVector& s, long shots,
                                                     uint64_t seed) {
    if (shots < 1) throw std::invalid_argument("shots must be >= 1");
    std::vector<double> cdf(s.amps.size());
    double acc = 0;
    for (size_t i = 0; i < s.amps.size(); ++i) {
        acc += std::norm(s.amps[i]);
        cdf[i] = acc;
    }
    std::mt19937_64 gen(seed);
    std::map<std::string, long> counts;
    std::vector<long> raw(s.amps.size(), 0);
    for (long k = 0; k < shots; ++k) {
        const double u = acc * (double(gen() >> 11) * 0x1.0p-53);
        const size_t idx = static_cast<size_t>(
            std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        ++raw[std::min(idx, s.amps.size() - 1)];
    }
    for (size_t i = 0; i < raw.size(); ++i)
        if (raw[i] > 0) counts[index_to_bitstring(i, s.qubit_count)] = raw[i];
    return counts;
}

}  // namespace spindle
