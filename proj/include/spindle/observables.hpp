#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spindle/oracle.hpp"
#include "spindle/parallel.hpp"
#include "spindle/pauli.hpp"
#include "spindle/sqkff.hpp"
#include "spindle/statevector.hpp"

namespace spindle {

struct SpectrumConfig {
    double t_max_ns = 100.0;
    double dt_ns = 0.05;
    double damping_eta_ghz = 0.02;
    std::vector<double> omega_grid_ghz;

    static std::vector<double> uniform_grid(double omega_max, double domega) {
        std::vector<double> g;
        for (double w = 0.0; w <= omega_max + 1e-12; w += domega) g.push_back(w);
        return g;
    }

    std::vector<double> time_grid() const {
        if (dt_ns <= 0) throw std::invalid_argument("SpectrumConfig: dt must be positive");
        const double steps_d = t_max_ns / dt_ns;
        const long steps = std::lround(steps_d);
        if (std::abs(steps_d - double(steps)) > 1e-9)
            throw std::invalid_argument("SpectrumConfig: t_max/dt must be an integer");
        std::vector<double> t(static_cast<size_t>(steps) + 1);
        for (long k = 0; k <= steps; ++k) t[static_cast<size_t>(k)] = k * dt_ns;
        return t;
    }
};

/// Z(t) via two independent sQKFF instances (one from |psi0>, one from the
/// normalized Mx|psi0>) joined by the cross matrix A of Mx elements.
struct ZFunctionResult {
    std::vector<double> times_ns;
    std::vector<complexd> z;
    bool zero_moment = false;  // Mx|psi0> vanished; spectrum identically zero
    KrylovMatrices psi_mats, eta_mats;
    TrajectoryResult psi_traj, eta_traj;
    ReferenceSet psi_refs, eta_refs;
};

inline ZFunctionResult z_function(const PauliSum& h, const PauliSum& mx, const Circuit& psi0_prep,
                                  const KrylovConfig& cfg, const std::vector<double>& times_ns) {
    KrylovConfig kcfg = cfg;
    kcfg.keep_states = true;

    ZFunctionResult out;
    out.times_ns = times_ns;

    const StateVector psi0 = apply_circuit(StateVector::zero_state(h.qubit_count()), psi0_prep);
    StateVector eta0 = apply_pauli_sum(psi0, mx);
    const double eta_norm = eta0.norm();
    if (eta_norm < 1e-12) {
        out.zero_moment = true;
        out.z.assign(times_ns.size(), complexd(0, 0));
        return out;
    }
    for (auto& a : eta0.amps) a /= eta_norm;

    out.psi_refs = select_references(h, Reference::from_circuit(psi0_prep), kcfg);
    out.psi_mats = assemble(h, out.psi_refs, kcfg);
    out.psi_traj = propagate(out.psi_mats, 0, times_ns, kcfg);

    out.eta_refs = select_references(h, Reference::from_state(eta0), kcfg);
    out.eta_mats = assemble(h, out.eta_refs, kcfg);
    out.eta_traj = propagate(out.eta_mats, 0, times_ns, kcfg);

    // A_{(m r),(m' r')} = <phi^psi_{mr}| Mx |phi^eta_{m'r'}>, Hadamard tests
    // over the LCU terms of Mx in sampled mode.
    const int dim = kcfg.M * kcfg.R;
    Eigen::MatrixXcd a_mat(dim, dim);
    std::vector<StateVector> mx_eta(static_cast<size_t>(dim));
    if (kcfg.element_plan.mode == ShotPlan::Mode::exact) {
        parallel_for(static_cast<size_t>(dim), [&](size_t j) {
            const size_t r = j / static_cast<size_t>(kcfg.M), m = j % static_cast<size_t>(kcfg.M);
            mx_eta[j] = apply_pauli_sum(out.eta_mats.phi[r][m], mx);
        });
    }
    for (int i = 0; i < dim; ++i) {
        const auto& bra = out.psi_mats.phi[size_t(i / kcfg.M)][size_t(i % kcfg.M)];
        for (int j = 0; j < dim; ++j) {
            if (kcfg.element_plan.mode == ShotPlan::Mode::exact) {
                a_mat(i, j) = dot(bra, mx_eta[size_t(j)]);
            } else {
                const auto& ket = out.eta_mats.phi[size_t(j / kcfg.M)][size_t(j % kcfg.M)];
                a_mat(i, j) = detail::element_h_amplitude(
                    bra, ket, mx, kcfg.element_plan,
                    "A/" + std::to_string(i) + "/" + std::to_string(j));
            }
        }
    }

    out.z.resize(times_ns.size());
    for (size_t ti = 0; ti < times_ns.size(); ++ti) {
        const auto cpsi = out.psi_traj.coefficients.col(static_cast<Eigen::Index>(ti));
        const auto ceta = out.eta_traj.coefficients.col(static_cast<Eigen::Index>(ti));
        out.z[ti] = eta_norm * (cpsi.adjoint() * a_mat * ceta)(0, 0);
    }
    return out;
}

/// Microwave absorption intensity omega * chi''(omega) from Z(t):
/// C(t) = 2 Im Z(t), chi from the damped trapezoidal transform on the
/// uniform grid, intensity normalized by its maximum. The sign follows the
/// retarded +i convention so that absorption peaks are positive.
struct Spectrum {
    std::vector<double> omega_ghz;
    std::vector<double> intensity;  // normalized
    double max_raw_intensity = 0.0;
};

inline Spectrum absorption_spectrum(const std::vector<complexd>& z,
                                    const std::vector<double>& times_ns,
                                    const SpectrumConfig& scfg) {
    if (z.size() != times_ns.size() || z.size() < 2)
        throw std::invalid_argument("absorption_spectrum: bad series");
    const double dt = times_ns[1] - times_ns[0];
    for (size_t i = 0; i + 1 < times_ns.size(); ++i)
        if (std::abs(times_ns[i + 1] - times_ns[i] - dt) > 1e-9 * std::max(1.0, dt))
            throw std::invalid_argument("absorption_spectrum: non-uniform time grid");

    std::vector<double> c(z.size());
    for (size_t i = 0; i < z.size(); ++i) c[i] = 2.0 * z[i].imag();

    Spectrum out;
    out.omega_ghz = scfg.omega_grid_ghz;
    out.intensity.resize(out.omega_ghz.size());
    std::vector<double> raw(out.omega_ghz.size());
    parallel_for(out.omega_ghz.size(), [&](size_t wi) {
        const double w = out.omega_ghz[wi];
        complexd chi = 0;
        for (size_t i = 0; i < c.size(); ++i) {
            const double t = times_ns[i];
            const complexd kernel = std::exp(complexd(-scfg.damping_eta_ghz * t, w * t)) * c[i];
            const double trap = (i == 0 || i + 1 == c.size()) ? 0.5 : 1.0;
            chi += trap * kernel * dt;
        }
        raw[wi] = -w * chi.imag();
    });
    out.max_raw_intensity = *std::max_element(raw.begin(), raw.end());
    const double scale = std::abs(out.max_raw_intensity) > 0 ? out.max_raw_intensity : 1.0;
    for (size_t i = 0; i < raw.size(); ++i) out.intensity[i] = raw[i] / scale;
    return out;
}

/// Indices of local maxima ordered by descending intensity.
inline std::vector<size_t> dominant_peaks(const Spectrum& sp, size_t count) {
    std::vector<size_t> peaks;
    for (size_t i = 1; i + 1 < sp.intensity.size(); ++i)
        if (sp.intensity[i] > sp.intensity[i - 1] && sp.intensity[i] >= sp.intensity[i + 1])
            peaks.push_back(i);
    std::sort(peaks.begin(), peaks.end(),
              [&](size_t a, size_t b) { return sp.intensity[a] > sp.intensity[b]; });
    if (peaks.size() > count) peaks.resize(count);
    return peaks;
}

/// Sum of absolute off-diagonal density-matrix entries in the computational
/// basis of a pure state.
inline double l1_coherence_direct(const StateVector& state) { return l1_coherence_state(state); }

/// Reference-state amplitude table <k|phi_{mr}>, computed once; all time
/// points then evaluate classically from c(t).
struct AmplitudeTable {
    Eigen::MatrixXcd table;  // 2^n x MR, column index r*M + m
    int qubit_count = 0;

    static AmplitudeTable build(const KrylovMatrices& mats) {
        if (mats.phi.empty())
            throw std::invalid_argument("AmplitudeTable: assemble was run without keep_states");
        AmplitudeTable t;
        t.qubit_count = mats.phi[0][0].qubit_count;
        const size_t dim = mats.phi[0][0].amps.size();
        t.table.resize(static_cast<Eigen::Index>(dim), mats.m * mats.r);
        for (int r = 0; r < mats.r; ++r)
            for (int m = 0; m < mats.m; ++m) {
                const auto& amps = mats.phi[size_t(r)][size_t(m)].amps;
                for (size_t k = 0; k < dim; ++k)
                    t.table(static_cast<Eigen::Index>(k), r * mats.m + m) = amps[k];
            }
        return t;
    }
};

/// l1 coherence of the Krylov state at one time. Without a partition the
/// full-register value; with `a_qubits` the coherence of the reduced state
/// over the leading a_qubits (the electronic block), i.e.
/// sum_{i != j} |sum_b gamma_ib gamma*_jb|.
inline double l1_coherence_krylov_at(const AmplitudeTable& table, const Eigen::VectorXcd& coeffs,
                                     int a_qubits = -1) {
    Eigen::VectorXcd gamma = table.table * coeffs;
    if (a_qubits < 0) {
        double abs_sum = 0, sq_sum = 0;
        for (Eigen::Index k = 0; k < gamma.size(); ++k) {
            const double m = std::abs(gamma(k));
            abs_sum += m;
            sq_sum += m * m;
        }
        return abs_sum * abs_sum - sq_sum;
    }
    const size_t dim_a = size_t(1) << a_qubits;
    const size_t dim_b = static_cast<size_t>(gamma.size()) >> a_qubits;
    double total = 0;
    for (size_t i = 0; i < dim_a; ++i)
        for (size_t j = i + 1; j < dim_a; ++j) {
            complexd rho_ij = 0;
            for (size_t b = 0; b < dim_b; ++b)
                rho_ij += gamma(static_cast<Eigen::Index>(i * dim_b + b)) *
                          std::conj(gamma(static_cast<Eigen::Index>(j * dim_b + b)));
            total += 2.0 * std::abs(rho_ij);
        }
    return total;
}

inline std::vector<double> l1_coherence_krylov(const KrylovMatrices& mats,
                                               const TrajectoryResult& traj, int a_qubits = -1) {
    const AmplitudeTable table = AmplitudeTable::build(mats);
    std::vector<double> out(traj.times_ns.size());
    parallel_for(traj.times_ns.size(), [&](size_t ti) {
        out[ti] = l1_coherence_krylov_at(table, traj.coefficients.col(static_cast<Eigen::Index>(ti)),
                                         a_qubits);
    });
    return out;
}

}  // namespace spindle
