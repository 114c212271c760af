// model.hpp — physical parameter record and rotating-frame Hamiltonian builders

#pragma once

#include <cmath>
#include <stdexcept>

#include "vibronic/core.hpp"
#include "vibronic/fock.hpp"

namespace vibronic::model {

using fock::HilbertSpec;

// All frequency-like fields store nu = omega/(2*pi) in GHz; builders multiply
// by 2*pi internally, hbar = 1, time unit = ns.  Drive phases are fixed to 0.
struct ModelParams {
    double delta0 = 0.0;          // electronic detuning [GHz]
    double delta_v = 0.0;         // vibrational detuning [GHz]
    double eta = 0.0;             // Lamb-Dicke parameter (sqrt of Franck-Condon)
    double omega_zpl_rabi = 0.0;  // zero-phonon-line drive [GHz]
    double g_s = 0.0;             // Stokes sideband coupling [GHz]
    double g_as = 0.0;            // anti-Stokes sideband coupling [GHz]
    double g_as2 = 0.0;           // two-vibration sideband coupling [GHz]
    double omega_thz_rabi = 0.0;  // direct vibrational drive [GHz]
    double gamma0 = 0.0;          // electronic decay rate [GHz]
    double gamma_v = 0.0;         // vibrational decay rate [GHz]
    double gamma_phi_opt = 0.0;   // electronic dephasing rate [GHz], usually 0
    double gamma_phi_v = 0.0;     // vibrational dephasing rate [GHz], usually 0
    int n_cutoff = 2;

    void validate() const {
        if (n_cutoff < 2) throw std::invalid_argument("ModelParams: n_cutoff must be >= 2");
        if (eta < 0) throw std::invalid_argument("ModelParams: eta must be >= 0");
        for (double r : {gamma0, gamma_v, gamma_phi_opt, gamma_phi_v}) {
            if (r < 0 || !std::isfinite(r)) {
                throw std::invalid_argument("ModelParams: rates must be finite and >= 0");
            }
        }
    }

    HilbertSpec space() const { return HilbertSpec(n_cutoff); }
};

// Which drive terms enter the Hamiltonian; the free part is always built.
struct DriveSelection {
    bool zpl = false;
    bool stokes = false;
    bool anti_stokes = false;
    bool anti_stokes2 = false;
    bool thz = false;

    static DriveSelection none() { return {}; }
    static DriveSelection jaynes_cummings() { return {.stokes = true}; }
    static DriveSelection jc_with_zpl() { return {.zpl = true, .stokes = true}; }
    static DriveSelection generalized_rabi() { return {.stokes = true, .anti_stokes = true}; }
    static DriveSelection biased_rabi() {
        return {.stokes = true, .anti_stokes = true, .anti_stokes2 = true};
    }
    static DriveSelection transducer() { return {.stokes = true, .thz = true}; }
};

// First-order sideband coupling g = eta * Omega
inline double coupling_from_rabi(double eta, double omega_rabi) { return eta * omega_rabi; }

// Two-vibration sideband coupling g = eta^2 * Omega / 2
inline double coupling_from_rabi_second_order(double eta, double omega_rabi) {
    return 0.5 * eta * eta * omega_rabi;
}

// H = 2pi [ d0 s+s + dv b+b + (Ozpl/2)(s + s+) + (gs/2)(s b+ + s+ b)
//         + (gas/2)(s b + s+ b+) + (gas2/2)(s b^2 + s+ b+^2) + (Othz/2)(b + b+) ]
inline SparseOp build_hamiltonian(const ModelParams& p, const DriveSelection& drives) {
    p.validate();
    const HilbertSpec spec = p.space();
    const SparseOp b = fock::annihilation(spec);
    const SparseOp bd = adjoint(b);
    const SparseOp s = fock::sigma_minus(spec);
    const SparseOp sd = adjoint(s);

    SparseOp h = SparseOp(p.delta0 * (sd * s) + p.delta_v * (bd * b));
    if (drives.zpl) h += SparseOp(0.5 * p.omega_zpl_rabi * (s + sd));
    if (drives.stokes) h += SparseOp(0.5 * p.g_s * (s * bd + sd * b));
    if (drives.anti_stokes) h += SparseOp(0.5 * p.g_as * (s * b + sd * bd));
    if (drives.anti_stokes2) h += SparseOp(0.5 * p.g_as2 * (s * b * b + sd * bd * bd));
    if (drives.thz) h += SparseOp(0.5 * p.omega_thz_rabi * (b + bd));
    h = SparseOp(two_pi * h);
    h.makeCompressed();
    return h;
}

// Lab-frame Holstein Hamiltonian 2pi [ w0 s+s + wv b+b + eps1 (b + b+) s+s ];
// kept for polaron-transform validation, not used by the driven simulations.
inline SparseOp build_holstein(const HilbertSpec& spec, double omega0, double omega_v,
                               double eps1) {
    const SparseOp b = fock::annihilation(spec);
    const SparseOp bd = adjoint(b);
    const SparseOp n_e = fock::number_electronic(spec);
    SparseOp h = SparseOp(omega0 * n_e + omega_v * (bd * b) + eps1 * ((b + bd) * n_e));
    h = SparseOp(two_pi * h);
    h.makeCompressed();
    return h;
}

// Quality of the first-order Lamb-Dicke expansion: max elementwise deviation
// between D(eta)*sigma and sigma + eta (b+ - b) sigma on Fock levels <= block_max_n.
struct TruncationReport {
    double eta = 0.0;
    int block_max_n = 0;
    double max_deviation = 0.0;
};

inline TruncationReport truncation_order_check(const HilbertSpec& spec, double eta,
                                               int block_max_n = 3) {
    if (eta >= 1.0 || eta < 0.0) {
        throw std::invalid_argument("truncation_order_check: requires 0 <= eta < 1");
    }
    const SparseOp s = fock::sigma_minus(spec);
    const SparseOp b = fock::annihilation(spec);
    const DenseOp exact = dense(fock::displacement(spec, eta)) * dense(s);
    const DenseOp first = dense(s) + eta * (dense(adjoint(b)) - dense(b)) * dense(s);
    TruncationReport rep{eta, block_max_n, 0.0};
    for (int srow = 0; srow < 2; ++srow) {
        for (int scol = 0; scol < 2; ++scol) {
            for (int nr = 0; nr <= block_max_n; ++nr) {
                for (int nc = 0; nc <= block_max_n; ++nc) {
                    const int r = spec.index(srow, nr);
                    const int c = spec.index(scol, nc);
                    rep.max_deviation = std::max(rep.max_deviation, std::abs(exact(r, c) - first(r, c)));
                }
            }
        }
    }
    return rep;
}

}  // namespace vibronic::model
