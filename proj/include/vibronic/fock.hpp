// fock.hpp — two-level electronic system ⊗ truncated vibrational Fock space:
// basis bookkeeping, ladder/parity/displacement operators, coherent and cat states

#pragma once

#include <cmath>
#include <stdexcept>

#include "vibronic/core.hpp"

namespace vibronic::fock {

// Basis ordering is fixed project-wide: index i = s*n_cutoff + n with
// electronic s in {0 (ground), 1 (excited)} and vibrational Fock number n.
struct HilbertSpec {
    int n_cutoff;

    explicit HilbertSpec(int cutoff) : n_cutoff(cutoff) {
        if (cutoff < 2) throw std::invalid_argument("HilbertSpec: n_cutoff must be >= 2");
    }

    int vib_dim() const { return n_cutoff; }
    int dim() const { return 2 * n_cutoff; }
    int index(int s, int n) const { return s * n_cutoff + n; }
};

// ------------------------------ ladder operators ----------------------------

// Vibrational annihilation on the truncated space: a|n> = sqrt(n)|n-1>.
// Outflow above the cutoff is simply dropped.
inline SparseOp annihilation_vib(int n_levels) {
    SparseOp a(n_levels, n_levels);
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(static_cast<std::size_t>(n_levels));
    for (int n = 1; n < n_levels; ++n) {
        trip.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
    }
    a.setFromTriplets(trip.begin(), trip.end());
    a.makeCompressed();
    return a;
}

// I_2 ⊗ a on the full space
inline SparseOp annihilation(const HilbertSpec& spec) {
    return kron(sparse_identity(2), annihilation_vib(spec.n_cutoff));
}

// |g><e| ⊗ I_vib
inline SparseOp sigma_minus(const HilbertSpec& spec) {
    SparseOp sm(2, 2);
    sm.insert(0, 1) = 1.0;
    sm.makeCompressed();
    return kron(sm, sparse_identity(spec.n_cutoff));
}

inline SparseOp sigma_plus(const HilbertSpec& spec) { return adjoint(sigma_minus(spec)); }

inline SparseOp number_electronic(const HilbertSpec& spec) {
    const SparseOp s = sigma_minus(spec);
    return op_mul(adjoint(s), s);
}

inline SparseOp number_vibrational(const HilbertSpec& spec) {
    const SparseOp b = annihilation(spec);
    return op_mul(adjoint(b), b);
}

// Z2 parity: diagonal (-1)^(s+n)
inline SparseOp parity(const HilbertSpec& spec) {
    SparseOp p(spec.dim(), spec.dim());
    for (int s = 0; s < 2; ++s) {
        for (int n = 0; n < spec.n_cutoff; ++n) {
            const int i = spec.index(s, n);
            p.insert(i, i) = ((s + n) % 2 == 0) ? 1.0 : -1.0;
        }
    }
    p.makeCompressed();
    return p;
}

inline SparseOp identity(const HilbertSpec& spec) { return sparse_identity(spec.dim()); }

// ------------------------------ displacement --------------------------------

// Exact Fock-basis matrix elements of D(alpha) via the associated-Laguerre
// recurrence: for n >= m,
//   <n|D|m> = alpha^(n-m) sqrt(m!/n!) e^(-|alpha|^2/2) L_m^(n-m)(|alpha|^2),
// evaluated diagonal-by-diagonal so the factorial ratio stays bounded.
inline DenseOp displacement_vib(int n_levels, Complex alpha) {
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
        throw std::invalid_argument("displacement_vib: alpha must be finite");
    }
    DenseOp d = DenseOp::Zero(n_levels, n_levels);
    const double x = std::norm(alpha);
    const double pref = std::exp(-0.5 * x);
    for (int diag = 0; diag < n_levels; ++diag) {
        Complex upper = std::pow(alpha, diag);
        Complex lower = std::pow(-std::conj(alpha), diag);
        double ratio = 1.0;  // sqrt(m!/(m+diag)!) at m = 0
        for (int j = 1; j <= diag; ++j) ratio /= std::sqrt(static_cast<double>(j));
        double lag_prev = 0.0;  // L_{m-1}^(diag)
        double lag = 1.0;       // L_m^(diag), m = 0
        for (int m = 0; m + diag < n_levels; ++m) {
            if (m > 0) {
                const double lag_next =
                    ((2.0 * (m - 1) + diag + 1 - x) * lag - (m - 1.0 + diag) * lag_prev) / m;
                lag_prev = lag;
                lag = lag_next;
                ratio *= std::sqrt(static_cast<double>(m) / (m + diag));
            }
            const double val = pref * ratio * lag;
            d(m + diag, m) = val * upper;
            d(m, m + diag) = val * lower;
        }
    }
    return d;
}

// Full-space displacement D(eta) acting as identity on the electronic factor
inline SparseOp displacement(const HilbertSpec& spec, double eta) {
    return kron(sparse_identity(2), sparse_from_dense(displacement_vib(spec.n_cutoff, eta)));
}

// ------------------------------ states --------------------------------------

inline StateVector basis_state(const HilbertSpec& spec, int s, int n) {
    if (s < 0 || s > 1 || n < 0 || n >= spec.n_cutoff) {
        throw std::invalid_argument("basis_state: index out of range");
    }
    StateVector psi = StateVector::Zero(spec.dim());
    psi(spec.index(s, n)) = 1.0;
    return psi;
}

inline StateVector vacuum(const HilbertSpec& spec) { return basis_state(spec, 0, 0); }

inline Eigen::VectorXcd coherent_amplitudes(int n_levels, Complex beta) {
    Eigen::VectorXcd c(n_levels);
    c(0) = std::exp(-0.5 * std::norm(beta));
    for (int n = 1; n < n_levels; ++n) {
        c(n) = c(n - 1) * beta / std::sqrt(static_cast<double>(n));
    }
    return c;
}

// Electronic ground ⊗ coherent |beta>; rejects amplitudes the cutoff cannot hold
inline StateVector coherent_state(const HilbertSpec& spec, Complex beta) {
    if (std::norm(beta) >= 0.25 * spec.n_cutoff) {
        throw std::invalid_argument("coherent_state: |beta|^2 must be < n_cutoff/4");
    }
    StateVector psi = StateVector::Zero(spec.dim());
    psi.segment(0, spec.n_cutoff) = coherent_amplitudes(spec.n_cutoff, beta);
    psi.normalize();
    return psi;
}

// (|beta> + sign|-beta>)/sqrt(N±) with N± = 2 ± 2 exp(-2|beta|^2)
inline StateVector cat_state(const HilbertSpec& spec, Complex beta, int sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("cat_state: sign must be ±1");
    if (std::norm(beta) >= 0.25 * spec.n_cutoff) {
        throw std::invalid_argument("cat_state: |beta|^2 must be < n_cutoff/4");
    }
    const double norm_sq = 2.0 + 2.0 * sign * std::exp(-2.0 * std::norm(beta));
    if (norm_sq < 1e-12) {
        throw std::invalid_argument("cat_state: degenerate (zero-norm) superposition");
    }
    StateVector psi = StateVector::Zero(spec.dim());
    psi.segment(0, spec.n_cutoff) =
        (coherent_amplitudes(spec.n_cutoff, beta) +
         static_cast<double>(sign) * coherent_amplitudes(spec.n_cutoff, -beta)) /
        std::sqrt(norm_sq);
    psi.normalize();
    return psi;
}

inline double norm_error(const StateVector& psi) { return std::abs(psi.norm() - 1.0); }

}  // namespace vibronic::fock
