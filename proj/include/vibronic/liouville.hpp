// liouville.hpp — Lindblad superoperator assembly, steady-state solve, and
// density-matrix propagation on the vectorized space

#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <cmath>
#include <vector>

#include "vibronic/core.hpp"
#include "vibronic/fock.hpp"
#include "vibronic/integrate.hpp"
#include "vibronic/model.hpp"

namespace vibronic::liouville {

using fock::HilbertSpec;

struct JumpChannel {
    SparseOp op;
    double rate;  // [GHz]; multiplied by 2*pi inside the builders
};

// Decay channels from the parameter record: sqrt(g0) sigma, sqrt(gv) b, and
// the two dephasing channels when their rates are nonzero.
inline std::vector<JumpChannel> decay_channels(const model::ModelParams& p) {
    p.validate();
    const HilbertSpec spec = p.space();
    std::vector<JumpChannel> out;
    out.push_back({fock::sigma_minus(spec), p.gamma0});
    out.push_back({fock::annihilation(spec), p.gamma_v});
    if (p.gamma_phi_opt > 0) out.push_back({fock::number_electronic(spec), p.gamma_phi_opt});
    if (p.gamma_phi_v > 0) out.push_back({fock::number_vibrational(spec), p.gamma_phi_v});
    return out;
}

// Column-stacking vectorization: vec(rho) index of element (i,j) is j*D+i, so
//   L = -i (I x H - H^T x I) + sum_c (2pi rate_c/2) (2 conj(c) x c - I x c+c - (c+c)^T x I).
inline SparseOp build_liouvillian(const SparseOp& h, const std::vector<JumpChannel>& channels) {
    const Eigen::Index d = h.rows();
    if (h.cols() != d) throw std::invalid_argument("build_liouvillian: H must be square");
    const SparseOp id = sparse_identity(d);
    const Complex mi(0.0, -1.0);
    SparseOp lv = SparseOp(mi * kron(id, h) - mi * kron(SparseOp(h.transpose()), id));
    for (const auto& ch : channels) {
        if (ch.op.rows() != d || ch.op.cols() != d) {
            throw std::invalid_argument("build_liouvillian: channel dimension mismatch");
        }
        if (ch.rate < 0) throw std::invalid_argument("build_liouvillian: negative rate");
        if (ch.rate == 0) continue;
        const double g = two_pi * ch.rate;
        const SparseOp cdc = op_mul(adjoint(ch.op), ch.op);
        lv += SparseOp(g * kron(SparseOp(ch.op.conjugate()), ch.op));
        lv -= SparseOp(0.5 * g * kron(id, cdc));
        lv -= SparseOp(0.5 * g * kron(SparseOp(cdc.transpose()), id));
    }
    lv.makeCompressed();
    return lv;
}

inline Eigen::VectorXcd vectorize(const DenseOp& rho) {
    return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

inline DenseOp unvectorize(const Eigen::VectorXcd& v) {
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(v.size()))));
    return Eigen::Map<const DenseOp>(v.data(), d, d);
}

inline DenseOp apply(const SparseOp& lv, const DenseOp& rho) {
    return unvectorize(lv * vectorize(rho));
}

// ------------------------------ steady state --------------------------------

struct SteadyStateOptions {
    bool check_degenerate = true;
    double residual_tol = 1e-8;
    int iterative_threshold_dim = 40000;  // vectorized dimension above which the
                                          // Krylov fallback replaces the direct solve
};

struct SteadyStateResult {
    DenseOp rho;
    double residual = 0.0;
    bool degenerate_warning = false;
};

namespace detail {

// Replace the equation for element `pivot` (a diagonal index) by Tr rho = 1.
inline SparseOp with_trace_row(const SparseOp& lv, Eigen::Index d, Eigen::Index pivot_row) {
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(static_cast<std::size_t>(lv.nonZeros()) + static_cast<std::size_t>(d));
    for (int k = 0; k < lv.outerSize(); ++k) {
        for (SparseOp::InnerIterator it(lv, k); it; ++it) {
            if (it.row() != pivot_row) trip.emplace_back(it.row(), it.col(), it.value());
        }
    }
    for (Eigen::Index i = 0; i < d; ++i) trip.emplace_back(pivot_row, i * d + i, Complex(1.0));
    SparseOp m(lv.rows(), lv.cols());
    m.setFromTriplets(trip.begin(), trip.end());
    m.makeCompressed();
    return m;
}

inline bool solve_constrained(const SparseOp& lv, Eigen::Index d, Eigen::Index pivot_row,
                              const SteadyStateOptions& opts, Eigen::VectorXcd& x) {
    const SparseOp m = with_trace_row(lv, d, pivot_row);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(m.rows());
    rhs(pivot_row) = 1.0;
    if (m.rows() <= opts.iterative_threshold_dim) {
        Eigen::SparseLU<SparseOp> lu;
        lu.compute(m);
        if (lu.info() != Eigen::Success) return false;
        x = lu.solve(rhs);
        return lu.info() == Eigen::Success && x.allFinite();
    }
    Eigen::BiCGSTAB<SparseOp, Eigen::IncompleteLUT<Complex>> krylov;
    krylov.setTolerance(1e-12);
    krylov.setMaxIterations(2000);
    krylov.compute(m);
    if (krylov.info() != Eigen::Success) return false;
    x = krylov.solve(rhs);
    return krylov.info() == Eigen::Success && x.allFinite();
}

}  // namespace detail

// Solve L vec(rho) = 0 with Tr rho = 1 imposed by row replacement; Hermitized
// and trace-normalized, with the residual ||L vec(rho)|| reported.
inline SteadyStateResult steady_state(const SparseOp& lv, const SteadyStateOptions& opts = {}) {
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(lv.rows()))));
    if (d * d != lv.rows() || lv.rows() != lv.cols()) {
        throw std::invalid_argument("steady_state: Liouvillian must act on a vectorized square matrix");
    }

    Eigen::VectorXcd x;
    if (!detail::solve_constrained(lv, d, 0, opts, x)) {
        throw NumericalError("steady_state: singular constrained system (trace-row solve failed)");
    }
    double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
    if ((lv * x).norm() > opts.residual_tol * scale * lv.rows()) {
        throw NumericalError("steady_state: constrained solve residual too large");
    }

    SteadyStateResult result;
    DenseOp rho = hermitize(unvectorize(x));
    rho /= rho.trace().real();
    result.rho = rho;
    result.residual = (lv * vectorize(rho)).norm();

    if (opts.check_degenerate) {
        // a second candidate anchored on a different diagonal equation; any
        // disagreement signals a non-unique nullspace
        Eigen::VectorXcd x2;
        const Eigen::Index pivot2 = (d - 1) * d + (d - 1);
        if (!detail::solve_constrained(lv, d, pivot2, opts, x2)) {
            result.degenerate_warning = true;
        } else {
            DenseOp rho2 = hermitize(unvectorize(x2));
            const double tr = rho2.trace().real();
            if (std::abs(tr) < 1e-12) {
                result.degenerate_warning = true;
            } else {
                rho2 /= tr;
                if (trace_distance(rho, rho2) > 1e-6) result.degenerate_warning = true;
            }
        }
    }
    return result;
}

inline SteadyStateResult steady_state(const SparseOp& h, const std::vector<JumpChannel>& channels,
                                      const SteadyStateOptions& opts = {}) {
    return steady_state(build_liouvillian(h, channels), opts);
}

// ------------------------------ propagation ---------------------------------

struct PropagateOptions {
    StepControl step;
    double trace_drift_tol = 1e-6;
};

// Integrate d rho/dt = L[rho] through the (increasing) grid; outputs Hermitized.
inline std::vector<DenseOp> propagate(const SparseOp& lv, const DenseOp& rho0,
                                      const std::vector<double>& t_grid,
                                      const PropagateOptions& opts = {}) {
    const auto d = rho0.rows();
    if (d * d != lv.rows()) throw std::invalid_argument("propagate: dimension mismatch");
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (t_grid[i] <= t_grid[i - 1]) {
            throw std::invalid_argument("propagate: t_grid must be strictly increasing");
        }
    }
    const double trace0 = rho0.trace().real();
    auto rhs = [&lv](const StateVector& v) { return StateVector(lv * v); };

    std::vector<DenseOp> out;
    out.reserve(t_grid.size());
    StateVector y = vectorize(rho0);
    double t = t_grid.empty() ? 0.0 : t_grid.front();
    double dt = 1e-3;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (i == 0) {
            out.push_back(hermitize(rho0));
            continue;
        }
        advance(rhs, y, t, t_grid[i], dt, opts.step);
        DenseOp rho = hermitize(unvectorize(y));
        if (std::abs(rho.trace().real() - trace0) > opts.trace_drift_tol) {
            throw NumericalError("propagate: trace drift exceeded tolerance");
        }
        out.push_back(std::move(rho));
    }
    return out;
}

// ------------------------------ diagnostics ---------------------------------

// Total population in the top two Fock levels of both electronic branches;
// the runtime truncation monitor (downstream checks use threshold 1e-4).
inline double population_leak(const DenseOp& rho, const HilbertSpec& spec) {
    if (rho.rows() != spec.dim()) throw std::invalid_argument("population_leak: dimension mismatch");
    double leak = 0.0;
    for (int s = 0; s < 2; ++s) {
        for (int n = spec.n_cutoff - 2; n < spec.n_cutoff; ++n) {
            leak += rho(spec.index(s, n), spec.index(s, n)).real();
        }
    }
    return leak;
}

}  // namespace vibronic::liouville
