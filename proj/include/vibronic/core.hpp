// core.hpp — shared types, sparse/dense helpers, and a small worker pool

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <atomic>
#include <complex>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace vibronic {

using Complex = std::complex<double>;
using SparseOp = Eigen::SparseMatrix<Complex>;
using DenseOp = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

inline constexpr double two_pi = 6.283185307179586476925286766559;

// Solver/integrator failures that map to a distinct CLI exit code
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ------------------------------ sparse helpers ------------------------------

inline SparseOp sparse_identity(Eigen::Index n) {
    SparseOp id(n, n);
    id.setIdentity();
    return id;
}

inline SparseOp sparse_from_dense(const DenseOp& m, double prune = 0.0) {
    SparseOp s = m.sparseView(1.0, prune);
    s.makeCompressed();
    return s;
}

// Kronecker product with deterministic (column-major) entry ordering
inline SparseOp kron(const SparseOp& a, const SparseOp& b) {
    SparseOp out(a.rows() * b.rows(), a.cols() * b.cols());
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(static_cast<std::size_t>(a.nonZeros()) * static_cast<std::size_t>(b.nonZeros()));
    for (int ka = 0; ka < a.outerSize(); ++ka) {
        for (SparseOp::InnerIterator ita(a, ka); ita; ++ita) {
            for (int kb = 0; kb < b.outerSize(); ++kb) {
                for (SparseOp::InnerIterator itb(b, kb); itb; ++itb) {
                    trip.emplace_back(ita.row() * b.rows() + itb.row(),
                                      ita.col() * b.cols() + itb.col(),
                                      ita.value() * itb.value());
                }
            }
        }
    }
    out.setFromTriplets(trip.begin(), trip.end());
    out.makeCompressed();
    return out;
}

inline SparseOp adjoint(const SparseOp& a) {
    SparseOp out = SparseOp(a.adjoint());
    out.makeCompressed();
    return out;
}

// Checked algebra wrappers; Eigen expressions are used internally where the
// dimensions are correct by construction.
inline SparseOp op_add(const SparseOp& a, const SparseOp& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("op_add: dimension mismatch");
    }
    return SparseOp(a + b);
}

inline SparseOp op_mul(const SparseOp& a, const SparseOp& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("op_mul: dimension mismatch");
    }
    SparseOp out = SparseOp(a * b);
    out.makeCompressed();
    return out;
}

inline SparseOp op_scale(Complex s, const SparseOp& a) { return SparseOp(s * a); }

// ------------------------------ dense helpers -------------------------------

inline DenseOp dense(const SparseOp& a) { return DenseOp(a); }

inline double max_abs(const DenseOp& m) { return m.cwiseAbs().maxCoeff(); }

inline double max_abs(const SparseOp& m) {
    double mx = 0.0;
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseOp::InnerIterator it(m, k); it; ++it) {
            mx = std::max(mx, std::abs(it.value()));
        }
    }
    return mx;
}

inline double hermiticity_error(const SparseOp& a) {
    return max_abs(SparseOp(a - SparseOp(a.adjoint())));
}

inline DenseOp hermitize(const DenseOp& m) { return 0.5 * (m + m.adjoint()); }

inline Complex expectation(const DenseOp& rho, const SparseOp& op) {
    return (op * rho).eval().trace();
}

inline Complex expectation(const StateVector& psi, const SparseOp& op) {
    return psi.dot(op * psi);
}

// Trace distance (1/2)||a - b||_1 between Hermitian matrices
inline double trace_distance(const DenseOp& a, const DenseOp& b) {
    Eigen::SelfAdjointEigenSolver<DenseOp> es(hermitize(a - b), Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline double min_eigenvalue(const DenseOp& h) {
    Eigen::SelfAdjointEigenSolver<DenseOp> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// ------------------------------ worker pool ---------------------------------

// Runs fn(i) for i in [0, n); results must be written to per-index slots so
// the outcome is independent of the worker count.
inline void parallel_for_index(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    const int count = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    for (int w = 0; w < count; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace vibronic
