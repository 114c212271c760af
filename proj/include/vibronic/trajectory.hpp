// trajectory.hpp — Monte-Carlo wavefunction unraveling of the master equation:
// non-Hermitian drift, threshold-triggered jumps with bisected jump times,
// ensemble statistics and histograms

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "vibronic/core.hpp"
#include "vibronic/integrate.hpp"
#include "vibronic/liouville.hpp"
#include "vibronic/rng.hpp"

namespace vibronic::trajectory {

using liouville::JumpChannel;

struct TrajectoryConfig {
    int n_traj = 1;
    double t_final = 1.0;        // [ns]
    double dt_max = 1e-3;        // [ns] outer recording/step cap
    std::uint64_t seed = 0;
    std::vector<SparseOp> observables;  // Hermitian read-outs recorded along the run
    int record_stride = 1;       // record every stride-th outer node
    int workers = 1;
    double norm_floor = 1e-12;
    StepControl step;

    void validate(Eigen::Index dim) const {
        if (n_traj < 1) throw std::invalid_argument("TrajectoryConfig: n_traj must be >= 1");
        if (dt_max <= 0 || t_final <= 0) {
            throw std::invalid_argument("TrajectoryConfig: t_final and dt_max must be > 0");
        }
        if (record_stride < 1) throw std::invalid_argument("TrajectoryConfig: record_stride >= 1");
        for (const auto& op : observables) {
            if (op.rows() != dim || op.cols() != dim) {
                throw std::invalid_argument("TrajectoryConfig: observable dimension mismatch");
            }
            if (hermiticity_error(op) > 1e-12) {
                throw std::invalid_argument("TrajectoryConfig: observables must be Hermitian");
            }
        }
    }
};

struct JumpEvent {
    double time;
    int channel;
};

struct TrajectoryRecord {
    std::vector<double> times;       // shared recording grid [ns]
    Eigen::MatrixXd observables;     // time x observable
    std::vector<JumpEvent> jumps;
    StateVector final_state;
};

struct EnsembleTrace {
    std::vector<double> times;
    Eigen::VectorXd mean;
    Eigen::VectorXd stderr_;  // 0 for a single trajectory
};

struct EnsembleHistogram {
    Eigen::VectorXd bin_edges;  // size bins+1
    Eigen::VectorXi counts;     // size bins
    int observable = 0;
    double sample_time = 0.0;
};

namespace detail {

struct EffectiveModel {
    SparseOp h_eff;                 // H - (i/2) sum 2pi*rate c+c
    std::vector<SparseOp> ops;      // jump operators
    std::vector<SparseOp> weight_ops;  // 2pi*rate c+c per channel
};

inline EffectiveModel make_effective(const SparseOp& h, const std::vector<JumpChannel>& channels) {
    EffectiveModel m;
    m.h_eff = h;
    for (const auto& ch : channels) {
        if (ch.rate < 0) throw std::invalid_argument("run_trajectories: negative rate");
        const SparseOp weighted = SparseOp(two_pi * ch.rate * op_mul(adjoint(ch.op), ch.op));
        m.h_eff -= SparseOp(Complex(0.0, 0.5) * weighted);
        m.ops.push_back(ch.op);
        m.weight_ops.push_back(weighted);
    }
    m.h_eff.makeCompressed();
    return m;
}

// One unraveled trajectory with its own counter-based RNG stream.
inline TrajectoryRecord run_single(const EffectiveModel& m, const StateVector& psi0,
                                   const TrajectoryConfig& cfg, std::uint64_t traj_index,
                                   const std::vector<int>& record_nodes,
                                   const std::vector<double>& record_times, double dt_node) {
    PhiloxRng rng(cfg.seed, traj_index);
    auto rhs = [&m](const StateVector& v) { return StateVector(Complex(0, -1) * (m.h_eff * v)); };

    TrajectoryRecord rec;
    rec.times = record_times;
    rec.observables.resize(static_cast<Eigen::Index>(record_times.size()),
                           static_cast<Eigen::Index>(cfg.observables.size()));

    StateVector psi = psi0;
    double t = 0.0;
    double dt = dt_node;
    double threshold = rng.next_double();
    const double bisect_tol = 1e-3 * cfg.dt_max;
    std::size_t next_record = 0;
    const int n_nodes = static_cast<int>(std::llround(cfg.t_final / dt_node));

    auto record_if_due = [&](int node) {
        if (next_record < record_nodes.size() && node == record_nodes[next_record]) {
            const double norm2 = psi.squaredNorm();
            for (std::size_t j = 0; j < cfg.observables.size(); ++j) {
                rec.observables(static_cast<Eigen::Index>(next_record), static_cast<Eigen::Index>(j)) =
                    psi.dot(cfg.observables[j] * psi).real() / norm2;
            }
            ++next_record;
        }
    };

    StateVector y_try(psi.size());
    for (int node = 0; node < n_nodes; ++node) {
        record_if_due(node);
        const double t_node_end = (node + 1) * dt_node;
        while (t < t_node_end - 1e-12 * dt_node) {
            dt = std::min(dt, t_node_end - t);
            const double err = cash_karp_step(rhs, psi, dt, cfg.step, y_try);
            if (err > 1.0) {
                dt = next_step_size(dt, err, cfg.step);
                if (dt < cfg.step.dt_min) throw NumericalError("run_trajectories: step-size underflow");
                continue;
            }
            if (y_try.squaredNorm() >= threshold) {
                psi.swap(y_try);
                t += dt;
                dt = next_step_size(dt, err, cfg.step);
                continue;
            }
            // norm crossed the pre-drawn threshold inside this step: bisect the
            // crossing time to ~1e-3 dt_max, then apply a jump there
            double lo = 0.0, hi = dt;
            StateVector psi_cross = y_try;
            while (hi - lo > bisect_tol) {
                const double mid = 0.5 * (lo + hi);
                StateVector y_mid(psi.size());
                cash_karp_step(rhs, psi, mid, cfg.step, y_mid);
                if (y_mid.squaredNorm() >= threshold) {
                    lo = mid;
                } else {
                    hi = mid;
                    psi_cross = y_mid;
                }
            }
            if (psi_cross.squaredNorm() < cfg.norm_floor) {
                throw NumericalError("run_trajectories: norm underflow between jump checks; reduce dt_max");
            }
            std::vector<double> weights(m.ops.size());
            double total = 0.0;
            for (std::size_t c = 0; c < m.ops.size(); ++c) {
                weights[c] = std::max(0.0, psi_cross.dot(m.weight_ops[c] * psi_cross).real());
                total += weights[c];
            }
            if (total <= 0.0) {
                throw NumericalError("run_trajectories: vanishing jump weights at threshold crossing");
            }
            double pick = rng.next_double() * total;
            std::size_t channel = 0;
            for (; channel + 1 < weights.size(); ++channel) {
                if (pick < weights[channel]) break;
                pick -= weights[channel];
            }
            psi = m.ops[channel] * psi_cross;
            psi.normalize();
            t += hi;
            rec.jumps.push_back({t, static_cast<int>(channel)});
            threshold = rng.next_double();
        }
        t = t_node_end;  // absorb roundoff so node boundaries stay exact
    }
    record_if_due(n_nodes);
    rec.final_state = psi;  // raw drift norm; callers normalize as needed
    return rec;
}

}  // namespace detail

// Standard MCWF unraveling; bit-reproducible for a fixed seed independent of
// the worker count (streams keyed by trajectory index, merged by index).
inline std::vector<TrajectoryRecord> run_trajectories(const SparseOp& h,
                                                      const std::vector<JumpChannel>& channels,
                                                      const StateVector& psi0,
                                                      const TrajectoryConfig& cfg) {
    if (psi0.size() != h.rows()) throw std::invalid_argument("run_trajectories: state dimension mismatch");
    if (std::abs(psi0.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("run_trajectories: psi0 must be normalized");
    }
    cfg.validate(h.rows());
    const auto m = detail::make_effective(h, channels);

    const int n_nodes = std::max(1, static_cast<int>(std::ceil(cfg.t_final / cfg.dt_max - 1e-9)));
    const double dt_node = cfg.t_final / n_nodes;
    std::vector<int> record_nodes;
    for (int k = 0; k * cfg.record_stride <= n_nodes; ++k) record_nodes.push_back(k * cfg.record_stride);
    if (record_nodes.back() != n_nodes) record_nodes.push_back(n_nodes);
    std::vector<double> record_times;
    record_times.reserve(record_nodes.size());
    for (int node : record_nodes) record_times.push_back(std::min(node * dt_node, cfg.t_final));

    std::vector<TrajectoryRecord> records(static_cast<std::size_t>(cfg.n_traj));
    parallel_for_index(static_cast<std::size_t>(cfg.n_traj), cfg.workers, [&](std::size_t i) {
        records[i] = detail::run_single(m, psi0, cfg, static_cast<std::uint64_t>(i), record_nodes,
                                        record_times, dt_node);
    });
    return records;
}

// ------------------------------ ensemble reductions -------------------------

inline EnsembleTrace ensemble_average(const std::vector<TrajectoryRecord>& records,
                                      std::size_t observable) {
    if (records.empty()) throw std::invalid_argument("ensemble_average: no records");
    const auto& t0 = records.front().times;
    for (const auto& r : records) {
        if (r.times != t0) throw std::invalid_argument("ensemble_average: mismatched time grids");
        if (observable >= static_cast<std::size_t>(r.observables.cols())) {
            throw std::invalid_argument("ensemble_average: observable index out of range");
        }
    }
    const auto nt = static_cast<Eigen::Index>(t0.size());
    EnsembleTrace out;
    out.times = t0;
    out.mean = Eigen::VectorXd::Zero(nt);
    out.stderr_ = Eigen::VectorXd::Zero(nt);
    const double n = static_cast<double>(records.size());
    for (const auto& r : records) out.mean += r.observables.col(static_cast<Eigen::Index>(observable));
    out.mean /= n;
    if (records.size() > 1) {
        for (const auto& r : records) {
            const Eigen::VectorXd d =
                r.observables.col(static_cast<Eigen::Index>(observable)) - out.mean;
            out.stderr_ += d.cwiseProduct(d);
        }
        out.stderr_ = (out.stderr_ / (n * (n - 1.0))).cwiseSqrt();
    }
    return out;
}

// Histogram of the instantaneous single-trajectory expectations at the
// recorded time nearest t_sample.
inline EnsembleHistogram histogram_at(const std::vector<TrajectoryRecord>& records,
                                      std::size_t observable, double t_sample, int bins) {
    if (records.empty()) throw std::invalid_argument("histogram_at: no records");
    if (bins < 1) throw std::invalid_argument("histogram_at: bins must be >= 1");
    const auto& times = records.front().times;
    if (times.empty()) throw std::invalid_argument("histogram_at: empty record");
    if (t_sample < times.front() - 1e-12 || t_sample > times.back() + 1e-12) {
        throw std::invalid_argument("histogram_at: t_sample outside recorded range");
    }
    std::size_t idx = 0;
    double best = std::abs(times[0] - t_sample);
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double d = std::abs(times[i] - t_sample);
        if (d < best) {
            best = d;
            idx = i;
        }
    }
    std::vector<double> values;
    values.reserve(records.size());
    for (const auto& r : records) {
        values.push_back(r.observables(static_cast<Eigen::Index>(idx),
                                       static_cast<Eigen::Index>(observable)));
    }
    double lo = values[0], hi = values[0];
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi - lo < 1e-12) {
        lo -= 0.5e-12;
        hi += 0.5e-12;
    }
    const double pad = 1e-9 * (hi - lo);
    hi += pad;

    EnsembleHistogram h;
    h.observable = static_cast<int>(observable);
    h.sample_time = times[idx];
    h.bin_edges = Eigen::VectorXd::LinSpaced(bins + 1, lo, hi);
    h.counts = Eigen::VectorXi::Zero(bins);
    const double width = (hi - lo) / bins;
    for (double v : values) {
        int b = static_cast<int>((v - lo) / width);
        b = std::clamp(b, 0, bins - 1);
        h.counts(b) += 1;
    }
    return h;
}

// ------------------------------ state projection ----------------------------

struct ProjectedState {
    DenseOp projection;  // s+s |psi><psi| s+s, unnormalized
    DenseOp normalized;
    double weight = 0.0;
    bool valid = false;
};

// Excited-electronic-state projection of an instantaneous pure state.
inline ProjectedState projected_state(const StateVector& psi) {
    const auto dim = psi.size();
    if (dim % 2 != 0) throw std::invalid_argument("projected_state: dimension must be even");
    const auto half = dim / 2;
    StateVector proj = StateVector::Zero(dim);
    proj.tail(half) = psi.tail(half);
    ProjectedState out;
    out.projection = proj * proj.adjoint();
    out.weight = proj.squaredNorm();
    if (out.weight > 1e-14) {
        out.normalized = out.projection / out.weight;
        out.valid = true;
    } else {
        out.normalized = DenseOp::Zero(dim, dim);
    }
    return out;
}

}  // namespace vibronic::trajectory
