#pragma once

// Trajectories of DK-STP quasi-dynamic systems and of original vs OR systems.

#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "dkstp.hpp"
#include "errors.hpp"
#include "matrix.hpp"
#include "orsys.hpp"
#include "xspace.hpp"

namespace orkit {

using InputSignal = std::function<VecD(double)>;

inline InputSignal zero_input(Eigen::Index m) {
    return [m](double) { return VecD::Zero(m); };
}

struct Trajectory {
    std::vector<double> times;
    std::vector<VecD> states;
    // (y0, y(0+)) when the initial condition was moved into the home dimension.
    std::optional<std::pair<VecD, VecD>> jump;

    std::size_t size() const { return states.size(); }
    const VecD& back() const { return states.back(); }
};

// Number of grid intervals for [0, T] with step dt.
inline int grid_steps(double t_end, double dt) {
    if (!(t_end > 0.0) || !(dt > 0.0)) throw Error("simulation needs T > 0 and dt > 0");
    return static_cast<int>(std::llround(t_end / dt));
}

// y(1) = A |x| y0, then y(t+1) = Pi_A y(t).
inline Trajectory sim_discrete(const MatD& a, const DimVector& y0, int steps,
                               const Bridge& br = Bridge::projecting()) {
    if (steps < 0) throw Error("steps must be >= 0");
    Trajectory tr;
    tr.times.push_back(0.0);
    tr.states.push_back(y0.entries());
    if (steps == 0) return tr;
    const MatD pa = pi_A(a, br);
    VecD y = dk_action(a, y0, br).entries();
    for (int t = 1; t <= steps; ++t) {
        if (t > 1) y = pa * y;
        tr.times.push_back(t);
        tr.states.push_back(y);
    }
    return tr;
}

// y(1) = A |x| y0 + B u(0), then y(t+1) = Pi_A y(t) + B u(t).
inline Trajectory sim_discrete_controlled(const MatD& a, const MatD& b, const DimVector& y0, const InputSignal& u,
                                          int steps, const Bridge& br = Bridge::projecting()) {
    if (steps < 0) throw Error("steps must be >= 0");
    if (b.rows() != a.rows()) throw ShapeError("B must have as many rows as A");
    auto input = [&](int t) {
        VecD v = u(t);
        if (v.size() != b.cols()) throw ShapeError("input dimension mismatch");
        return v;
    };
    Trajectory tr;
    tr.times.push_back(0.0);
    tr.states.push_back(y0.entries());
    if (steps == 0) return tr;
    const MatD pa = pi_A(a, br);
    VecD y = dk_action(a, y0, br).entries() + b * input(0);
    for (int t = 1; t <= steps; ++t) {
        if (t > 1) y = pa * y + b * input(t - 1);
        tr.times.push_back(t);
        tr.states.push_back(y);
    }
    return tr;
}

// phi_1(Z) = sum_k Z^k / (k+1)!, truncated like dk_analytic.
inline MatD phi1(const MatD& z, SeriesOptions opt = {}) {
    if (z.rows() != z.cols()) throw ShapeError("phi1: matrix is not square");
    MatD acc = MatD::Identity(z.rows(), z.cols());
    MatD term = MatD::Identity(z.rows(), z.cols());
    for (int k = 1; k <= opt.max_terms; ++k) {
        term = term * z / static_cast<double>(k + 1);
        if (term.isZero(0.0)) return acc;
        acc += term;
        if (term.norm() <= opt.rel_tol * acc.norm()) return acc;
    }
    throw NonConvergence("phi1 series did not converge");
}

// y(t) = Psi_{m x q} y0 + A t phi_1(t Psi_{n x m} A) Psi_{n x q} y0
inline VecD series_solution(const MatD& a, const DimVector& y0, double t, const Bridge& br = Bridge::projecting()) {
    const auto m = a.rows(), n = a.cols(), q = y0.dim();
    const VecD jumped = br.matrix(m, q) * y0.entries();
    if (t == 0.0) return jumped;
    const MatD q_mat = br.matrix(n, m) * a;
    return jumped + a * (t * phi1(t * q_mat)) * (br.matrix(n, q) * y0.entries());
}

inline Trajectory sim_continuous(const MatD& a, const DimVector& y0, double t_end, double dt,
                                 const Bridge& br = Bridge::projecting()) {
    const int steps = grid_steps(t_end, dt);
    Trajectory tr;
    const VecD jumped = br.matrix(a.rows(), y0.dim()) * y0.entries();
    tr.jump = std::make_pair(y0.entries(), jumped);
    for (int k = 0; k <= steps; ++k) {
        const double t = k * dt;
        tr.times.push_back(t);
        tr.states.push_back(k == 0 ? jumped : series_solution(a, y0, t, br));
    }
    return tr;
}

// Classical RK4 for y' = L y + N u(t).
inline Trajectory sim_continuous_controlled(const MatD& l, const MatD& n, const VecD& y0, const InputSignal& u,
                                            double t_end, double dt) {
    if (l.rows() != l.cols() || n.rows() != l.rows() || y0.size() != l.rows())
        throw ShapeError("sim_continuous_controlled: shape mismatch");
    auto input = [&](double t) {
        VecD v = u(t);
        if (v.size() != n.cols()) throw ShapeError("input dimension mismatch");
        return v;
    };
    auto rhs = [&](double t, const VecD& y) -> VecD { return l * y + n * input(t); };
    const int steps = grid_steps(t_end, dt);
    Trajectory tr;
    VecD y = y0;
    tr.times.push_back(0.0);
    tr.states.push_back(y);
    for (int k = 0; k < steps; ++k) {
        const double t = k * dt;
        const VecD k1 = rhs(t, y);
        const VecD k2 = rhs(t + dt / 2, y + dt / 2 * k1);
        const VecD k3 = rhs(t + dt / 2, y + dt / 2 * k2);
        const VecD k4 = rhs(t + dt, y + dt * k3);
        y += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        tr.times.push_back((k + 1) * dt);
        tr.states.push_back(y);
    }
    return tr;
}

// x(t+1) = A x(t) + B u(t).
inline Trajectory sim_discrete_classical(const MatD& a, const MatD& b, const VecD& x0, const InputSignal& u, int steps) {
    if (a.rows() != a.cols() || b.rows() != a.rows() || x0.size() != a.rows())
        throw ShapeError("sim_discrete_classical: shape mismatch");
    Trajectory tr;
    VecD x = x0;
    tr.times.push_back(0.0);
    tr.states.push_back(x);
    for (int t = 0; t < steps; ++t) {
        VecD v = u(t);
        if (v.size() != b.cols()) throw ShapeError("input dimension mismatch");
        x = a * x + b * v;
        tr.times.push_back(t + 1);
        tr.states.push_back(x);
    }
    return tr;
}

struct SimGrid {
    double t_end = 1.0;
    double dt = 1e-3;
    int steps = 10; // discrete-time systems
};

// Simulates the original system and x0 -> OR state, then compares the
// original outputs y = H x with the OR outputs S z.
struct CompareReport {
    double max_err = 0.0;
    std::vector<double> max_err_per_output;
    std::vector<double> rms_err_per_output;
    Trajectory original_outputs;
    Trajectory or_outputs;
};

inline CompareReport compare(const LinearSystem& sys, const ORSystem& o, const VecD& x0, const InputSignal& u,
                             const SimGrid& grid) {
    sys.validate();
    if (x0.size() != sys.n()) throw ShapeError("x0 has wrong dimension");
    MatD a = to_double(sys.a);
    const MatD b = to_double(sys.b), h = to_double(sys.h);
    if (o.feedback) a += b * to_double(*o.feedback);

    VecD z0;
    if (o.init == InitRule::observe_state && o.observer)
        z0 = to_double(*o.observer) * x0;
    else
        z0 = project(DimVector(VecD(h * x0)), o.dim()).entries();

    const MatD l = to_double(o.l), nn = to_double(o.n), sel = to_double(o.selector);
    Trajectory full, red;
    if (sys.time == TimeKind::discrete) {
        full = sim_discrete_classical(a, b, x0, u, grid.steps);
        red = sim_discrete_classical(l, nn, z0, u, grid.steps);
    } else {
        full = sim_continuous_controlled(a, b, x0, u, grid.t_end, grid.dt);
        red = sim_continuous_controlled(l, nn, z0, u, grid.t_end, grid.dt);
    }

    CompareReport rep;
    const auto p = h.rows();
    rep.max_err_per_output.assign(static_cast<std::size_t>(p), 0.0);
    rep.rms_err_per_output.assign(static_cast<std::size_t>(p), 0.0);
    for (std::size_t k = 0; k < full.size(); ++k) {
        const VecD y = h * full.states[k];
        const VecD yr = sel * red.states[k];
        rep.original_outputs.times.push_back(full.times[k]);
        rep.original_outputs.states.push_back(y);
        rep.or_outputs.times.push_back(red.times[k]);
        rep.or_outputs.states.push_back(yr);
        for (Eigen::Index i = 0; i < p; ++i) {
            const double e = std::fabs(y(i) - yr(i));
            auto& mx = rep.max_err_per_output[static_cast<std::size_t>(i)];
            mx = std::max(mx, e);
            rep.rms_err_per_output[static_cast<std::size_t>(i)] += e * e;
        }
    }
    for (auto& r : rep.rms_err_per_output) r = std::sqrt(r / static_cast<double>(full.size()));
    for (double e : rep.max_err_per_output) rep.max_err = std::max(rep.max_err, e);
    return rep;
}

} // namespace orkit
