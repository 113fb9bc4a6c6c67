#include "slowmf/integrate.hpp"

#include "slowmf/errors.hpp"

#include <cmath>
#include <string>

namespace slowmf {

std::string to_string(Scheme s) { return s == Scheme::exponential ? "exponential" : "euler"; }

Scheme scheme_from_string(const std::string& s) {
    if (s == "exponential") return Scheme::exponential;
    if (s == "euler") return Scheme::euler;
    throw ConfigError("unknown scheme '" + s + "'");
}

State Trajectory::state(std::size_t i) const {
    const auto c = static_cast<Eigen::Index>(i);
    return {fast.col(c), slow.col(c)};
}

namespace {

/// Slow-block stepper shared by the full and the reduced systems.
class SlowStepper {
public:
    SlowStepper(const Mat& B, double h, Scheme scheme) : B_(B), h_(h), scheme_(scheme) {
        if (scheme == Scheme::exponential) {
            const PhiSet p = phi_functions(B * h);
            E_ = p.exp;
            w_pred_ = h * p.phi1;
            w0_ = h * (p.phi1 - p.phi2);
            w1_ = h * p.phi2;
        }
    }

    Vec predict(const Vec& v, const Vec& g0) const {
        if (scheme_ == Scheme::exponential) return E_ * v + w_pred_ * g0;
        return v + h_ * (B_ * v + g0);
    }

    Vec correct(const Vec& v, const Vec& g0, const Vec& v_pred, const Vec& g1) const {
        if (scheme_ == Scheme::exponential) return E_ * v + w0_ * g0 + w1_ * g1;
        return v + 0.5 * h_ * ((B_ * v + g0) + (B_ * v_pred + g1));
    }

private:
    const Mat& B_;
    double h_;
    Scheme scheme_;
    Mat E_, w_pred_, w0_, w1_;
};

struct Alignment {
    std::size_t first = 0;   ///< noise node of the first solver node
    std::size_t factor = 1;  ///< noise steps per solver step
};

Alignment align(const TimeGrid& noise_grid, const TimeGrid& grid) {
    const double ratio = grid.dt() / noise_grid.dt();
    const double r = std::round(ratio);
    if (r < 1.0 || std::abs(ratio - r) > 1e-9 * r) {
        throw ConfigError("solver grid step must be an integer multiple of the noise step");
    }
    Alignment al;
    al.factor = static_cast<std::size_t>(r);
    auto first = noise_grid.find_node(grid.t_start());
    if (!first) throw RangeError("solver grid start is not a node of the noise grid");
    al.first = *first;
    if (al.first + grid.n_steps() * al.factor > noise_grid.n_steps()) {
        throw RangeError("solver grid extends past the noise sample");
    }
    return al;
}

void check_resolution(const SlowFastModel& m, const TimeGrid& grid, double mu) {
    double limit = m.eps / 20.0;
    if (mu > 0.0) limit = std::min(limit, mu / 10.0);
    if (grid.dt() > limit * (1.0 + 1e-12)) {
        throw ResolutionError("solver: dt = " + std::to_string(grid.dt()) +
                                  " is too coarse; need dt <= " + std::to_string(limit),
                              limit);
    }
}

void check_finite(const Vec& u, const Vec& v, double t) {
    if (!u.allFinite() || !v.allFinite()) {
        throw DivergenceError("solver: non-finite state at t = " + std::to_string(t), t);
    }
}

Trajectory solve_full(const SlowFastModel& m, const NoiseBundle& noise, const State& zeta,
                      const TimeGrid& grid, Scheme scheme, bool colored) {
    if (zeta.fast.size() != m.n_fast() || zeta.slow.size() != m.n_slow()) {
        throw ValidationError("solver: initial state dimensions do not match the model");
    }
    if (colored && !noise.has_ou()) throw ConfigError("solve_rde: noise bundle has no OU path");
    check_resolution(m, grid, colored ? noise.mu() : 0.0);
    const Alignment al = align(noise.grid(), grid);

    const double h = grid.dt();
    const double inv_eps = 1.0 / m.eps;
    const Vec scale = m.sigma / std::sqrt(m.eps);
    const Mat E = expm(m.A * (h * inv_eps));
    const SlowStepper slow(m.B, h, scheme);
    const auto& inc = noise.brownian->increments();
    const std::vector<double>* z = colored ? &noise.ou->values() : nullptr;

    Trajectory tr;
    tr.grid = grid;
    tr.fast.resize(m.n_fast(), static_cast<Eigen::Index>(grid.size()));
    tr.slow.resize(m.n_slow(), static_cast<Eigen::Index>(grid.size()));
    tr.meta = {m.name, colored ? "rde" : "sde", noise.seed(), scheme, h, colored ? noise.mu() : 0.0};

    Vec u = zeta.fast;
    Vec v = zeta.slow;
    tr.fast.col(0) = u;
    tr.slow.col(0) = v;
    for (std::size_t i = 0; i < grid.n_steps(); ++i) {
        const std::size_t k0 = al.first + i * al.factor;
        double forcing = 0.0;
        if (colored) {
            forcing = (*z)[k0] * h;
        } else {
            for (std::size_t k = 0; k < al.factor; ++k) forcing += inc[k0 + k];
        }
        const Vec fu = m.f(u, v);
        const Vec g0 = m.g(u, v, m.a);
        Vec u_next;
        if (scheme == Scheme::exponential) {
            u_next = E * (u + (h * inv_eps) * fu) + scale * forcing;
        } else {
            u_next = u + (h * inv_eps) * (m.A * u + fu) + scale * forcing;
        }
        const Vec v_pred = slow.predict(v, g0);
        const Vec g1 = m.g(u_next, v_pred, m.a);
        v = slow.correct(v, g0, v_pred, g1);
        u = std::move(u_next);
        check_finite(u, v, grid.time(i + 1));
        tr.fast.col(static_cast<Eigen::Index>(i + 1)) = u;
        tr.slow.col(static_cast<Eigen::Index>(i + 1)) = v;
    }
    return tr;
}

}  // namespace

Trajectory solve_sde(const SlowFastModel& model, const NoiseBundle& noise, const State& zeta,
                     const TimeGrid& grid, Scheme scheme) {
    return solve_full(model, noise, zeta, grid, scheme, false);
}

Trajectory solve_rde(const SlowFastModel& model, const NoiseBundle& noise, const State& zeta,
                     const TimeGrid& grid, Scheme scheme) {
    return solve_full(model, noise, zeta, grid, scheme, true);
}

Trajectory solve_reduced(const Mat& B, const SlowFn& g, const ManifoldFn& h, const Vec& xi0,
                         double a, const TimeGrid& grid, Scheme scheme) {
    if (xi0.size() != B.rows()) throw ValidationError("solve_reduced: xi0 dimension mismatch");
    const double dt = grid.dt();
    const SlowStepper slow(B, dt, scheme);
    auto eval_h = [&](std::size_t step, const Vec& xi) -> Vec {
        const double t = grid.time(step);
        try {
            return h(step, t, xi);
        } catch (const std::exception& e) {
            throw Error("solve_reduced: manifold evaluation failed at t = " + std::to_string(t) +
                        ": " + e.what());
        }
    };

    Trajectory tr;
    tr.grid = grid;
    tr.slow.resize(B.rows(), static_cast<Eigen::Index>(grid.size()));
    tr.meta.system = "reduced";
    tr.meta.scheme = scheme;
    tr.meta.dt = dt;

    Vec v = xi0;
    Vec u = eval_h(0, v);
    tr.fast.resize(u.size(), static_cast<Eigen::Index>(grid.size()));
    tr.fast.col(0) = u;
    tr.slow.col(0) = v;
    for (std::size_t i = 0; i < grid.n_steps(); ++i) {
        const Vec g0 = g(u, v, a);
        const Vec v_pred = slow.predict(v, g0);
        const Vec u_pred = eval_h(i + 1, v_pred);
        const Vec g1 = g(u_pred, v_pred, a);
        v = slow.correct(v, g0, v_pred, g1);
        u = eval_h(i + 1, v);
        check_finite(u, v, grid.time(i + 1));
        tr.fast.col(static_cast<Eigen::Index>(i + 1)) = u;
        tr.slow.col(static_cast<Eigen::Index>(i + 1)) = v;
    }
    return tr;
}

}  // namespace slowmf
