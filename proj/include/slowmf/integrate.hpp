#pragma once

#include "slowmf/grid.hpp"
#include "slowmf/model.hpp"
#include "slowmf/noise.hpp"

#include <cstdint>
#include <functional>
#include <string>

namespace slowmf {

/// exponential: exponential Euler for the fast block, exponential Heun for the slow block.
/// euler: plain Euler-Maruyama for the fast block, Heun for the slow block.
enum class Scheme { exponential, euler };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct State {
    Vec fast;
    Vec slow;
};

struct TrajectoryMeta {
    std::string model;
    std::string system;  ///< "sde", "rde" or "reduced"
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::exponential;
    double dt = 0.0;
    double mu = 0.0;
};

struct Trajectory {
    TimeGrid grid;
    Mat fast;  ///< n1 x nodes (for reduced runs: the manifold value along the orbit)
    Mat slow;  ///< n2 x nodes
    TrajectoryMeta meta;

    State state(std::size_t i) const;
};

/// Original system driven by the Brownian increments. `grid` must consist of
/// nodes of the noise grid with a step that is an integer multiple of its dt.
Trajectory solve_sde(const SlowFastModel& model, const NoiseBundle& noise, const State& zeta,
                     const TimeGrid& grid, Scheme scheme = Scheme::exponential);

/// Wong-Zakai system: the forcing is (sigma/sqrt(eps)) z_i dt instead of dB_i.
Trajectory solve_rde(const SlowFastModel& model, const NoiseBundle& noise, const State& zeta,
                     const TimeGrid& grid, Scheme scheme = Scheme::exponential);

/// Fast coordinate on the manifold at grid node `step` (time t) over slow value xi.
using ManifoldFn = std::function<Vec(std::size_t step, double t, const Vec& xi)>;

/// v' = B v + g(h(t, v), v, a) integrated by (exponential) Heun.
Trajectory solve_reduced(const Mat& B, const SlowFn& g, const ManifoldFn& h, const Vec& xi0,
                         double a, const TimeGrid& grid, Scheme scheme = Scheme::exponential);

}  // namespace slowmf
