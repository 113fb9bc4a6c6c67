#pragma once

#include "slowmf/integrate.hpp"
#include "slowmf/manifold.hpp"

#include <vector>

namespace slowmf {

struct TrackingConfig {
    ManifoldSource source = ManifoldSource::expansion;
    double late_fraction = 0.25;  ///< trailing part of the window that defines the floor
    double floor_factor = 3.0;    ///< the rate is fitted while gap > floor_factor * floor
    LpOptions lp;
};

struct TrackingReport {
    std::vector<double> t;
    std::vector<double> gap;
    double fitted_rate = 0.0;
    std::size_t fit_points = 0;
    double floor = 0.0;
    double C1_bound = 0.0;
    double C2_bound = 0.0;
};

/// Distance between the original system started at zeta and the orbit confined to the
/// Wong-Zakai manifold started at (h(omega, xi), xi). `noise` must carry an OU path and
/// `grid` must be a window of its grid starting at time 0.
TrackingReport tracking_gap(const SlowFastModel& model, const NoiseBundle& noise, const State& zeta,
                            const TimeGrid& grid, const TrackingConfig& cfg = {});

}  // namespace slowmf
