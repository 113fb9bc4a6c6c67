#include "slowmf/grid.hpp"

#include "slowmf/errors.hpp"

#include <cmath>
#include <string>

namespace slowmf {

namespace {

constexpr double kNodeTol = 1e-9;

}  // namespace

TimeGrid::TimeGrid(double t_start, double t_end, double dt) {
    if (!std::isfinite(t_start) || !std::isfinite(t_end) || !std::isfinite(dt)) {
        throw ConfigError("time grid: non-finite bounds or step");
    }
    if (dt <= 0.0) throw ConfigError("time grid: dt must be positive");
    if (t_end <= t_start) throw ConfigError("time grid: t_end must exceed t_start");
    const double steps = (t_end - t_start) / dt;
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps)) {
        throw ConfigError("time grid: (t_end - t_start) is not a multiple of dt");
    }
    t_start_ = t_start;
    t_end_ = t_end;
    dt_ = dt;
    n_steps_ = static_cast<std::size_t>(rounded);
    const double k = -t_start / dt;
    const double kr = std::round(k);
    if (t_start <= 0.0 && t_end >= 0.0 && std::abs(k - kr) <= kNodeTol) {
        origin_ = static_cast<std::size_t>(kr);
    }
}

TimeGrid TimeGrid::with_origin(std::size_t origin, std::size_t n_after, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time grid: dt must be positive");
    if (origin + n_after == 0) throw ConfigError("time grid: empty grid");
    TimeGrid g;
    g.dt_ = dt;
    g.n_steps_ = origin + n_after;
    g.origin_ = origin;
    g.t_start_ = -static_cast<double>(origin) * dt;
    g.t_end_ = static_cast<double>(n_after) * dt;
    return g;
}

TimeGrid TimeGrid::covering(double t_start, double t_end, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time grid: dt must be positive");
    if (!(t_end > t_start)) throw ConfigError("time grid: t_end must exceed t_start");
    const double lo = std::min(t_start, 0.0);
    const double hi = std::max(t_end, 0.0);
    const auto before = static_cast<std::size_t>(std::ceil(-lo / dt - kNodeTol));
    const auto after = static_cast<std::size_t>(std::ceil(hi / dt - kNodeTol));
    return with_origin(before, after, dt);
}

double TimeGrid::time(std::size_t i) const {
    if (i > n_steps_) throw RangeError("time grid: node index out of range");
    if (origin_) {
        return (static_cast<double>(i) - static_cast<double>(*origin_)) * dt_;
    }
    return t_start_ + static_cast<double>(i) * dt_;
}

std::size_t TimeGrid::origin() const {
    if (!origin_) throw ConfigError("time grid: time 0 is not a grid node");
    return *origin_;
}

std::optional<std::size_t> TimeGrid::find_node(double t) const {
    const double k = (t - t_start_) / dt_;
    const double kr = std::round(k);
    if (std::abs(k - kr) > kNodeTol * std::max(1.0, std::abs(k))) return std::nullopt;
    if (kr < 0.0 || kr > static_cast<double>(n_steps_)) return std::nullopt;
    return static_cast<std::size_t>(kr);
}

std::size_t TimeGrid::node_at(double t) const {
    auto node = find_node(t);
    if (!node) {
        throw RangeError("time grid: t = " + std::to_string(t) +
                         " is not a node of the stored grid");
    }
    return *node;
}

TimeGrid TimeGrid::reorigin(std::size_t new_origin) const {
    if (new_origin > n_steps_) throw RangeError("time grid: new origin outside the grid");
    return with_origin(new_origin, n_steps_ - new_origin, dt_);
}

TimeGrid TimeGrid::window(std::size_t first, std::size_t last) const {
    if (last > n_steps_ || last <= first) throw RangeError("time grid: invalid window");
    if (origin_) {
        TimeGrid g;
        g.dt_ = dt_;
        g.n_steps_ = last - first;
        g.t_start_ = time(first);
        g.t_end_ = time(last);
        if (first <= *origin_ && *origin_ <= last) g.origin_ = *origin_ - first;
        return g;
    }
    return TimeGrid(time(first), time(last), dt_);
}

bool TimeGrid::operator==(const TimeGrid& other) const {
    return dt_ == other.dt_ && n_steps_ == other.n_steps_ && origin_ == other.origin_ &&
           t_start_ == other.t_start_;
}

}  // namespace slowmf
