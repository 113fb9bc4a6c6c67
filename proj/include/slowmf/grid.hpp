#pragma once

#include <cstddef>
#include <optional>

namespace slowmf {

/// Uniform time grid. Grids built with an origin carry time 0 on a node and
/// compute node times as (i - origin) * dt so shifted grids agree bitwise.
class TimeGrid {
public:
    TimeGrid() = default;
    TimeGrid(double t_start, double t_end, double dt);

    /// Grid with `origin` nodes before time 0 and `n_after` steps after it.
    static TimeGrid with_origin(std::size_t origin, std::size_t n_after, double dt);

    /// Grid covering at least [t_start, t_end] with time 0 on a node.
    static TimeGrid covering(double t_start, double t_end, double dt);

    double t_start() const noexcept { return t_start_; }
    double t_end() const noexcept { return t_end_; }
    double dt() const noexcept { return dt_; }
    std::size_t n_steps() const noexcept { return n_steps_; }
    std::size_t size() const noexcept { return n_steps_ + 1; }

    double time(std::size_t i) const;

    bool has_origin() const noexcept { return origin_.has_value(); }
    /// Index of the node at time 0; throws ConfigError if there is none.
    std::size_t origin() const;

    std::optional<std::size_t> find_node(double t) const;
    /// Node at time t; throws RangeError if t is off-grid or outside.
    std::size_t node_at(double t) const;

    /// Same nodes re-labelled so that node `new_origin` sits at time 0.
    TimeGrid reorigin(std::size_t new_origin) const;
    /// Sub-grid of nodes [first, last].
    TimeGrid window(std::size_t first, std::size_t last) const;

    bool operator==(const TimeGrid& other) const;

private:
    double t_start_ = 0.0;
    double t_end_ = 0.0;
    double dt_ = 0.0;
    std::size_t n_steps_ = 0;
    std::optional<std::size_t> origin_;
};

}  // namespace slowmf
