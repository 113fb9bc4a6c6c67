#pragma once

#include "slowmf/grid.hpp"
#include "slowmf/linalg.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace slowmf {

enum class NoiseKind { white, colored };

/// A scalar series sampled on a grid.
struct SampledPath {
    TimeGrid grid;
    std::vector<double> values;
};

/// One-dimensional Brownian sample. The increments are the primary data;
/// values are their cumulative sum pinned to 0 at the origin node (or at
/// the first node for grids without an origin).
class BrownianPath {
public:
    BrownianPath(TimeGrid grid, std::vector<double> increments, std::uint64_t seed);

    const TimeGrid& grid() const noexcept { return grid_; }
    const std::vector<double>& increments() const noexcept { return increments_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::uint64_t seed() const noexcept { return seed_; }
    SampledPath as_sampled() const { return {grid_, values_}; }

private:
    TimeGrid grid_;
    std::vector<double> increments_;
    std::vector<double> values_;
    std::uint64_t seed_;
};

/// Deterministic in (grid, seed); increments are N(0, dt).
BrownianPath sample_brownian(const TimeGrid& grid, std::uint64_t seed);

/// theta_t omega(s) = omega(t + s) - omega(t) over the whole stored window.
BrownianPath wiener_shift(const BrownianPath& path, double t);
/// Same, restricted to shifted times s in [s_start, s_end].
BrownianPath wiener_shift(const BrownianPath& path, double t, double s_start, double s_end);
/// Generic shift of any sampled series by value differencing.
SampledPath wiener_shift(const SampledPath& path, double t);

/// Path on a grid with step factor*dt whose increments are sums of the fine ones.
BrownianPath coarsen(const BrownianPath& path, std::size_t factor);

struct Z0Mode {
    enum class Kind { stationary_sample, explicit_value, zero };
    Kind kind = Kind::stationary_sample;
    double value = 0.0;

    static Z0Mode stationary() { return {}; }
    static Z0Mode given(double v) { return {Kind::explicit_value, v}; }
    static Z0Mode zero() { return {Kind::zero, 0.0}; }
};

/// Euler discretization of dz = -z/mu dt + dB/mu driven by the increments
/// of a Brownian path. z0 sits at the first grid node.
class OuPath {
public:
    OuPath(std::shared_ptr<const BrownianPath> driver, double mu, double z0,
           std::vector<double> values);

    double mu() const noexcept { return mu_; }
    double z0() const noexcept { return z0_; }
    const std::vector<double>& values() const noexcept { return values_; }
    const BrownianPath& driver() const noexcept { return *driver_; }
    std::shared_ptr<const BrownianPath> driver_ptr() const noexcept { return driver_; }
    const TimeGrid& grid() const noexcept { return driver_->grid(); }
    SampledPath as_sampled() const { return {grid(), values_}; }

private:
    std::shared_ptr<const BrownianPath> driver_;
    double mu_;
    double z0_;
    std::vector<double> values_;
};

OuPath ou_path(std::shared_ptr<const BrownianPath> b, double mu, Z0Mode mode = Z0Mode::stationary());

/// Left-Riemann integral of an OU path, zero at the origin node.
class IntegratedOuPath {
public:
    IntegratedOuPath(std::shared_ptr<const OuPath> ou, std::vector<double> values);

    const std::vector<double>& values() const noexcept { return values_; }
    const OuPath& ou() const noexcept { return *ou_; }
    const TimeGrid& grid() const noexcept { return ou_->grid(); }
    SampledPath as_sampled() const { return {grid(), values_}; }

private:
    std::shared_ptr<const OuPath> ou_;
    std::vector<double> values_;
};

IntegratedOuPath integrated_ou(std::shared_ptr<const OuPath> z);

/// One noise sample: a Brownian path plus, optionally, the OU and
/// integrated-OU paths it drives.
struct NoiseBundle {
    std::shared_ptr<const BrownianPath> brownian;
    std::shared_ptr<const OuPath> ou;
    std::shared_ptr<const IntegratedOuPath> phi;

    const TimeGrid& grid() const { return brownian->grid(); }
    std::uint64_t seed() const { return brownian->seed(); }
    bool has_ou() const { return static_cast<bool>(ou); }
    double mu() const;
};

NoiseBundle make_noise(const TimeGrid& grid, std::uint64_t seed,
                       std::optional<double> mu = std::nullopt,
                       Z0Mode mode = Z0Mode::stationary());
/// Same Brownian sample, new correlation time.
NoiseBundle with_mu(const NoiseBundle& noise, double mu, Z0Mode mode = Z0Mode::stationary());
/// All-zero increments (and z0 = 0 when mu is given).
NoiseBundle zero_noise(const TimeGrid& grid, std::optional<double> mu = std::nullopt);

/// Stationary linear response of the fast block,
/// u_{i+1} = e^{A dt/eps} u_i + (sigma/sqrt(eps)) * increment_i,
/// with increment dB_i (white) or z_i dt (colored), started from 0 at the
/// first grid node. Nodes before `valid_from` are warm-up.
struct StationaryDriverPath {
    NoiseKind kind = NoiseKind::white;
    double eps = 0.0;
    double mu = 0.0;  ///< 0 for white noise
    TimeGrid grid;
    Mat values;  ///< n1 x grid.size()
    std::size_t valid_from = 0;
    std::uint64_t seed = 0;

    Vec at(std::size_t node) const { return values.col(static_cast<Eigen::Index>(node)); }
};

/// max(10 eps / gamma1, 10 mu)
double default_burn_in(double eps, double gamma1, double mu = 0.0);

StationaryDriverPath stationary_driver(const NoiseBundle& noise, const Mat& A, const Vec& sigma,
                                       double eps, NoiseKind kind, double burn_in);

}  // namespace slowmf
