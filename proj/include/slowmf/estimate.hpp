#pragma once

#include "slowmf/integrate.hpp"
#include "slowmf/manifold.hpp"
#include "slowmf/nelder_mead.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace slowmf {

/// white_reduced: reduced system closed by the white-noise manifold.
/// wz_reduced: reduced system closed by the Wong-Zakai manifold.
enum class ReducedNoise { white_reduced, wz_reduced };
std::string to_string(ReducedNoise r);
ReducedNoise reduced_noise_from_string(const std::string& s);

struct EstimationConfig {
    double T = 20.0;
    double dt = 1e-3;
    double eps = 0.1;
    double mu = 0.01;
    double a_true = 0.1;
    double a_lo = 0.01;
    double a_hi = 1.0;
    std::optional<double> a0;  ///< defaults to the midpoint of [a_lo, a_hi]
    double xi0 = 3.0;
    std::optional<double> eta;  ///< defaults to the white-noise manifold value at xi0
    std::size_t n_mc = 1;
    ManifoldSource source = ManifoldSource::expansion;
    ReducedNoise noise = ReducedNoise::wz_reduced;
    std::uint64_t seed = 1;
    NmOptions nm{1e-6, 0.0, 200};
    LpOptions lp;

    void validate() const;
};

/// Observed slow path on the solver grid (starting at time 0).
struct Observation {
    TimeGrid grid;
    Mat slow;
};

/// Noise grid shared by the observation and the reduced systems: burn-in before 0, then [0, T].
TimeGrid estimation_noise_grid(const EstimationConfig& cfg, const SlowFastModel& model);

/// Seed of the k-th Monte Carlo sample; sample 0 is the observation's own sample.
std::uint64_t sample_seed(const EstimationConfig& cfg, std::size_t k);

/// v_obs from the original system at a_true, started on the manifold.
Observation synthetic_observation(const EstimationConfig& cfg, const SlowFastModel& model);

/// F(a) = mean over samples of int_0^T |v_red(t; a) - v_obs(t)|^2 dt (trapezoid rule).
/// The Wong-Zakai variant builds its pathwise noise functionals once; the white variant
/// re-simulates them from the sample seeds on each evaluation.
class ReducedObjective {
public:
    ReducedObjective(const SlowFastModel& model, Observation obs, const EstimationConfig& cfg);
    double operator()(double a) const;
    const Observation& observation() const { return obs_; }

private:
    struct Sample;
    std::shared_ptr<const Sample> build_sample(std::size_t k) const;
    double evaluate_sample(const Sample& s, double a) const;

    SlowFastModel model_;
    Observation obs_;
    EstimationConfig cfg_;
    TimeGrid noise_grid_;
    std::vector<std::shared_ptr<const Sample>> cached_;
};

double objective_F(double a_prime, const Observation& v_obs, const EstimationConfig& cfg,
                   const SlowFastModel& model);

struct EstimationResult {
    double a_hat = 0.0;
    double objective = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    double wall_seconds = 0.0;
    std::vector<NmTraceEntry> trace;
};

/// Runs Nelder-Mead on the reduced objective; synthesizes v_obs unless one is supplied.
EstimationResult estimate_parameter(const EstimationConfig& cfg, const SlowFastModel& model,
                                    const std::optional<Observation>& observed = std::nullopt);

}  // namespace slowmf
