#pragma once

#include "slowmf/model.hpp"
#include "slowmf/noise.hpp"

namespace slowmf {

/// Parameters entering the closed-form small-eps expansion of the Example manifold
/// (fast nonlinearity v^2/600, slow equation v' = b v - a u v).
struct ExpansionCoefficients {
    double a = 0.1;
    double sigma = 0.1;
    double b = 0.001;
    double eps = 0.1;

    static ExpansionCoefficients from_model(const SlowFastModel& model);
};

/// Noise functionals of the expansion along a grid:
///   drive(t)  = unit-sigma stationary driver with A = -1 (white or colored),
///   memory(t) = int_{-inf}^t e^{(r-t)/eps} drive(r) dr   (exponential trapezoid).
struct ExpansionNoise {
    NoiseKind kind = NoiseKind::white;
    double eps = 0.0;
    double mu = 0.0;
    TimeGrid grid;
    std::size_t valid_from = 0;
    std::vector<double> drive;
    std::vector<double> memory;

    /// Fast-time integral of s e^s against the driving noise, written as -memory/eps.
    double i1(std::size_t node) const;
    /// sqrt(eps) * drive: the unit stationary response before the sigma/sqrt(eps) factor.
    double i2(std::size_t node) const;
};

ExpansionNoise expansion_noise(const NoiseBundle& noise, double eps, NoiseKind kind, double burn_in);

/// xi^2/600 + eps [-b xi^2/300 + a xi^4/180000 - (a sigma xi^2/300) I1] + (sigma/sqrt(eps)) I2,
/// evaluated with the noise functionals at `node` (the node playing time 0).
double expansion_h(const ExpansionCoefficients& c, const ExpansionNoise& noise, double xi,
                   std::size_t node);
/// Same at the grid origin.
double expansion_h(const ExpansionCoefficients& c, const ExpansionNoise& noise, double xi);

}  // namespace slowmf
