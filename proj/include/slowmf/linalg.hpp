#pragma once

#include <Eigen/Dense>

namespace slowmf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// e^Z together with the first two phi-functions
/// phi1(Z) = Z^{-1}(e^Z - I) and phi2(Z) = Z^{-2}(e^Z - I - Z),
/// computed from one exponential of an augmented block matrix so that
/// singular Z is handled without special cases.
struct PhiSet {
    Mat exp;
    Mat phi1;
    Mat phi2;
};

Mat expm(const Mat& m);
PhiSet phi_functions(const Mat& z);

/// Largest eigenvalue of the symmetric part of m (logarithmic norm for the 2-norm).
double log_norm(const Mat& m);

}  // namespace slowmf
