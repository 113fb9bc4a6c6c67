#include "slowmf/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace slowmf {

Mat expm(const Mat& m) { return m.exp(); }

PhiSet phi_functions(const Mat& z) {
    const Eigen::Index n = z.rows();
    Mat aug = Mat::Zero(3 * n, 3 * n);
    aug.block(0, 0, n, n) = z;
    aug.block(0, n, n, n) = Mat::Identity(n, n);
    aug.block(n, 2 * n, n, n) = Mat::Identity(n, n);
    const Mat e = aug.exp();
    return PhiSet{e.block(0, 0, n, n), e.block(0, n, n, n), e.block(0, 2 * n, n, n)};
}

double log_norm(const Mat& m) {
    const Mat sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

}  // namespace slowmf
