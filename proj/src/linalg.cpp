#include "waistlab/linalg.hpp"

#include <cmath>

#include "waistlab/rng.hpp"

namespace waistlab {

Mat orthonormalize(const Mat& columns) {
    Eigen::HouseholderQR<Mat> qr(columns);
    Mat q = qr.householderQ() * Mat::Identity(columns.rows(), columns.cols());
    // Fix signs so that R has a positive diagonal; keeps the result a
    // deterministic function of the input.
    Mat r = qr.matrixQR().topRows(columns.cols()).triangularView<Eigen::Upper>();
    for (int j = 0; j < columns.cols(); ++j)
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    return q;
}

Mat orthogonal_complement(const Mat& frame) {
    const int n = static_cast<int>(frame.rows());
    const int k = static_cast<int>(frame.cols());
    if (k == 0) return Mat::Identity(n, n);
    Eigen::HouseholderQR<Mat> qr(frame);
    Mat q = qr.householderQ();
    return q.rightCols(n - k);
}

bool is_orthonormal(const Mat& frame, double tol) {
    Mat g = frame.transpose() * frame;
    return (g - Mat::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() <= tol;
}

Mat random_frame(int n, int k, Rng& rng) {
    Mat g(n, k);
    for (int j = 0; j < k; ++j) g.col(j) = rng.normal_vector(n);
    return orthonormalize(g);
}

Mat random_rotation(int n, Rng& rng) {
    Mat q = random_frame(n, n, rng);
    if (q.determinant() < 0) q.col(0) = -q.col(0);
    return q;
}

double gram_volume(const Mat& columns) {
    if (columns.cols() == 0) return 1.0;
    double d = (columns.transpose() * columns).determinant();
    return d > 0 ? std::sqrt(d) : 0.0;
}

}  // namespace waistlab
