#pragma once

#include <Eigen/Dense>

namespace waistlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class Rng;

// Orthonormal basis of the column span (thin Q of a Householder QR).
Mat orthonormalize(const Mat& columns);

// Orthonormal basis of the orthogonal complement of the column span.
Mat orthogonal_complement(const Mat& frame);

bool is_orthonormal(const Mat& frame, double tol = 1e-9);

// Haar-random k-frame in R^n.
Mat random_frame(int n, int k, Rng& rng);

Mat random_rotation(int n, Rng& rng);

// sqrt(det(A^T A)): k-volume of the parallelotope spanned by the columns.
double gram_volume(const Mat& columns);

}  // namespace waistlab
