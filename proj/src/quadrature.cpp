#include "waistlab/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace waistlab {

double integrate(const std::function<double(double)>& f, double a, double b, double tolerance) {
    if (a == b) return 0.0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    return GK::integrate(f, a, b, 12, tolerance);
}

}  // namespace waistlab
