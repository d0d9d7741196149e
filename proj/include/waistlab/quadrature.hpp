#pragma once

#include <functional>

namespace waistlab {

// Adaptive Gauss-Kronrod (31 point) on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tolerance = 1e-12);

}  // namespace waistlab
