#include "entsim/quadrature.hpp"

#include <cmath>

namespace entsim::quad {

double sinc(double x) {
    if (std::abs(x) < 1e-8) {
        return 1.0 - x * x / 6.0;
    }
    return std::sin(x) / x;
}

}  // namespace entsim::quad
