#pragma once

#include <cmath>
#include <functional>

#include "csent/matrix.hpp"

namespace csent::nn {

// Central finite differences against an analytic gradient, entry by entry.
// `loss` must recompute the scalar objective from the current contents of
// `value`; entries are perturbed in place and restored.  The error metric
// |a - n| / max(1, |a|, |n|) behaves like absolute error near zero and
// relative error for large gradients.
inline double check_gradient(Matrix<double>& value,
                             const Matrix<double>& analytic,
                             const std::function<double()>& loss,
                             double h = 1e-5) {
    double worst = 0.0;
    for (std::size_t i = 0; i < value.size(); ++i) {
        const double saved = value.data()[i];
        value.data()[i] = saved + h;
        const double up = loss();
        value.data()[i] = saved - h;
        const double down = loss();
        value.data()[i] = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double a = analytic.data()[i];
        const double err = std::abs(a - numeric) /
                           std::max({1.0, std::abs(a), std::abs(numeric)});
        worst = std::max(worst, err);
    }
    return worst;
}

}  // namespace csent::nn
