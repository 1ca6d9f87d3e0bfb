#pragma once

#include <Eigen/Core>

#include <initializer_list>

namespace semiconj {

/// State vectors are small (n is typically 1..3) but dynamically sized.
using Vec = Eigen::VectorXd;

inline Vec make_vec(std::initializer_list<double> values) {
    Vec v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

}  // namespace semiconj
