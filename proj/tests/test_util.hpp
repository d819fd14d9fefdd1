// SPDX-License-Identifier: Apache-2.0
//
// Shared helpers for the unit tests.
#pragma once

#include <random>

#include "isac/numerics.hpp"

namespace isac::test {

inline CMatrix random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    CMatrix a(rows, cols);
    for (Index c = 0; c < cols; ++c)
        for (Index r = 0; r < rows; ++r) {
            const double re = g(rng);
            const double im = g(rng);
            a(r, c) = cd(re, im);
        }
    return a;
}

inline CVector random_unit_vector(Index n, std::mt19937_64& rng) {
    CVector v = random_matrix(n, 1, rng);
    return v / v.norm();
}

inline CMatrix random_unit_modulus(Index rows, Index cols, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-kPi, kPi);
    CMatrix a(rows, cols);
    for (Index c = 0; c < cols; ++c)
        for (Index r = 0; r < rows; ++r) a(r, c) = std::polar(1.0, u(rng));
    return a;
}

}  // namespace isac::test
