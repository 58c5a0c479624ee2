#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hbubble/vec.hpp"

namespace hbubble {

struct GaussRule {
    std::vector<double> nodes;    // on [0, 1]
    std::vector<double> weights;  // sum to 1
};

// Gauss-Legendre rule with k points mapped to [0, 1]. Rules are computed once
// per order and cached; the returned reference stays valid for the program run.
const GaussRule& gauss_legendre01(int k);

// First n points of a scrambling-free Sobol sequence in the ball of radius R,
// followed by m points on its boundary sphere. Prefixes are nested: the first
// n' < n ball points are the same for every n.
std::vector<Vec3> sobol_ball(double radius, std::size_t n);
std::vector<Vec3> sobol_sphere(double radius, std::size_t m);

}  // namespace hbubble
