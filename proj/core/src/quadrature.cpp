#include "hbubble/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <boost/random/sobol.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace hbubble {

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix of the Legendre
// recurrence, weights come from the first eigenvector components.
GaussRule build_rule(int k) {
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(k, k);
    for (int i = 1; i < k; ++i) {
        const double b = i / std::sqrt(4.0 * i * i - 1.0);
        jacobi(i, i - 1) = b;
        jacobi(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    GaussRule rule;
    rule.nodes.resize(static_cast<std::size_t>(k));
    rule.weights.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        const double x = eig.eigenvalues()(i);
        const double v = eig.eigenvectors()(0, i);
        rule.nodes[static_cast<std::size_t>(i)] = 0.5 * (x + 1.0);
        rule.weights[static_cast<std::size_t>(i)] = v * v;  // 2 v^2 on [-1,1], halved on [0,1]
    }
    // Symmetrize to remove eigen-solver noise; keeps the rule exact on odd moments.
    for (int i = 0; i < k / 2; ++i) {
        auto a = static_cast<std::size_t>(i);
        auto b = static_cast<std::size_t>(k - 1 - i);
        const double x = 0.5 * (rule.nodes[a] + (1.0 - rule.nodes[b]));
        const double w = 0.5 * (rule.weights[a] + rule.weights[b]);
        rule.nodes[a] = x;
        rule.nodes[b] = 1.0 - x;
        rule.weights[a] = rule.weights[b] = w;
    }
    if (k % 2 == 1) rule.nodes[static_cast<std::size_t>(k / 2)] = 0.5;
    return rule;
}

template <class Engine>
double unit(Engine& e) {
    return static_cast<double>(e()) / (static_cast<double>(Engine::max()) + 1.0);
}

}  // namespace

const GaussRule& gauss_legendre01(int k) {
    if (k < 1) throw std::invalid_argument("quadrature order must be positive");
    static std::mutex lock;
    static std::map<int, GaussRule> cache;
    std::lock_guard guard(lock);
    auto it = cache.find(k);
    if (it == cache.end()) it = cache.emplace(k, build_rule(k)).first;
    return it->second;
}

std::vector<Vec3> sobol_ball(double radius, std::size_t n) {
    boost::random::sobol gen(3);
    std::vector<Vec3> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = unit(gen);
        const double b = unit(gen);
        const double c = unit(gen);
        const double rho = radius * std::cbrt(a);
        const double z = 2.0 * b - 1.0;
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = 2.0 * std::numbers::pi * c;
        pts.push_back({rho * s * std::cos(phi), rho * s * std::sin(phi), rho * z});
    }
    return pts;
}

std::vector<Vec3> sobol_sphere(double radius, std::size_t m) {
    boost::random::sobol gen(2);
    std::vector<Vec3> pts;
    pts.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double z = 2.0 * unit(gen) - 1.0;
        const double phi = 2.0 * std::numbers::pi * unit(gen);
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        pts.push_back({radius * s * std::cos(phi), radius * s * std::sin(phi), radius * z});
    }
    return pts;
}

}  // namespace hbubble
