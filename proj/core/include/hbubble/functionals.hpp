#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hbubble/curvature_field.hpp"
#include "hbubble/surface_map.hpp"

namespace hbubble {

struct EnergyBreakdown {
    double D = 0.0;
    double V_H = 0.0;
    double E_H = 0.0;
    std::optional<double> D_alpha;
    std::optional<double> E_alpha;
    double grad_sup = 0.0;
    double defect_energy_identity = 0.0;
    double defect_conformal = 0.0;
    double residual_hsystem = 0.0;
};

// Quadrature order for m_H used by every functional unless stated otherwise.
inline constexpr int kDefaultMhOrder = 16;

double dirichlet(const SurfaceMap& u);
double volume(const SurfaceMap& u, const CurvatureField& f);
double dirichlet_alpha(const SurfaceMap& u, double alpha);

EnergyBreakdown energy(const SurfaceMap& u, const CurvatureField& f);
EnergyBreakdown alpha_energy(const SurfaceMap& u, const CurvatureField& f, double alpha);

// Scalar energies without diagnostics (what line searches call).
double energy_value(const SurfaceMap& u, const CurvatureField& f, double alpha = 1.0);

// Exact derivative of the discrete energy with respect to every node value.
// Entry k is dE/du_k; with the node weights this is the L2 representer.
std::vector<Vec3> energy_gradient(const SurfaceMap& u, const CurvatureField& f, double alpha = 1.0,
                                  double* energy_out = nullptr);

double first_variation(const SurfaceMap& u, const CurvatureField& f, const SurfaceMap& h);
double alpha_first_variation(const SurfaceMap& u, const CurvatureField& f, const SurfaceMap& h, double alpha);

// The continuum formula  int a_alpha grad u . grad h + 2 int H(u) h . u_x ^ u_y
// evaluated with the chart quadrature. Differs from first_variation by
// discretization error only; reported as a diagnostic.
double first_variation_formula(const SurfaceMap& u, const CurvatureField& f, const SurfaceMap& h,
                               double alpha = 1.0);

// Node field g with sum_k w_k g_k . h_k = first_variation(u, f, h); zero on
// Dirichlet nodes.
SurfaceMap gradient_map(const SurfaceMap& u, const CurvatureField& f, std::optional<double> alpha = std::nullopt);

// Weighted L2 norm of a node field over all nodes.
double l2_norm(const SurfaceMap& g);

struct Residual {
    double norm = 0.0;      // sqrt(sum over interior nodes of w |r|^2)
    double relative = 0.0;  // norm divided by the same norm of the Laplacian term
    std::vector<Vec3> field;
};

// Delta u - 2 lambda H(u) u_x ^ u_y in the chart metric, over interior nodes.
Residual hsystem_residual(const SurfaceMap& u, const CurvatureField& f, double lambda = 1.0);

// div(a_alpha grad u) - 2 H(u) u_x ^ u_y with a_alpha = (1 + |grad u|^2)^(alpha - 1).
Residual alpha_residual(const SurfaceMap& u, const CurvatureField& f, double alpha);

struct ConformalityDefect {
    double norm = 0.0;
    double relative = 0.0;  // against the L2 norm of |grad u|^2
};
ConformalityDefect conformality(const SurfaceMap& u);
inline double conformality_defect(const SurfaceMap& u) { return conformality(u).norm; }

double energy_identity_defect(const SurfaceMap& u, const CurvatureField& f, double lambda = 1.0);

// D / |V_H|^(2/3); empty when the volume vanishes.
std::optional<double> isoperimetric_ratio(const SurfaceMap& u, const CurvatureField& f);

// Sup over samples of |grad u| in the plane metric, with the node where it is attained.
struct GradientSup {
    double value = 0.0;
    std::uint32_t node = 0;
};
GradientSup gradient_sup(const SurfaceMap& u);

// Second derivative of the discrete energy, as triplets over degrees of
// freedom 3 * node + component. Entries touching Dirichlet nodes are dropped.
struct HessianEntry {
    std::uint32_t row;
    std::uint32_t col;
    double value;
};
std::vector<HessianEntry> energy_hessian(const SurfaceMap& u, const CurvatureField& f, double alpha = 1.0);

}  // namespace hbubble
