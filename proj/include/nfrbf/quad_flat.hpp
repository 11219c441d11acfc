#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nfrbf/mesh.hpp"
#include "nfrbf/rbf.hpp"

namespace nfrbf {

/// Node-indexed quadrature weights with provenance.
struct QuadratureRule {
    std::vector<double> weights;
    double domain_measure = 0.0;  ///< exact measure (flat) or sum of weights (surface)
    int phs_order = 3;
    int deg = 2;
    int k = 21;
    std::uint64_t mesh_hash = 0;
    std::string domain;

    std::size_t size() const { return weights.size(); }
    double sum() const;
    double abs_sum() const;
    /// (sum |w| - sum w) / sum w
    double stability() const;
    int negative_count() const;
    double min_weight() const;
};

/// Exact integral of x^a y^b over a triangle (vertex closed form).
double tri_monomial_integral(int a, int b, const Vec2& p0, const Vec2& p1, const Vec2& p2);

/// Integral of Phi(|x - center|) over a triangle. Closed form for odd orders, adaptive
/// Gauss-Kronrod along the edges for even orders.
double tri_phs_integral(const Vec2& center, const Vec2& p0, const Vec2& p1, const Vec2& p2, int order);

/// Weights of the stencil nodes integrating the local interpolant over the triangle
/// (p0, p1, p2), in physical area units. The triangle is given in the system's physical
/// coordinates.
Eigen::VectorXd element_weights(const SaddleSystem& system, const Vec2& p0, const Vec2& p1, const Vec2& p2);

/// Element weight vectors for every triangle of a flat mesh (parallel, deterministic).
struct ElementWeights {
    std::vector<Stencil> stencils;
    std::vector<Eigen::VectorXd> weights;
    std::vector<double> condition;
};
ElementWeights flat_element_weights(const PlanarMesh& mesh, const RbfParams& params);

/// Sums per-element contributions per node in ascending element order.
std::vector<double> accumulate_weights(std::size_t n, const std::vector<Stencil>& stencils,
                                       const std::vector<Eigen::VectorXd>& weights);

/// Full flat RBF-QF rule; `domain_measure` is the triangulated area.
QuadratureRule assemble_rule(const PlanarMesh& mesh, const RbfParams& params);

/// w^T f
double apply_rule(const QuadratureRule& rule, const Eigen::VectorXd& values);
double apply_rule(const QuadratureRule& rule, const std::vector<double>& values);

/// CSV `node_index,weight` with 17 significant digits, plus `<path>.json` with provenance.
void write_rule(const std::filesystem::path& path, const QuadratureRule& rule);
QuadratureRule read_rule(const std::filesystem::path& path);

}  // namespace nfrbf
