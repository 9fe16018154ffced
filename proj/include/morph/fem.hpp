#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "morph/mesh.hpp"
#include "morph/sparse.hpp"

namespace morph {

struct SolverConfig {
    enum class Method { DirectLU, BiCGStabILU };
    Method method = Method::DirectLU;
    double rel_tol = 1e-10;
    int max_iterations = 5000;
    struct Newton {
        int max_steps = 50;
        double abs_tol = 1e-10;
        int max_halvings = 10;
    } newton;
};

using DirichletSet = std::vector<std::pair<int, double>>;  // (vertex index, value)

// Per-cell average of a vertex field (used for coefficients given vertexwise).
std::vector<double> cell_average(const SimplicialMesh& mesh, const ScalarField& f);

// SUPG stabilization time scale: tau = h/(2|w|) (coth(Pe) - 1/Pe) with
// Pe = |w| h / (2 D), and the diffusive limit h^2/(12 D) for vanishing Pe.
double supg_tau(double h, double wind_norm, double diffusion);

// Cell length scale entering tau: width of the cell along the unit wind.
double supg_cell_length(const SimplicialMesh& mesh, int c, const Vec& unit_wind);

// P1 operator for -div(D grad u) + div(u w) + r u on a 2D triangle mesh.
// diffusion_cells: one coefficient per cell (>= 0); wind_cells: per-cell wind
// or empty; reaction/source: vertexwise fields or nullptr. With supg the
// streamline test augmentation is applied to convection, reaction and source.
SparseOperator assemble_operator(const SimplicialMesh& mesh,
                                 const std::vector<double>& diffusion_cells,
                                 const std::vector<Vec>& wind_cells,
                                 const ScalarField* reaction, bool supg,
                                 const ScalarField* source = nullptr, int threads = 1);

// delta * (surface stiffness) + (surface mass) on boundary vertices, indexed
// by BoundaryComplex local ids. Boundary must be closed.
SparseOperator assemble_boundary_operator(const BoundaryComplex& boundary, double delta);

// Reusable factorization of a matrix (after Dirichlet elimination).
class LinearSolver {
  public:
    LinearSolver(const CsrMatrix& matrix, const SolverConfig& config);
    ~LinearSolver();
    LinearSolver(LinearSolver&&) noexcept;
    LinearSolver& operator=(LinearSolver&&) noexcept;
    std::vector<double> solve(const std::vector<double>& rhs) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Dirichlet row/column elimination with symmetric correction. The eliminated
// matrix depends only on which dofs are constrained; apply_rhs folds a set of
// boundary values (aligned with dir_rows) into any right-hand side assembled
// for the original operator.
struct DirichletSystem {
    CsrMatrix eliminated;
    std::vector<int> dir_rows;  // constrained dofs, deduplicated, input order
    std::vector<std::vector<std::pair<int, double>>> col_entries;  // per constrained dof

    std::vector<double> apply_rhs(const std::vector<double>& rhs,
                                  const std::vector<double>& values) const;
};

DirichletSystem make_dirichlet_system(const CsrMatrix& matrix, const std::vector<int>& dofs);

// One-shot solve. Dirichlet values are exact in the result; the relative
// residual of the eliminated system is checked against config.rel_tol.
ScalarField solve_linear(const SparseOperator& op, const DirichletSet& dirichlet,
                         const SolverConfig& config);

}  // namespace morph
