#pragma once

#include <Eigen/SparseCore>
#include <span>
#include <string>
#include <vector>

#include "phaseflow/grid.hpp"
#include "phaseflow/potential.hpp"
#include "phaseflow/tensor.hpp"

namespace phaseflow {

/// F_eps(u) = int W(u)/eps + sum_l q_l eps^(2l-1) |grad^l u|_l^2.
struct FunctionalSpec {
  int k = 2;
  std::vector<double> q{0.0, 1.0};     ///< q_1..q_k, q_k = 1
  std::vector<NormSpec> norms{2};      ///< one norm per order
  double eps = 1.0;
  Potential potential;

  /// Spec with the given coefficients and one norm kind for every order.
  static FunctionalSpec make(int k, std::vector<double> q, double eps,
                             NormSpec norm = NormSpec::operatorial(), Potential w = Potential::quartic());
  /// q_l = 0 for l < k.
  static FunctionalSpec pure(int k, double eps = 1.0, NormSpec norm = NormSpec::operatorial());

  /// Throws ArgumentError unless 1 <= k <= 4, q has k entries, q_k = 1, eps > 0.
  void validate() const;
  [[nodiscard]] FunctionalSpec with_eps(double e) const;
  /// Same spec with every coefficient replaced by 1 (the comparison functional of the lower bound).
  [[nodiscard]] FunctionalSpec all_positive() const;
};

struct EnergyReport {
  double total = 0.0;
  double potential = 0.0;
  std::vector<double> per_order;  ///< q_l eps^(2l-1) int |grad^l u|^2, l = 1..k
  // minimizer diagnostics (filled by solvers)
  bool converged = false;
  std::size_t iterations = 0;
  double grad_norm = 0.0;
  std::vector<double> history;
};

/// Stencil family used for the energy's derivative terms.
enum class StencilFamily {
  Staggered,  ///< binomial differences; odd orders live on cell midpoints (1D only)
  Centered,   ///< node-centered second-order stencils
};

/// Discrete energy on a fixed grid with sparse derivative operators. The
/// energy is an exact function of the nodal values; gradient and Hessian are
/// its exact derivatives (for the operatorial and max-component norms, the
/// Hessian is a positive semidefinite model of the nonsmooth part).
class DiscreteFunctional {
 public:
  DiscreteFunctional(const Grid1D& grid, const FunctionalSpec& spec,
                     StencilFamily family = StencilFamily::Staggered);
  DiscreteFunctional(const Grid2D& grid, const FunctionalSpec& spec);

  [[nodiscard]] std::size_t size() const { return nodes_; }
  [[nodiscard]] const FunctionalSpec& spec() const { return spec_; }

  [[nodiscard]] EnergyReport energy(std::span<const double> u) const;
  [[nodiscard]] double value(std::span<const double> u) const { return energy(u).total; }
  /// Returns the energy and writes the full gradient (all nodes).
  double gradient(std::span<const double> u, std::span<double> g) const;
  [[nodiscard]] Eigen::SparseMatrix<double> hessian(std::span<const double> u) const;

 private:
  enum class Mode { Quadratic, MaxComponent, Operatorial };
  struct Term {
    int ell = 1;
    double coef = 0.0;  ///< q_l eps^(2l-1)
    Mode mode = Mode::Quadratic;
    std::vector<Eigen::SparseMatrix<double, Eigen::RowMajor>> D;  ///< one operator per component
    std::vector<double> lambda;                                   ///< quadratic weights per component
    std::vector<double> w;                                        ///< quadrature weight per row
    Eigen::SparseMatrix<double> quad_hessian;                     ///< cached for Quadratic mode
  };

  void finish_terms();
  void check_finite(std::span<const double> u) const;
  [[nodiscard]] std::string node_location(std::size_t i) const;

  FunctionalSpec spec_;
  std::size_t nodes_ = 0;
  int dim_ = 1;
  Grid1D g1_;
  Grid2D g2_;
  std::vector<double> node_w_;
  std::vector<Term> terms_;
};

/// Node-centered derivative of order ell at every node, clamped extension at the ends.
Field1D derivative_1d(const Field1D& f, int ell);

/// Per-node symmetric ell-tensor of partial derivatives (ambient components
/// unless `frame` is set, in which case index 0 is the tangent, 1 the normal).
std::vector<SymTensor> grad_tensor_2d(const Field2D& f, int ell, bool frame = false);

EnergyReport assemble_energy(const Field1D& f, const FunctionalSpec& spec);
EnergyReport assemble_energy(const Field2D& f, const FunctionalSpec& spec);
/// Gradient with respect to the nodal values; Fixed nodes receive 0.
std::vector<double> assemble_gradient(const Field1D& f, const FunctionalSpec& spec);
std::vector<double> assemble_gradient(const Field2D& f, const FunctionalSpec& spec);

}  // namespace phaseflow
