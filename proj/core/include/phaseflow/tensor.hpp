#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace phaseflow {

/// Symmetric ell-tensor in d dimensions. Only sorted multi-indices
/// (i_1 <= ... <= i_ell, 0-based) are stored, in lexicographic order.
struct SymTensor {
  int d = 2;
  int ell = 1;
  std::vector<double> c;

  static SymTensor zero(int d, int ell);
  /// Tensor whose only nonzero component sits at the sorted index `idx`.
  static SymTensor unit(int d, std::vector<int> idx, double value = 1.0);

  [[nodiscard]] std::size_t size() const { return c.size(); }
  double& at(std::span<const int> idx);
  [[nodiscard]] double at(std::span<const int> idx) const;
};

/// Sorted multi-indices for (d, ell) in storage order. Supports d <= 3, ell <= 8.
const std::vector<std::vector<int>>& multi_indices(int d, int ell);
/// ell! / prod(counts!) per stored component: the number of unsorted tuples it stands for.
const std::vector<double>& multiplicities(int d, int ell);
std::size_t component_count(int d, int ell);
/// Storage position of a (not necessarily sorted) index tuple.
std::size_t component_position(int d, std::span<const int> idx);
/// 1-based digit string of a sorted index, e.g. {0, 1} -> "12".
std::string index_label(std::span<const int> idx);

/// T(xi, ..., xi). Throws ArgumentError on dimension mismatch or non-unit xi.
double apply_direction(const SymTensor& t, std::span<const double> xi);
/// Same polynomial without the unit-length check.
double eval_form(const SymTensor& t, std::span<const double> xi);
/// d/dxi of T(xi, ..., xi) = ell * T(xi, ..., xi, .).
std::vector<double> form_gradient(const SymTensor& t, std::span<const double> xi);
/// Partial derivatives of T(xi, ..., xi) with respect to each stored component.
std::vector<double> form_component_weights(int d, int ell, std::span<const double> xi);

enum class NormKind { Operatorial, Frobenius, MaxComponent, WeightedFrobenius };

struct NormSpec {
  NormKind kind = NormKind::Operatorial;
  std::map<std::string, double> weights;  ///< WeightedFrobenius: label -> weight (default 1)
  std::string weights_path;               ///< kept for round-tripping the config token

  static NormSpec operatorial() { return {}; }
  static NormSpec frobenius() { return {NormKind::Frobenius, {}, {}}; }
  static NormSpec max_component() { return {NormKind::MaxComponent, {}, {}}; }
  static NormSpec weighted(std::map<std::string, double> w) {
    return {NormKind::WeightedFrobenius, std::move(w), {}};
  }

  [[nodiscard]] double weight(std::span<const int> idx) const;
  /// True when the norm is invariant under orthogonal changes of basis.
  [[nodiscard]] bool rotation_invariant() const {
    return kind == NormKind::Operatorial || kind == NormKind::Frobenius;
  }
};

/// Parses `operatorial`, `frobenius`, `maxcomp` or `wfrob:<path>`; weights CSV has header `index,weight`.
NormSpec parse_norm_token(const std::string& token);
std::string norm_token(const NormSpec& n);
std::map<std::string, double> load_weights_csv(const std::filesystem::path& path);

struct OperatorialResult {
  double value = 0.0;
  std::vector<double> direction;  ///< unit vector attaining |T(xi,...,xi)|
};

/// |T(xi,...,xi)| maximized over the unit sphere by multi-start projected
/// gradient ascent (random starts plus the 2d signed axis directions).
OperatorialResult operatorial_norm(const SymTensor& t, int restarts = 16, std::uint64_t seed = 0x5eed);

double norm_value(const SymTensor& t, const NormSpec& n);

struct EquivalenceConstants {
  double c_low = 0.0;
  double c_high = 0.0;
};

/// Empirical min/max of a(T)/b(T) over random unit-Frobenius tensors and axis tensors.
EquivalenceConstants equivalence_constants(const NormSpec& a, const NormSpec& b, int d, int ell,
                                           int budget = 1000, std::uint64_t seed = 7);

/// Matrix M (row-major, size m x m with m = component_count(2, ell)) mapping
/// components written in the orthonormal frame (e0, e1) to ambient components:
/// ambient = M * frame. frame[0] and frame[1] are the ambient coordinates of e0, e1.
std::vector<double> basis_change_matrix(const double frame0[2], const double frame1[2], int ell);

/// Rotates a d = 2 tensor from frame components to ambient components.
SymTensor rotate_tensor(const SymTensor& t, const double frame0[2], const double frame1[2]);

/// Fast evaluation of the squared operatorial norm of a d = 2 tensor, with
/// gradient and a positive semidefinite curvature model, used by energy assembly.
struct Operatorial2D {
  double value = 0.0;         ///< |T|^2
  std::vector<double> grad;   ///< d|T|^2 / dc
  std::vector<double> hess;   ///< row-major curvature model, size m x m
  double angle = 0.0;         ///< maximizing direction angle
};
Operatorial2D operatorial_sq_2d(std::span<const double> c, int ell, bool want_hessian);

}  // namespace phaseflow
