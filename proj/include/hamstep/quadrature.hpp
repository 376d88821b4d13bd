#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hamstep {

enum class NodeFamily { Lobatto, Gauss, Uniform };

[[nodiscard]] std::string_view to_string(NodeFamily f) noexcept;
/// Parses "lobatto", "gauss" or "uniform". Throws InvalidArgument otherwise.
[[nodiscard]] NodeFamily parse_node_family(std::string_view s);

/// Quadrature rule on [0, 1].
///
/// Nodes are strictly increasing and symmetric about 1/2. The declared degree
/// of precision follows the family: Lobatto 2k-3, Gauss 2k-1, equispaced
/// Newton-Cotes k-1 (k even) or k (k odd).
class QuadratureRule {
 public:
  static constexpr int kMaxNodes = 15;
  static constexpr int kMaxUniformNodes = 9;

  /// Lobatto and uniform need k >= 2, Gauss k >= 1; uniform is capped at 9 nodes,
  /// the others at 15. Throws Unsupported outside that range.
  static QuadratureRule make(NodeFamily family, int k);

  [[nodiscard]] NodeFamily family() const noexcept { return family_; }
  [[nodiscard]] int size() const noexcept { return static_cast<int>(nodes_.size()); }
  [[nodiscard]] std::span<const double> nodes() const noexcept { return nodes_; }
  [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
  [[nodiscard]] int degree_of_precision() const noexcept { return degree_; }

  /// Largest j such that every monomial tau^0..tau^j is integrated to `tol`.
  [[nodiscard]] int verified_degree(double tol = 1e-12) const;

  /// sum_i b_i f(c_i) for scalar integrands.
  [[nodiscard]] double integrate(const std::function<double(double)>& f) const;
  /// sum_i b_i f(c_i) for vector integrands of length n; f writes into its second argument.
  [[nodiscard]] std::vector<double> integrate(
      std::size_t n, const std::function<void(double, std::span<double>)>& f) const;

 private:
  QuadratureRule(NodeFamily family, std::vector<double> nodes, std::vector<double> weights, int degree)
      : family_(family), nodes_(std::move(nodes)), weights_(std::move(weights)), degree_(degree) {}

  NodeFamily family_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  int degree_;
};

/// Degree of precision of a k-node rule of the given family.
[[nodiscard]] int degree_of_precision(NodeFamily family, int k);

/// Smallest node count whose rule integrates degree 2*nu - 1 exactly, which makes
/// the two-step method conserve a degree-nu polynomial Hamiltonian.
[[nodiscard]] int required_nodes(NodeFamily family, int nu);
/// Same, for a Hamiltonian whose degree may be unknown. Throws InvalidArgument when
/// `nu` is empty: non-polynomial problems must pick k themselves.
[[nodiscard]] int required_nodes(NodeFamily family, std::optional<int> nu);

}  // namespace hamstep
