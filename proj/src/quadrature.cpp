#include "hamstep/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "hamstep/errors.hpp"

namespace hamstep {

namespace {

using Real = long double;

constexpr int kNewtonMaxIter = 100;
constexpr Real kNewtonTol = 1e-15L;

// Legendre P_n(x) and P_{n-1}(x) by the three-term recurrence.
std::pair<Real, Real> legendre(int n, Real x) {
  Real p0 = 1.0L;
  if (n == 0) return {p0, 0.0L};
  Real p1 = x;
  for (int j = 2; j <= n; ++j) {
    const Real p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
    p0 = p1;
    p1 = p2;
  }
  return {p1, p0};
}

// P_n'(x) from P_n and P_{n-1}; valid for |x| < 1.
Real legendre_derivative(int n, Real x, Real pn, Real pnm1) {
  return n * (x * pn - pnm1) / (x * x - 1.0L);
}

// Roots of P_k in (-1, 0], ascending. Newton from the usual cosine guesses.
std::vector<Real> gauss_roots_left(int k) {
  std::vector<Real> roots;
  for (int i = 1; i <= k / 2; ++i) {
    Real x = -std::cos(std::numbers::pi_v<Real> * (i - 0.25L) / (k + 0.5L));
    for (int it = 0; it < kNewtonMaxIter; ++it) {
      const auto [pn, pnm1] = legendre(k, x);
      const Real dx = pn / legendre_derivative(k, x, pn, pnm1);
      x -= dx;
      if (std::abs(dx) <= kNewtonTol) break;
    }
    roots.push_back(x);
  }
  if (k % 2 == 1) roots.push_back(0.0L);
  return roots;
}

// Interior roots of P_n' in (-1, 0], ascending. Newton on P_n' with P_n'' taken
// from the Legendre equation (1 - x^2) P'' = 2x P' - n(n+1) P.
std::vector<Real> lobatto_interior_left(int n) {
  std::vector<Real> roots;
  for (int j = 1; j <= (n - 1) / 2; ++j) {
    Real x = -std::cos(std::numbers::pi_v<Real> * j / n);
    for (int it = 0; it < kNewtonMaxIter; ++it) {
      const auto [pn, pnm1] = legendre(n, x);
      const Real d1 = legendre_derivative(n, x, pn, pnm1);
      const Real d2 = (2.0L * x * d1 - n * (n + 1.0L) * pn) / (1.0L - x * x);
      const Real dx = d1 / d2;
      x -= dx;
      if (std::abs(dx) <= kNewtonTol) break;
    }
    roots.push_back(x);
  }
  if (n % 2 == 0) roots.push_back(0.0L);
  return roots;
}

// Mirror left-half nodes/weights on [-1, 1] to a full rule on [0, 1].
void mirror_to_unit(int k, const std::vector<Real>& left_x, const std::vector<Real>& left_w,
                    std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(k, 0.0);
  weights.assign(k, 0.0);
  for (std::size_t i = 0; i < left_x.size(); ++i) {
    const std::size_t mirror = k - 1 - i;
    nodes[i] = static_cast<double>((1.0L + left_x[i]) / 2.0L);
    nodes[mirror] = static_cast<double>((1.0L - left_x[i]) / 2.0L);
    weights[i] = weights[mirror] = static_cast<double>(left_w[i] / 2.0L);
  }
}

}  // namespace

std::string_view to_string(NodeFamily f) noexcept {
  switch (f) {
    case NodeFamily::Lobatto: return "lobatto";
    case NodeFamily::Gauss: return "gauss";
    case NodeFamily::Uniform: return "uniform";
  }
  return "unknown";
}

NodeFamily parse_node_family(std::string_view s) {
  if (s == "lobatto") return NodeFamily::Lobatto;
  if (s == "gauss") return NodeFamily::Gauss;
  if (s == "uniform") return NodeFamily::Uniform;
  throw InvalidArgument("unknown node family '" + std::string(s) + "'");
}

int degree_of_precision(NodeFamily family, int k) {
  switch (family) {
    case NodeFamily::Lobatto: return 2 * k - 3;
    case NodeFamily::Gauss: return 2 * k - 1;
    case NodeFamily::Uniform: return (k % 2 == 0) ? k - 1 : k;
  }
  return -1;
}

int required_nodes(NodeFamily family, int nu) {
  if (nu < 1) throw InvalidArgument("polynomial degree must be at least 1");
  int k = 0;
  switch (family) {
    case NodeFamily::Gauss: k = nu; break;
    case NodeFamily::Lobatto: k = nu + 1; break;
    case NodeFamily::Uniform: k = std::max(2, 2 * nu - 1); break;
  }
  const int cap = family == NodeFamily::Uniform ? QuadratureRule::kMaxUniformNodes
                                                : QuadratureRule::kMaxNodes;
  if (k > cap) {
    throw Unsupported("degree " + std::to_string(nu) + " needs " + std::to_string(k) + " " +
                      std::string(to_string(family)) + " nodes, above the supported maximum");
  }
  return k;
}

int required_nodes(NodeFamily family, std::optional<int> nu) {
  if (!nu) throw InvalidArgument("Hamiltonian is not polynomial; choose the node count explicitly");
  return required_nodes(family, *nu);
}

QuadratureRule QuadratureRule::make(NodeFamily family, int k) {
  const int min_k = family == NodeFamily::Gauss ? 1 : 2;
  const int max_k = family == NodeFamily::Uniform ? kMaxUniformNodes : kMaxNodes;
  if (k < min_k || k > max_k) {
    throw Unsupported(std::string(to_string(family)) + " rule with " + std::to_string(k) +
                      " nodes is not supported (range " + std::to_string(min_k) + ".." +
                      std::to_string(max_k) + ")");
  }

  std::vector<double> nodes;
  std::vector<double> weights;
  switch (family) {
    case NodeFamily::Gauss: {
      const auto xs = gauss_roots_left(k);
      std::vector<Real> ws;
      for (Real x : xs) {
        const auto [pn, pnm1] = legendre(k, x);
        const Real d = legendre_derivative(k, x, pn, pnm1);
        ws.push_back(2.0L / ((1.0L - x * x) * d * d));
      }
      mirror_to_unit(k, xs, ws, nodes, weights);
      break;
    }
    case NodeFamily::Lobatto: {
      const int n = k - 1;
      std::vector<Real> xs{-1.0L};
      const auto interior = lobatto_interior_left(n);
      xs.insert(xs.end(), interior.begin(), interior.end());
      std::vector<Real> ws;
      for (Real x : xs) {
        const Real pn = legendre(n, x).first;
        ws.push_back(2.0L / (n * (n + 1.0L) * pn * pn));
      }
      mirror_to_unit(k, xs, ws, nodes, weights);
      break;
    }
    case NodeFamily::Uniform: {
      // Interpolatory Newton-Cotes weights from the moment system
      // sum_i b_i c_i^j = 1/(j+1), j = 0..k-1, by Gaussian elimination.
      std::vector<Real> c(k);
      for (int i = 0; i < k; ++i) c[i] = static_cast<Real>(i) / (k - 1);
      std::vector<std::vector<Real>> a(k, std::vector<Real>(k + 1));
      for (int j = 0; j < k; ++j) {
        for (int i = 0; i < k; ++i) a[j][i] = std::pow(c[i], j);
        a[j][k] = 1.0L / (j + 1);
      }
      for (int col = 0; col < k; ++col) {
        int piv = col;
        for (int r = col + 1; r < k; ++r) {
          if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        }
        std::swap(a[col], a[piv]);
        for (int r = col + 1; r < k; ++r) {
          const Real f = a[r][col] / a[col][col];
          for (int cc = col; cc <= k; ++cc) a[r][cc] -= f * a[col][cc];
        }
      }
      std::vector<Real> b(k);
      for (int r = k - 1; r >= 0; --r) {
        Real s = a[r][k];
        for (int cc = r + 1; cc < k; ++cc) s -= a[r][cc] * b[cc];
        b[r] = s / a[r][r];
      }
      nodes.resize(k);
      weights.resize(k);
      for (int i = 0; i < k; ++i) {
        nodes[i] = static_cast<double>(c[i]);
        weights[i] = static_cast<double>((b[i] + b[k - 1 - i]) / 2.0L);
      }
      break;
    }
  }
  return QuadratureRule(family, std::move(nodes), std::move(weights), hamstep::degree_of_precision(family, k));
}

int QuadratureRule::verified_degree(double tol) const {
  int d = -1;
  for (int j = 0; j <= 4 * kMaxNodes; ++j) {
    Real s = 0.0L;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      s += static_cast<Real>(weights_[i]) * std::pow(static_cast<Real>(nodes_[i]), j);
    }
    if (std::abs(s - 1.0L / (j + 1)) > tol) break;
    d = j;
  }
  return d;
}

double QuadratureRule::integrate(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) s += weights_[i] * f(nodes_[i]);
  return s;
}

std::vector<double> QuadratureRule::integrate(
    std::size_t n, const std::function<void(double, std::span<double>)>& f) const {
  std::vector<double> acc(n, 0.0);
  std::vector<double> val(n);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    f(nodes_[i], val);
    for (std::size_t j = 0; j < n; ++j) acc[j] += weights_[i] * val[j];
  }
  return acc;
}

}  // namespace hamstep
