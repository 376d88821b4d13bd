#include "hamstep/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hamstep/errors.hpp"

namespace hamstep {

namespace {

double ipow(double x, unsigned n) {
  double r = 1.0;
  while (n > 0) {
    if (n & 1U) r *= x;
    x *= x;
    n >>= 1U;
  }
  return r;
}

using TermIter = std::map<Exponents, double>::const_iterator;

// Horner in variable `var` over the terms [first, last), which share the
// exponents of every variable before `var`. The map is sorted
// lexicographically, so the terms for each power of `var` are contiguous.
double horner(TermIter first, TermIter last, std::size_t var, std::span<const double> y) {
  if (var == y.size()) {
    double s = 0.0;
    for (auto it = first; it != last; ++it) s += it->second;
    return s;
  }
  // Collect (power, coefficient polynomial value) pairs, highest power first.
  std::vector<std::pair<unsigned, double>> coeffs;
  auto it = first;
  while (it != last) {
    const unsigned e = it->first[var];
    auto group_end = std::find_if(it, last, [&](const auto& t) { return t.first[var] != e; });
    coeffs.emplace_back(e, horner(it, group_end, var + 1, y));
    it = group_end;
  }
  std::sort(coeffs.begin(), coeffs.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  double acc = 0.0;
  unsigned power = coeffs.front().first;
  for (const auto& [e, c] : coeffs) {
    acc *= ipow(y[var], power - e);
    acc += c;
    power = e;
  }
  return acc * ipow(y[var], power);
}

}  // namespace

PolynomialHamiltonian::PolynomialHamiltonian(std::size_t dof, const std::vector<Term>& terms)
    : dof_(dof) {
  if (dof == 0) throw InvalidArgument("polynomial Hamiltonian needs at least one degree of freedom");
  for (const auto& t : terms) {
    if (t.exponents.size() != 2 * dof) {
      throw DimensionMismatch("term exponent vector has length " + std::to_string(t.exponents.size()) +
                              ", expected " + std::to_string(2 * dof));
    }
    if (!std::isfinite(t.coefficient)) throw InvalidArgument("non-finite polynomial coefficient");
    terms_[t.exponents] += t.coefficient;
  }
  std::erase_if(terms_, [](const auto& kv) { return kv.second == 0.0; });

  partials_.resize(2 * dof);
  for (const auto& [exps, c] : terms_) {
    FlatTerm ft{c, {}};
    int deg = 0;
    for (std::size_t j = 0; j < exps.size(); ++j) {
      if (exps[j] > 0) ft.factors.emplace_back(j, exps[j]);
      deg += static_cast<int>(exps[j]);
    }
    degree_ = std::max(degree_, deg);
    flat_.push_back(ft);

    for (const auto& [var, pw] : ft.factors) {
      FlatTerm d{c * pw, {}};
      for (const auto& [v2, p2] : ft.factors) {
        const unsigned p = (v2 == var) ? p2 - 1 : p2;
        if (p > 0) d.factors.emplace_back(v2, p);
      }
      partials_[var].push_back(std::move(d));
    }
  }
}

std::vector<PolynomialHamiltonian::Term> PolynomialHamiltonian::terms() const {
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& [e, c] : terms_) out.push_back({c, e});
  return out;
}

void PolynomialHamiltonian::check_dim(std::span<const double> y) const {
  if (y.size() != dim()) {
    throw DimensionMismatch("state has length " + std::to_string(y.size()) + ", Hamiltonian expects " +
                            std::to_string(dim()));
  }
}

double PolynomialHamiltonian::evaluate(std::span<const double> y) const {
  check_dim(y);
  double s = 0.0;
  for (const auto& t : flat_) {
    double v = t.coefficient;
    for (const auto& [var, pw] : t.factors) v *= ipow(y[var], pw);
    s += v;
  }
  return s;
}

double PolynomialHamiltonian::evaluate_horner(std::span<const double> y) const {
  check_dim(y);
  if (terms_.empty()) return 0.0;
  return horner(terms_.begin(), terms_.end(), 0, y);
}

void PolynomialHamiltonian::gradient(std::span<const double> y, std::span<double> out) const {
  check_dim(y);
  if (out.size() != dim()) throw DimensionMismatch("gradient output has wrong length");
  for (std::size_t j = 0; j < partials_.size(); ++j) {
    double s = 0.0;
    for (const auto& t : partials_[j]) {
      double v = t.coefficient;
      for (const auto& [var, pw] : t.factors) v *= ipow(y[var], pw);
      s += v;
    }
    out[j] = s;
  }
}

PolynomialHamiltonian PolynomialHamiltonian::operator+(const PolynomialHamiltonian& other) const {
  if (other.dof_ != dof_) throw DimensionMismatch("cannot add polynomials of different dimension");
  auto all = terms();
  auto rhs = other.terms();
  all.insert(all.end(), rhs.begin(), rhs.end());
  return PolynomialHamiltonian(dof_, all);
}

Hamiltonian::Hamiltonian(PolynomialHamiltonian poly)
    : dof_(poly.dof()), poly_(std::make_shared<const PolynomialHamiltonian>(std::move(poly))) {}

Hamiltonian::Hamiltonian(std::size_t dof, EnergyFn energy, GradientFn gradient)
    : dof_(dof), energy_(std::move(energy)), gradient_(std::move(gradient)) {
  if (dof == 0) throw InvalidArgument("Hamiltonian needs at least one degree of freedom");
  if (!energy_ || !gradient_) throw InvalidArgument("Hamiltonian callbacks must be set");
}

std::optional<int> Hamiltonian::poly_degree() const noexcept {
  if (poly_) return poly_->degree();
  return std::nullopt;
}

void Hamiltonian::check_dim(std::span<const double> y) const {
  if (y.size() != dim()) {
    throw DimensionMismatch("state has length " + std::to_string(y.size()) + ", Hamiltonian expects " +
                            std::to_string(dim()));
  }
}

double Hamiltonian::energy(std::span<const double> y) const {
  if (poly_) return poly_->evaluate(y);
  check_dim(y);
  return energy_(y);
}

void Hamiltonian::gradient(std::span<const double> y, std::span<double> out) const {
  if (poly_) {
    poly_->gradient(y, out);
    return;
  }
  check_dim(y);
  if (out.size() != dim()) throw DimensionMismatch("gradient output has wrong length");
  gradient_(y, out);
}

std::vector<double> Hamiltonian::gradient(std::span<const double> y) const {
  std::vector<double> g(dim());
  gradient(y, g);
  return g;
}

double gradient_fd_mismatch(const Hamiltonian& h, std::span<const double> y, double step) {
  const auto g = h.gradient(y);
  std::vector<double> yp(y.begin(), y.end());
  double worst = 0.0;
  for (std::size_t j = 0; j < yp.size(); ++j) {
    const double orig = yp[j];
    yp[j] = orig + step;
    const double fp = h.energy(yp);
    yp[j] = orig - step;
    const double fm = h.energy(yp);
    yp[j] = orig;
    worst = std::max(worst, std::abs((fp - fm) / (2.0 * step) - g[j]));
  }
  return worst;
}

}  // namespace hamstep
