#pragma once

#include <memory>
#include <vector>

#include "maxcgo/boundary.hpp"
#include "maxcgo/coefficients.hpp"

namespace maxcgo {

struct ForwardSolution {
  VectorField3 E, H;  // node values on closed Omega, zero elsewhere
  BoundaryField T, S; // N x E (as imposed) and N x H
  double residual = 0.0;
};

struct ForwardOptions {
  bool estimate_condition = true;
  double resonance_threshold = 1e8;
  double residual_tol = 1e-8;
};

// curl (mu^-1 curl E) - omega^2 gamma E = 0 in Omega with N x E = T, on the
// staggered edge grid of Omega. The factorization is reused across solves.
class ForwardSolver {
 public:
  ForwardSolver(const CoefficientPair& c, const ForwardOptions& opts = {});
  ~ForwardSolver();
  ForwardSolver(ForwardSolver&&) noexcept;

  ForwardSolution solve(const BoundaryField& T) const;
  std::vector<ForwardSolution> solve_many(const std::vector<BoundaryField>& T) const;

  // 1-norm condition estimate of the interior system (0 when not estimated).
  double condition() const { return condition_; }
  std::size_t unknowns() const;
  // Cavity resonance nearest to omega, by shifted inverse iteration.
  double nearest_resonance(int iterations = 60) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double condition_ = 0.0;
};

// Admittance map T -> N x H.
BoundaryField admittance_apply(const ForwardSolver& solver, const BoundaryField& T);

}  // namespace maxcgo
