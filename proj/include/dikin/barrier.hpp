#pragma once

// Soft-threshold-regularized log-barrier geometry. With s = b - A theta and
// Ahat = [A; I_d], the local metric is
//
//   Phi(theta) = alpha^{-1} H(theta) + eta^{-1} I
//              = alpha^{-1} Ahat^T D(theta) Ahat,
//
// where H = sum_j a_j a_j^T / s_j^2 and D(theta) is the positive diagonal
// with 1/s_i^2 on the constraint rows and the constant alpha/eta on the
// regularizer rows. Folding the regularizer into the augmented diagonal lets
// one maintained solver cover Phi.

#include "dikin/polytope.hpp"
#include "dikin/sparsela.hpp"

namespace dikin {

struct BarrierParams {
  double alpha = 0.0;
  double eta = 0.0;

  BarrierParams() = default;
  BarrierParams(double alpha, double eta);
};

struct BarrierPoint {
  Vector theta;
  Vector slacks;        // positive entrywise
  DiagWeights weights;  // length m + d
};

// Throws NotInterior if any slack is <= 0 (or degenerately tiny).
BarrierPoint weights_at(const Polytope& p, const BarrierParams& params, const Vector& theta);

// ||u||^2_{Phi(theta)} = alpha^{-1} sum_i D_i (Ahat u)_i^2; O(nnz(A) + d).
double local_norm_sq(const SparseMatrix& aug, const BarrierPoint& bp, const BarrierParams& params,
                     const Vector& u);

// log det Phi(theta) via dense Gram + factorization (reference path).
double logdet_phi_exact(const SparseMatrix& aug, const BarrierPoint& bp,
                        const BarrierParams& params);

// ||D(from)^{-1} D(to) - I||_F over all m+d entries. Regularizer rows are
// identical on both sides and contribute zero. Equals
// sqrt(frobenius_change(D_from, D_to)).
double frobenius_ratio(const BarrierPoint& from, const BarrierPoint& to);

}  // namespace dikin
