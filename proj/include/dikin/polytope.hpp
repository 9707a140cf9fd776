#pragma once

// Polytope {theta : A theta <= b}: slack computation, strict interior
// membership, canonical builders, the augmented system [A; I_d], and the
// JSON file format.
//
// Slacks are stored positive-in-the-interior, s = b - A theta. All squared
// quantities in the barrier are unaffected by this orientation and it keeps
// weight vectors positive.

#include <cstddef>
#include <iosfwd>
#include <string>

#include "dikin/sparsela.hpp"

namespace dikin {

class Polytope {
 public:
  // Validates at construction: slack(witness) > 0 entrywise and
  // ||witness||_2 <= radius.
  Polytope(SparseMatrix a, Vector b, double radius, Vector interior_witness);

  const SparseMatrix& a() const { return a_; }
  const Vector& b() const { return b_; }
  double radius() const { return radius_; }
  const Vector& interior_witness() const { return witness_; }
  std::size_t num_constraints() const { return a_.rows(); }
  std::size_t dim() const { return a_.cols(); }

  // s = b - A theta. Negative entries are meaningful output.
  Vector slack(const Vector& theta) const;
  void slack(const Vector& theta, Vector& out) const;

  // True iff every slack is strictly positive.
  bool contains_interior(const Vector& theta) const;

  // (m+d) x d CSR stacking A over I_d; full column rank for any A.
  SparseMatrix augmented() const;

 private:
  SparseMatrix a_;
  Vector b_;
  double radius_;
  Vector witness_;
};

// [-w, w]^d: m = 2d rows (+e_i then -e_i per coordinate), witness 0.
Polytope build_hypercube(std::size_t d, double half_width);

// {theta >= 0, sum theta <= 1}: m = d+1, witness (1/(2d), ..., 1/(2d)).
Polytope build_simplex(std::size_t d);

// ||theta||_1 <= radius via 2^d sign constraints; d <= 16 only.
Polytope build_l1_ball(std::size_t d, double radius);

// JSON format:
//   { "d": int, "m": int, "coo": [[row, col, value], ...], "b": [...],
//     "R": real, "witness": [...] }
// The loader validates the construction invariants and rejects duplicate
// (row, col) pairs.
Polytope load_polytope_json(std::istream& in);
Polytope load_polytope_file(const std::string& path);
std::string polytope_to_json(const Polytope& p);

}  // namespace dikin
