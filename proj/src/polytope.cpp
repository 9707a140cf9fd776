#include "dikin/polytope.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dikin {

Polytope::Polytope(SparseMatrix a, Vector b, double radius, Vector interior_witness)
    : a_(std::move(a)), b_(std::move(b)), radius_(radius), witness_(std::move(interior_witness)) {
  if (b_.size() != a_.rows()) throw DimensionMismatch("Polytope: len(b) != m");
  if (witness_.size() != a_.cols()) throw DimensionMismatch("Polytope: len(witness) != d");
  if (!(radius_ > 0.0) || !std::isfinite(radius_)) {
    throw DimensionMismatch("Polytope: radius must be positive and finite");
  }
  for (double v : b_) {
    if (!std::isfinite(v)) throw DimensionMismatch("Polytope: non-finite offset");
  }
  if (!contains_interior(witness_)) {
    throw NotInterior("Polytope: interior witness has a non-positive slack");
  }
  if (norm2(witness_) > radius_ * (1.0 + 1e-12)) {
    throw DimensionMismatch("Polytope: witness lies outside the declared enclosing ball");
  }
}

void Polytope::slack(const Vector& theta, Vector& out) const {
  if (theta.size() != dim()) throw DimensionMismatch("slack: len(theta) != d");
  a_.matvec(theta, out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = b_[i] - out[i];
}

Vector Polytope::slack(const Vector& theta) const {
  Vector s;
  slack(theta, s);
  return s;
}

bool Polytope::contains_interior(const Vector& theta) const {
  if (theta.size() != dim()) throw DimensionMismatch("contains_interior: len(theta) != d");
  for (std::size_t i = 0; i < num_constraints(); ++i) {
    if (!(b_[i] - a_.row_dot(i, theta) > 0.0)) return false;
  }
  return true;
}

SparseMatrix Polytope::augmented() const {
  const std::size_t m = num_constraints();
  const std::size_t d = dim();
  std::vector<std::size_t> offsets(m + d + 1);
  std::vector<std::size_t> cols;
  std::vector<double> vals;
  cols.reserve(a_.nnz() + d);
  vals.reserve(a_.nnz() + d);
  for (std::size_t i = 0; i <= m; ++i) offsets[i] = a_.row_offsets()[i];
  cols.insert(cols.end(), a_.col_indices().begin(), a_.col_indices().end());
  vals.insert(vals.end(), a_.values().begin(), a_.values().end());
  for (std::size_t j = 0; j < d; ++j) {
    offsets[m + j + 1] = offsets[m + j] + 1;
    cols.push_back(j);
    vals.push_back(1.0);
  }
  return SparseMatrix(m + d, d, std::move(offsets), std::move(cols), std::move(vals));
}

Polytope build_hypercube(std::size_t d, double half_width) {
  if (d < 1) throw DimensionMismatch("build_hypercube: d >= 1 required");
  if (!(half_width > 0.0)) throw DimensionMismatch("build_hypercube: half_width must be positive");
  std::vector<CooEntry> coo;
  coo.reserve(2 * d);
  Vector b(2 * d, half_width);
  for (std::size_t i = 0; i < d; ++i) {
    coo.push_back({2 * i, i, 1.0});
    coo.push_back({2 * i + 1, i, -1.0});
  }
  return Polytope(SparseMatrix::from_coo(2 * d, d, std::move(coo)), std::move(b),
                  half_width * std::sqrt(static_cast<double>(d)), Vector(d, 0.0));
}

Polytope build_simplex(std::size_t d) {
  if (d < 1) throw DimensionMismatch("build_simplex: d >= 1 required");
  std::vector<CooEntry> coo;
  Vector b(d + 1, 0.0);
  for (std::size_t i = 0; i < d; ++i) coo.push_back({i, i, -1.0});
  for (std::size_t j = 0; j < d; ++j) coo.push_back({d, j, 1.0});
  b[d] = 1.0;
  return Polytope(SparseMatrix::from_coo(d + 1, d, std::move(coo)), std::move(b), 1.0,
                  Vector(d, 1.0 / (2.0 * static_cast<double>(d))));
}

Polytope build_l1_ball(std::size_t d, double radius) {
  if (d < 1) throw DimensionMismatch("build_l1_ball: d >= 1 required");
  if (d > 16) {
    throw UnsupportedDimension("build_l1_ball: 2^d sign constraints; d <= 16 required");
  }
  if (!(radius > 0.0)) throw DimensionMismatch("build_l1_ball: radius must be positive");
  const std::size_t m = std::size_t{1} << d;
  std::vector<CooEntry> coo;
  coo.reserve(m * d);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j < d; ++j) {
      coo.push_back({r, j, (r >> j) & 1 ? 1.0 : -1.0});
    }
  }
  return Polytope(SparseMatrix::from_coo(m, d, std::move(coo)), Vector(m, radius), radius,
                  Vector(d, 0.0));
}

Polytope load_polytope_json(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("polytope", std::string("invalid JSON: ") + e.what());
  }
  for (const char* key : {"d", "m", "coo", "b", "R", "witness"}) {
    if (!j.contains(key)) throw ConfigError(std::string("polytope.") + key, "missing field");
  }
  const std::size_t d = j["d"].get<std::size_t>();
  const std::size_t m = j["m"].get<std::size_t>();
  std::vector<CooEntry> coo;
  for (const auto& t : j["coo"]) {
    if (!t.is_array() || t.size() != 3) {
      throw ConfigError("polytope.coo", "entries must be [row, col, value] triplets");
    }
    coo.push_back({t[0].get<std::size_t>(), t[1].get<std::size_t>(), t[2].get<double>()});
  }
  Vector b = j["b"].get<Vector>();
  Vector witness = j["witness"].get<Vector>();
  const double radius = j["R"].get<double>();
  if (b.size() != m) throw ConfigError("polytope.b", "length must equal m");
  if (witness.size() != d) throw ConfigError("polytope.witness", "length must equal d");
  try {
    return Polytope(SparseMatrix::from_coo(m, d, std::move(coo)), std::move(b), radius,
                    std::move(witness));
  } catch (const Error& e) {
    throw ConfigError("polytope", e.what());
  }
}

Polytope load_polytope_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("polytope", "cannot open file: " + path);
  return load_polytope_json(in);
}

std::string polytope_to_json(const Polytope& p) {
  nlohmann::json j;
  j["d"] = p.dim();
  j["m"] = p.num_constraints();
  auto coo = nlohmann::json::array();
  const auto& a = p.a();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k) {
      coo.push_back({i, a.col_indices()[k], a.values()[k]});
    }
  }
  j["coo"] = std::move(coo);
  j["b"] = p.b();
  j["R"] = p.radius();
  j["witness"] = p.interior_witness();
  return j.dump();
}

}  // namespace dikin
