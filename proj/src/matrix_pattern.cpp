// Apache License, Version 2.0, refer to LICENSE.txt

#include "opaque/matrix_pattern.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include <Eigen/LU>
#include <nlohmann/json.hpp>

namespace opaque {

MatrixPattern::MatrixPattern(MatrixKind kind, std::vector<std::string> names)
    : dim_(static_cast<int>(names.size())), kind_(kind), names_(std::move(names)) {
  if (dim_ < 1) throw std::invalid_argument("pattern: needs at least one variable");
  for (int i = 0; i < dim_; ++i)
    for (int j = i + 1; j < dim_; ++j)
      if (names_[i] == names_[j])
        throw std::invalid_argument("pattern: duplicate name \"" + names_[i] + "\"");
  tri_.resize(tri_size(dim_));
  for (int i = 0; i < dim_; ++i) {
    if (kind_ == MatrixKind::Correlation)
      tri_[tri_index(i, i)] = {EntryClass::Fixed, 1.0};
    else
      tri_[tri_index(i, i)] = {EntryClass::FreeDiagonal, 0.0};
    for (int j = 0; j < i; ++j) tri_[tri_index(i, j)] = {EntryClass::Fixed, 0.0};
  }
}

int MatrixPattern::tri_index(int i, int j) const {
  if (i < 0 || j < 0 || i >= dim_ || j >= dim_)
    throw std::out_of_range("pattern: entry index out of range");
  if (i < j) std::swap(i, j);
  return i * (i + 1) / 2 + j;
}

int MatrixPattern::name_index(const std::string& name) const {
  for (int i = 0; i < dim_; ++i)
    if (names_[i] == name) return i;
  throw std::invalid_argument("pattern: unknown variable name \"" + name + "\"");
}

void MatrixPattern::set_free(int i, int j) {
  if (i == j) {
    if (kind_ == MatrixKind::Correlation)
      throw std::invalid_argument("pattern: correlation diagonal cannot be free");
    tri_[tri_index(i, j)] = {EntryClass::FreeDiagonal, 0.0};
  } else {
    tri_[tri_index(i, j)] = {EntryClass::FreeOffDiagonal, 0.0};
  }
}

void MatrixPattern::set_fixed(int i, int j, double value) {
  if (!std::isfinite(value))
    throw std::invalid_argument("pattern: fixed value must be finite");
  if (kind_ == MatrixKind::Correlation) {
    if (i == j && value != 1.0)
      throw std::invalid_argument("pattern: correlation diagonal must be fixed to 1");
    if (i != j && !(value > -1.0 && value < 1.0))
      throw std::invalid_argument("pattern: fixed correlation outside (-1,1)");
  } else if (i == j && !(value > 0.0)) {
    throw std::invalid_argument("pattern: fixed variance must be positive");
  }
  tri_[tri_index(i, j)] = {EntryClass::Fixed, value};
}

std::vector<std::pair<int, int>> MatrixPattern::free_entries() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j <= i; ++j)
      if (is_free(i, j)) out.emplace_back(i, j);
  return out;
}

std::vector<std::pair<int, int>> MatrixPattern::free_offdiagonal() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < i; ++j)
      if (is_free(i, j)) out.emplace_back(i, j);
  return out;
}

MatrixPattern MatrixPattern::permuted(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != dim_)
    throw std::invalid_argument("pattern: permutation length mismatch");
  std::vector<std::string> names(dim_);
  for (int k = 0; k < dim_; ++k) names[k] = names_[perm[k]];
  MatrixPattern out(kind_, std::move(names));
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j <= i; ++j) out.tri_[out.tri_index(i, j)] = entry(perm[i], perm[j]);
  return out;
}

MatrixPattern MatrixPattern::with_fixed_zero(
    const std::vector<std::pair<int, int>>& entries) const {
  MatrixPattern out = *this;
  for (auto [i, j] : entries) {
    if (i == j) throw std::invalid_argument("pattern: cannot zero a diagonal entry");
    out.tri_[out.tri_index(i, j)] = {EntryClass::Fixed, 0.0};
  }
  return out;
}

std::string MatrixPattern::entry_label(int i, int j) const {
  if (i < j) std::swap(i, j);
  return names_[j] + "~~" + names_[i];
}

namespace {

std::pair<int, int> resolve_pair(const MatrixPattern& p, const nlohmann::json& pair,
                                 const char* where) {
  if (!pair.is_array() || pair.size() != 2)
    throw std::invalid_argument(std::string("pattern: ") + where +
                                " entries must be [name, name] pairs");
  const int a = p.name_index(pair[0].get<std::string>());
  const int b = p.name_index(pair[1].get<std::string>());
  return {std::max(a, b), std::min(a, b)};
}

}  // namespace

MatrixPattern MatrixPattern::parse(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("pattern: malformed JSON: ") + e.what());
  }
  return from_json(doc);
}

MatrixPattern MatrixPattern::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("pattern: document must be an object");
  if (!doc.contains("kind") || !doc.contains("names"))
    throw std::invalid_argument("pattern: required keys \"kind\" and \"names\"");
  const std::string kind_s = doc.at("kind").get<std::string>();
  MatrixKind kind;
  if (kind_s == "correlation")
    kind = MatrixKind::Correlation;
  else if (kind_s == "covariance")
    kind = MatrixKind::Covariance;
  else
    throw std::invalid_argument("pattern: kind must be \"correlation\" or \"covariance\"");

  std::vector<std::string> names;
  for (const auto& n : doc.at("names")) names.push_back(n.get<std::string>());
  MatrixPattern p(kind, std::move(names));

  // Track explicit assignments so a pair listed twice with conflicting
  // classes (an asymmetric specification) is rejected.
  std::vector<int> seen(tri_size(p.dim_), 0);  // 0 unset, 1 free, 2 fixed
  auto mark = [&](int i, int j, int cls) {
    int& s = seen[p.tri_index(i, j)];
    if (s != 0 && s != cls)
      throw std::invalid_argument("pattern: entry (" + p.names_[j] + "," + p.names_[i] +
                                  ") specified as both free and fixed");
    s = cls;
  };

  if (doc.contains("free")) {
    for (const auto& pair : doc.at("free")) {
      auto [i, j] = resolve_pair(p, pair, "free");
      mark(i, j, 1);
      p.set_free(i, j);
    }
  }
  if (doc.contains("fixed")) {
    for (const auto& f : doc.at("fixed")) {
      if (!f.is_object() || !f.contains("pair") || !f.contains("value"))
        throw std::invalid_argument("pattern: fixed entries need \"pair\" and \"value\"");
      auto [i, j] = resolve_pair(p, f.at("pair"), "fixed");
      mark(i, j, 2);
      p.set_fixed(i, j, f.at("value").get<double>());
    }
  }
  return p;
}

SymmetricMatrix::SymmetricMatrix(int dim) : dim_(dim) {
  if (dim < 1) throw std::invalid_argument("symmetric matrix: dim must be positive");
  tri_.assign(static_cast<std::size_t>(dim) * (dim + 1) / 2, 0.0);
}

SymmetricMatrix SymmetricMatrix::identity(int dim) {
  SymmetricMatrix m(dim);
  for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
  return m;
}

SymmetricMatrix SymmetricMatrix::from_dense(const Eigen::MatrixXd& m) {
  SymmetricMatrix out(static_cast<int>(m.rows()));
  for (int i = 0; i < out.dim_; ++i)
    for (int j = 0; j <= i; ++j) out.set(i, j, m(i, j));
  return out;
}

Eigen::MatrixXd SymmetricMatrix::dense() const {
  Eigen::MatrixXd m(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

SymmetricMatrix SymmetricMatrix::permuted(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != dim_)
    throw std::invalid_argument("symmetric matrix: permutation length mismatch");
  SymmetricMatrix out(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j <= i; ++j) out.set(i, j, (*this)(perm[i], perm[j]));
  return out;
}

BlockPartition block_partition(const MatrixPattern& p) {
  const int n = p.dim();
  std::vector<std::vector<int>> adj(n);
  for (auto [i, j] : p.free_offdiagonal()) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  for (auto& nb : adj) std::sort(nb.begin(), nb.end());

  std::vector<int> component(n, -1);
  std::vector<std::vector<int>> comps;
  for (int v = 0; v < n; ++v) {
    if (component[v] >= 0) continue;
    std::vector<int> comp;
    std::deque<int> queue{v};
    component[v] = static_cast<int>(comps.size());
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      comp.push_back(u);
      for (int w : adj[u])
        if (component[w] < 0) {
          component[w] = component[v];
          queue.push_back(w);
        }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }

  // Reverse Cuthill-McKee within a component. Start vertex: minimum degree,
  // ties by original index; neighbors visited in ascending degree order.
  auto rcm_order = [&](const std::vector<int>& comp) {
    if (comp.size() == 1) return comp;
    auto degree = [&](int v) { return static_cast<int>(adj[v].size()); };
    int start = comp[0];
    for (int v : comp)
      if (degree(v) < degree(start)) start = v;
    std::vector<int> order;
    std::vector<char> visited(n, 0);
    std::deque<int> queue{start};
    visited[start] = 1;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      order.push_back(u);
      std::vector<int> nbrs;
      for (int w : adj[u])
        if (!visited[w]) nbrs.push_back(w);
      std::stable_sort(nbrs.begin(), nbrs.end(),
                       [&](int a, int b) { return degree(a) < degree(b); });
      for (int w : nbrs) {
        visited[w] = 1;
        queue.push_back(w);
      }
    }
    std::reverse(order.begin(), order.end());
    return order;
  };

  std::stable_sort(comps.begin(), comps.end(),
                   [](const std::vector<int>& a, const std::vector<int>& b) {
                     if (a.size() != b.size()) return a.size() < b.size();
                     return a.front() < b.front();
                   });

  BlockPartition out;
  for (const auto& comp : comps) {
    out.blocks.push_back(rcm_order(comp));
    for (int v : out.blocks.back()) out.permutation.push_back(v);
  }
  return out;
}

bool is_positive_definite(const SymmetricMatrix& m, double tol) {
  const int n = m.dim();
  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    double d = m(j, j);
    for (int k = 0; k < j; ++k) d -= lower(j, k) * lower(j, k);
    if (!(d > tol) || !std::isfinite(d)) return false;
    lower(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (int k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
      lower(i, j) = s / lower(j, j);
      if (!std::isfinite(lower(i, j))) return false;
    }
  }
  return true;
}

double determinant(const SymmetricMatrix& m) {
  const int n = m.dim();
  switch (n) {
    case 1:
      return m(0, 0);
    case 2:
      return m(0, 0) * m(1, 1) - m(1, 0) * m(1, 0);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(2, 1) * m(2, 1)) -
             m(1, 0) * (m(1, 0) * m(2, 2) - m(2, 1) * m(2, 0)) +
             m(2, 0) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default:
      return Eigen::PartialPivLU<Eigen::MatrixXd>(m.dense()).determinant();
  }
}

double bollen_block_det(double r1, double r2, double r3, double r4) {
  const double cross = r1 * r4 - r2 * r3;
  return 1.0 + cross * cross - (r1 * r1 + r2 * r2 + r3 * r3 + r4 * r4);
}

SymmetricMatrix bollen_block_matrix(double r1, double r2, double r3, double r4) {
  SymmetricMatrix m = SymmetricMatrix::identity(4);
  m.set(1, 0, r1);  // (y4, y2)
  m.set(2, 0, r2);  // (y6, y2)
  m.set(3, 1, r3);  // (y8, y4)
  m.set(3, 2, r4);  // (y8, y6)
  return m;
}

MatrixPattern bollen_pattern() {
  MatrixPattern p(MatrixKind::Correlation,
                  {"x1", "x2", "x3", "y1", "y2", "y3", "y4", "y5", "y6", "y7", "y8"});
  const std::pair<const char*, const char*> free_pairs[] = {
      {"y1", "y5"}, {"y2", "y4"}, {"y2", "y6"}, {"y3", "y7"}, {"y4", "y8"}, {"y6", "y8"}};
  for (auto [a, b] : free_pairs) p.set_free(p.name_index(a), p.name_index(b));
  return p;
}

}  // namespace opaque
