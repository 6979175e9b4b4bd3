#include "idsq/json_io.hpp"

#include <string>
#include <vector>

#include "idsq/error.hpp"

namespace idsq {

using nlohmann::json;

namespace {

const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw InvalidArgument(std::string("missing field '") + name + "'");
  return j.at(name);
}

double number(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_number()) throw InvalidArgument(std::string("field '") + name + "' must be a number");
  return v.get<double>();
}

std::size_t count(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw InvalidArgument(std::string("field '") + name + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

std::vector<double> numbers(const json& v, const char* name) {
  if (!v.is_array()) throw InvalidArgument(std::string("field '") + name + "' must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const json& x : v) {
    if (!x.is_number()) throw InvalidArgument(std::string("field '") + name + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Matrix nested_rows(const json& j) {
  const std::size_t rows = j.size();
  if (rows == 0) throw InvalidArgument("matrix has no rows");
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  std::vector<double> entries;
  for (const json& row : j) {
    if (!row.is_array() || row.size() != cols) throw InvalidArgument("matrix rows must be arrays of equal length");
    for (double x : numbers(row, "row")) entries.push_back(x);
  }
  return {rows, cols, std::move(entries)};
}

}  // namespace

json to_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()},
          {"entries", std::vector<double>(m.entries().begin(), m.entries().end())}};
}

Matrix matrix_from_json(const json& j) {
  if (j.is_array()) return nested_rows(j);
  const std::size_t rows = count(j, "rows");
  const std::size_t cols = count(j, "cols");
  std::vector<double> entries = numbers(field(j, "entries"), "entries");
  if (entries.size() != rows * cols) throw InvalidArgument("matrix entry count does not match rows * cols");
  return {rows, cols, std::move(entries)};
}

json to_json(const SymMatrix& m) {
  return {{"dim", m.dim()}, {"entries", std::vector<double>(m.entries().begin(), m.entries().end())}};
}

SymMatrix sym_from_json(const json& j) {
  Matrix m;
  if (j.is_array()) {
    m = nested_rows(j);
  } else {
    const std::size_t n = count(j, "dim");
    std::vector<double> entries = numbers(field(j, "entries"), "entries");
    if (entries.size() != n * n) throw InvalidArgument("symmetric matrix needs dim * dim entries");
    m = Matrix(n, n, std::move(entries));
  }
  if (!m.square()) throw InvalidArgument("symmetric matrix must be square");
  if (!is_symmetric(m, 1e-12 * std::max(1.0, m.max_abs())))
    throw InvalidArgument("matrix is not symmetric");
  return SymMatrix(m);
}

json to_json(const CovarianceModel& model) {
  return {{"sigma", to_json(model.sigma())}, {"n1", model.n1()}, {"n2", model.n2()}, {"a", model.a()}};
}

CovarianceModel model_from_json(const json& j) {
  return {sym_from_json(field(j, "sigma")), count(j, "n1"), count(j, "n2"), number(j, "a")};
}

json to_json(const BlockMatrix& q) {
  return {{"q", to_json(q.full())}, {"n1", q.n1()}, {"n2", q.n2()}};
}

BlockMatrix block_from_json(const json& j) {
  SymMatrix q = sym_from_json(field(j, "q"));
  const std::size_t n1 = count(j, "n1");
  const std::size_t n2 = count(j, "n2");
  if (n1 + n2 != q.dim()) throw InvalidArgument("n1 + n2 must equal the matrix dimension");
  return {std::move(q), n1};
}

json to_json(const DeltaEpsilonFamily& family) {
  return {{"kind", family.kind == DeltaEpsilonFamily::Kind::Resolvent ? "resolvent" : "precision"},
          {"diagonal", family.diagonal},
          {"delta", family.delta},
          {"epsilon", family.epsilon}};
}

DeltaEpsilonFamily family_from_json(const json& j) {
  DeltaEpsilonFamily f;
  const json& kind = field(j, "kind");
  if (kind == "resolvent") {
    f.kind = DeltaEpsilonFamily::Kind::Resolvent;
  } else if (kind == "precision") {
    f.kind = DeltaEpsilonFamily::Kind::Precision;
  } else {
    throw InvalidArgument("family kind must be 'resolvent' or 'precision'");
  }
  const std::vector<double> d = numbers(field(j, "diagonal"), "diagonal");
  if (d.size() != 4) throw InvalidArgument("family diagonal must have 4 entries");
  std::copy(d.begin(), d.end(), f.diagonal.begin());
  f.delta = number(j, "delta");
  f.epsilon = number(j, "epsilon");
  f.validate();
  return f;
}

json to_json(const SignatureMatrix& u) { return {{"u1", to_json(u.u1())}, {"u2", to_json(u.u2())}}; }

json to_json(const CriterionReport& report) {
  json j{{"criterion", std::string(to_string(report.criterion))}, {"holds", report.holds}};
  if (report.witness) j["witness"] = to_json(*report.witness);
  if (!report.signs.empty()) j["signs"] = report.signs;
  j["detail"] = json::object();
  for (const auto& [k, v] : report.detail) j["detail"][k] = v;
  return j;
}

json to_json(const GridCell& cell) { return {{"k", cell.k}, {"m", cell.m}, {"value", cell.value}}; }

}  // namespace idsq
