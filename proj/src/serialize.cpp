#include "nlqc/serialize.hpp"

#include <cstdio>
#include <fstream>

namespace nlqc {
namespace serialize {

json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back({m.mat(r, c).real(), m.mat(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return json{{"dims", m.dims}, {"rows", std::move(rows)}};
}

ComplexMatrix matrix_from_json(const json& j) {
  if (!j.contains("rows") || !j["rows"].is_array())
    throw ValidationError("matrix_from_json: missing rows");
  const auto& rows = j["rows"];
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  if (r == 0) throw ValidationError("matrix_from_json: empty matrix");
  const Eigen::Index c = static_cast<Eigen::Index>(rows[0].size());
  Mat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != c)
      throw ValidationError("matrix_from_json: ragged rows");
    for (Eigen::Index k = 0; k < c; ++k) {
      const auto& cell = rows[i][k];
      if (!cell.is_array() || cell.size() != 2)
        throw ValidationError("matrix_from_json: cells must be [re, im]");
      m(i, k) = Complex(cell[0].get<double>(), cell[1].get<double>());
    }
  }
  std::vector<int> dims;
  if (j.contains("dims")) dims = j["dims"].get<std::vector<int>>();
  if (dims.empty() && r == c) dims = {static_cast<int>(r)};
  return ComplexMatrix(std::move(m), std::move(dims));
}

json povm_to_json(const Povm& p) {
  json elements = json::array();
  for (const auto& e : p.elements) elements.push_back(matrix_to_json(e));
  return json{{"elements", std::move(elements)}, {"labels", p.labels}};
}

Povm povm_from_json(const json& j) {
  Povm p;
  const json& elems = j.is_array() ? j : j.at("elements");
  for (const auto& e : elems) p.elements.push_back(matrix_from_json(e));
  if (j.is_object() && j.contains("labels"))
    p.labels = j["labels"].get<std::vector<std::string>>();
  while (p.labels.size() < p.elements.size())
    p.labels.push_back(std::to_string(p.labels.size()));
  return p;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  json j;
  in >> j;
  return j;
}

void write_json_atomic(const std::string& path, const json& j) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ValidationError("cannot write " + tmp);
    out << j.dump(2) << "\n";
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw ValidationError("cannot rename " + tmp + " to " + path);
}

}  // namespace serialize
}  // namespace nlqc
