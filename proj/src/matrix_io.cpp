#include "robust_shannon/matrix_io.hpp"

#include <fstream>
#include <sstream>

#include "robust_shannon/errors.hpp"

namespace robust_shannon {

namespace {

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open matrix file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("failed reading matrix file '" + path + "'");
  try {
    return nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError("matrix file '" + path + "': invalid JSON: " + e.what());
  }
}

}  // namespace

Eigen::MatrixXd matrix_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("dim") || !doc.contains("rows")) {
    throw DomainError("matrix JSON must be an object with 'dim' and 'rows'");
  }
  if (!doc["dim"].is_number_integer() || doc["dim"].get<long long>() < 1) {
    throw DomainError("matrix JSON: 'dim' must be a positive integer");
  }
  const auto d = static_cast<Eigen::Index>(doc["dim"].get<long long>());
  const nlohmann::json& rows = doc["rows"];
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != d) {
    throw DomainError("matrix JSON: 'rows' must be an array of " + std::to_string(d) + " rows");
  }
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const nlohmann::json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
      throw DomainError("matrix JSON: row " + std::to_string(i) + " must have " + std::to_string(d) + " entries");
    }
    for (Eigen::Index j = 0; j < d; ++j) {
      const nlohmann::json& x = row[static_cast<std::size_t>(j)];
      if (!x.is_number()) throw DomainError("matrix JSON: non-numeric entry");
      m(i, j) = x.get<double>();
    }
  }
  if (!m.allFinite()) throw DomainError("matrix JSON: non-finite entry");
  return m;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return {{"dim", m.rows()}, {"rows", std::move(rows)}};
}

SpdMatrixd spd_from_json(const nlohmann::json& doc) {
  const Eigen::MatrixXd m = matrix_from_json(doc);
  const double scale = m.cwiseAbs().maxCoeff();
  const double asymmetry = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asymmetry > 1e-6 * scale) {
    throw DomainError("matrix JSON: matrix is not symmetric (asymmetry " + std::to_string(asymmetry) + ")");
  }
  return SpdMatrixd(m);
}

Eigen::MatrixXd load_matrix(const std::string& path) { return matrix_from_json(read_json(path)); }

SpdMatrixd load_spd_matrix(const std::string& path) { return spd_from_json(read_json(path)); }

}  // namespace robust_shannon
