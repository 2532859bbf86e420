#pragma once

#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "robust_shannon/spd_matrix.hpp"

namespace robust_shannon {

/// {"dim": d, "rows": [[...], ...]}, row-major.
Eigen::MatrixXd matrix_from_json(const nlohmann::json& doc);
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);

/// Averages with the transpose; rejects asymmetry above 1e-6 relative to the largest entry.
SpdMatrixd spd_from_json(const nlohmann::json& doc);

/// File variants: IoError when unreadable, DomainError when malformed.
Eigen::MatrixXd load_matrix(const std::string& path);
SpdMatrixd load_spd_matrix(const std::string& path);

}  // namespace robust_shannon
