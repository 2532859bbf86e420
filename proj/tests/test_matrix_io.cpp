#include <doctest.h>

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "robust_shannon/matrix_io.hpp"

using namespace robust_shannon;
using nlohmann::json;

TEST_CASE("matrix json round trip") {
  const Eigen::MatrixXd m{{1.0, 2.0}, {3.0, 4.5}};
  const json doc = matrix_to_json(m);
  CHECK(doc["dim"] == 2);
  CHECK(matrix_from_json(doc) == m);
}

TEST_CASE("malformed matrices are rejected") {
  CHECK_THROWS_AS(matrix_from_json(json::parse(R"({"rows": [[1]]})")), DomainError);
  CHECK_THROWS_AS(matrix_from_json(json::parse(R"({"dim": 2, "rows": [[1, 2]]})")), DomainError);
  CHECK_THROWS_AS(matrix_from_json(json::parse(R"({"dim": 2, "rows": [[1, 2], [3]]})")), DomainError);
  CHECK_THROWS_AS(matrix_from_json(json::parse(R"({"dim": 1, "rows": [["x"]]})")), DomainError);
  CHECK_THROWS_AS(spd_from_json(json::parse(R"({"dim": 2, "rows": [[1, 0.5], [0.4, 1]]})")), DomainError);
  CHECK_THROWS_AS(spd_from_json(json::parse(R"({"dim": 2, "rows": [[1, 0], [0, -1]]})")), DomainError);
  CHECK(spd_from_json(json::parse(R"({"dim": 2, "rows": [[2, 1], [1, 2]]})")).eigenvalues()(0) == doctest::Approx(3.0));
}

TEST_CASE("file loading") {
  const std::string path = "matrix_io_test.json";
  {
    std::ofstream f(path);
    f << R"({"dim": 1, "rows": [[4.0]]})";
  }
  CHECK(load_spd_matrix(path)(0, 0) == 4.0);
  {
    std::ofstream f(path);
    f << "{not json";
  }
  CHECK_THROWS_AS(load_matrix(path), DomainError);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_matrix("does/not/exist.json"), IoError);
}
