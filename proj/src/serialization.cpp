#include "mdobench/serialization.hpp"

#include <json.hpp>

#include <utility>
#include <vector>

namespace mdobench {

namespace {

using nlohmann::json;

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

/// Matrices as arrays of rows (row-major), with shapes stored alongside so
/// zero-sized blocks survive the round trip.
json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(rows)}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  Eigen::MatrixXd m(rows, cols);
  const json& entries = j.at("entries");
  if (static_cast<Eigen::Index>(entries.size()) != rows) {
    throw ConfigError("matrix entry rows do not match the declared shape");
  }
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = entries[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigError("matrix entry columns do not match the declared shape");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

json space_to_json(const CouplingSpace& space) {
  json out;
  out["block_sizes"] = space.block_sizes();
  if (space.kind() == CouplingSpace::Kind::kBox) {
    out["kind"] = "box";
    out["lower"] = vector_to_json(space.lower());
    out["upper"] = vector_to_json(space.upper());
  } else {
    out["kind"] = "unbounded";
  }
  return out;
}

CouplingSpace space_from_json(const json& j) {
  const auto sizes = j.at("block_sizes").get<std::vector<int>>();
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "unbounded") return CouplingSpace::unbounded(sizes);
  if (kind == "box") {
    return CouplingSpace::box(sizes, vector_from_json(j.at("lower")),
                              vector_from_json(j.at("upper")));
  }
  throw ConfigError("unknown coupling space kind: " + kind);
}

json coefficients_to_json(const CouplingCoefficients& coef) {
  json out;
  out["x_block_sizes"] = coef.x_block_sizes;
  out["y_block_sizes"] = coef.y_block_sizes;
  json disciplines = json::array();
  for (int i = 0; i < coef.num_disciplines(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    json entry;
    entry["a"] = vector_to_json(coef.a[idx]);
    entry["b_shared"] = matrix_to_json(coef.b_shared[idx]);
    entry["b_local"] = matrix_to_json(coef.b_local[idx]);
    json c_blocks = json::array();
    for (int j2 = 0; j2 < coef.num_disciplines(); ++j2) {
      if (j2 == i) continue;
      c_blocks.push_back(json{{"j", j2 + 1},
                              {"block", matrix_to_json(coef.c[idx][static_cast<std::size_t>(j2)])}});
    }
    entry["c"] = std::move(c_blocks);
    disciplines.push_back(std::move(entry));
  }
  out["disciplines"] = std::move(disciplines);
  return out;
}

CouplingCoefficients coefficients_from_json(const json& j) {
  CouplingCoefficients coef;
  coef.x_block_sizes = j.at("x_block_sizes").get<std::vector<int>>();
  coef.y_block_sizes = j.at("y_block_sizes").get<std::vector<int>>();
  const json& disciplines = j.at("disciplines");
  const auto n = disciplines.size();
  coef.a.resize(n);
  coef.b_shared.resize(n);
  coef.b_local.resize(n);
  coef.c.assign(n, std::vector<Eigen::MatrixXd>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const json& entry = disciplines[i];
    coef.a[i] = vector_from_json(entry.at("a"));
    coef.b_shared[i] = matrix_from_json(entry.at("b_shared"));
    coef.b_local[i] = matrix_from_json(entry.at("b_local"));
    for (const json& block : entry.at("c")) {
      const auto target = block.at("j").get<int>();
      if (target < 1 || static_cast<std::size_t>(target) > n ||
          static_cast<std::size_t>(target - 1) == i) {
        throw ConfigError("coupling block references an invalid discipline");
      }
      coef.c[i][static_cast<std::size_t>(target - 1)] = matrix_from_json(block.at("block"));
    }
  }
  return coef;
}

}  // namespace

std::string coupling_to_json(const Coupling& coupling) {
  json out;
  if (const auto* linear = std::get_if<LinearCoupling>(&coupling)) {
    out["family"] = "linear";
    out["coefficients"] = coefficients_to_json(linear->coefficients());
  } else {
    const auto& sigmoid = std::get<SigmoidCoupling>(coupling);
    out["family"] = "sigmoid";
    out["coefficients"] = coefficients_to_json(sigmoid.coefficients());
    out["slope"] = sigmoid.slope();
    out["space"] = space_to_json(sigmoid.space());
  }
  return out.dump(2);
}

Coupling coupling_from_json(const std::string& text) {
  const json j = json::parse(text);
  const auto family = j.at("family").get<std::string>();
  CouplingCoefficients coef = coefficients_from_json(j.at("coefficients"));
  if (family == "linear") return LinearCoupling(std::move(coef));
  if (family == "sigmoid") {
    return SigmoidCoupling(std::move(coef), j.at("slope").get<double>(),
                           space_from_json(j.at("space")));
  }
  throw ConfigError("unknown coupling family: " + family);
}

std::string coupling_space_to_json(const CouplingSpace& space) {
  return space_to_json(space).dump(2);
}

CouplingSpace coupling_space_from_json(const std::string& text) {
  return space_from_json(json::parse(text));
}

}  // namespace mdobench
