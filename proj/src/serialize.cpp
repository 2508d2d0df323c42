#include "domcert/serialize.hpp"

namespace domcert {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json arr = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) arr.push_back(m(i, j));
  }
  return arr;
}

Eigen::MatrixXd matrix_from_json(const json& j, int rows, int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows * cols) {
    throw std::invalid_argument("matrix_from_json: wrong element count");
  }
  Eigen::MatrixXd m(rows, cols);
  int k = 0;
  for (int i = 0; i < rows; ++i) {
    for (int c = 0; c < cols; ++c) m(i, c) = j[k++].get<double>();
  }
  return m;
}

json to_json(const SupplyRate& supply) {
  return json{{"m_y", supply.m_y},
              {"m_u", supply.m_u},
              {"Q", matrix_to_json(supply.Q)},
              {"L", matrix_to_json(supply.L)},
              {"R", matrix_to_json(supply.R)}};
}

SupplyRate supply_from_json(const json& j) {
  SupplyRate s;
  s.m_y = j.at("m_y").get<int>();
  s.m_u = j.at("m_u").get<int>();
  s.Q = matrix_from_json(j.at("Q"), s.m_y, s.m_y);
  s.L = matrix_from_json(j.at("L"), s.m_y, s.m_u);
  s.R = matrix_from_json(j.at("R"), s.m_u, s.m_u);
  check_supply(s);
  return s;
}

json to_json(const DominanceCertificate& cert) {
  return json{{"n", cert.P.dim()},      {"p", cert.p},
              {"lambda", cert.lambda},  {"epsilon", cert.epsilon},
              {"margin", cert.margin},  {"P", matrix_to_json(cert.P.mat())}};
}

json to_json(const DissipativityCertificate& cert) {
  json j{{"n", cert.P.dim()},      {"p", cert.p},
         {"lambda", cert.lambda},  {"epsilon", cert.epsilon},
         {"margin", cert.margin},  {"P", matrix_to_json(cert.P.mat())}};
  j["supply"] = to_json(cert.supply);
  return j;
}

DominanceCertificate dominance_certificate_from_json(const json& j) {
  const int n = j.at("n").get<int>();
  return DominanceCertificate{SymMatrix(matrix_from_json(j.at("P"), n, n)),
                              j.at("p").get<int>(), j.at("lambda").get<double>(),
                              j.at("epsilon").get<double>(), j.at("margin").get<double>()};
}

DissipativityCertificate dissipativity_certificate_from_json(const json& j) {
  const int n = j.at("n").get<int>();
  return DissipativityCertificate{SymMatrix(matrix_from_json(j.at("P"), n, n)),
                                  j.at("p").get<int>(),
                                  j.at("lambda").get<double>(),
                                  j.at("epsilon").get<double>(),
                                  supply_from_json(j.at("supply")),
                                  j.at("margin").get<double>()};
}

}  // namespace domcert
