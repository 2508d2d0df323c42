#pragma once

#include <json.hpp>

#include "domcert/dissipativity.hpp"
#include "domcert/dominance.hpp"
#include "domcert/supply.hpp"

namespace domcert {

/// Certificate wire format: {n, p, lambda, epsilon, margin, P: row-major};
/// dissipativity certificates add a supply object with Q/L/R blocks.
nlohmann::json to_json(const DominanceCertificate& cert);
nlohmann::json to_json(const DissipativityCertificate& cert);
nlohmann::json to_json(const SupplyRate& supply);

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, int rows, int cols);

DominanceCertificate dominance_certificate_from_json(const nlohmann::json& j);
DissipativityCertificate dissipativity_certificate_from_json(const nlohmann::json& j);
SupplyRate supply_from_json(const nlohmann::json& j);

}  // namespace domcert
