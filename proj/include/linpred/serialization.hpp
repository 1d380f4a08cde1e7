#pragma once

#include <ostream>
#include <vector>

#include "json.hpp"
#include "linpred/model_core.hpp"
#include "linpred/optimality.hpp"
#include "linpred/sample_pls.hpp"
#include "linpred/simulation.hpp"

namespace linpred {

using Json = nlohmann::json;

/// {"sigma_xx": [[...]], "sigma_xy": [...], "sigma2": x}, rows first.
Json to_json(const FullParameter& phi);
FullParameter full_parameter_from_json(const Json& j);

Json to_json(const CriterionReport& report);
CriterionReport criterion_report_from_json(const Json& j);

Json to_json(const GammaPrior& prior);
GammaPrior gamma_prior_from_json(const Json& j);

Json to_json(const DesignSpec& spec);
DesignSpec design_spec_from_json(const Json& j);

Json to_json(const PlsFit& fit);

Json to_json(const McResult& result);
McResult mc_result_from_json(const Json& j);

/// Header plus one row per estimator; LF line endings, shortest round-trip numbers.
void write_results_csv(std::ostream& out, const std::vector<McResult>& results);

}  // namespace linpred
