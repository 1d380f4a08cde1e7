#include "linpred/serialization.hpp"

#include <cmath>
#include <string>

#include "linpred/error.hpp"

namespace linpred {

namespace {

Json vector_json(const Vector& v) {
  Json arr = Json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) rows.push_back(vector_json(m.row(i).transpose()));
  return rows;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::InvalidInput, std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw Error(ErrorCode::InvalidInput, std::string(what) + " must be a number");
  return j.get<double>();
}

Vector vector_from(const Json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidInput, std::string(what) + " must be an array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = number(j[i], what);
  return v;
}

std::vector<double> doubles_from(const Json& j, const char* what) {
  const Vector v = vector_from(j, what);
  return {v.data(), v.data() + v.size()};
}

Matrix matrix_from(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::InvalidInput, std::string(what) + " must be a nested array");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw Error(ErrorCode::InvalidInput, std::string(what) + " is ragged");
    for (std::size_t c = 0; c < cols; ++c) m(static_cast<Index>(i), static_cast<Index>(c)) = number(j[i][c], what);
  }
  return m;
}

Json optional_number(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double number_or_nan(const Json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

EstimationMode mode_from(const std::string& s) {
  if (s == "exact") return EstimationMode::Exact;
  if (s == "analytic") return EstimationMode::Analytic;
  if (s == "monte_carlo") return EstimationMode::MonteCarlo;
  throw Error(ErrorCode::InvalidInput, "unknown estimation mode '" + s + "'");
}

}  // namespace

Json to_json(const FullParameter& phi) {
  return Json{{"sigma_xx", matrix_json(phi.sigma_xx())}, {"sigma_xy", vector_json(phi.sigma_xy())}, {"sigma2", phi.sigma2()}};
}

FullParameter full_parameter_from_json(const Json& j) {
  return FullParameter(matrix_from(field(j, "sigma_xx"), "sigma_xx"), vector_from(field(j, "sigma_xy"), "sigma_xy"),
                       number(field(j, "sigma2"), "sigma2"));
}

Json to_json(const CriterionReport& r) {
  return Json{{"name", r.name},
              {"lhs", finite_or_null(r.lhs)},
              {"rhs", finite_or_null(r.rhs)},
              {"margin", finite_or_null(r.margin)},
              {"satisfied", r.satisfied},
              {"stderr", optional_number(r.std_error)},
              {"n_replicates", r.n_replicates},
              {"mode", std::string(to_string(r.mode))}};
}

CriterionReport criterion_report_from_json(const Json& j) {
  CriterionReport r;
  r.name = field(j, "name").get<std::string>();
  r.lhs = number_or_nan(field(j, "lhs"));
  r.rhs = number_or_nan(field(j, "rhs"));
  r.margin = number_or_nan(field(j, "margin"));
  r.satisfied = field(j, "satisfied").get<bool>();
  if (j.contains("stderr") && !j.at("stderr").is_null()) r.std_error = j.at("stderr").get<double>();
  r.n_replicates = j.value("n_replicates", 0);
  if (j.contains("mode")) r.mode = mode_from(j.at("mode").get<std::string>());
  return r;
}

Json to_json(const GammaPrior& prior) {
  Json comps = Json::array();
  for (const auto& c : prior.components) {
    if (const auto* n = std::get_if<NormalPrior>(&c)) {
      comps.push_back({{"type", "normal"}, {"mean", n->mean}, {"sd", n->sd}});
    } else if (const auto* pm = std::get_if<PointMassPrior>(&c)) {
      comps.push_back({{"type", "point_mass"}, {"value", pm->value}});
    } else {
      const auto& lu = std::get<LogUniformPrior>(c);
      comps.push_back({{"type", "log_uniform"}, {"lo", lu.lo}, {"hi", lu.hi}});
    }
  }
  return Json{{"components", comps}, {"independent", prior.independent}};
}

GammaPrior gamma_prior_from_json(const Json& j) {
  GammaPrior prior;
  prior.independent = j.value("independent", true);
  for (const auto& c : field(j, "components")) {
    const std::string type = field(c, "type").get<std::string>();
    if (type == "normal") {
      prior.components.emplace_back(NormalPrior{number(field(c, "mean"), "mean"), number(field(c, "sd"), "sd")});
    } else if (type == "point_mass") {
      prior.components.emplace_back(PointMassPrior{number(field(c, "value"), "value")});
    } else if (type == "log_uniform") {
      prior.components.emplace_back(LogUniformPrior{number(field(c, "lo"), "lo"), number(field(c, "hi"), "hi")});
    } else {
      throw Error(ErrorCode::UnsupportedPrior, "unknown prior type '" + type + "'");
    }
  }
  return prior;
}

Json to_json(const DesignSpec& s) {
  Json j{{"p", s.p},
         {"m", s.m},
         {"relevant_lambdas", s.relevant_lambdas},
         {"irrelevant_lambdas", s.irrelevant_lambdas},
         {"irrelevant_gamma", s.irrelevant_gamma},
         {"sigma2", s.sigma2},
         {"n", s.n},
         {"seed", s.seed}};
  if (s.gamma_prior) {
    j["gamma_prior"] = to_json(*s.gamma_prior);
  } else {
    j["gamma"] = s.gamma;
  }
  return j;
}

DesignSpec design_spec_from_json(const Json& j) {
  try {
    DesignSpec s;
    s.p = field(j, "p").get<int>();
    s.m = field(j, "m").get<int>();
    s.relevant_lambdas = doubles_from(field(j, "relevant_lambdas"), "relevant_lambdas");
    s.irrelevant_lambdas = doubles_from(field(j, "irrelevant_lambdas"), "irrelevant_lambdas");
    if (j.contains("gamma_prior")) {
      s.gamma_prior = gamma_prior_from_json(j.at("gamma_prior"));
    } else {
      s.gamma = doubles_from(field(j, "gamma"), "gamma");
    }
    if (j.contains("irrelevant_gamma")) s.irrelevant_gamma = doubles_from(j.at("irrelevant_gamma"), "irrelevant_gamma");
    s.sigma2 = number(field(j, "sigma2"), "sigma2");
    s.n = field(j, "n").get<int>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    return s;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, e.what());
  }
}

Json to_json(const PlsFit& fit) {
  Json krylov = Json::array();
  for (Index j = 0; j < fit.krylov.cols(); ++j) krylov.push_back(vector_json(fit.krylov.col(j)));
  return Json{{"a", fit.a},
              {"beta", vector_json(fit.beta)},
              {"alpha", vector_json(fit.alpha)},
              {"krylov", krylov},
              {"x_mean", vector_json(fit.x_mean)},
              {"y_mean", fit.y_mean}};
}

Json to_json(const McResult& r) {
  Json crit = Json::array();
  for (const auto& c : r.criteria) crit.push_back(to_json(c));
  return Json{{"estimator", r.estimator},
              {"msep_mean", finite_or_null(r.msep_mean)},
              {"msep_stderr", finite_or_null(r.msep_stderr)},
              {"n_replicates", r.n_replicates},
              {"skipped", r.skipped},
              {"criteria", crit}};
}

McResult mc_result_from_json(const Json& j) {
  McResult r;
  r.estimator = field(j, "estimator").get<std::string>();
  r.msep_mean = number_or_nan(field(j, "msep_mean"));
  r.msep_stderr = number_or_nan(field(j, "msep_stderr"));
  r.n_replicates = field(j, "n_replicates").get<int>();
  r.skipped = j.value("skipped", 0);
  for (const auto& c : j.value("criteria", Json::array())) r.criteria.push_back(criterion_report_from_json(c));
  return r;
}

void write_results_csv(std::ostream& out, const std::vector<McResult>& results) {
  out << "estimator,msep_mean,msep_stderr,replicates,criterion_name,lhs,rhs,margin,satisfied\n";
  for (const auto& r : results) {
    out << r.estimator << ',' << format_double(r.msep_mean) << ',' << format_double(r.msep_stderr) << ','
        << r.n_replicates;
    if (r.criteria.empty()) {
      out << ",,,,,";
    } else {
      const auto& c = r.criteria.front();
      out << ',' << c.name << ',' << format_double(c.lhs) << ',' << format_double(c.rhs) << ','
          << format_double(c.margin) << ',' << (c.satisfied ? "true" : "false");
    }
    out << '\n';
  }
}

}  // namespace linpred
