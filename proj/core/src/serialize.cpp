#include "gflsr/serialize.hpp"

#include <fstream>

#include <json.hpp>

#include "gflsr/csv.hpp"

namespace gflsr {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("expected a matrix (array of arrays)");
  const Index rows = static_cast<Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  const Index cols = static_cast<Index>(j.front().size());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (static_cast<Index>(row.size()) != cols) {
      throw ConfigError("ragged matrix rows in JSON");
    }
    for (Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const json& j) {
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v[i] = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

NoiseCase noise_case_from_string(const std::string& s) {
  if (s == "A") return NoiseCase::A;
  if (s == "B") return NoiseCase::B;
  if (s == "C") return NoiseCase::C;
  throw ConfigError("unknown noise case: " + s);
}

Variant variant_from_string(const std::string& s) {
  if (s == "pls-r") return Variant::PlsR;
  if (s == "pls-svd") return Variant::PlsSvd;
  throw ConfigError("unknown variant: " + s);
}

}  // namespace

std::string model_params_to_json(const ModelParams& params) {
  json j;
  j["p"] = params.p;
  j["q"] = params.q;
  j["H"] = params.H;
  j["W"] = matrix_to_json(params.W);
  j["V"] = matrix_to_json(params.V);
  j["b"] = vector_to_json(params.b);
  j["sigma_xi_sq"] = vector_to_json(params.sigma_xi_sq);
  j["noise_case"] = to_string(params.noise_case);
  j["sigma_x_sq"] = params.sigma_x_sq;
  j["sigma_y_sq"] = params.sigma_y_sq;
  if (params.noise_case == NoiseCase::C) {
    j["Sigma_X"] = matrix_to_json(params.Sigma_X);
    j["Sigma_Y"] = matrix_to_json(params.Sigma_Y);
  }
  j["sigma1_sq"] = params.sigma1_sq;
  return j.dump(2);
}

ModelParams model_params_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid params JSON: ") + e.what());
  }
  ModelParams params;
  params.p = j.at("p").get<Index>();
  params.q = j.at("q").get<Index>();
  params.H = j.at("H").get<Index>();
  params.W = matrix_from_json(j.at("W"));
  params.V = matrix_from_json(j.at("V"));
  params.b = vector_from_json(j.at("b"));
  params.sigma_xi_sq = vector_from_json(j.at("sigma_xi_sq"));
  params.noise_case = noise_case_from_string(j.value("noise_case", "B"));
  params.sigma_x_sq = j.value("sigma_x_sq", 0.0);
  params.sigma_y_sq = j.value("sigma_y_sq", 0.0);
  if (j.contains("Sigma_X")) params.Sigma_X = matrix_from_json(j.at("Sigma_X"));
  if (j.contains("Sigma_Y")) params.Sigma_Y = matrix_from_json(j.at("Sigma_Y"));
  params.sigma1_sq = j.value("sigma1_sq", 0.0);
  return params;
}

std::string fit_result_to_json(const FitResult& fit) {
  json j;
  j["variant"] = to_string(fit.variant);
  j["H"] = fit.H();
  j["U_hat"] = matrix_to_json(fit.U_hat);
  j["V_hat"] = matrix_to_json(fit.V_hat);
  j["b_hat"] = vector_to_json(fit.b_hat);
  j["theta_hat"] = matrix_to_json(fit.theta_hat);
  j["xi_hat"] = matrix_to_json(fit.xi_hat);
  j["omega_hat"] = matrix_to_json(fit.omega_hat);
  j["eps_hat"] = matrix_to_json(fit.eps_hat);
  j["X_resid"] = matrix_to_json(fit.X_resid);
  j["Y_resid"] = matrix_to_json(fit.Y_resid);
  j["x_means"] = vector_to_json(fit.x_means);
  j["y_means"] = vector_to_json(fit.y_means);
  j["svd_tol"] = fit.config.svd_tol;
  j["max_iter"] = fit.config.max_iter;
  if (fit.fh) {
    j["fh"] = {{"degree", fit.fh->degree},
               {"coef", matrix_to_json(fit.fh->coef)},
               {"basis_means", vector_to_json(fit.fh->basis_means)}};
  }
  return j.dump();
}

FitResult fit_result_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid fit JSON: ") + e.what());
  }
  FitResult fit;
  fit.variant = variant_from_string(j.at("variant").get<std::string>());
  fit.U_hat = matrix_from_json(j.at("U_hat"));
  fit.V_hat = matrix_from_json(j.at("V_hat"));
  fit.b_hat = vector_from_json(j.at("b_hat"));
  fit.theta_hat = matrix_from_json(j.at("theta_hat"));
  fit.xi_hat = matrix_from_json(j.at("xi_hat"));
  fit.omega_hat = matrix_from_json(j.at("omega_hat"));
  fit.eps_hat = matrix_from_json(j.at("eps_hat"));
  fit.X_resid = matrix_from_json(j.at("X_resid"));
  fit.Y_resid = matrix_from_json(j.at("Y_resid"));
  fit.x_means = vector_from_json(j.at("x_means"));
  fit.y_means = vector_from_json(j.at("y_means"));
  fit.config.H = fit.U_hat.cols();
  fit.config.variant = fit.variant;
  fit.config.svd_tol = j.value("svd_tol", 1e-12);
  fit.config.max_iter = j.value("max_iter", 10000);
  if (j.contains("fh")) {
    FHModel fh;
    fh.degree = j["fh"].at("degree").get<int>();
    fh.coef = matrix_from_json(j["fh"].at("coef"));
    fh.basis_means = vector_from_json(j["fh"].at("basis_means"));
    fit.fh = fh;
  }
  return fit;
}

std::string corrected_to_json(const CorrectedEstimates& est) {
  json j;
  j["assumption"] = to_string(est.assumption);
  j["sigma_x_sq"] = est.sigma_x_sq;
  j["sigma_y_sq"] = est.sigma_y_sq;
  j["sigma_xi_sq"] = vector_to_json(est.sigma_xi_sq);
  j["b_corrected"] = vector_to_json(est.b);
  j["sigma1_sq"] = est.sigma1_sq;
  j["sigma1_sq_per_component"] = vector_to_json(est.sigma1_sq_per_component);
  if (est.assumption == NoiseCase::C) {
    j["Sigma_X"] = matrix_to_json(est.Sigma_X);
    j["Sigma_Y"] = matrix_to_json(est.Sigma_Y);
  }
  j["flags"] = est.flags;
  return j.dump(2);
}

std::string bootstrap_result_to_json(const BootstrapResult& boot) {
  json j;
  j["B"] = boot.B;
  j["ci_level"] = boot.ci_level;
  j["seed"] = boot.seed;
  j["failed"] = boot.failed;
  j["base"] = json::parse(fit_result_to_json(boot.base));
  json reps = json::array();
  for (const auto& rep : boot.replicates) {
    reps.push_back(json::parse(fit_result_to_json(rep)));
  }
  j["replicates"] = std::move(reps);
  return j.dump();
}

std::string interval_table_to_json(const IntervalTable& table) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    rows.push_back({{"param", row.param},
                    {"i", row.i},
                    {"j", row.j},
                    {"lower", row.lower},
                    {"point", row.point},
                    {"upper", row.upper}});
  }
  json j;
  j["level"] = table.level;
  j["rows"] = std::move(rows);
  return j.dump();
}

void interval_table_to_csv(const IntervalTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << "parameter,i,j,lower,point,upper\n";
  for (const auto& row : table.rows) {
    out << row.param << ',' << row.i << ',' << row.j << ','
        << format_double(row.lower) << ',' << format_double(row.point) << ','
        << format_double(row.upper) << '\n';
  }
}

std::string prediction_intervals_to_json(const PredictionIntervals& pi) {
  json j;
  j["lower"] = matrix_to_json(pi.lower);
  j["point"] = matrix_to_json(pi.point);
  j["upper"] = matrix_to_json(pi.upper);
  return j.dump();
}

}  // namespace gflsr
