// SPDX-License-Identifier: Apache-2.0
//
// sfot -- sound-field estimation with optimal-transport barycenters

#include "sfot/io.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace sfot {

namespace {

using nlohmann::json;

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& ex) {
    throw ConfigError(path.string() + ": " + ex.what());
  }
}

void save_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << j.dump(2) << '\n';
  if (!out) {
    throw IoError("write failed for " + path.string());
  }
}

// Unknown keys are schema violations; report the field path.
void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& context) {
  if (!j.is_object()) {
    throw ConfigError(context + ": expected an object");
  }
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError(context + ": unknown key '" + item.key() + "'");
    }
  }
}

template <typename T>
T get_field(const json& j, const std::string& key, const std::string& context) {
  if (!j.contains(key)) {
    throw ConfigError(context + ": missing key '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(context + ": bad value for '" + key + "'");
  }
}

template <typename T>
T get_field_or(const json& j, const std::string& key, const T& fallback,
               const std::string& context) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(context + ": bad value for '" + key + "'");
  }
}

json complex_to_json(const Complex& z) {
  return json::array({z.real(), z.imag()});
}

Complex complex_from_json(const json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 2) {
    throw ConfigError(context + ": complex values are [re, im] pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json cvector_to_json(const Eigen::VectorXcd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(complex_to_json(v[i]));
  return arr;
}

Eigen::VectorXcd cvector_from_json(const json& j, const std::string& context) {
  if (!j.is_array()) throw ConfigError(context + ": expected an array");
  Eigen::VectorXcd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    v[static_cast<int>(i)] = complex_from_json(j[i], context);
  }
  return v;
}

json rvector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd rvector_from_json(const json& j, const std::string& context) {
  if (!j.is_array()) throw ConfigError(context + ": expected an array");
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(context + ": expected numbers");
    v[static_cast<int>(i)] = j[i].get<double>();
  }
  return v;
}

json dictionary_to_json(const PlaneWaveDictionary& dict) {
  return {{"frequency_hz", dict.frequency_hz},
          {"speed_of_sound_mps", dict.speed_of_sound_mps},
          {"directions_rad", rvector_to_json(dict.directions_rad)}};
}

PlaneWaveDictionary dictionary_from_json(const json& j,
                                         const std::string& context) {
  check_keys(j, {"frequency_hz", "speed_of_sound_mps", "directions_rad"},
             context);
  return PlaneWaveDictionary::from_directions(
      rvector_from_json(j.at("directions_rad"), context + ".directions_rad"),
      get_field<double>(j, "frequency_hz", context),
      get_field<double>(j, "speed_of_sound_mps", context));
}

json array_to_json(const SensorArray& array) {
  json positions = json::array();
  for (const auto& r : array.positions_m) {
    positions.push_back(json::array({r.x(), r.y()}));
  }
  return {{"positions_m", positions}};
}

SensorArray array_from_json(const json& j, const std::string& context) {
  check_keys(j, {"positions_m"}, context);
  const json& positions = j.at("positions_m");
  if (!positions.is_array() || positions.empty()) {
    throw ConfigError(context + ".positions_m: expected a non-empty array");
  }
  SensorArray array;
  for (const auto& p : positions) {
    if (!p.is_array() || p.size() != 2) {
      throw ConfigError(context + ".positions_m: entries are [x, y] pairs");
    }
    array.positions_m.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return array;
}

ScenarioConfig scenario_config_from_json(const json& j,
                                         const std::string& context) {
  check_keys(j,
             {"num_true_waves", "frequency_hz", "speed_of_sound_mps",
              "array_radius_m", "num_sensors", "sigma_delta_rad", "snr_db",
              "rng_seed", "estimation_grid_size"},
             context);
  ScenarioConfig config;
  config.num_true_waves = get_field_or(j, "num_true_waves", config.num_true_waves, context);
  config.frequency_hz = get_field_or(j, "frequency_hz", config.frequency_hz, context);
  config.speed_of_sound_mps =
      get_field_or(j, "speed_of_sound_mps", config.speed_of_sound_mps, context);
  config.array_radius_m = get_field_or(j, "array_radius_m", config.array_radius_m, context);
  config.num_sensors = get_field_or(j, "num_sensors", config.num_sensors, context);
  config.sigma_delta_rad = get_field_or(j, "sigma_delta_rad", config.sigma_delta_rad, context);
  config.snr_db = get_field_or(j, "snr_db", config.snr_db, context);
  config.rng_seed = get_field_or<std::uint64_t>(j, "rng_seed", config.rng_seed, context);
  config.estimation_grid_size =
      get_field_or(j, "estimation_grid_size", config.estimation_grid_size, context);
  try {
    config.validate();
  } catch (const std::exception& ex) {
    throw ConfigError(context + ": " + ex.what());
  }
  return config;
}

json scenario_config_to_json(const ScenarioConfig& config) {
  return {{"num_true_waves", config.num_true_waves},
          {"frequency_hz", config.frequency_hz},
          {"speed_of_sound_mps", config.speed_of_sound_mps},
          {"array_radius_m", config.array_radius_m},
          {"num_sensors", config.num_sensors},
          {"sigma_delta_rad", config.sigma_delta_rad},
          {"snr_db", config.snr_db},
          {"rng_seed", config.rng_seed},
          {"estimation_grid_size", config.estimation_grid_size}};
}

}  // namespace

ScenarioConfig read_scenario_config(const std::filesystem::path& path) {
  return scenario_config_from_json(load_json(path), path.filename().string());
}

void write_scenario(const std::filesystem::path& path, const Scene& scene,
                    const ScenarioConfig& config) {
  json truth = {
      {"directions_rad", rvector_to_json(scene.truth.true_directions_rad)},
      {"amplitudes", cvector_to_json(scene.truth.true_amplitudes)},
      {"noise", cvector_to_json(scene.truth.noise)},
      {"sigma_eps", scene.truth.sigma_eps}};
  json perturbations = json::array();
  for (int q = 0; q < scene.truth.perturbations_rad.rows(); ++q) {
    perturbations.push_back(
        rvector_to_json(scene.truth.perturbations_rad.row(q).transpose()));
  }
  truth["perturbations_rad"] = perturbations;

  save_json(path, {{"config", scenario_config_to_json(config)},
                   {"dictionary", dictionary_to_json(scene.dictionary)},
                   {"array", array_to_json(scene.array)},
                   {"truth", truth}});
}

std::pair<Scene, ScenarioConfig> read_scenario(
    const std::filesystem::path& path) {
  const json j = load_json(path);
  const std::string context = path.filename().string();
  check_keys(j, {"config", "dictionary", "array", "truth"}, context);

  Scene scene;
  const ScenarioConfig config =
      scenario_config_from_json(j.at("config"), context + ".config");
  scene.dictionary =
      dictionary_from_json(j.at("dictionary"), context + ".dictionary");
  scene.array = array_from_json(j.at("array"), context + ".array");

  const json& truth = j.at("truth");
  check_keys(truth,
             {"directions_rad", "amplitudes", "perturbations_rad", "noise",
              "sigma_eps"},
             context + ".truth");
  scene.truth.true_directions_rad =
      rvector_from_json(truth.at("directions_rad"), context + ".truth");
  scene.truth.true_amplitudes =
      cvector_from_json(truth.at("amplitudes"), context + ".truth");
  scene.truth.noise = cvector_from_json(truth.at("noise"), context + ".truth");
  scene.truth.sigma_eps = get_field<double>(truth, "sigma_eps", context);
  const json& perturbations = truth.at("perturbations_rad");
  if (!perturbations.is_array() || perturbations.empty()) {
    throw ConfigError(context + ".truth.perturbations_rad: expected rows");
  }
  const int Q = static_cast<int>(perturbations.size());
  const int T = scene.truth.num_waves();
  scene.truth.perturbations_rad.resize(Q, T);
  for (int q = 0; q < Q; ++q) {
    const Eigen::VectorXd row =
        rvector_from_json(perturbations[q], context + ".truth.perturbations_rad");
    if (row.size() != T) {
      throw ConfigError(context + ".truth.perturbations_rad: ragged rows");
    }
    scene.truth.perturbations_rad.row(q) = row.transpose();
  }
  return {std::move(scene), config};
}

void write_measurements(const std::filesystem::path& path,
                        const MeasurementSet& measurements) {
  save_json(path,
            {{"pressures", cvector_to_json(measurements.pressures)},
             {"array", array_to_json(measurements.array)},
             {"frequency_hz", measurements.frequency_hz},
             {"speed_of_sound_mps", measurements.speed_of_sound_mps},
             {"provenance",
              {{"rng_seed", measurements.provenance.rng_seed},
               {"sigma_delta_rad", measurements.provenance.sigma_delta_rad},
               {"sigma_eps", measurements.provenance.sigma_eps},
               {"snr_db", measurements.provenance.snr_db}}}});
}

MeasurementSet read_measurements(const std::filesystem::path& path) {
  const json j = load_json(path);
  const std::string context = path.filename().string();
  check_keys(
      j, {"pressures", "array", "frequency_hz", "speed_of_sound_mps", "provenance"},
      context);
  MeasurementSet measurements;
  measurements.pressures =
      cvector_from_json(j.at("pressures"), context + ".pressures");
  measurements.array = array_from_json(j.at("array"), context + ".array");
  measurements.frequency_hz = get_field<double>(j, "frequency_hz", context);
  measurements.speed_of_sound_mps =
      get_field<double>(j, "speed_of_sound_mps", context);
  const json& provenance = j.at("provenance");
  check_keys(provenance, {"rng_seed", "sigma_delta_rad", "sigma_eps", "snr_db"},
             context + ".provenance");
  measurements.provenance.rng_seed =
      get_field<std::uint64_t>(provenance, "rng_seed", context);
  measurements.provenance.sigma_delta_rad =
      get_field<double>(provenance, "sigma_delta_rad", context);
  measurements.provenance.sigma_eps =
      get_field<double>(provenance, "sigma_eps", context);
  measurements.provenance.snr_db =
      get_field<double>(provenance, "snr_db", context);
  if (measurements.array.size() != measurements.size()) {
    throw ConfigError(context + ": pressures/array size mismatch");
  }
  return measurements;
}

void write_estimate(const std::filesystem::path& path,
                    const EstimateFile& estimate) {
  save_json(path, {{"method", estimate.method},
                   {"hyperparameters",
                    {{"lambda", estimate.hypers.lambda},
                     {"gamma", estimate.hypers.gamma},
                     {"eta", estimate.hypers.eta}}},
                   {"dictionary", dictionary_to_json(estimate.dictionary)},
                   {"coefficients", cvector_to_json(estimate.coefficients.values)}});
}

EstimateFile read_estimate(const std::filesystem::path& path) {
  const json j = load_json(path);
  const std::string context = path.filename().string();
  check_keys(j, {"method", "hyperparameters", "dictionary", "coefficients"},
             context);
  EstimateFile estimate;
  estimate.method = get_field<std::string>(j, "method", context);
  const json& hypers = j.at("hyperparameters");
  check_keys(hypers, {"lambda", "gamma", "eta"}, context + ".hyperparameters");
  estimate.hypers.lambda = get_field<double>(hypers, "lambda", context);
  estimate.hypers.gamma = get_field<double>(hypers, "gamma", context);
  estimate.hypers.eta = get_field<double>(hypers, "eta", context);
  estimate.dictionary =
      dictionary_from_json(j.at("dictionary"), context + ".dictionary");
  estimate.coefficients.values =
      cvector_from_json(j.at("coefficients"), context + ".coefficients");
  return estimate;
}

RunConfig read_run_config(const std::filesystem::path& path) {
  const json j = load_json(path);
  const std::string context = path.filename().string();
  check_keys(j,
             {"scenario", "sweep", "methods", "cv_folds", "phase_grid_size",
              "evaluation", "trials", "seed", "threads", "timing"},
             context);

  RunConfig config;
  config.sweep.base = scenario_config_from_json(get_field<json>(j, "scenario", context),
                                                context + ".scenario");

  const json& sweep = get_field<json>(j, "sweep", context);
  check_keys(sweep, {"parameter", "values"}, context + ".sweep");
  config.sweep.param = sweep_param_from_name(
      get_field<std::string>(sweep, "parameter", context + ".sweep"));
  config.sweep.values.clear();
  for (double v :
       rvector_from_json(sweep.at("values"), context + ".sweep.values")) {
    config.sweep.values.push_back(v);
  }
  if (config.sweep.values.empty()) {
    throw ConfigError(context + ".sweep.values: must be non-empty");
  }

  const json& methods = get_field<json>(j, "methods", context);
  if (!methods.is_array() || methods.empty()) {
    throw ConfigError(context + ".methods: expected a non-empty array");
  }
  for (size_t m = 0; m < methods.size(); ++m) {
    const std::string mctx = context + ".methods[" + std::to_string(m) + "]";
    const json& jm = methods[m];
    check_keys(jm,
               {"method", "lambda_grid", "gamma_grid", "eta_grid", "solver",
                "tol", "max_iters"},
               mctx);
    MethodSpec spec;
    spec.method = method_from_name(get_field<std::string>(jm, "method", mctx));
    if (spec.method == Method::ot) {
      const Eigen::VectorXd gammas = rvector_from_json(
          get_field<json>(jm, "gamma_grid", mctx), mctx + ".gamma_grid");
      const Eigen::VectorXd etas = rvector_from_json(
          get_field<json>(jm, "eta_grid", mctx), mctx + ".eta_grid");
      if (gammas.size() == 0 || etas.size() == 0) {
        throw ConfigError(mctx + ": empty gamma_grid or eta_grid");
      }
      for (int gi = 0; gi < gammas.size(); ++gi) {
        for (int ei = 0; ei < etas.size(); ++ei) {
          HyperParams h;
          h.gamma = gammas[gi];
          h.eta = etas[ei];
          spec.grid.push_back(h);
        }
      }
      if (jm.contains("solver")) {
        const json& solver = jm.at("solver");
        check_keys(solver, {"rel_gap", "feas_tol", "max_iters", "rho"},
                   mctx + ".solver");
        spec.solver.rel_gap =
            get_field_or(solver, "rel_gap", spec.solver.rel_gap, mctx);
        spec.solver.feas_tol =
            get_field_or(solver, "feas_tol", spec.solver.feas_tol, mctx);
        spec.solver.max_iters =
            get_field_or(solver, "max_iters", spec.solver.max_iters, mctx);
        spec.solver.rho = get_field_or(solver, "rho", spec.solver.rho, mctx);
      }
    } else {
      if (jm.contains("gamma_grid") || jm.contains("eta_grid") ||
          jm.contains("solver")) {
        throw ConfigError(mctx + ": gamma/eta/solver apply to the ot method");
      }
      const Eigen::VectorXd lambdas = rvector_from_json(
          get_field<json>(jm, "lambda_grid", mctx), mctx + ".lambda_grid");
      if (lambdas.size() == 0) {
        throw ConfigError(mctx + ": empty lambda_grid");
      }
      for (int li = 0; li < lambdas.size(); ++li) {
        HyperParams h;
        h.lambda = lambdas[li];
        spec.grid.push_back(h);
      }
      spec.lasso_opts.tol =
          get_field_or(jm, "tol", spec.lasso_opts.tol, mctx);
      spec.lasso_opts.max_iters =
          get_field_or(jm, "max_iters", spec.lasso_opts.max_iters, mctx);
      spec.lad_opts.rel_gap = get_field_or(jm, "tol", spec.lad_opts.rel_gap, mctx);
      spec.lad_opts.max_iters =
          get_field_or(jm, "max_iters", spec.lad_opts.max_iters, mctx);
    }
    config.sweep.methods.push_back(std::move(spec));
  }

  config.sweep.cv_folds = get_field_or(j, "cv_folds", config.sweep.cv_folds, context);
  config.sweep.phase_grid_size =
      get_field_or(j, "phase_grid_size", config.sweep.phase_grid_size, context);

  if (j.contains("evaluation")) {
    const json& eval = j.at("evaluation");
    check_keys(eval, {"region", "resolution"}, context + ".evaluation");
    if (eval.contains("region")) {
      const Eigen::VectorXd r =
          rvector_from_json(eval.at("region"), context + ".evaluation.region");
      if (r.size() != 4) {
        throw ConfigError(context +
                          ".evaluation.region: expected [xmin, xmax, ymin, ymax]");
      }
      config.sweep.eval.region = Region{r[0], r[1], r[2], r[3]};
    }
    if (eval.contains("resolution")) {
      const Eigen::VectorXd r = rvector_from_json(
          eval.at("resolution"), context + ".evaluation.resolution");
      if (r.size() != 2) {
        throw ConfigError(context + ".evaluation.resolution: expected [nx, ny]");
      }
      config.sweep.eval.nx = static_cast<int>(r[0]);
      config.sweep.eval.ny = static_cast<int>(r[1]);
    }
  }

  config.trials = get_field_or(j, "trials", config.trials, context);
  if (config.trials < 1) {
    throw ConfigError(context + ".trials: must be >= 1");
  }
  config.seed = get_field_or<std::uint64_t>(j, "seed", config.seed, context);
  config.threads = get_field_or(j, "threads", config.threads, context);
  config.timing = get_field_or(j, "timing", config.timing, context);
  return config;
}

}  // namespace sfot
