#include "costa/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace costa::harness {

namespace {

std::string trim(const std::string& s) {
  auto begin = s.begin();
  auto end = s.end();
  while (begin != end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
  while (end != begin && std::isspace(static_cast<unsigned char>(*(end - 1)))) --end;
  return std::string(begin, end);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

IniFile IniFile::parse_string(const std::string& text) {
  IniFile ini;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw InvalidConfig("config line " + std::to_string(line_number) +
                            ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidConfig("config line " + std::to_string(line_number) +
                          ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw InvalidConfig("config line " + std::to_string(line_number) + ": empty key");
    ini.values_[section][key] = value;
  }
  return ini;
}

IniFile IniFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str());
}

bool IniFile::has(const std::string& section, const std::string& key) const {
  const auto sit = values_.find(section);
  return sit != values_.end() && sit->second.count(key) > 0;
}

std::string IniFile::get_string(const std::string& section, const std::string& key,
                                std::optional<std::string> fallback) const {
  const auto sit = values_.find(section);
  if (sit != values_.end()) {
    const auto kit = sit->second.find(key);
    if (kit != sit->second.end()) return kit->second;
  }
  if (fallback) return *fallback;
  throw InvalidConfig("config: missing [" + section + "] " + key);
}

Scalar IniFile::get_scalar(const std::string& section, const std::string& key,
                           std::optional<Scalar> fallback) const {
  if (!has(section, key)) {
    if (fallback) return *fallback;
    throw InvalidConfig("config: missing [" + section + "] " + key);
  }
  const std::string raw = get_string(section, key);
  try {
    std::size_t used = 0;
    const Scalar value = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return value;
  } catch (const std::exception&) {
    throw InvalidConfig("config: [" + section + "] " + key + " = '" + raw +
                        "' is not a number");
  }
}

long IniFile::get_long(const std::string& section, const std::string& key,
                       std::optional<long> fallback) const {
  if (!has(section, key)) {
    if (fallback) return *fallback;
    throw InvalidConfig("config: missing [" + section + "] " + key);
  }
  const std::string raw = get_string(section, key);
  try {
    std::size_t used = 0;
    const long value = std::stol(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return value;
  } catch (const std::exception&) {
    throw InvalidConfig("config: [" + section + "] " + key + " = '" + raw +
                        "' is not an integer");
  }
}

bool IniFile::get_bool(const std::string& section, const std::string& key,
                       std::optional<bool> fallback) const {
  if (!has(section, key)) {
    if (fallback) return *fallback;
    throw InvalidConfig("config: missing [" + section + "] " + key);
  }
  std::string raw = get_string(section, key);
  std::transform(raw.begin(), raw.end(), raw.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
  if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
  throw InvalidConfig("config: [" + section + "] " + key + " = '" + raw +
                      "' is not a boolean");
}

std::vector<Scalar> IniFile::get_scalar_list(const std::string& section,
                                             const std::string& key,
                                             std::optional<std::vector<Scalar>> fallback) const {
  if (!has(section, key)) {
    if (fallback) return *fallback;
    throw InvalidConfig("config: missing [" + section + "] " + key);
  }
  std::vector<Scalar> out;
  for (const auto& token : split(get_string(section, key), ',')) {
    try {
      out.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw InvalidConfig("config: [" + section + "] " + key + ": bad entry '" + token + "'");
    }
  }
  return out;
}

std::vector<std::string> IniFile::get_string_list(
    const std::string& section, const std::string& key,
    std::optional<std::vector<std::string>> fallback) const {
  if (!has(section, key)) {
    if (fallback) return *fallback;
    throw InvalidConfig("config: missing [" + section + "] " + key);
  }
  return split(get_string(section, key), ',');
}

problems::Environment ExperimentConfig::default_trajectory_environment() {
  problems::Environment env;
  env.agents = 2;
  env.horizon = 15;
  env.dt = 1.25;
  env.start = {{-2.0, 0.35}, {-2.0, -0.35}};
  env.goal = {{2.0, 0.35}, {2.0, -0.35}};
  env.obstacle_center = {0.0, 0.0};
  env.obstacle_radius = 0.7;
  env.agent_radius = 0.1;
  env.speed_cap = {1.0, 1.0};
  env.current_scale = 0.8;
  env.noise_std = 0.1;
  return env;
}

std::string problem_kind_name(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kExteriorBall: return "exterior-ball";
    case ProblemKind::kSyntheticQuadratic: return "synthetic-quadratic";
    case ProblemKind::kSparseLogistic: return "sparse-logistic";
    case ProblemKind::kTrajectory: return "trajectory";
  }
  return "unknown";
}

namespace {

ProblemKind parse_problem_kind(const std::string& name) {
  if (name == "exterior-ball") return ProblemKind::kExteriorBall;
  if (name == "synthetic-quadratic") return ProblemKind::kSyntheticQuadratic;
  if (name == "sparse-logistic") return ProblemKind::kSparseLogistic;
  if (name == "trajectory") return ProblemKind::kTrajectory;
  throw InvalidConfig("config: unknown problem '" + name + "'");
}

RunConfig::Baseline parse_baseline(const std::string& name) {
  if (name == "costa") return RunConfig::Baseline::kCosta;
  if (name == "classical") return RunConfig::Baseline::kClassical;
  throw InvalidConfig("config: unknown baseline '" + name + "'");
}

std::vector<Eigen::Vector2d> parse_points(const std::vector<Scalar>& flat,
                                          const std::string& what) {
  if (flat.size() % 2 != 0)
    throw InvalidConfig("config: " + what + " needs an even number of coordinates");
  std::vector<Eigen::Vector2d> points(flat.size() / 2);
  for (std::size_t k = 0; k < points.size(); ++k)
    points[k] = Eigen::Vector2d(flat[2 * k], flat[2 * k + 1]);
  return points;
}

}  // namespace

ExperimentConfig config_from_ini(const IniFile& ini) {
  ExperimentConfig cfg;
  cfg.problem = parse_problem_kind(ini.get_string("experiment", "problem"));
  cfg.out_dir = ini.get_string("experiment", "out_dir", std::string("out"));
  cfg.emit_trace = ini.get_bool("experiment", "emit_trace", true);
  cfg.emit_summary = ini.get_bool("experiment", "emit_summary", true);
  cfg.emit_plot_data = ini.get_bool("experiment", "emit_plot_data", true);

  cfg.run.iterations = ini.get_long("run", "iterations");
  cfg.run.kbar = ini.get_scalar("run", "kbar");
  cfg.run.w = ini.get_scalar("run", "w");
  cfg.run.c = ini.get_scalar("run", "c");
  cfg.run.modulus = ini.get_scalar("run", "mu");
  cfg.run.subsolver_tolerance = ini.get_scalar("run", "subsolver_tol", 1e-8);
  cfg.run.seed = static_cast<std::uint64_t>(ini.get_long("run", "seed", 1));
  cfg.run.deterministic = ini.get_bool("run", "deterministic", false);
  cfg.run.baseline = parse_baseline(ini.get_string("run", "baseline", std::string("costa")));
  cfg.run.report_samples = static_cast<int>(ini.get_long("run", "report_samples", 1));
  cfg.run.kkt_stride = static_cast<int>(ini.get_long("run", "kkt_stride", 1));
  cfg.run.kkt_samples = static_cast<int>(ini.get_long("run", "kkt_samples", 64));
  cfg.run.track_error_stride =
      static_cast<int>(ini.get_long("run", "track_error_stride", 0));
  cfg.run.track_error_samples =
      static_cast<int>(ini.get_long("run", "track_error_samples", 64));
  cfg.run.warm_start_duals = ini.get_bool("run", "warm_start_duals", true);
  cfg.run.classical_rho_scale = ini.get_scalar("run", "classical_rho_scale", 1.0);
  cfg.run.classical_rho_exponent = ini.get_scalar("run", "classical_rho_exponent", 0.5);
  if (ini.has("run", "classical_rho_override"))
    cfg.run.classical_rho_override = ini.get_scalar("run", "classical_rho_override");
  if (ini.has("run", "eta_override"))
    cfg.run.eta_override = ini.get_scalar("run", "eta_override");
  cfg.run.subsolver.max_inner_iterations = static_cast<int>(ini.get_long(
      "run", "subsolver_max_inner", cfg.run.subsolver.max_inner_iterations));
  cfg.run.subsolver.max_outer_rounds = static_cast<int>(
      ini.get_long("run", "subsolver_max_outer", cfg.run.subsolver.max_outer_rounds));

  if (ini.has("sweep", "seeds")) {
    for (const Scalar s : ini.get_scalar_list("sweep", "seeds"))
      cfg.sweep_seeds.push_back(static_cast<std::uint64_t>(s));
    if (cfg.sweep_seeds.empty()) throw InvalidConfig("config: [sweep] seeds is empty");
    for (const Scalar t : ini.get_scalar_list("sweep", "iterations_list"))
      cfg.sweep_iterations.push_back(static_cast<long>(t));
    if (cfg.sweep_iterations.empty())
      throw InvalidConfig("config: [sweep] iterations_list is empty");
    for (const auto& name :
         ini.get_string_list("sweep", "baselines", std::vector<std::string>{"costa"}))
      cfg.sweep_baselines.push_back(parse_baseline(name));
    cfg.workers = static_cast<int>(ini.get_long("sweep", "workers", 1));
  }

  cfg.validate.samples = static_cast<int>(ini.get_long("validate", "samples", 10000));
  cfg.validate.fd_step = ini.get_scalar("validate", "fd_step", 1e-5);
  cfg.validate.inject_defect =
      ini.get_string("validate", "inject_defect", std::string("none"));
  cfg.validate.check_surrogates = ini.get_bool("validate", "check_surrogates", true);
  cfg.validate.check_schedule_params =
      ini.get_bool("validate", "check_schedule_params", true);
  cfg.validate.check_slater = ini.get_bool("validate", "check_slater", true);
  cfg.validate.omega = ini.get_scalar("validate", "omega", 0.1);

  const std::string ball_section = "problem.exterior-ball";
  if (ini.has(ball_section, "target")) {
    const auto t = ini.get_scalar_list(ball_section, "target");
    if (t.size() != 2) throw InvalidConfig("config: exterior-ball target needs 2 coords");
    cfg.ball.target = Eigen::Vector2d(t[0], t[1]);
  }
  if (ini.has(ball_section, "start")) {
    const auto s = ini.get_scalar_list(ball_section, "start");
    if (s.size() != 2) throw InvalidConfig("config: exterior-ball start needs 2 coords");
    cfg.ball.start = Eigen::Vector2d(s[0], s[1]);
  }

  const std::string quad_section = "problem.synthetic-quadratic";
  cfg.quadratic.dimension = ini.get_long(quad_section, "dimension", 20);
  cfg.quadratic.noise_std = ini.get_scalar(quad_section, "noise_std", 2.0);
  cfg.quadratic.problem_seed =
      static_cast<std::uint64_t>(ini.get_long(quad_section, "problem_seed", 7));

  const std::string log_section = "problem.sparse-logistic";
  cfg.logistic.dataset_path = ini.get_string(log_section, "dataset", std::string(""));
  if (cfg.logistic.dataset_path == "synthetic") cfg.logistic.dataset_path.clear();
  cfg.logistic.test_dataset_path =
      ini.get_string(log_section, "test_dataset", std::string(""));
  cfg.logistic.positive_label = ini.get_scalar(log_section, "positive_label", 1.0);
  cfg.logistic.synthetic_dimension = ini.get_long(log_section, "synthetic_dimension", 60);
  cfg.logistic.synthetic_rows = ini.get_long(log_section, "synthetic_rows", 400);
  cfg.logistic.synthetic_support =
      static_cast<int>(ini.get_long(log_section, "synthetic_support", 6));
  cfg.logistic.synthetic_label_noise =
      ini.get_scalar(log_section, "synthetic_label_noise", 0.5);
  cfg.logistic.dataset_seed =
      static_cast<std::uint64_t>(ini.get_long(log_section, "dataset_seed", 13));
  cfg.logistic.mcp.lambda = ini.get_scalar(log_section, "mcp_lambda", cfg.logistic.mcp.lambda);
  cfg.logistic.mcp.theta = ini.get_scalar(log_section, "mcp_theta", cfg.logistic.mcp.theta);
  cfg.logistic.mcp.smoothing =
      ini.get_scalar(log_section, "mcp_smoothing", cfg.logistic.mcp.smoothing);
  cfg.logistic.mcp.level = ini.get_scalar(log_section, "mcp_tau", cfg.logistic.mcp.level);
  cfg.logistic.mcp.smoothed = true;

  const std::string traj_section = "problem.trajectory";
  auto& env = cfg.trajectory_env;  // pre-filled with the demo defaults
  env.agents = static_cast<int>(ini.get_long(traj_section, "agents", env.agents));
  env.horizon = static_cast<int>(ini.get_long(traj_section, "horizon", env.horizon));
  env.dt = ini.get_scalar(traj_section, "dt", env.dt);
  if (ini.has(traj_section, "starts"))
    env.start = parse_points(ini.get_scalar_list(traj_section, "starts"),
                             "trajectory starts");
  if (ini.has(traj_section, "goals"))
    env.goal =
        parse_points(ini.get_scalar_list(traj_section, "goals"), "trajectory goals");
  if (ini.has(traj_section, "obstacle_center")) {
    const auto c = ini.get_scalar_list(traj_section, "obstacle_center");
    if (c.size() != 2) throw InvalidConfig("config: obstacle_center needs 2 coords");
    env.obstacle_center = Eigen::Vector2d(c[0], c[1]);
  }
  env.obstacle_radius = ini.get_scalar(traj_section, "obstacle_radius", env.obstacle_radius);
  env.agent_radius = ini.get_scalar(traj_section, "agent_radius", env.agent_radius);
  if (ini.has(traj_section, "speed_caps")) {
    const auto caps = ini.get_scalar_list(traj_section, "speed_caps");
    env.speed_cap.assign(caps.begin(), caps.end());
  } else if (env.speed_cap.size() != static_cast<std::size_t>(env.agents)) {
    env.speed_cap.assign(static_cast<std::size_t>(env.agents), 1.0);
  }
  env.current_scale = ini.get_scalar(traj_section, "omega", env.current_scale);
  env.noise_std = ini.get_scalar(traj_section, "sigma", env.noise_std);

  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  ExperimentConfig cfg = config_from_ini(IniFile::parse_file(path));
  if (cfg.problem == ProblemKind::kSparseLogistic && !cfg.logistic.dataset_path.empty() &&
      !std::filesystem::exists(cfg.logistic.dataset_path))
    throw InvalidConfig("config: dataset path does not exist: " + cfg.logistic.dataset_path);
  if (!cfg.logistic.test_dataset_path.empty() &&
      !std::filesystem::exists(cfg.logistic.test_dataset_path))
    throw InvalidConfig("config: test dataset path does not exist: " +
                        cfg.logistic.test_dataset_path);
  return cfg;
}

namespace {

BuiltProblem build_exterior_ball(const ExteriorBallParams& params) {
  BuiltProblem built;
  built.name = "exterior-ball";
  const Eigen::Vector2d target = params.target;

  StochasticProblem& p = built.problem;
  p.dimension = 2;
  p.draw_sample = [](RngStream&) { return Sample(0); };
  p.objective_value = [target](const Vector& x, const Sample&) {
    return (x - Vector(target)).squaredNorm();
  };
  p.objective_gradient = [target](const Vector& x, const Sample&) {
    return Vector(2.0 * (x - Vector(target)));
  };
  p.mean_value = [target](const Vector& x) { return (x - Vector(target)).squaredNorm(); };
  p.mean_gradient = [target](const Vector& x) { return Vector(2.0 * (x - Vector(target))); };
  p.regularizer = Regularizer::zero();

  NonconvexConstraint g;
  g.fn.value = [](const Vector& x) { return 1.0 - x.squaredNorm(); };
  g.fn.gradient = [](const Vector& x) { return Vector(-2.0 * x); };
  g.surrogate_at = [](const Vector& anchor) {
    ConstraintSurrogate s;
    s.anchor = anchor;
    s.tag = ConvexityTag::kLinear;
    const Vector y = anchor;
    s.fn.value = [y](const Vector& x) { return 1.0 + y.squaredNorm() - 2.0 * y.dot(x); };
    s.fn.gradient = [y](const Vector& x) {
      (void)x;
      return Vector(-2.0 * y);
    };
    return s;
  };
  p.nonconvex_constraints.push_back(std::move(g));

  p.meta.smoothness = 2.0;
  p.meta.noise_std = 0.0;
  // Gradient norms stay bounded by the geometry of the fixture; usable for
  // the certificate monitors, not a global constant.
  p.meta.lipschitz = 2.0 * (2.0 + target.norm());
  if (target.norm() < 1.0) {
    const Scalar fstar = (1.0 - target.norm()) * (1.0 - target.norm());
    p.meta.initial_gap =
        (Vector(params.start) - Vector(target)).squaredNorm() - fstar;
  }

  built.initial_point = Vector(params.start);
  built.majorization_sampler = [](RngStream& rng) {
    std::uniform_real_distribution<Scalar> box(-3.0, 3.0);
    Vector x(2);
    x << box(rng), box(rng);
    return x;
  };
  return built;
}

BuiltProblem build_synthetic_quadratic(const SyntheticQuadraticParams& params) {
  if (params.dimension < 1) throw InvalidConfig("synthetic quadratic: dimension >= 1");
  BuiltProblem built;
  built.name = "synthetic-quadratic";

  RngStream rng = substream(params.problem_seed, 11);
  std::normal_distribution<Scalar> gauss(0.0, 1.0);
  Vector target(params.dimension);
  for (Eigen::Index k = 0; k < params.dimension; ++k) target[k] = gauss(rng);
  target *= 2.0 / target.norm();

  const Scalar sigma = params.noise_std;
  const Scalar per_coord =
      sigma / std::sqrt(static_cast<Scalar>(params.dimension));

  StochasticProblem& p = built.problem;
  p.dimension = params.dimension;
  p.draw_sample = [n = params.dimension, per_coord](RngStream& rng_) {
    std::normal_distribution<Scalar> noise(0.0, per_coord);
    Vector xi(n);
    for (Eigen::Index k = 0; k < n; ++k) xi[k] = noise(rng_);
    return Sample(xi);
  };
  p.objective_value = [target](const Vector& x, const Sample& xi) {
    return 0.5 * (x - target).squaredNorm() + std::any_cast<Vector>(xi).dot(x);
  };
  p.objective_gradient = [target](const Vector& x, const Sample& xi) {
    return Vector(x - target + std::any_cast<Vector>(xi));
  };
  p.mean_value = [target](const Vector& x) { return 0.5 * (x - target).squaredNorm(); };
  p.mean_gradient = [target](const Vector& x) { return Vector(x - target); };
  p.regularizer = Regularizer::zero();

  p.meta.smoothness = 1.0;
  p.meta.noise_std = sigma;
  p.meta.initial_gap = 0.5 * target.squaredNorm();  // x_1 = 0, U* = 0
  // A run-region bound: iterates stay near the segment [x_1, target].
  p.meta.lipschitz = target.norm() + 4.0 * sigma + 1.0;

  built.initial_point = Vector::Zero(params.dimension);
  built.majorization_sampler = [n = params.dimension](RngStream& rng_) {
    std::uniform_real_distribution<Scalar> box(-3.0, 3.0);
    Vector x(n);
    for (Eigen::Index k = 0; k < n; ++k) x[k] = box(rng_);
    return x;
  };
  return built;
}

BuiltProblem build_sparse_logistic_problem(const SparseLogisticParams& params) {
  BuiltProblem built;
  built.name = "sparse-logistic";

  std::shared_ptr<problems::Dataset> dataset;
  if (params.dataset_path.empty()) {
    dataset = std::make_shared<problems::Dataset>(problems::make_synthetic_classification(
        params.synthetic_dimension, params.synthetic_rows, params.synthetic_support,
        params.synthetic_label_noise, params.dataset_seed));
  } else {
    dataset = std::make_shared<problems::Dataset>(
        problems::load_libsvm(params.dataset_path, params.positive_label));
    if (!params.test_dataset_path.empty()) {
      const problems::Dataset test = problems::load_libsvm(
          params.test_dataset_path, params.positive_label, dataset->dimension());
      // Append the test rows and mark them as the test split.
      const Eigen::Index train_rows = dataset->rows();
      Eigen::SparseMatrix<Scalar, Eigen::RowMajor> merged(train_rows + test.rows(),
                                                          dataset->dimension());
      std::vector<Eigen::Triplet<Scalar>> triplets;
      for (Eigen::Index r = 0; r < train_rows; ++r)
        for (Eigen::SparseMatrix<Scalar, Eigen::RowMajor>::InnerIterator it(
                 dataset->features, r);
             it; ++it)
          triplets.emplace_back(static_cast<int>(r), static_cast<int>(it.col()), it.value());
      for (Eigen::Index r = 0; r < test.rows(); ++r)
        for (Eigen::SparseMatrix<Scalar, Eigen::RowMajor>::InnerIterator it(test.features,
                                                                            r);
             it; ++it)
          triplets.emplace_back(static_cast<int>(train_rows + r),
                                static_cast<int>(it.col()), it.value());
      merged.setFromTriplets(triplets.begin(), triplets.end());
      Vector labels(train_rows + test.rows());
      labels.head(train_rows) = dataset->labels;
      labels.tail(test.rows()) = test.labels;
      dataset->features = std::move(merged);
      dataset->labels = std::move(labels);
      dataset->test_indices.clear();
      for (Eigen::Index r = 0; r < test.rows(); ++r)
        dataset->test_indices.push_back(static_cast<int>(train_rows + r));
    }
  }

  built.dataset = dataset;
  built.problem = problems::build_sparse_logistic(dataset, params.mcp);
  built.initial_point = Vector::Zero(built.problem.dimension);
  built.majorization_sampler = [n = built.problem.dimension](RngStream& rng_) {
    std::uniform_real_distribution<Scalar> box(-3.0, 3.0);
    Vector x(n);
    for (Eigen::Index k = 0; k < n; ++k) x[k] = box(rng_);
    return x;
  };
  return built;
}

BuiltProblem build_trajectory(const problems::Environment& env) {
  BuiltProblem built;
  built.name = "trajectory";
  built.environment = env;
  built.problem = problems::build_trajectory_problem(env);
  built.initial_point = problems::initial_trajectory(env);
  built.majorization_sampler = [base = built.initial_point](RngStream& rng_) {
    std::normal_distribution<Scalar> gauss(0.0, 0.75);
    Vector x = base;
    for (Eigen::Index k = 0; k < x.size(); ++k) x[k] += gauss(rng_);
    return x;
  };
  return built;
}

}  // namespace

BuiltProblem build_problem(const ExperimentConfig& config) {
  switch (config.problem) {
    case ProblemKind::kExteriorBall: return build_exterior_ball(config.ball);
    case ProblemKind::kSyntheticQuadratic:
      return build_synthetic_quadratic(config.quadratic);
    case ProblemKind::kSparseLogistic:
      return build_sparse_logistic_problem(config.logistic);
    case ProblemKind::kTrajectory: return build_trajectory(config.trajectory_env);
  }
  throw InvalidConfig("build_problem: unhandled problem kind");
}

}  // namespace costa::harness
