#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "torusgas/errors.hpp"

namespace torusgas::cli {

using nlohmann::json;

namespace {

// Reads one JSON object, remembering which keys were used so leftovers can be
// reported with their full path.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  template <class T>
  void read(const char* key, T& out) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    const json& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError("");
        if constexpr (std::is_unsigned_v<T>) {
          if (v.get<long long>() < 0) throw ConfigError("");
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, std::vector<int>>) {
        if (!v.is_array()) throw ConfigError("");
        for (const auto& e : v)
          if (!e.is_number_integer() || e.get<long long>() < 1) throw ConfigError("");
      } else {
        if (!v.is_array()) throw ConfigError("");
        for (const auto& e : v)
          if (!e.is_number()) throw ConfigError("");
      }
      out = v.get<T>();
    } catch (const ConfigError&) {
      throw ConfigError("'" + child(key) + "' has the wrong type (expected " + expected<T>() + ")");
    }
  }

  Section sub(const char* key) {
    seen_.insert(key);
    return Section(j_.at(key), child(key));
  }
  bool has(const char* key) const { return j_.contains(key); }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError("unknown key '" + child(k) + "'");
  }

 private:
  std::string where() const { return path_.empty() ? "config" : "'" + path_ + "'"; }
  std::string child(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  template <class T>
  static std::string expected() {
    if constexpr (std::is_same_v<T, bool>) return "boolean";
    else if constexpr (std::is_integral_v<T>) return std::is_unsigned_v<T> ? "non-negative integer" : "integer";
    else if constexpr (std::is_floating_point_v<T>) return "number";
    else if constexpr (std::is_same_v<T, std::string>) return "string";
    else if constexpr (std::is_same_v<T, std::vector<int>>) return "array of positive integers";
    else return "array of numbers";
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace

double ExperimentConfig::resolved_beta() const {
  if (theta > 0.0) return theta / static_cast<double>(n_points);
  if (beta > 0.0) return beta;
  return 1.0 / std::sqrt(static_cast<double>(n_points));
}

GibbsAudit ExperimentConfig::gibbs_audit(int threads) const {
  GibbsAudit a;
  a.kernel = kernel;
  a.potential = potential;
  a.dim = dim;
  a.side = side;
  a.n = n;
  a.n_points = n_points;
  a.beta = resolved_beta();
  a.samples = sampling.samples;
  a.chains = sampling.chains;
  a.thin = sampling.thin;
  a.burn_in = sampling.burn_in;
  a.test_mode = test_mode;
  a.seed = seed + 6;
  a.threads = threads;
  a.conc_r = conc_r;
  a.laplace_r = laplace_r;
  a.laplace_alpha = laplace_alpha;
  return a;
}

EquilibriumOptions ExperimentConfig::equilibrium_options() const {
  EquilibriumOptions o;
  o.theta_ladder = theta_ladder;
  o.support_threshold = support_threshold;
  o.thermal.tol = solver_tol;
  o.thermal.max_iter = solver_max_iter;
  return o;
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  Section root(j, "");
  int version = kSchemaVersion;
  root.read("schema_version", version);
  require(version == kSchemaVersion, "'schema_version' must be " + std::to_string(kSchemaVersion));
  root.read("seed", c.seed);
  root.read("output_dir", c.output_dir);
  if (root.has("grid")) {
    auto s = root.sub("grid");
    s.read("d", c.dim);
    s.read("T", c.side);
    s.read("n", c.n);
    s.finish();
  }
  if (root.has("kernel")) {
    auto s = root.sub("kernel");
    s.read("name", c.kernel.name);
    s.read("gamma", c.kernel.gamma);
    s.read("zero_mode", c.kernel.zero_mode);
    s.read("table", c.kernel.table_path);
    s.finish();
  }
  if (root.has("potential")) {
    auto s = root.sub("potential");
    s.read("preset", c.potential.preset);
    s.read("amplitude", c.potential.amplitude);
    s.read("mode", c.potential.mode);
    s.read("sigma", c.potential.sigma);
    s.read("path", c.potential.path);
    s.finish();
  }
  if (root.has("gibbs")) {
    auto s = root.sub("gibbs");
    s.read("N", c.n_points);
    s.read("beta", c.beta);
    s.read("theta", c.theta);
    s.finish();
    require(!(c.beta > 0.0 && c.theta > 0.0), "'gibbs.beta' and 'gibbs.theta' are mutually exclusive");
  }
  if (root.has("solver")) {
    auto s = root.sub("solver");
    s.read("tol", c.solver_tol);
    s.read("max_iter", c.solver_max_iter);
    s.read("theta_ladder", c.theta_ladder);
    s.read("support_threshold", c.support_threshold);
    s.finish();
  }
  if (root.has("sampling")) {
    auto s = root.sub("sampling");
    s.read("samples", c.sampling.samples);
    s.read("chains", c.sampling.chains);
    s.read("thin", c.sampling.thin);
    s.read("burn_in", c.sampling.burn_in);
    s.read("proposal_scale", c.sampling.proposal_scale);
    s.read("recompute_every", c.sampling.recompute_every);
    s.finish();
  }
  if (root.has("bounds")) {
    auto s = root.sub("bounds");
    s.read("test_mode", c.test_mode);
    s.read("concentration_r", c.conc_r);
    s.read("laplace_r", c.laplace_r);
    s.read("laplace_alpha", c.laplace_alpha);
    s.finish();
  }
  if (root.has("admissibility")) {
    auto s = root.sub("admissibility");
    s.read("s_sweep", c.s_sweep);
    s.read("n_1d", c.admissibility.n_1d);
    s.read("n_2d", c.admissibility.n_2d);
    s.read("riesz_gammas", c.admissibility.riesz_gammas);
    s.read("s_count", c.admissibility.s_count);
    s.finish();
  }
  if (root.has("spectral")) {
    auto s = root.sub("spectral");
    s.read("fields", c.spectral.fields);
    s.read("n_1d", c.spectral.n_1d);
    s.read("n_2d", c.spectral.n_2d);
    s.read("tol", c.spectral.tol);
    s.finish();
  }
  if (root.has("splitting")) {
    auto s = root.sub("splitting");
    s.read("N", c.splitting.n_points);
    s.read("configs", c.splitting.configs);
    s.read("theta", c.splitting.theta);
    s.read("cos_amplitude", c.splitting.cos_amplitude);
    s.read("tol", c.splitting.tol);
    s.finish();
  }
  if (root.has("thermal")) {
    auto s = root.sub("thermal");
    s.read("thetas", c.thermal.thetas);
    s.read("perturbations", c.thermal.perturbations);
    s.read("residual_tol", c.thermal.residual_tol);
    s.finish();
  }
  if (root.has("partition")) {
    auto s = root.sub("partition");
    s.read("N", c.partition.n_points);
    s.read("thetas", c.partition.thetas);
    s.read("tol", c.partition.tol);
    s.read("quadrature_tol", c.partition.quadrature_tol);
    s.read("quadrature_n", c.partition.quadrature_n);
    s.finish();
  }
  if (root.has("regularization")) {
    auto s = root.sub("regularization");
    s.read("t_lo", c.regularization.t_lo);
    s.read("t_hi", c.regularization.t_hi);
    s.read("t_count", c.regularization.t_count);
    s.read("N", c.regularization.n_points);
    s.read("slope_N", c.regularization.slope_points);
    s.read("gamma_ratio", c.regularization.gamma_ratio);
    s.read("gamma_slope", c.regularization.gamma_slope);
    s.read("phi_amplitude", c.regularization.phi_amplitude);
    s.read("ratio_tol", c.regularization.ratio_tol);
    s.read("slope_tol", c.regularization.slope_tol);
    s.finish();
  }
  if (root.has("construction")) {
    auto s = root.sub("construction");
    s.read("N", c.construction.n_points);
    s.read("seeds", c.construction.seeds);
    s.read("p", c.construction.p);
    s.read("a", c.construction.a);
    s.read("alpha", c.construction.alpha);
    s.read("v_amplitude", c.construction.v_amplitude);
    s.read("phi_amplitude", c.construction.phi_amplitude);
    s.read("c_tol", c.construction.c_tol);
    s.finish();
  }
  root.finish();

  require(c.dim >= 1 && c.dim <= 3, "'grid.d' must be 1, 2 or 3");
  require(c.side > 0.0, "'grid.T' must be positive");
  require(c.n >= 4 && (c.n & (c.n - 1)) == 0, "'grid.n' must be a power of two >= 4");
  require(c.n_points >= 1, "'gibbs.N' must be >= 1");
  require(c.sampling.chains >= 1, "'sampling.chains' must be >= 1");
  require(c.sampling.thin >= 1, "'sampling.thin' must be >= 1");
  require(c.sampling.proposal_scale > 0.0, "'sampling.proposal_scale' must be positive");
  require(c.sampling.recompute_every >= 1, "'sampling.recompute_every' must be >= 1");

  // Sub-audits that share the top-level model.
  c.thermal.kernel = c.partition.kernel = c.kernel;
  c.thermal.potential = c.partition.potential = c.potential;
  c.thermal.dim = c.partition.dim = c.dim;
  c.thermal.side = c.partition.side = c.side;
  c.thermal.n = c.partition.n = c.n;
  c.spectral.seed = c.seed;
  c.splitting.seed = c.seed + 1;
  c.thermal.seed = c.seed + 2;
  c.construction.seed = c.seed + 5;
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["grid"] = {{"d", c.dim}, {"T", c.side}, {"n", c.n}};
  j["kernel"] = {{"name", c.kernel.name},
                 {"gamma", c.kernel.gamma},
                 {"zero_mode", c.kernel.zero_mode},
                 {"table", c.kernel.table_path}};
  j["potential"] = {{"preset", c.potential.preset},
                    {"amplitude", c.potential.amplitude},
                    {"mode", c.potential.mode},
                    {"sigma", c.potential.sigma},
                    {"path", c.potential.path}};
  // β is written resolved so the echo does not depend on the 1/√N default.
  j["gibbs"] = {{"N", c.n_points}, {"beta", c.resolved_beta()}};
  j["solver"] = {{"tol", c.solver_tol},
                 {"max_iter", c.solver_max_iter},
                 {"theta_ladder", c.theta_ladder},
                 {"support_threshold", c.support_threshold}};
  j["sampling"] = {{"samples", c.sampling.samples},       {"chains", c.sampling.chains},
                   {"thin", c.sampling.thin},             {"burn_in", c.sampling.burn_in},
                   {"proposal_scale", c.sampling.proposal_scale}, {"recompute_every", c.sampling.recompute_every}};
  j["bounds"] = {{"test_mode", c.test_mode},
                 {"concentration_r", c.conc_r},
                 {"laplace_r", c.laplace_r},
                 {"laplace_alpha", c.laplace_alpha}};
  j["admissibility"] = {{"s_sweep", c.s_sweep},
                        {"n_1d", c.admissibility.n_1d},
                        {"n_2d", c.admissibility.n_2d},
                        {"riesz_gammas", c.admissibility.riesz_gammas},
                        {"s_count", c.admissibility.s_count}};
  j["spectral"] = {{"fields", c.spectral.fields},
                   {"n_1d", c.spectral.n_1d},
                   {"n_2d", c.spectral.n_2d},
                   {"tol", c.spectral.tol}};
  j["splitting"] = {{"N", c.splitting.n_points},
                    {"configs", c.splitting.configs},
                    {"theta", c.splitting.theta},
                    {"cos_amplitude", c.splitting.cos_amplitude},
                    {"tol", c.splitting.tol}};
  j["thermal"] = {{"thetas", c.thermal.thetas},
                  {"perturbations", c.thermal.perturbations},
                  {"residual_tol", c.thermal.residual_tol}};
  j["partition"] = {{"N", c.partition.n_points},
                    {"thetas", c.partition.thetas},
                    {"tol", c.partition.tol},
                    {"quadrature_tol", c.partition.quadrature_tol},
                    {"quadrature_n", c.partition.quadrature_n}};
  const auto& r = c.regularization;
  j["regularization"] = {{"t_lo", r.t_lo},
                         {"t_hi", r.t_hi},
                         {"t_count", r.t_count},
                         {"N", r.n_points},
                         {"slope_N", r.slope_points},
                         {"gamma_ratio", r.gamma_ratio},
                         {"gamma_slope", r.gamma_slope},
                         {"phi_amplitude", r.phi_amplitude},
                         {"ratio_tol", r.ratio_tol},
                         {"slope_tol", r.slope_tol}};
  const auto& k = c.construction;
  j["construction"] = {{"N", k.n_points},
                       {"seeds", k.seeds},
                       {"p", k.p},
                       {"a", k.a},
                       {"alpha", k.alpha},
                       {"v_amplitude", k.v_amplitude},
                       {"phi_amplitude", k.phi_amplitude},
                       {"c_tol", k.c_tol}};
  return j;
}

}  // namespace torusgas::cli
