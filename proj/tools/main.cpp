// torusgas command line driver. Each command writes <out>/<command>.json,
// <out>/<command>.csv and <out>/resolved_config.json.
//
// Exit status: 0 ok, 1 a hard check failed or a module error, 2 bad config.
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <thread>

#include "CLI11.hpp"
#include "config.hpp"
#include "torusgas/equilibrium.hpp"
#include "torusgas/errors.hpp"
#include "torusgas/sampling.hpp"
#include "torusgas/verification.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace torusgas;
using namespace torusgas::cli;

namespace {

struct RunContext {
  ExperimentConfig config;
  fs::path out;
  int threads = 1;
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << std::setw(2) << j << "\n";
}

void write_csv(const fs::path& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << std::setprecision(17);
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
}

// JSON has no NaN/inf; they become null.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json summary_json(const std::string& command, const CriterionResult& r) {
  json metrics = json::object();
  for (const auto& [k, v] : r.metrics) metrics[k] = number(v);
  return {{"schema_version", kSchemaVersion}, {"command", command}, {"criterion", r.id}, {"name", r.name},
          {"pass", r.pass}, {"summary", r.summary},   {"metrics", metrics}, {"notes", r.notes}};
}

int emit(const RunContext& ctx, const std::string& command, const CriterionResult& r) {
  write_json(ctx.out / (command + ".json"), summary_json(command, r));
  write_csv(ctx.out / (command + ".csv"), r.columns, r.rows);
  std::cout << command << ": " << (r.pass ? "PASS" : "FAIL") << "  " << r.summary << "\n";
  spdlog::info("{} took {:.2f}s", command, r.seconds);
  return r.pass ? 0 : 1;
}

int cmd_check_kernel(const RunContext& ctx) {
  const auto& c = ctx.config;
  const TorusGrid grid(c.dim, c.n, c.side);
  const auto kernel = c.kernel.build(grid);
  const auto rep = check_admissibility(kernel, grid, c.s_sweep);
  json j = {{"schema_version", kSchemaVersion},
            {"command", "check-kernel"},
            {"kernel", kernel.name()},
            {"gamma_fit", number(rep.gamma_fit)},
            {"gamma_residual", number(rep.gamma_residual)},
            {"lambda_fit", number(rep.lambda_fit)},
            {"lambda_residual", number(rep.lambda_residual)},
            {"upper_constant", number(rep.upper_constant)},
            {"lower_constant", number(rep.lower_constant)},
            {"singularity", describe(kernel.singularity())},
            {"min_p", number(rep.min_p)},
            {"argmin_s", number(rep.argmin_s)},
            {"admissibility_C", number(rep.admissibility_C)}};
  const bool pass = std::isfinite(rep.admissibility_C) && std::isfinite(rep.gamma_fit);
  j["pass"] = pass;
  write_json(ctx.out / "check-kernel.json", j);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < c.s_sweep.size(); ++i)
    rows.push_back({c.s_sweep[i], double(rep.resolution_per_s[i]), rep.min_p_per_s[i]});
  write_csv(ctx.out / "check-kernel.csv", {"s", "resolution", "min_p"}, rows);
  std::cout << "check-kernel: " << kernel.name() << " gamma_fit=" << rep.gamma_fit << " lambda_fit=" << rep.lambda_fit
            << " min_p=" << rep.min_p << " C=" << rep.admissibility_C << "\n";
  return pass ? 0 : 1;
}

int cmd_equilibrium(const RunContext& ctx) {
  const auto& c = ctx.config;
  const TorusGrid grid(c.dim, c.n, c.side);
  const auto kernel = c.kernel.build(grid);
  const auto V = c.potential.build(grid);
  const auto opts = c.equilibrium_options();
  const auto eq = solve_equilibrium(kernel, V, opts);
  const double theta = c.resolved_beta() * c.n_points;
  const auto th = solve_thermal(kernel, V, theta, opts.thermal);
  const double residual_tol = std::max(1e-8, 100.0 * c.solver_tol);
  const bool pass = th.residual < residual_tol;
  json j = {{"schema_version", kSchemaVersion},
            {"command", "equilibrium"},
            {"pass", pass},
            {"c_inf", eq.c_inf},
            {"sigma_measure", eq.sigma_measure},
            {"zeta_min", eq.zeta_min()},
            {"zeta_max_on_support", eq.zeta_max_on_support()},
            {"theta_ladder", eq.theta_ladder},
            {"rung_residuals", eq.rung_residuals},
            {"energy_inf", energy_mean_field(kernel, V, eq.mu)},
            {"theta", theta},
            {"c_theta", th.c_theta},
            {"thermal_residual", th.residual},
            {"thermal_iterations", th.iterations},
            {"energy_theta", energy_thermal(kernel, V, theta, th.mu)}};
  write_json(ctx.out / "equilibrium.json", j);
  std::vector<std::string> cols;
  for (int k = 0; k < c.dim; ++k) cols.push_back("x" + std::to_string(k));
  for (const char* s : {"V", "mu_inf", "mu_theta", "zeta_inf", "sigma_mask"}) cols.push_back(s);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto x = grid.node(i);
    std::vector<double> row(x.begin(), x.begin() + c.dim);
    for (double v : {V.field()[i], eq.mu[i], th.mu[i], eq.zeta[i], eq.sigma_mask[i]}) row.push_back(v);
    rows.push_back(std::move(row));
  }
  write_csv(ctx.out / "equilibrium.csv", cols, rows);
  std::cout << "equilibrium: " << (pass ? "PASS" : "FAIL") << "  |Sigma|=" << eq.sigma_measure
            << " thermal residual=" << th.residual << " at theta=" << theta << "\n";
  return pass ? 0 : 1;
}

int cmd_sample(const RunContext& ctx) {
  const auto& c = ctx.config;
  const TorusGrid grid(c.dim, c.n, c.side);
  const auto kernel = c.kernel.build(grid);
  const auto V = c.potential.build(grid);
  const double beta = c.resolved_beta();
  const GibbsModel model(kernel, V, {c.n_points, beta});
  ChainOptions o;
  o.burn_in = c.sampling.burn_in;
  o.thin = c.sampling.thin;
  o.proposal_scale = c.sampling.proposal_scale;
  o.recompute_every = c.sampling.recompute_every;
  const std::size_t per_chain = (c.sampling.samples + c.sampling.chains - 1) / c.sampling.chains;
  o.sweeps = per_chain * c.sampling.thin;
  std::vector<std::uint64_t> seeds;
  for (int k = 0; k < c.sampling.chains; ++k) seeds.push_back(c.seed + k);
  const auto chains = run_chains(model, o, seeds, ctx.threads);

  const auto eq = solve_equilibrium(kernel, V, c.equilibrium_options());
  const auto th = solve_thermal(kernel, V, beta * c.n_points);
  const GridField f = GridField::from_function(
      grid, [&](auto x) { return std::cos(2.0 * 3.14159265358979323846 * c.test_mode * x[0] / c.side); });
  const FluctuationObservable fl_inf(f, eq.mu), fl_theta(f, th.mu);

  bool pass = true;
  json per = json::array();
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < chains.size(); ++k) {
    const auto& ch = chains[k];
    pass = pass && ch.max_drift < 1e-6 && ch.acceptance_rate > 0.0 && ch.acceptance_rate < 1.0;
    per.push_back({{"seed", ch.seed},
                   {"acceptance_rate", ch.acceptance_rate},
                   {"proposal_scale", ch.proposal_scale},
                   {"tau_energy", ch.tau_energy},
                   {"max_drift", ch.max_drift},
                   {"proposals", ch.proposals},
                   {"rejected_coincident", ch.rejected_coincident},
                   {"samples", ch.samples.size()}});
    for (std::size_t i = 0; i < ch.samples.size(); ++i)
      rows.push_back({double(ch.seed), double(i), ch.energies[i], fl_inf(ch.samples[i]), fl_theta(ch.samples[i])});
    // Checkpoint: last state plus the metadata needed to continue it.
    const auto stem = ctx.out / ("chain_" + std::to_string(ch.seed));
    if (!ch.samples.empty()) write_configuration_csv(ch.samples.back(), stem.string() + ".csv");
    write_json(stem.string() + ".json", {{"seed", ch.seed},
                                         {"step", (o.burn_in + o.sweeps) * c.n_points},
                                         {"acceptance_rate", ch.acceptance_rate},
                                         {"proposal_scale", ch.proposal_scale}});
  }
  write_json(ctx.out / "sample.json", {{"schema_version", kSchemaVersion},
                                       {"command", "sample"},
                                       {"pass", pass},
                                       {"beta", beta},
                                       {"theta", beta * c.n_points},
                                       {"chains", per}});
  write_csv(ctx.out / "sample.csv", {"seed", "index", "energy", "fluct_inf", "fluct_theta"}, rows);
  std::cout << "sample: " << (pass ? "PASS" : "FAIL") << "  " << chains.size() << " chains, " << rows.size()
            << " samples\n";
  return pass ? 0 : 1;
}

int cmd_construct(const RunContext& ctx) {
  const auto& c = ctx.config;
  const int rc = emit(ctx, "construct", audit_construction(c.construction));
  const auto example = construction_sample(c.construction, c.n_points, c.construction.seed);
  write_configuration_csv(example, (ctx.out / "construct_points.csv").string());
  return rc;
}

int cmd_all(const RunContext& ctx) {
  const auto& c = ctx.config;
  std::vector<std::function<CriterionResult()>> runs = {
      [&] { return audit_spectral(c.spectral); },
      [&] { return audit_splitting(c.splitting); },
      [&] { return audit_thermal(c.thermal); },
      [&] { return audit_partition(c.partition); },
      [&] { return audit_regularization(c.regularization); },
      [&] { return audit_construction(c.construction); },
      [&] { return audit_concentration(c.gibbs_audit(ctx.threads)); },
      [&] { return audit_laplace(c.gibbs_audit(ctx.threads)); },
      [&] { return audit_admissibility(c.admissibility); },
  };
  json list = json::array();
  bool pass = true;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    CriterionResult r;
    try {
      r = runs[k]();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      r.id = static_cast<int>(k + 1);
      r.name = "criterion " + std::to_string(k + 1);
      r.summary = std::string("error: ") + e.what();
    }
    pass = pass && r.pass;
    list.push_back(summary_json("all", r));
    write_csv(ctx.out / ("criterion_" + std::to_string(k + 1) + ".csv"), r.columns, r.rows);
    std::cout << "criterion " << k + 1 << " " << (r.pass ? "PASS" : "FAIL") << "  " << r.name << ": " << r.summary
              << "\n";
  }
  write_json(ctx.out / "all.json",
             {{"schema_version", kSchemaVersion}, {"command", "all"}, {"pass", pass}, {"criteria", list}});
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"torusgas: interacting particle gases on the torus"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  bool verbose = false;
  app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (default: config output_dir)");
  auto* seed_opt = app.add_option("--seed", seed, "base seed (overrides config)");
  app.add_option("--threads", threads, "worker threads for chains (default: hardware)")->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", verbose, "log progress to stderr");

  std::map<std::string, std::function<int(const RunContext&)>> commands = {
      {"check-kernel", cmd_check_kernel},
      {"equilibrium", cmd_equilibrium},
      {"verify-splitting", [](const RunContext& c) { return emit(c, "verify-splitting", audit_splitting(c.config.splitting)); }},
      {"verify-regularization",
       [](const RunContext& c) { return emit(c, "verify-regularization", audit_regularization(c.config.regularization)); }},
      {"construct", cmd_construct},
      {"sample", cmd_sample},
      {"concentration",
       [](const RunContext& c) { return emit(c, "concentration", audit_concentration(c.config.gibbs_audit(c.threads))); }},
      {"laplace", [](const RunContext& c) { return emit(c, "laplace", audit_laplace(c.config.gibbs_audit(c.threads))); }},
      {"partition", [](const RunContext& c) { return emit(c, "partition", audit_partition(c.config.partition)); }},
      {"all", cmd_all},
  };
  const std::map<std::string, std::string> help = {
      {"check-kernel", "admissibility report for the configured kernel"},
      {"equilibrium", "solve for the equilibrium and thermal equilibrium measures"},
      {"verify-splitting", "splitting identity on random configurations"},
      {"verify-regularization", "energy gap and test error sweeps"},
      {"construct", "cube construction ladder and one example configuration"},
      {"sample", "Metropolis chains with diagnostics and checkpoints"},
      {"concentration", "one-sided concentration check"},
      {"laplace", "log-Laplace transform against its predictions"},
      {"partition", "tiny-N partition function and lower bounds"},
      {"all", "acceptance criteria 1-9"},
  };
  for (const auto& [name, fn] : commands) app.add_subcommand(name, help.at(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  spdlog::set_default_logger(spdlog::stderr_color_mt("torusgas"));
  spdlog::set_level(verbose ? spdlog::level::info : spdlog::level::warn);

  const std::string command = app.get_subcommands().front()->get_name();
  RunContext ctx;
  try {
    ctx.config = config_path.empty() ? parse_config(json::object()) : load_config(config_path);
    if (*seed_opt) {
      ctx.config.seed = seed;
      ctx.config = parse_config(to_json(ctx.config));  // re-derive per-audit seeds
    }
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  if (const char* env = std::getenv("TORUSGAS_OUTPUT_DIR"); env && *env) ctx.config.output_dir = env;
  if (!out_dir.empty()) ctx.config.output_dir = out_dir;
  ctx.out = ctx.config.output_dir;
  ctx.threads = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  try {
    fs::create_directories(ctx.out);
    write_json(ctx.out / "resolved_config.json", to_json(ctx.config));
    return commands.at(command)(ctx);
  } catch (const ConfigError& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return 1;
  }
}
