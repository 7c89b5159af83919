#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bco/bco.hpp"

namespace fs = std::filesystem;

namespace {

std::string out_path(const std::string& out_dir, const std::string& name) {
  return (fs::path(out_dir) / name).string();
}

void ensure_out_dir(const std::string& out_dir) {
  if (out_dir.empty()) return;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw bco::InputError("cannot create output directory: " + out_dir);
}

void write_iteration_log(const std::string& path, const bco::BcoRunRecord& rec) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << "iteration,collected_steps,post_interactions_cum,model_val_loss,"
         "policy_val_loss,probe_mean,probe_stderr,probe_scaled\n";
  for (const auto& it : rec.iterations) {
    out << it.iteration << ',' << it.collected_steps << ',' << it.post_interactions_cum
        << ',' << bco::format_double(it.model_val_loss) << ','
        << bco::format_double(it.policy_val_loss) << ','
        << bco::format_double(it.probe_mean) << ',' << bco::format_double(it.probe_stderr)
        << ',' << bco::format_double(it.probe_scaled) << '\n';
  }
}

int cmd_run(const std::string& config_path, std::int64_t seed_override,
            const std::string& out_dir) {
  bco::json j = bco::parse_json(bco::read_text_file(config_path), "run config");
  bco::RunSpec spec = bco::parse_run_spec(j);
  if (seed_override >= 0) spec.seed = static_cast<std::uint64_t>(seed_override);
  ensure_out_dir(out_dir);

  std::unique_ptr<bco::ResultWriter> writer;
  if (!out_dir.empty())
    writer = std::make_unique<bco::ResultWriter>(out_path(out_dir, "results.csv"));
  const bco::RunOutcome out = bco::run_single(spec, writer.get());
  if (out.failed) {
    std::cerr << "run failed: " << out.error << "\n";
    return 1;
  }

  if (!out_dir.empty()) {
    bco::save_checkpoint(out_path(out_dir, "policy.json"),
                         {"policy", spec.env_name, out.record.policy.model});
    bco::save_checkpoint(out_path(out_dir, "inverse_model.json"),
                         {"inverse_model", spec.env_name, out.record.inverse_model.model});
    write_iteration_log(out_path(out_dir, "iterations.csv"), out.record);
    bco::write_text_file(out_path(out_dir, "run_record.json"),
                         bco::record_to_json(out.record).dump(2) + "\n");
  }

  std::cout << "env=" << spec.env_name << " alpha=" << spec.alpha << " seed=" << spec.seed
            << "\n"
            << "pre_interactions=" << out.record.pre_interactions
            << " post_interactions_cum=" << out.record.post_interactions_cum
            << " rounds=" << out.record.iterations.size()
            << " best_round=" << out.record.best_iteration << "\n"
            << "mean_return=" << out.row.raw_return << " scaled=" << out.row.scaled_return
            << " stderr=" << out.row.stderr_return << "\n";
  return 0;
}

int cmd_grid(const std::string& config_path, const std::string& out_dir) {
  bco::json j = bco::parse_json(bco::read_text_file(config_path), "grid config");
  const bco::GridSpec grid = bco::parse_grid_spec(j);
  ensure_out_dir(out_dir);

  std::unique_ptr<bco::ResultWriter> writer;
  if (!out_dir.empty())
    writer = std::make_unique<bco::ResultWriter>(out_path(out_dir, "results.csv"));
  const bco::GridOutcome out = bco::run_grid(grid, writer.get());

  int failures = 0;
  for (const auto& run : out.runs)
    if (run.failed) {
      ++failures;
      std::cerr << "run failed (alpha=" << run.row.alpha << " seed=" << run.row.seed
                << "): " << run.error << "\n";
    }
  for (std::size_t i = 0; i < out.baselines.size(); ++i)
    std::cout << "baselines[" << grid.env_names[i]
              << "]: random=" << out.baselines[i].random_return
              << " expert=" << out.baselines[i].expert_return << "\n";
  for (const auto& agg : out.aggregate_rows)
    std::cout << "alpha=" << agg.alpha << " demos=" << agg.demos
              << " mean_return=" << agg.raw_return << " scaled=" << agg.scaled_return
              << " stderr=" << agg.stderr_return << "\n";
  return failures == 0 ? 0 : 1;
}

int cmd_demos(const std::string& env_name, int n, int cap, std::int64_t seed,
              const std::string& out_file, bool with_actions) {
  const auto env = bco::make_env(env_name);
  const int effective_cap =
      cap >= 0 ? cap : bco::domain_defaults(env_name).demo_transition_cap;
  bco::Rng rng(static_cast<std::uint64_t>(seed));
  const auto expert = bco::scripted_expert(env_name);
  const bco::ActionfulDemoSet demos =
      bco::record_actionful_demos(*env, expert, n, effective_cap, rng);
  if (with_actions)
    bco::save_actionful_demos(out_file, demos);
  else
    bco::save_demos(out_file, demos.strip());
  std::cout << "wrote " << demos.trajectories.size() << " trajectories ("
            << demos.strip().transition_count() << " transitions) to " << out_file << "\n";
  return 0;
}

int cmd_eval(const std::string& policy_path, const std::string& env_name, int episodes,
             std::int64_t seed) {
  const bco::Checkpoint ckpt = bco::load_checkpoint(policy_path);
  if (ckpt.kind != "policy")
    throw bco::InputError("eval: checkpoint is a " + ckpt.kind + ", not a policy");
  const auto env = bco::make_env(env_name);
  if (ckpt.env_name != env->name())
    throw bco::InputError("eval: policy was trained on '" + ckpt.env_name + "'");
  const bco::Policy policy{ckpt.model};
  bco::Rng rng(static_cast<std::uint64_t>(seed));
  const bco::EvalResult res = bco::evaluate_policy(*env, policy, episodes, rng);
  std::cout << "episodes=" << episodes << " mean_return=" << res.mean_return
            << " stderr=" << res.stderr_return << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"imitation from observation under an interaction budget"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::int64_t seed = -1;

  auto* run = app.add_subcommand("run", "run one configuration");
  run->add_option("--config", config_path, "JSON run configuration")->required();
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--out-dir", out_dir, "directory for results and checkpoints");

  auto* grid = app.add_subcommand("grid", "sweep alphas, demo counts, and seeds");
  grid->add_option("--config", config_path, "JSON grid configuration")->required();
  grid->add_option("--out-dir", out_dir, "directory for results");

  std::string env_name, out_file, policy_path;
  int n_demos = 10, episodes = 500, cap = -1;
  std::int64_t demo_seed = 0, eval_seed = 0;

  auto* demos = app.add_subcommand("demos", "record scripted demonstrations");
  demos->add_option("--env", env_name, "environment name")->required();
  demos->add_option("--n", n_demos, "number of trajectories")->required();
  demos->add_option("--cap", cap, "max transitions kept per trajectory");
  demos->add_option("--seed", demo_seed, "recording seed");
  demos->add_option("--out", out_file, "output JSON file")->required();
  bool with_actions = false;
  demos->add_flag("--with-actions", with_actions, "include ground-truth actions");

  auto* eval = app.add_subcommand("eval", "evaluate a saved policy");
  eval->add_option("--policy", policy_path, "policy checkpoint JSON")->required();
  eval->add_option("--env", env_name, "environment name")->required();
  eval->add_option("--episodes", episodes, "evaluation episodes");
  eval->add_option("--seed", eval_seed, "evaluation seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, seed, out_dir);
    if (grid->parsed()) return cmd_grid(config_path, out_dir);
    if (demos->parsed())
      return cmd_demos(env_name, n_demos, cap, demo_seed, out_file, with_actions);
    if (eval->parsed()) return cmd_eval(policy_path, env_name, episodes, eval_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
