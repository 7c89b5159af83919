#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "bco/bc.hpp"
#include "bco/config.hpp"
#include "bco/csv.hpp"
#include "bco/driver.hpp"

namespace bco {

// Reference returns that anchor the reporting scale: random play maps to 0,
// the demonstrator to 1.
struct Baselines {
  double random_return = std::numeric_limits<double>::quiet_NaN();
  double expert_return = std::numeric_limits<double>::quiet_NaN();
};

// A raw mean return placed on the normalized scale.
struct ScaledScore {
  double raw_mean = 0.0;
  double random_baseline = 0.0;
  double expert_baseline = 0.0;
  double scaled = 0.0;

  static ScaledScore make(double raw_mean, double random_baseline, double expert_baseline) {
    if (!(expert_baseline > random_baseline))
      throw ConfigError("ScaledScore: expert baseline must exceed random baseline");
    return ScaledScore{raw_mean, random_baseline, expert_baseline,
                       (raw_mean - random_baseline) / (expert_baseline - random_baseline)};
  }
};

inline double mean_actor_return(const Env& env, const Actor& actor, int episodes, Rng& rng) {
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    State s = env.reset(rng);
    for (int t = 0; t < env.descriptor().max_episode_steps; ++t) {
      StepResult r = env.step(s, actor(s, rng));
      total += r.reward;
      if (r.done) break;
      s = std::move(r.next_state);
    }
  }
  return total / episodes;
}

inline Baselines compute_baselines(const Env& env, int episodes, std::uint64_t seed) {
  if (episodes <= 0) throw InputError("compute_baselines: need episodes > 0");
  Baselines b;
  Rng rng_random(derive_seed(seed, 901));
  b.random_return = mean_actor_return(
      env, uniform_random_actor(env.descriptor().action_space), episodes, rng_random);
  Rng rng_expert(derive_seed(seed, 902));
  const ExpertFn expert = scripted_expert(env.name());
  b.expert_return = mean_actor_return(
      env, [&expert](const State& s, Rng&) { return expert(s); }, episodes, rng_expert);
  return b;
}

// Demonstrations for one run: either the configured file or fresh scripted
// recordings. Recorded demos vary with the run seed so repeated seeds
// measure demo variance too.
inline DemoSet demos_for_run(const Env& env, const RunSpec& spec, std::uint64_t seed) {
  if (!spec.demo_file.empty()) {
    DemoSet d = load_demos(spec.demo_file);
    if (d.env_name != env.name())
      throw InputError("demo file was recorded on '" + d.env_name + "'");
    return d;
  }
  Rng rng(derive_seed(seed, 7));
  return record_demos(env, scripted_expert(env.name()), spec.demo_count,
                      spec.demo_transition_cap, rng);
}

struct RunOutcome {
  ResultRow row;
  bool failed = false;
  std::string error;
  BcoRunRecord record;
  EvalResult final_eval;
};

// One observation-only imitation run followed by a fresh evaluation of the
// best policy. The evaluation environment is separate from the run's audited
// collection budget.
inline RunOutcome execute_run(const Env& env, const RunSpec& spec, const Baselines& baselines,
                              std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  RunOutcome out;
  out.row.env = spec.env_name;
  out.row.alpha = spec.alpha;
  out.row.demos = spec.demo_count;
  out.row.seed = static_cast<std::int64_t>(seed);
  out.row.raw_return = std::numeric_limits<double>::quiet_NaN();
  out.row.scaled_return = std::numeric_limits<double>::quiet_NaN();
  out.row.stderr_return = std::numeric_limits<double>::quiet_NaN();
  try {
    const DemoSet demos = demos_for_run(env, spec, seed);
    out.row.demos = static_cast<int>(demos.trajectories.size());

    BcoConfig cfg = spec.to_bco_config();
    cfg.seed = seed;
    cfg.random_return = baselines.random_return;
    cfg.expert_return = baselines.expert_return;
    out.record = run_bco(env, demos, cfg);

    Rng rng_eval(derive_seed(seed, 5));
    out.final_eval = evaluate_policy(env, out.record.policy, spec.eval_episodes, rng_eval);

    out.row.iteration = out.record.best_iteration;
    out.row.pre_interactions = out.record.pre_interactions;
    out.row.post_interactions_cum = out.record.post_interactions_cum;
    const ScaledScore score = ScaledScore::make(
        out.final_eval.mean_return, baselines.random_return, baselines.expert_return);
    out.row.raw_return = score.raw_mean;
    out.row.scaled_return = score.scaled;
    out.row.stderr_return = out.final_eval.stderr_return;
  } catch (const std::exception& e) {
    out.failed = true;
    out.error = e.what();
    out.row.iteration = -1;
  }
  const auto t1 = std::chrono::steady_clock::now();
  out.row.wall_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  return out;
}

// Metrics-and-config view of a finished run; checkpoints are saved
// separately. Carries no timing, so equal runs serialize equally.
inline json record_to_json(const BcoRunRecord& rec) {
  const BcoConfig& c = rec.config;
  json iters = json::array();
  for (const auto& it : rec.iterations)
    iters.push_back(json{{"iteration", it.iteration},
                         {"collected_steps", it.collected_steps},
                         {"post_interactions_cum", it.post_interactions_cum},
                         {"model_val_loss", it.model_val_loss},
                         {"policy_val_loss", it.policy_val_loss},
                         {"probe_mean", it.probe_mean},
                         {"probe_stderr", it.probe_stderr},
                         {"probe_scaled", it.probe_scaled}});
  json hidden_m = json::array(), hidden_p = json::array();
  for (int w : c.model_hidden) hidden_m.push_back(w);
  for (int w : c.policy_hidden) hidden_p.push_back(w);
  return json{{"config",
               json{{"env", c.env_name},
                    {"alpha", c.alpha},
                    {"pre_interactions", c.pre_interactions},
                    {"max_iterations", c.max_iterations},
                    {"improvement_tolerance", c.improvement_tolerance},
                    {"improvement_patience", c.improvement_patience},
                    {"probe_episodes", c.probe_episodes},
                    {"sample_during_collection", c.sample_during_collection},
                    {"model_hidden", hidden_m},
                    {"policy_hidden", hidden_p},
                    {"seed", c.seed},
                    {"random_return", c.random_return},
                    {"expert_return", c.expert_return}}},
              {"iterations", iters},
              {"best_iteration", rec.best_iteration},
              {"pre_interactions", rec.pre_interactions},
              {"post_interactions_cum", rec.post_interactions_cum},
              {"counted_env_steps", rec.counted_env_steps}};
}

inline RunOutcome run_single(const RunSpec& spec, ResultWriter* writer) {
  const auto env = make_env(spec.env_name);
  const Baselines baselines =
      compute_baselines(*env, spec.baseline_episodes, derive_seed(spec.seed, 9));
  RunOutcome out = execute_run(*env, spec, baselines, spec.seed);
  if (writer) writer->append(out.row);
  return out;
}

struct GridOutcome {
  std::vector<RunOutcome> runs;
  std::vector<ResultRow> aggregate_rows;
  std::vector<Baselines> baselines;  // one per environment, in grid order
};

// Sequential sweep over (env, demo_count, alpha, seed). Each run appends one
// row; each (env, demo_count, alpha) cell then appends an aggregate row with
// seed -1 and iteration -1 whose mean and stderr are taken across the
// per-seed returns. Failed runs keep their row (NaN returns) and are left
// out of the aggregates. Baselines are computed once per environment and
// shared by its runs.
inline GridOutcome run_grid(const GridSpec& grid, ResultWriter* writer) {
  GridOutcome out;
  for (const std::string& env_name : grid.env_names) {
    const auto env = make_env(env_name);
    const RunSpec base = grid.spec_for(env_name);
    const Baselines baselines =
        compute_baselines(*env, base.baseline_episodes, derive_seed(base.seed, 9));
    out.baselines.push_back(baselines);
    for (int demo_count : grid.demo_counts) {
      for (double alpha : grid.alphas) {
        RunSpec spec = base;
        spec.demo_count = demo_count;
        spec.alpha = alpha;
        std::vector<double> raws, scaleds;
        std::int64_t pre = 0, post = 0;
        const auto t0 = std::chrono::steady_clock::now();
        for (std::uint64_t seed : grid.seeds) {
          RunOutcome run = execute_run(*env, spec, baselines, seed);
          if (writer) writer->append(run.row);
          if (!run.failed) {
            raws.push_back(run.row.raw_return);
            scaleds.push_back(run.row.scaled_return);
            pre = run.row.pre_interactions;
            post = std::max(post, run.row.post_interactions_cum);
          }
          out.runs.push_back(std::move(run));
        }
        const auto t1 = std::chrono::steady_clock::now();

        ResultRow agg;
        agg.env = spec.env_name;
        agg.alpha = alpha;
        agg.demos = demo_count;
        agg.seed = -1;
        agg.iteration = -1;
        agg.pre_interactions = pre;
        agg.post_interactions_cum = post;
        agg.wall_ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
        if (!raws.empty()) {
          double mr = 0.0, ms = 0.0;
          for (double r : raws) mr += r;
          for (double s : scaleds) ms += s;
          mr /= raws.size();
          ms /= scaleds.size();
          double ss = 0.0;
          for (double r : raws) ss += (r - mr) * (r - mr);
          agg.raw_return = mr;
          agg.scaled_return = ms;
          agg.stderr_return =
              raws.size() > 1
                  ? std::sqrt(ss / (raws.size() - 1)) / std::sqrt(double(raws.size()))
                  : 0.0;
        } else {
          agg.raw_return = std::numeric_limits<double>::quiet_NaN();
          agg.scaled_return = std::numeric_limits<double>::quiet_NaN();
          agg.stderr_return = std::numeric_limits<double>::quiet_NaN();
        }
        if (writer) writer->append(agg);
        out.aggregate_rows.push_back(std::move(agg));
      }
    }
  }
  return out;
}

}  // namespace bco
