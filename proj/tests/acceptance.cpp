#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bco/bco.hpp"
#include "support/oracles.hpp"

using namespace bco;

namespace {

void report(int number, const std::string& what, bool pass) {
  std::cout << "[" << number << "] " << what << ": " << (pass ? "PASS" : "FAIL") << "\n";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct ScratchFile {
  std::string path;
  explicit ScratchFile(const std::string& tag) {
    path = (std::filesystem::temp_directory_path() / ("bco_acceptance_" + tag + ".csv")).string();
    std::filesystem::remove(path);
  }
  ~ScratchFile() { std::filesystem::remove(path); }
};

double mean_of(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m += x;
  return m / static_cast<double>(xs.size());
}

double stderr_of(const std::vector<double>& xs) {
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1)) /
         std::sqrt(static_cast<double>(xs.size()));
}

}  // namespace

TEST_CASE("cartpole imitation without action labels matches the expert", "[c1]") {
  const auto t0 = std::chrono::steady_clock::now();
  const GridSpec grid = parse_grid_spec(json::parse(R"({
    "env": "cartpole", "alphas": [0.0],
    "learning_rate": 0.2, "batch_size": 64, "max_epochs": 3000, "patience": 3000
  })"));
  const GridOutcome outcome = run_grid(grid, nullptr);
  const double secs = seconds_since(t0);

  bool all_succeeded = outcome.runs.size() == 20;
  for (const auto& run : outcome.runs) all_succeeded = all_succeeded && !run.failed;
  const double mean_scaled = outcome.aggregate_rows.at(0).scaled_return;

  const bool pass = all_succeeded && mean_scaled >= 0.95 && secs < 120.0;
  report(1, "cartpole BCO(0) mean scaled return over 20 seeds >= 0.95 in under 2 minutes",
         pass);
  std::cout << "    mean scaled return " << mean_scaled << ", " << secs << "s\n";
  REQUIRE(all_succeeded);
  REQUIRE(mean_scaled >= 0.95);
  REQUIRE(secs < 120.0);
}

TEST_CASE("no environment steps happen once demonstrations are in hand", "[c2]") {
  CartPoleEnv base;

  // the whole post-demonstration pipeline, run against a counting wrapper
  StepCountingEnv counted(base);
  InteractionBuffer buffer;
  Rng collect_rng(derive_seed(21, 2));
  collect_interactions(counted, uniform_random_actor(base.descriptor().action_space), 1000,
                       buffer, collect_rng);
  REQUIRE(counted.steps() == 1000);

  Rng demo_rng(derive_seed(21, 7));
  const DemoSet demos = record_demos(base, scripted_expert("cartpole"), 10, 5, demo_rng);
  const std::int64_t at_demo_load = counted.steps();

  Rng init_rng(derive_seed(21, 1));
  InverseModel model = InverseModel::create(counted, {}, init_rng);
  Policy policy = Policy::create(counted, {}, init_rng);
  TrainProtocol protocol;
  Rng train_rng(derive_seed(21, 3));
  fit_inverse_model(model, buffer, protocol, train_rng);
  const auto labels = infer_actions(model, counted, demos);
  fit_policy(policy, demos.trajectories, labels, protocol, train_rng);
  const std::int64_t pipeline_extra = counted.steps() - at_demo_load;

  // full driver runs: audited collection total equals the pre budget, and an
  // external counter is fully explained by pre collection plus probe rollouts
  bool drivers_clean = true;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    StepCountingEnv outer(base);
    Rng drng(derive_seed(seed, 7));
    const DemoSet d = record_demos(base, scripted_expert("cartpole"), 10, 5, drng);

    BcoConfig cfg;
    cfg.env_name = "cartpole";
    cfg.alpha = 0.0;
    cfg.pre_interactions = 1000;
    cfg.seed = seed;
    const BcoRunRecord rec = run_bco(outer, d, cfg);

    StepCountingEnv probe_replay(base);
    Rng probe_rng(derive_seed(seed, 4));
    evaluate_policy(probe_replay, rec.policy, cfg.probe_episodes, probe_rng);

    drivers_clean = drivers_clean && rec.post_interactions_cum == 0 &&
                    rec.counted_env_steps == 1000 && rec.iterations.size() == 1 &&
                    outer.steps() == 1000 + probe_replay.steps();
  }

  const bool pass = pipeline_extra == 0 && drivers_clean;
  report(2, "step counter shows exactly 0 post-demonstration environment steps", pass);
  std::cout << "    pipeline steps after demos loaded: " << pipeline_extra << "\n";
  REQUIRE(pipeline_extra == 0);
  REQUIRE(drivers_clean);
}

TEST_CASE("cumulative post-demonstration steps equal rounds times the per-round budget",
          "[c3]") {
  ChainWorldEnv env;
  Rng demo_rng(derive_seed(33, 7));
  const DemoSet demos = record_demos(env, scripted_expert("chainworld"), 5, 4, demo_rng);

  bool pass = true;
  for (const double alpha : {0.0, 2e-3, 4e-3, 1e-2}) {
    BcoConfig cfg;
    cfg.env_name = "chainworld";
    cfg.alpha = alpha;
    cfg.pre_interactions = 2000;
    cfg.max_iterations = 3;
    cfg.improvement_tolerance = -1e9;  // keep improving so every budgeted round runs
    cfg.probe_episodes = 2;
    cfg.model_hidden = {32};
    cfg.policy_hidden = {32};
    cfg.protocol.adam.learning_rate = 0.02;
    cfg.protocol.max_epochs = 60;
    cfg.seed = 33;
    const BcoRunRecord rec = run_bco(env, demos, cfg);

    const std::int64_t per_round = std::llround(alpha * 2000.0);
    const std::int64_t rounds = static_cast<std::int64_t>(rec.iterations.size()) - 1;
    const std::int64_t expected_rounds = alpha == 0.0 ? 0 : 3;

    bool ok = rounds == expected_rounds;
    ok = ok && per_round == post_steps_per_iteration(alpha, 2000);
    ok = ok && rec.post_interactions_cum == rounds * per_round;
    ok = ok && rec.counted_env_steps == 2000 + rounds * per_round;
    for (std::size_t i = 0; i < rec.iterations.size(); ++i)
      ok = ok && rec.iterations[i].post_interactions_cum ==
                     static_cast<std::int64_t>(i) * per_round;
    std::cout << "    alpha " << alpha << ": " << rounds << " rounds x " << per_round
              << " steps = " << rec.post_interactions_cum << (ok ? "" : "  MISMATCH") << "\n";
    pass = pass && ok;
  }
  report(3, "post-interaction accounting exact at alpha in {0, 2e-3, 4e-3, 1e-2}", pass);
  REQUIRE(pass);
}

TEST_CASE("a small interaction budget beats none on mountaincar", "[c4]") {
  const auto t0 = std::chrono::steady_clock::now();
  const GridSpec grid = parse_grid_spec(json::parse(R"({
    "env": "mountaincar", "alphas": [0.0, 1e-2],
    "max_epochs": 100, "patience": 10
  })"));
  const GridOutcome outcome = run_grid(grid, nullptr);
  const double secs = seconds_since(t0);

  bool all_succeeded = outcome.runs.size() == 40;
  std::vector<double> scaled_none, scaled_budget;
  for (const auto& run : outcome.runs) {
    all_succeeded = all_succeeded && !run.failed;
    (run.row.alpha == 0.0 ? scaled_none : scaled_budget).push_back(run.row.scaled_return);
  }
  REQUIRE(scaled_none.size() == 20);
  REQUIRE(scaled_budget.size() == 20);

  const double mean_none = mean_of(scaled_none);
  const double mean_budget = mean_of(scaled_budget);
  const double pooled = std::sqrt(stderr_of(scaled_none) * stderr_of(scaled_none) +
                                  stderr_of(scaled_budget) * stderr_of(scaled_budget));
  const double margin = mean_budget - mean_none;

  const bool pass = all_succeeded && margin > pooled && secs < 1800.0;
  report(4, "mountaincar mean scaled return: alpha=1e-2 beats alpha=0 by over one pooled "
            "standard error", pass);
  std::cout << "    alpha=0 " << mean_none << ", alpha=1e-2 " << mean_budget << ", margin "
            << margin << " vs pooled stderr " << pooled << ", " << secs << "s\n";
  REQUIRE(all_succeeded);
  REQUIRE(margin > pooled);
  REQUIRE(secs < 1800.0);
}

TEST_CASE("the learned action distribution matches brute-force counts on chainworld",
          "[c5]") {
  ChainWorldEnv env;
  InteractionBuffer buffer;
  Rng collect_rng(derive_seed(55, 2));
  collect_interactions(env, uniform_random_actor(env.descriptor().action_space), 500, buffer,
                       collect_rng);

  Rng init_rng(derive_seed(55, 1));
  InverseModel model = InverseModel::create(env, {32}, init_rng);
  TrainProtocol protocol;
  protocol.adam.learning_rate = 0.05;
  protocol.max_epochs = 800;
  protocol.patience = 50;
  Rng train_rng(derive_seed(55, 3));
  fit_inverse_model(model, buffer, protocol, train_rng);

  const auto counted = oracles::count_conditionals(buffer, 2);
  double worst_tv = 0.0;
  for (const auto& [pair, empirical] : counted) {
    const std::vector<double> learned = model.model.action_probs(
        {static_cast<double>(pair.first), static_cast<double>(pair.second)});
    worst_tv = std::max(worst_tv, oracles::total_variation(learned, empirical));
  }

  Rng demo_rng(derive_seed(55, 7));
  const ActionfulDemoSet actionful =
      record_actionful_demos(env, scripted_expert("chainworld"), 10, 4, demo_rng);
  const auto inferred = infer_actions(model, env, actionful.strip());

  const bool pass =
      counted.size() >= 5 && worst_tv <= 0.02 && inferred == actionful.actions;
  report(5, "chainworld conditionals within TV 0.02 of counts and 100% label accuracy",
         pass);
  std::cout << "    worst total variation " << worst_tv << " over " << counted.size()
            << " observed pairs\n";
  REQUIRE(counted.size() >= 5);
  REQUIRE(worst_tv <= 0.02);
  REQUIRE(inferred == actionful.actions);
}

TEST_CASE("analytic gradients match finite differences on every configured shape", "[c6]") {
  struct ShapeCase {
    std::string env_name;
    bool inverse;  // paired-state input; otherwise a policy over observations
    std::vector<int> hidden;
  };
  const std::vector<ShapeCase> shapes = {
      {"cartpole", true, {}},        {"cartpole", false, {}},
      {"mountaincar", true, {8, 8}}, {"mountaincar", false, {8, 8}},
      {"reacher2d", true, {100, 100}}, {"reacher2d", false, {32, 32}},
      {"chainworld", true, {32}},    {"chainworld", false, {32}},
  };

  bool pass = true;
  Rng rng(derive_seed(66, 1));
  for (const auto& shape : shapes) {
    const auto env = make_env(shape.env_name);
    LikelihoodModel m = shape.inverse
                            ? InverseModel::create(*env, shape.hidden, rng).model
                            : Policy::create(*env, shape.hidden, rng).model;
    const Actor draw_action = uniform_random_actor(m.space);

    std::vector<double> theta = flatten_model(m);
    std::vector<std::size_t> coords;
    if (theta.size() <= 2000) {
      for (std::size_t i = 0; i < theta.size(); ++i) coords.push_back(i);
    } else {
      // spread a fixed subset across every layer; always include the spread
      // parameters at the tail
      const std::size_t stride = theta.size() / 380;
      for (std::size_t i = 0; i < theta.size(); i += stride) coords.push_back(i);
      coords.push_back(theta.size() - 2);
      coords.push_back(theta.size() - 1);
    }

    double worst = 0.0;
    for (int draw = 0; draw < 100; ++draw) {
      for (double& t : theta) t = rng.uniform(-0.6, 0.6);
      unflatten_model(theta, m);

      std::vector<double> x(static_cast<std::size_t>(m.spec.input_dim));
      for (int tries = 0;; ++tries) {
        for (double& v : x) v = rng.uniform(-1.5, 1.5);
        if (oracles::min_hidden_preactivation(m, x) >= 1e-3) break;
        REQUIRE(tries < 500);
      }
      const Action a = draw_action(x, rng);

      const ModelGrads grads = model_nll_grad(m, x, a);
      const std::vector<double> analytic = flatten_model_grads(m, grads);
      const auto loss = [&](const std::vector<double>& t) {
        LikelihoodModel q = m;
        unflatten_model(t, q);
        return model_nll(q, x, a);
      };
      const std::vector<double> numeric = oracles::fd_gradient_at(loss, theta, coords, 1e-5);
      for (std::size_t k = 0; k < coords.size(); ++k)
        worst = std::max(worst, oracles::relative_error(analytic[coords[k]], numeric[k]));
    }
    std::cout << "    " << shape.env_name << (shape.inverse ? " paired-state" : " policy")
              << " net, " << theta.size() << " params, " << coords.size()
              << " coords checked: worst relative error " << worst << "\n";
    pass = pass && worst <= 1e-4;
  }
  report(6, "loss gradients within 1e-4 of central differences, 100 draws per shape", pass);
  REQUIRE(pass);
}

TEST_CASE("a model fit on random mountaincar steps recovers actions on held-out data",
          "[c7]") {
  MountainCarEnv env;
  InteractionBuffer train_buffer;
  Rng collect_rng(derive_seed(77, 2));
  collect_interactions(env, uniform_random_actor(env.descriptor().action_space), 2000,
                       train_buffer, collect_rng);

  Rng init_rng(derive_seed(77, 1));
  InverseModel model = InverseModel::create(env, {8, 8}, init_rng);
  TrainProtocol protocol;
  protocol.adam.learning_rate = 0.02;
  protocol.max_epochs = 500;
  protocol.patience = 30;
  Rng train_rng(derive_seed(77, 3));
  fit_inverse_model(model, train_buffer, protocol, train_rng);

  InteractionBuffer heldout;
  Rng heldout_rng(derive_seed(77, 11));
  collect_interactions(env, uniform_random_actor(env.descriptor().action_space), 1000,
                       heldout, heldout_rng);

  int label_hits = 0, dynamics_hits = 0;
  bool oracle_sound = true;
  for (std::size_t i = 0; i < heldout.size(); ++i) {
    const auto& in = heldout.inputs[i];
    const State s{in[0], in[1]}, next{in[2], in[3]};
    const int truth = discrete(heldout.actions[i]);
    const int predicted = discrete(model.predict(env, s, next));
    const std::vector<int> consistent = oracles::consistent_actions(env, s, next);
    oracle_sound =
        oracle_sound && std::count(consistent.begin(), consistent.end(), truth) == 1;
    if (predicted == truth) ++label_hits;
    if (std::count(consistent.begin(), consistent.end(), predicted) == 1) ++dynamics_hits;
  }
  const double label_accuracy = label_hits / 1000.0;
  const double dynamics_accuracy = dynamics_hits / 1000.0;

  const bool pass = oracle_sound && label_accuracy >= 0.95 && dynamics_accuracy >= 0.95;
  report(7, "mountaincar inverse model >= 95% held-out accuracy, checked by enumeration",
         pass);
  std::cout << "    label accuracy " << label_accuracy << ", transition-consistent "
            << dynamics_accuracy << "\n";
  REQUIRE(oracle_sound);
  REQUIRE(label_accuracy >= 0.95);
  REQUIRE(dynamics_accuracy >= 0.95);
}

TEST_CASE("inferred labels and true labels clone the same chainworld behavior", "[c8]") {
  ChainWorldEnv env;
  Rng demo_rng(derive_seed(88, 7));
  const ActionfulDemoSet actionful =
      record_actionful_demos(env, scripted_expert("chainworld"), 10, 4, demo_rng);
  const DemoSet stripped = actionful.strip();

  BcoConfig cfg;
  cfg.env_name = "chainworld";
  cfg.alpha = 0.0;
  cfg.pre_interactions = 500;
  cfg.probe_episodes = 10;
  cfg.model_hidden = {32};
  cfg.policy_hidden = {32};
  cfg.protocol.adam.learning_rate = 0.02;
  cfg.protocol.max_epochs = 300;
  cfg.seed = 88;
  const BcoRunRecord rec = run_bco(env, stripped, cfg);
  const auto inferred = infer_actions(rec.inverse_model, env, stripped);

  BcConfig bc_cfg;
  bc_cfg.env_name = "chainworld";
  bc_cfg.policy_hidden = {32};
  bc_cfg.protocol = cfg.protocol;
  bc_cfg.seed = 88;
  const BcRunRecord bc = run_bc(env, actionful, bc_cfg);

  const bool labels_equal = inferred == actionful.actions;
  bool modes_agree = true;
  for (int s = 0; s <= 4; ++s) {
    const State state{static_cast<double>(s)};
    modes_agree = modes_agree && rec.policy.act(state) == bc.policy.act(state);
  }

  const bool pass = labels_equal && modes_agree;
  report(8, "BCO(0) labels equal BC labels and both policies pick the same actions", pass);
  REQUIRE(labels_equal);
  REQUIRE(modes_agree);
}

TEST_CASE("identical config and seed reproduce the results file", "[c9]") {
  const json grid_json = json::parse(R"({
    "env": "chainworld",
    "alphas": [0.0, 0.05],
    "seeds": [0, 1, 2],
    "pre_interactions": 200,
    "probe_episodes": 10,
    "eval_episodes": 20,
    "baseline_episodes": 40,
    "learning_rate": 0.02,
    "max_epochs": 120
  })");
  const GridSpec grid = parse_grid_spec(grid_json);

  ScratchFile first("repro_a"), second("repro_b");
  {
    ResultWriter writer(first.path);
    run_grid(grid, &writer);
  }
  {
    ResultWriter writer(second.path);
    run_grid(grid, &writer);
  }

  // compare everything except the trailing wall-time column
  const auto strip_wall = [](const std::string& text) {
    std::string out;
    std::size_t start = 0;
    while (start < text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string::npos) end = text.size();
      const std::string line = text.substr(start, end - start);
      out += line.substr(0, line.rfind(','));
      out += '\n';
      start = end + 1;
    }
    return out;
  };
  const std::string a = strip_wall(read_text_file(first.path));
  const std::string b = strip_wall(read_text_file(second.path));

  const bool pass = !a.empty() && a == b && read_results(first.path).size() == 8;
  report(9, "rerun with the same config and seed writes an identical results file", pass);
  REQUIRE(read_results(first.path).size() == 8);
  REQUIRE(a == b);
}
