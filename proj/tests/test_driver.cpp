#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <type_traits>
#include <vector>

#include "bco/bc.hpp"
#include "bco/demos.hpp"
#include "bco/driver.hpp"
#include "bco/environments.hpp"
#include "bco/rng.hpp"

using namespace bco;

namespace {

// Cheap settings so driver round trips stay fast in unit tests.
BcoConfig chain_config(double alpha, std::int64_t pre) {
  BcoConfig cfg;
  cfg.env_name = "chainworld";
  cfg.alpha = alpha;
  cfg.pre_interactions = pre;
  cfg.model_hidden = {32};
  cfg.policy_hidden = {32};
  cfg.probe_episodes = 10;
  cfg.protocol.adam.learning_rate = 0.02;
  cfg.protocol.max_epochs = 150;
  cfg.seed = 5;
  return cfg;
}

DemoSet chain_demos(int n = 2) {
  ChainWorldEnv env;
  Rng rng(9000);
  return record_demos(env, scripted_expert("chainworld"), n, 4, rng);
}

}  // namespace

TEST_CASE("post-demonstration budgets round alpha times the pre budget") {
  REQUIRE(post_steps_per_iteration(0.0, 1000) == 0);
  REQUIRE(post_steps_per_iteration(0.01, 2000) == 20);
  REQUIRE(post_steps_per_iteration(2e-3, 2000) == 4);
  REQUIRE(post_steps_per_iteration(4e-3, 2000) == 8);
  REQUIRE(post_steps_per_iteration(0.0049, 1000) == 5);
}

TEST_CASE("a zero-alpha run makes exactly one pass and no post steps") {
  ChainWorldEnv env;
  const BcoRunRecord rec = run_bco(env, chain_demos(), chain_config(0.0, 200));

  REQUIRE(rec.iterations.size() == 1);
  REQUIRE(rec.iterations[0].iteration == 0);
  REQUIRE(rec.iterations[0].collected_steps == 200);
  REQUIRE(rec.iterations[0].post_interactions_cum == 0);
  REQUIRE(rec.pre_interactions == 200);
  REQUIRE(rec.post_interactions_cum == 0);
  REQUIRE(rec.counted_env_steps == 200);
  REQUIRE(rec.best_iteration == 0);
  REQUIRE(rec.policy.trained());
  REQUIRE(rec.inverse_model.trained());
}

TEST_CASE("three improvement rounds at alpha 0.01 of 2000 accumulate sixty post steps") {
  ChainWorldEnv env;
  BcoConfig cfg = chain_config(0.01, 2000);
  cfg.max_iterations = 3;
  cfg.improvement_tolerance = -1e9;  // every round counts as improving, so only the cap stops it
  const BcoRunRecord rec = run_bco(env, chain_demos(), cfg);

  REQUIRE(rec.iterations.size() == 4);  // initial fit plus three improvement rounds
  const std::vector<std::int64_t> expect_cum{0, 20, 40, 60};
  for (std::size_t i = 0; i < rec.iterations.size(); ++i) {
    REQUIRE(rec.iterations[i].iteration == static_cast<int>(i));
    REQUIRE(rec.iterations[i].post_interactions_cum == expect_cum[i]);
    REQUIRE(rec.iterations[i].collected_steps == (i == 0 ? 2000 : 20));
  }
  REQUIRE(rec.post_interactions_cum == 60);
  REQUIRE(rec.counted_env_steps == 2060);
}

TEST_CASE("the improvement criterion follows the latest-versus-best-prior rule") {
  BcoRunRecord rec;
  rec.config = chain_config(0.01, 100);
  rec.config.improvement_tolerance = 0.01;
  rec.config.max_iterations = 50;

  auto push = [&](double mean) {
    BcoIteration it;
    it.iteration = static_cast<int>(rec.iterations.size());
    it.probe_mean = mean;
    rec.iterations.push_back(it);
  };

  SECTION("strict improvement continues") {
    push(0.2);
    push(0.5);
    REQUIRE(improvement_criterion(rec));
  }

  SECTION("a flat repeat stops") {
    push(0.5);
    push(0.5);
    REQUIRE_FALSE(improvement_criterion(rec));
  }

  SECTION("improvement inside the tolerance stops") {
    push(0.5);
    push(0.505);
    REQUIRE_FALSE(improvement_criterion(rec));
  }

  SECTION("the iteration cap stops regardless of improvement") {
    rec.config.max_iterations = 2;
    push(0.1);
    push(0.2);
    push(0.9);
    REQUIRE_FALSE(improvement_criterion(rec));
  }

  SECTION("the best prior is the running maximum, not the previous entry") {
    push(0.8);
    push(0.2);
    push(0.75);  // beats its predecessor but not the round-zero best
    REQUIRE_FALSE(improvement_criterion(rec));
  }

  SECTION("an empty record is an input error") {
    REQUIRE_THROWS_AS(improvement_criterion(rec), InputError);
  }
}

TEST_CASE("whole runs are reproducible from config and seed") {
  ChainWorldEnv env;
  BcoConfig cfg = chain_config(0.05, 300);
  cfg.max_iterations = 2;
  cfg.improvement_tolerance = -1e9;
  const DemoSet demos = chain_demos();

  const BcoRunRecord a = run_bco(env, demos, cfg);
  const BcoRunRecord b = run_bco(env, demos, cfg);

  REQUIRE(a.iterations.size() == b.iterations.size());
  for (std::size_t i = 0; i < a.iterations.size(); ++i) {
    REQUIRE(a.iterations[i].probe_mean == b.iterations[i].probe_mean);
    REQUIRE(a.iterations[i].model_val_loss == b.iterations[i].model_val_loss);
    REQUIRE(a.iterations[i].policy_val_loss == b.iterations[i].policy_val_loss);
    REQUIRE(a.iterations[i].collected_steps == b.iterations[i].collected_steps);
  }
  REQUIRE(flatten_model(a.policy.model) == flatten_model(b.policy.model));
  REQUIRE(flatten_model(a.final_policy.model) == flatten_model(b.final_policy.model));
  REQUIRE(flatten_model(a.inverse_model.model) == flatten_model(b.inverse_model.model));
  REQUIRE(a.best_iteration == b.best_iteration);
}

TEST_CASE("the recorded best iteration carries the best probe metric") {
  ChainWorldEnv env;
  BcoConfig cfg = chain_config(0.05, 300);
  cfg.max_iterations = 3;
  cfg.improvement_tolerance = -1e9;
  const BcoRunRecord rec = run_bco(env, chain_demos(), cfg);

  double best = -1e300;
  int best_idx = 0;
  for (const auto& it : rec.iterations) {
    if (probe_metric(rec.config, it) > best) {
      best = probe_metric(rec.config, it);
      best_idx = it.iteration;
    }
  }
  REQUIRE(rec.best_iteration == best_idx);
  REQUIRE(probe_metric(rec.config, rec.iterations[rec.best_iteration]) == best);
}

TEST_CASE("mismatched demos and invalid configs are rejected") {
  ChainWorldEnv env;
  DemoSet wrong = chain_demos();
  wrong.env_name = "cartpole";
  REQUIRE_THROWS_AS(run_bco(env, wrong, chain_config(0.0, 100)), ConfigError);

  DemoSet empty;
  empty.env_name = "chainworld";
  REQUIRE_THROWS_AS(run_bco(env, empty, chain_config(0.0, 100)), InputError);

  BcoConfig negative_alpha = chain_config(-0.1, 100);
  REQUIRE_THROWS_AS(run_bco(env, chain_demos(), negative_alpha), ConfigError);
  BcoConfig no_budget = chain_config(0.0, 0);
  REQUIRE_THROWS_AS(run_bco(env, chain_demos(), no_budget), ConfigError);

  // a demonstration trajectory with fewer than two states carries no transition
  DemoSet degenerate;
  degenerate.env_name = "chainworld";
  degenerate.trajectories = {{{0.0}}};
  REQUIRE_THROWS_AS(run_bco(env, degenerate, chain_config(0.0, 100)), InputError);
}

// The inverse model trains on collected interactions only; demonstrations
// cannot reach it because they carry no actions to train on.
static_assert(!std::is_invocable_v<decltype(&fit_inverse_model), InverseModel&, const DemoSet&,
                                   const TrainProtocol&, Rng&>);

TEST_CASE("behavioral cloning consumes zero environment steps") {
  ChainWorldEnv inner;
  StepCountingEnv env(inner);
  Rng rng(9001);
  const ActionfulDemoSet demos =
      record_actionful_demos(inner, scripted_expert("chainworld"), 2, 4, rng);

  BcConfig cfg;
  cfg.env_name = "chainworld";
  cfg.policy_hidden = {32};
  cfg.protocol.adam.learning_rate = 0.02;
  cfg.protocol.max_epochs = 150;
  cfg.seed = 6;
  const BcRunRecord rec = run_bc(env, demos, cfg);

  REQUIRE(env.steps() == 0);
  REQUIRE(rec.policy.trained());
  for (double k : {0.0, 1.0, 2.0, 3.0}) REQUIRE(discrete(rec.policy.act({k})) == 1);
}

TEST_CASE("behavioral cloning is exactly a policy fit on the true actions") {
  ChainWorldEnv env;
  Rng rng(9002);
  const ActionfulDemoSet demos =
      record_actionful_demos(env, scripted_expert("chainworld"), 2, 4, rng);

  BcConfig cfg;
  cfg.env_name = "chainworld";
  cfg.policy_hidden = {32};
  cfg.protocol.adam.learning_rate = 0.02;
  cfg.protocol.max_epochs = 150;
  cfg.seed = 11;
  const BcRunRecord via_bc = run_bc(env, demos, cfg);

  Rng init_rng(derive_seed(cfg.seed, 1));
  Policy direct = Policy::create(env, cfg.policy_hidden, init_rng);
  Rng train_rng(derive_seed(cfg.seed, 3));
  fit_policy(direct, demos.trajectories, demos.actions, cfg.protocol, train_rng);

  REQUIRE(flatten_model(via_bc.policy.model) == flatten_model(direct.model));
}

TEST_CASE("cloning from observation matches plain cloning when inference is exact") {
  ChainWorldEnv env;
  Rng rng(9003);
  const ActionfulDemoSet actionful =
      record_actionful_demos(env, scripted_expert("chainworld"), 2, 4, rng);
  const DemoSet stripped = actionful.strip();

  BcoConfig cfg = chain_config(0.0, 400);
  cfg.seed = 12;
  const BcoRunRecord bco = run_bco(env, stripped, cfg);

  // the chain is invertible, so inferred labels equal the expert's actions
  const auto inferred = infer_actions(bco.inverse_model, env, stripped);
  REQUIRE(inferred == actionful.actions);

  BcConfig bc_cfg;
  bc_cfg.env_name = "chainworld";
  bc_cfg.policy_hidden = {32};
  bc_cfg.protocol = cfg.protocol;
  bc_cfg.seed = 12;
  const BcRunRecord bc = run_bc(env, actionful, bc_cfg);

  for (double k : {0.0, 1.0, 2.0, 3.0, 4.0})
    REQUIRE(bco.policy.act({k}) == bc.policy.act({k}));
}
