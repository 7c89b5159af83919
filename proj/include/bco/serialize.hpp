#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bco/demos.hpp"
#include "bco/model.hpp"

namespace bco {

using json = nlohmann::json;

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write file: " + path);
  out << content;
  if (!out) throw InputError("short write to file: " + path);
}

inline json parse_json(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw InputError(what + ": malformed JSON");
  return j;
}

inline void require_keys(const json& j, const std::vector<std::string>& allowed,
                         const std::string& what) {
  if (!j.is_object()) throw InputError(what + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const auto& a : allowed) ok = ok || key == a;
    if (!ok) throw InputError(what + ": unexpected key '" + key + "'");
  }
  for (const auto& a : allowed)
    if (!j.contains(a)) throw InputError(what + ": missing key '" + a + "'");
}

// ---- demonstrations ----

inline json trajectories_to_json(const std::vector<StateTrajectory>& trajs) {
  json out = json::array();
  for (const auto& t : trajs) {
    json jt = json::array();
    for (const auto& s : t) jt.push_back(s);
    out.push_back(std::move(jt));
  }
  return out;
}

inline std::vector<StateTrajectory> trajectories_from_json(const json& j,
                                                           const std::string& what) {
  if (!j.is_array()) throw InputError(what + ": trajectories must be an array");
  std::vector<StateTrajectory> out;
  for (const auto& jt : j) {
    if (!jt.is_array()) throw InputError(what + ": each trajectory must be an array");
    StateTrajectory traj;
    for (const auto& js : jt) {
      if (!js.is_array()) throw InputError(what + ": each state must be an array of numbers");
      State s;
      for (const auto& v : js) {
        if (!v.is_number()) throw InputError(what + ": state entries must be numbers");
        s.push_back(v.get<double>());
      }
      traj.push_back(std::move(s));
    }
    out.push_back(std::move(traj));
  }
  return out;
}

inline json to_json(const DemoSet& demos) {
  return json{{"env_name", demos.env_name},
              {"trajectories", trajectories_to_json(demos.trajectories)}};
}

// The observation-only file format carries states and nothing else; any
// extra key, actions included, is rejected outright.
inline DemoSet demos_from_json(const json& j) {
  require_keys(j, {"env_name", "trajectories"}, "demo set");
  if (!j["env_name"].is_string()) throw InputError("demo set: env_name must be a string");
  DemoSet d;
  d.env_name = j["env_name"].get<std::string>();
  d.trajectories = trajectories_from_json(j["trajectories"], "demo set");
  d.validate();
  return d;
}

inline json action_to_json(const Action& a) {
  if (is_discrete_action(a)) return json(discrete(a));
  return json(box(a));
}

inline Action action_from_json(const json& j, const std::string& what) {
  if (j.is_number_integer()) return Action(j.get<int>());
  if (j.is_array()) {
    std::vector<double> a;
    for (const auto& v : j) {
      if (!v.is_number()) throw InputError(what + ": action entries must be numbers");
      a.push_back(v.get<double>());
    }
    return Action(std::move(a));
  }
  throw InputError(what + ": action must be an integer or an array of numbers");
}

inline json to_json(const ActionfulDemoSet& demos) {
  json actions = json::array();
  for (const auto& traj_actions : demos.actions) {
    json ja = json::array();
    for (const auto& a : traj_actions) ja.push_back(action_to_json(a));
    actions.push_back(std::move(ja));
  }
  return json{{"env_name", demos.env_name},
              {"trajectories", trajectories_to_json(demos.trajectories)},
              {"actions", std::move(actions)}};
}

inline ActionfulDemoSet actionful_demos_from_json(const json& j) {
  require_keys(j, {"env_name", "trajectories", "actions"}, "actionful demo set");
  if (!j["env_name"].is_string())
    throw InputError("actionful demo set: env_name must be a string");
  ActionfulDemoSet d;
  d.env_name = j["env_name"].get<std::string>();
  d.trajectories = trajectories_from_json(j["trajectories"], "actionful demo set");
  if (!j["actions"].is_array())
    throw InputError("actionful demo set: actions must be an array");
  for (const auto& ja : j["actions"]) {
    if (!ja.is_array())
      throw InputError("actionful demo set: per-trajectory actions must be an array");
    std::vector<Action> acts;
    for (const auto& a : ja) acts.push_back(action_from_json(a, "actionful demo set"));
    d.actions.push_back(std::move(acts));
  }
  d.validate();
  return d;
}

inline void save_demos(const std::string& path, const DemoSet& demos) {
  write_text_file(path, to_json(demos).dump(2) + "\n");
}

inline DemoSet load_demos(const std::string& path) {
  return demos_from_json(parse_json(read_text_file(path), "demo set"));
}

inline void save_actionful_demos(const std::string& path, const ActionfulDemoSet& demos) {
  write_text_file(path, to_json(demos).dump(2) + "\n");
}

inline ActionfulDemoSet load_actionful_demos(const std::string& path) {
  return actionful_demos_from_json(parse_json(read_text_file(path), "actionful demo set"));
}

// ---- model checkpoints ----

struct Checkpoint {
  std::string kind;  // "policy" or "inverse_model"
  std::string env_name;
  LikelihoodModel model;
};

inline json action_space_to_json(const ActionSpace& s) {
  if (s.is_discrete()) return json{{"kind", "discrete"}, {"n", s.n}};
  return json{{"kind", "continuous"}, {"lower", s.lower}, {"upper", s.upper}};
}

inline ActionSpace action_space_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw InputError("checkpoint: malformed action_space");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "discrete") return ActionSpace::discrete(j.at("n").get<int>());
  if (kind == "continuous")
    return ActionSpace::continuous(j.at("lower").get<std::vector<double>>(),
                                   j.at("upper").get<std::vector<double>>());
  throw InputError("checkpoint: unknown action_space kind '" + kind + "'");
}

inline json checkpoint_to_json(const Checkpoint& ckpt) {
  const auto& m = ckpt.model;
  std::vector<int> hidden;
  for (const auto& h : m.spec.hidden) hidden.push_back(h.width);
  return json{{"kind", ckpt.kind},
              {"env_name", ckpt.env_name},
              {"input_dim", m.spec.input_dim},
              {"hidden", hidden},
              {"output_dim", m.spec.output_dim},
              {"lrelu_slope", m.spec.lrelu_slope},
              {"action_space", action_space_to_json(m.space)},
              {"input_shift", m.input_shift},
              {"input_scale", m.input_scale},
              {"params", flatten_model(m)},
              {"trained", m.trained}};
}

inline Checkpoint checkpoint_from_json(const json& j) {
  require_keys(j,
               {"kind", "env_name", "input_dim", "hidden", "output_dim", "lrelu_slope",
                "action_space", "input_shift", "input_scale", "params", "trained"},
               "checkpoint");
  Checkpoint ckpt;
  ckpt.kind = j["kind"].get<std::string>();
  if (ckpt.kind != "policy" && ckpt.kind != "inverse_model")
    throw InputError("checkpoint: unknown kind '" + ckpt.kind + "'");
  ckpt.env_name = j["env_name"].get<std::string>();

  MlpSpec spec;
  spec.input_dim = j["input_dim"].get<int>();
  for (int w : j["hidden"].get<std::vector<int>>())
    spec.hidden.push_back(LayerSpec{w, Activation::LeakyRelu});
  spec.output_dim = j["output_dim"].get<int>();
  spec.lrelu_slope = j["lrelu_slope"].get<double>();
  spec.validate();

  LikelihoodModel& m = ckpt.model;
  m.spec = spec;
  m.space = action_space_from_json(j["action_space"]);
  const auto dims = spec.layer_dims();
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    m.params.weights.emplace_back(dims[k + 1], dims[k]);
    m.params.biases.emplace_back(dims[k + 1], 0.0);
  }
  if (!m.space.is_discrete()) m.log_std.assign(m.space.dim(), 0.0);
  m.input_shift = j["input_shift"].get<std::vector<double>>();
  m.input_scale = j["input_scale"].get<std::vector<double>>();
  if (static_cast<int>(m.input_shift.size()) != spec.input_dim ||
      static_cast<int>(m.input_scale.size()) != spec.input_dim)
    throw InputError("checkpoint: standardizer length does not match input_dim");

  const auto flat = j["params"].get<std::vector<double>>();
  if (flat.size() != static_cast<std::size_t>(m.params.parameter_count()) + m.log_std.size())
    throw InputError("checkpoint: params length does not match architecture");
  unflatten_model(flat, m);
  m.trained = j["trained"].get<bool>();
  return ckpt;
}

inline void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  write_text_file(path, checkpoint_to_json(ckpt).dump(2) + "\n");
}

inline Checkpoint load_checkpoint(const std::string& path) {
  return checkpoint_from_json(parse_json(read_text_file(path), "checkpoint"));
}

}  // namespace bco
