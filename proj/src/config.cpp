#include "vil2c/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace vil2c::config {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& section) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw std::invalid_argument("config: unknown key '" + it.key() +
                                        "' in section '" + section + "'");
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace

std::string default_config_json() {
    return R"({
  "version": 1,
  "environment": {
    "kind": "pp",
    "n_agents": 4,
    "n_preys": 2,
    "n_landmarks": 2,
    "bounds": 2.0,
    "agent_speed": 1.0,
    "prey_speed": 1.3,
    "collision_radius": 0.15,
    "capture_radius": 0.2,
    "collision_penalty": 1.0,
    "landmark_radius": 0.25,
    "landmarks_are_targets": false,
    "observation_radii": [1.2, 1.6, 2.0, 2.4]
  },
  "channel": {
    "path_loss_exponent": 2.0,
    "path_loss_offset": 45.0,
    "noise_density": 1e-9
  },
  "budgets": { "bandwidth": 1e4, "power": 1.0 },
  "clock": { "t_step": 1.0, "t_max": 0.5 },
  "reception": { "entropy_threshold": 1.2, "avg_wait_fraction": 0.3 },
  "agent": { "message_width": 8, "bits_per_element": 32, "hidden_width": 32, "key_width": 8 },
  "mode": "vil2c",
  "episode": { "length": 25, "discount": 0.95 },
  "training": {
    "clip_epsilon": 0.2,
    "mdp_discount": 0.95,
    "gae_lambda": 0.95,
    "actor_lr": 3e-3,
    "critic_lr": 3e-3,
    "resonet_lr": 3e-3,
    "entropy_coef": 0.01,
    "epochs": 4,
    "episodes_per_iter": 8,
    "iterations": 40,
    "workers": 1,
    "importance_against_empty_buffer": false,
    "resonet_per_episode_voi": false,
    "normalize_advantages": true
  },
  "seed": 1
})";
}

ScenarioConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
    }
    reject_unknown(j, {"version", "environment", "channel", "budgets", "clock",
                       "reception", "agent", "mode", "episode", "training", "seed"},
                   "<root>");
    ScenarioConfig cfg;
    if (j.contains("version") && j.at("version").get<int>() != 1)
        throw std::invalid_argument("config: unsupported version");

    if (j.contains("environment")) {
        const json& e = j.at("environment");
        reject_unknown(e,
                       {"kind", "n_agents", "n_preys", "n_landmarks", "bounds",
                        "agent_speed", "prey_speed", "collision_radius", "capture_radius",
                        "collision_penalty", "landmark_radius", "landmarks_are_targets",
                        "observation_radii"},
                       "environment");
        std::string kind = "pp";
        read(e, "kind", kind);
        if (kind == "pp")
            cfg.sim.env = envs::default_pp_config();
        else if (kind == "cn")
            cfg.sim.env = envs::default_cn_config();
        else
            throw std::invalid_argument("config: environment.kind must be pp or cn");
        read(e, "n_agents", cfg.sim.env.n_agents);
        read(e, "n_preys", cfg.sim.env.n_preys);
        read(e, "n_landmarks", cfg.sim.env.n_landmarks);
        read(e, "bounds", cfg.sim.env.bounds);
        read(e, "agent_speed", cfg.sim.env.agent_speed);
        read(e, "prey_speed", cfg.sim.env.prey_speed);
        read(e, "collision_radius", cfg.sim.env.collision_radius);
        read(e, "capture_radius", cfg.sim.env.capture_radius);
        read(e, "collision_penalty", cfg.sim.env.collision_penalty);
        read(e, "landmark_radius", cfg.sim.env.landmark_radius);
        read(e, "landmarks_are_targets", cfg.sim.env.landmarks_are_targets);
        read(e, "observation_radii", cfg.sim.env.observation_radii);
        if (cfg.sim.env.n_agents < 2)
            throw std::invalid_argument("config: need at least 2 agents");
        if (cfg.sim.env.observation_radii.empty())
            throw std::invalid_argument("config: empty observation_radii");
    }
    if (j.contains("channel")) {
        const json& c = j.at("channel");
        reject_unknown(c, {"path_loss_exponent", "path_loss_offset", "noise_density"},
                       "channel");
        read(c, "path_loss_exponent", cfg.sim.chan.path_loss_exponent);
        read(c, "path_loss_offset", cfg.sim.chan.path_loss_offset);
        read(c, "noise_density", cfg.sim.chan.noise_density);
        if (cfg.sim.chan.path_loss_exponent < 0.0)
            throw std::invalid_argument("config: path_loss_exponent must be >= 0");
    }
    if (j.contains("budgets")) {
        const json& b = j.at("budgets");
        reject_unknown(b, {"bandwidth", "power"}, "budgets");
        read(b, "bandwidth", cfg.sim.bandwidth_budget);
        read(b, "power", cfg.sim.power_budget);
    }
    if (j.contains("clock")) {
        const json& c = j.at("clock");
        reject_unknown(c, {"t_step", "t_max"}, "clock");
        read(c, "t_step", cfg.sim.t_step);
        read(c, "t_max", cfg.sim.t_max);
    }
    if (j.contains("reception")) {
        const json& r = j.at("reception");
        reject_unknown(r, {"entropy_threshold", "avg_wait_fraction"}, "reception");
        if (r.contains("entropy_threshold")) {
            if (r.at("entropy_threshold").is_string()) {
                if (r.at("entropy_threshold").get<std::string>() != "grid")
                    throw std::invalid_argument(
                        "config: entropy_threshold must be a number or \"grid\"");
                cfg.entropy_grid = true;
                cfg.sim.entropy_threshold = 0.5 * std::log2((double)envs::kNumActions);
            } else {
                cfg.sim.entropy_threshold = r.at("entropy_threshold").get<double>();
            }
        }
        read(r, "avg_wait_fraction", cfg.sim.avg_wait_fraction);
    }
    if (j.contains("agent")) {
        const json& a = j.at("agent");
        reject_unknown(a, {"message_width", "bits_per_element", "hidden_width", "key_width"},
                       "agent");
        read(a, "message_width", cfg.sim.agent_settings.msg_width);
        read(a, "bits_per_element", cfg.sim.agent_settings.bits_per_element);
        read(a, "hidden_width", cfg.sim.hidden_width);
        read(a, "key_width", cfg.sim.key_width);
        if (cfg.sim.agent_settings.msg_width < 1 ||
            cfg.sim.agent_settings.bits_per_element <= 0.0)
            throw std::invalid_argument("config: bad agent message settings");
    }
    if (j.contains("mode")) cfg.sim.mode = sim::mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("episode")) {
        const json& e = j.at("episode");
        reject_unknown(e, {"length", "discount"}, "episode");
        read(e, "length", cfg.sim.episode_length);
        read(e, "discount", cfg.sim.mdp_discount);
    }
    if (j.contains("training")) {
        const json& t = j.at("training");
        reject_unknown(t,
                       {"clip_epsilon", "mdp_discount", "gae_lambda", "actor_lr",
                        "critic_lr", "resonet_lr", "entropy_coef", "epochs",
                        "episodes_per_iter", "iterations", "workers",
                        "importance_against_empty_buffer", "resonet_per_episode_voi",
                        "normalize_advantages"},
                       "training");
        read(t, "clip_epsilon", cfg.train.clip_epsilon);
        read(t, "mdp_discount", cfg.train.mdp_discount);
        read(t, "gae_lambda", cfg.train.gae_lambda);
        read(t, "actor_lr", cfg.train.actor_lr);
        read(t, "critic_lr", cfg.train.critic_lr);
        read(t, "resonet_lr", cfg.train.resonet_lr);
        read(t, "entropy_coef", cfg.train.entropy_coef);
        read(t, "epochs", cfg.train.epochs);
        read(t, "episodes_per_iter", cfg.train.episodes_per_iter);
        read(t, "iterations", cfg.train.iterations);
        read(t, "workers", cfg.train.workers);
        read(t, "importance_against_empty_buffer", cfg.train.importance_against_empty_buffer);
        read(t, "resonet_per_episode_voi", cfg.train.resonet_per_episode_voi);
        read(t, "normalize_advantages", cfg.train.normalize_advantages);
    }
    if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
    cfg.train.seed = cfg.seed;
    cfg.sim.validate();
    cfg.train.validate();
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string canonical_json(const ScenarioConfig& cfg) {
    json j;
    j["version"] = 1;
    j["environment"] = {
        {"kind", cfg.sim.env.kind == envs::EnvKind::PredatorPrey ? "pp" : "cn"},
        {"n_agents", cfg.sim.env.n_agents},
        {"n_preys", cfg.sim.env.n_preys},
        {"n_landmarks", cfg.sim.env.n_landmarks},
        {"bounds", cfg.sim.env.bounds},
        {"agent_speed", cfg.sim.env.agent_speed},
        {"prey_speed", cfg.sim.env.prey_speed},
        {"collision_radius", cfg.sim.env.collision_radius},
        {"capture_radius", cfg.sim.env.capture_radius},
        {"collision_penalty", cfg.sim.env.collision_penalty},
        {"landmark_radius", cfg.sim.env.landmark_radius},
        {"landmarks_are_targets", cfg.sim.env.landmarks_are_targets},
        {"observation_radii", cfg.sim.env.observation_radii}};
    j["channel"] = {{"path_loss_exponent", cfg.sim.chan.path_loss_exponent},
                    {"path_loss_offset", cfg.sim.chan.path_loss_offset},
                    {"noise_density", cfg.sim.chan.noise_density}};
    j["budgets"] = {{"bandwidth", cfg.sim.bandwidth_budget}, {"power", cfg.sim.power_budget}};
    j["clock"] = {{"t_step", cfg.sim.t_step}, {"t_max", cfg.sim.t_max}};
    j["reception"] = {{"entropy_threshold", cfg.sim.entropy_threshold},
                      {"entropy_grid", cfg.entropy_grid},
                      {"avg_wait_fraction", cfg.sim.avg_wait_fraction}};
    j["agent"] = {{"message_width", cfg.sim.agent_settings.msg_width},
                  {"bits_per_element", cfg.sim.agent_settings.bits_per_element},
                  {"hidden_width", cfg.sim.hidden_width},
                  {"key_width", cfg.sim.key_width}};
    j["mode"] = sim::mode_to_string(cfg.sim.mode);
    j["episode"] = {{"length", cfg.sim.episode_length}, {"discount", cfg.sim.mdp_discount}};
    j["training"] = {{"clip_epsilon", cfg.train.clip_epsilon},
                     {"mdp_discount", cfg.train.mdp_discount},
                     {"gae_lambda", cfg.train.gae_lambda},
                     {"actor_lr", cfg.train.actor_lr},
                     {"critic_lr", cfg.train.critic_lr},
                     {"resonet_lr", cfg.train.resonet_lr},
                     {"entropy_coef", cfg.train.entropy_coef},
                     {"epochs", cfg.train.epochs},
                     {"episodes_per_iter", cfg.train.episodes_per_iter},
                     {"iterations", cfg.train.iterations},
                     {"workers", cfg.train.workers},
                     {"importance_against_empty_buffer", cfg.train.importance_against_empty_buffer},
                     {"resonet_per_episode_voi", cfg.train.resonet_per_episode_voi},
                     {"normalize_advantages", cfg.train.normalize_advantages}};
    j["seed"] = cfg.seed;
    return j.dump(2);
}

uint64_t config_hash(const ScenarioConfig& cfg) {
    // FNV-1a over the canonical form.
    std::string s = canonical_json(cfg);
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string manifest_json(const ScenarioConfig& cfg, uint64_t seed) {
    json j;
    j["code_version"] = kCodeVersion;
    j["config_hash"] = config_hash(cfg);
    j["seed"] = seed;
    j["config"] = json::parse(canonical_json(cfg));
    return j.dump(2);
}

}  // namespace vil2c::config
