#include "vil2c/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vil2c/rng.hpp"

namespace vil2c::envs {

namespace {

double dist(const Vec2& a, const Vec2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

Vec2 clamp_to_bounds(Vec2 p, double bounds) {
    p.x = std::clamp(p.x, -bounds, bounds);
    p.y = std::clamp(p.y, -bounds, bounds);
    return p;
}

// Push a mobile entity out of an overlapping landmark disc.
Vec2 resolve_landmark_overlap(Vec2 p, const Vec2& lm, double radius) {
    double d = dist(p, lm);
    if (d >= radius) return p;
    if (d < 1e-9) {
        p.x = lm.x + radius;  // degenerate overlap: push along +x
        return p;
    }
    double scale = radius / d;
    p.x = lm.x + (p.x - lm.x) * scale;
    p.y = lm.y + (p.y - lm.y) * scale;
    return p;
}

}  // namespace

Vec2 action_direction(int action) {
    switch (action) {
        case 0: return {0.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {0.0, -1.0};
        case 3: return {-1.0, 0.0};
        case 4: return {1.0, 0.0};
    }
    throw std::invalid_argument("action_direction: unknown action");
}

Env::Env(EnvConfig config) : cfg_(std::move(config)) {
    if (cfg_.n_agents < 1) throw std::invalid_argument("Env: need at least one agent");
    if (cfg_.observation_radii.empty())
        throw std::invalid_argument("Env: empty observation radii list");
}

WorldState Env::reset(uint64_t seed) const {
    Rng rng(seed);
    WorldState s;
    s.bounds = cfg_.bounds;
    int n = cfg_.entity_count();
    s.positions.resize(n);
    s.velocities.assign(cfg_.n_agents + cfg_.n_preys, Vec2{});
    for (int i = 0; i < n; ++i) {
        s.positions[i].x = rng.uniform(-cfg_.bounds, cfg_.bounds);
        s.positions[i].y = rng.uniform(-cfg_.bounds, cfg_.bounds);
    }
    return s;
}

StepResult Env::step(const WorldState& state, const std::vector<Vec2>& displacements,
                     double dt) const {
    if ((int)displacements.size() != cfg_.n_agents)
        throw std::invalid_argument("Env::step: displacement count mismatch");
    StepResult out;
    out.state = state;
    WorldState& s = out.state;

    for (int i = 0; i < cfg_.n_agents; ++i) {
        Vec2 p = state.positions[i];
        p.x += displacements[i].x;
        p.y += displacements[i].y;
        if (cfg_.kind == EnvKind::PredatorPrey) {
            for (int l = 0; l < cfg_.n_landmarks; ++l)
                p = resolve_landmark_overlap(
                    p, state.positions[cfg_.n_agents + cfg_.n_preys + l],
                    cfg_.landmark_radius);
        }
        p = clamp_to_bounds(p, cfg_.bounds);
        s.positions[i] = p;
        s.velocities[i] = {dt > 0 ? (p.x - state.positions[i].x) / dt : 0.0,
                           dt > 0 ? (p.y - state.positions[i].y) / dt : 0.0};
    }

    // Scripted preys flee the nearest predator.
    for (int q = 0; q < cfg_.n_preys; ++q) {
        int idx = cfg_.n_agents + q;
        Vec2 p = state.positions[idx];
        if (cfg_.evasion_enabled && dt > 0) {
            int nearest = 0;
            double best = 1e300;
            for (int i = 0; i < cfg_.n_agents; ++i) {
                double d = dist(p, state.positions[i]);
                if (d < best) {
                    best = d;
                    nearest = i;
                }
            }
            Vec2 away{p.x - state.positions[nearest].x, p.y - state.positions[nearest].y};
            double norm = std::hypot(away.x, away.y);
            if (norm < 1e-9) away = {1.0, 0.0}, norm = 1.0;
            p.x += cfg_.prey_speed * dt * away.x / norm;
            p.y += cfg_.prey_speed * dt * away.y / norm;
            if (cfg_.kind == EnvKind::PredatorPrey)
                for (int l = 0; l < cfg_.n_landmarks; ++l)
                    p = resolve_landmark_overlap(
                        p, state.positions[cfg_.n_agents + cfg_.n_preys + l],
                        cfg_.landmark_radius);
            p = clamp_to_bounds(p, cfg_.bounds);
        }
        s.positions[idx] = p;
        s.velocities[idx] = {dt > 0 ? (p.x - state.positions[idx].x) / dt : 0.0,
                             dt > 0 ? (p.y - state.positions[idx].y) / dt : 0.0};
    }

    // Reward.
    double reward = 0.0;
    if (cfg_.kind == EnvKind::PredatorPrey) {
        for (int i = 0; i < cfg_.n_agents; ++i) {
            double best = 1e300;
            for (int q = 0; q < cfg_.n_preys; ++q)
                best = std::min(best, dist(s.positions[i], s.positions[cfg_.n_agents + q]));
            if (cfg_.landmarks_are_targets)
                for (int l = 0; l < cfg_.n_landmarks; ++l)
                    best = std::min(best,
                                    dist(s.positions[i],
                                         s.positions[cfg_.n_agents + cfg_.n_preys + l]));
            if (best < 1e300) reward -= best;
        }
    } else {
        int covered = 0;
        for (int l = 0; l < cfg_.n_landmarks; ++l) {
            const Vec2& lm = s.positions[cfg_.n_agents + cfg_.n_preys + l];
            double best = 1e300;
            for (int i = 0; i < cfg_.n_agents; ++i)
                best = std::min(best, dist(s.positions[i], lm));
            reward -= best;
            if (best <= cfg_.capture_radius) ++covered;
        }
        out.success = cfg_.n_landmarks > 0 ? (double)covered / cfg_.n_landmarks : 0.0;
    }
    // One penalty per ordered colliding agent pair.
    for (int i = 0; i < cfg_.n_agents; ++i)
        for (int j = 0; j < cfg_.n_agents; ++j) {
            if (i == j) continue;
            if (dist(s.positions[i], s.positions[j]) < 2.0 * cfg_.collision_radius)
                reward -= cfg_.collision_penalty;
        }
    out.reward = reward;
    return out;
}

AgentObservation Env::observe(const WorldState& state, int agent_id,
                              const ChannelConstants& ch) const {
    if (agent_id < 0 || agent_id >= cfg_.n_agents)
        throw std::invalid_argument("observe: bad agent id");
    AgentObservation obs;
    obs.env_obs.reserve(cfg_.obs_width());
    const Vec2& self = state.positions[agent_id];
    const Vec2& selfv = state.velocities[agent_id];
    double radius = cfg_.obs_radius(agent_id);
    obs.env_obs.push_back(self.x);
    obs.env_obs.push_back(self.y);
    obs.env_obs.push_back(selfv.x);
    obs.env_obs.push_back(selfv.y);

    auto push_mobile = [&](int idx) {
        double d = dist(self, state.positions[idx]);
        if (d <= radius) {
            obs.env_obs.push_back(1.0);
            obs.env_obs.push_back(state.positions[idx].x - self.x);
            obs.env_obs.push_back(state.positions[idx].y - self.y);
            obs.env_obs.push_back(state.velocities[idx].x - selfv.x);
            obs.env_obs.push_back(state.velocities[idx].y - selfv.y);
        } else {
            for (int k = 0; k < 5; ++k) obs.env_obs.push_back(0.0);
        }
    };
    for (int i = 0; i < cfg_.n_agents; ++i)
        if (i != agent_id) push_mobile(i);
    for (int q = 0; q < cfg_.n_preys; ++q) push_mobile(cfg_.n_agents + q);
    for (int l = 0; l < cfg_.n_landmarks; ++l) {
        int idx = cfg_.n_agents + cfg_.n_preys + l;
        double d = dist(self, state.positions[idx]);
        if (d <= radius) {
            obs.env_obs.push_back(1.0);
            obs.env_obs.push_back(state.positions[idx].x - self.x);
            obs.env_obs.push_back(state.positions[idx].y - self.y);
        } else {
            for (int k = 0; k < 3; ++k) obs.env_obs.push_back(0.0);
        }
    }

    for (int i = 0; i < cfg_.n_agents; ++i) {
        if (i == agent_id) continue;
        double d = channel::clamp_distance(dist(self, state.positions[i]));
        obs.channel_obs.push_back(
            channel::path_loss(d, ch.path_loss_exponent, ch.path_loss_offset));
    }
    return obs;
}

std::vector<double> Env::global_state(const WorldState& state) const {
    std::vector<double> s;
    s.reserve(cfg_.state_width());
    for (int i = 0; i < cfg_.n_agents + cfg_.n_preys; ++i) {
        s.push_back(state.positions[i].x);
        s.push_back(state.positions[i].y);
        s.push_back(state.velocities[i].x);
        s.push_back(state.velocities[i].y);
    }
    for (int l = 0; l < cfg_.n_landmarks; ++l) {
        int idx = cfg_.n_agents + cfg_.n_preys + l;
        s.push_back(state.positions[idx].x);
        s.push_back(state.positions[idx].y);
    }
    return s;
}

double Env::distance(const WorldState& state, int a, int b) const {
    return dist(state.positions[a], state.positions[b]);
}

EnvConfig default_pp_config() {
    EnvConfig c;
    c.kind = EnvKind::PredatorPrey;
    c.n_agents = 4;
    c.n_preys = 2;
    c.n_landmarks = 2;
    return c;
}

EnvConfig default_cn_config() {
    EnvConfig c;
    c.kind = EnvKind::CooperativeNavigation;
    c.n_agents = 4;
    c.n_preys = 0;
    c.n_landmarks = 4;
    c.agent_speed = 1.0;
    return c;
}

}  // namespace vil2c::envs
