#pragma once
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vil2c/autodiff.hpp"
#include "vil2c/rng.hpp"

namespace vil2c::nets {

using ad::Graph;
using ad::Tensor;
using ad::Var;

enum class Activation { Linear, Tanh, Relu };

struct Dense {
    Tensor weight;  // [out, in]
    Tensor bias;    // [out]
    Activation act = Activation::Linear;

    static Dense make(int in, int out, Activation act, Rng& rng);
    std::vector<Var> forward(Graph& g, std::span<const Var> input);
    int in_width() const { return weight.shape[1]; }
    int out_width() const { return weight.shape[0]; }
};

// Single-head scaled dot-product attention over a message buffer.
struct Attention {
    Dense key, value, query, output;

    static Attention make(int msg_width, int key_width, int out_width, Rng& rng);
    // Empty buffer -> zero vector of output width.
    std::vector<Var> forward(Graph& g, std::span<const Var> own,
                             const std::vector<std::vector<Var>>& buffer);
    int out_width() const { return output.out_width(); }
};

struct EncoderNet {
    Dense l1, l2;
    static EncoderNet make(int obs_width, int hidden, int msg_width, Rng& rng);
    std::vector<Var> forward(Graph& g, std::span<const Var> obs);
};

// Maps (env obs, channel obs) to a budget-feasible allocation via
// budget-scaled softmax heads.
struct ResoNetwork {
    Dense l1, bandwidth_head, power_head;
    static ResoNetwork make(int input_width, int hidden, int peers, Rng& rng);
    // Returns (bandwidth shares, power shares), each scaled by its budget.
    std::pair<std::vector<Var>, std::vector<Var>> forward(Graph& g,
                                                          std::span<const Var> input,
                                                          double bandwidth_budget,
                                                          double power_budget);
};

struct ActorNet {
    Attention attn;
    Dense trunk;
    Dense head;
    static ActorNet make(int msg_width, int key_width, int hidden, int n_actions,
                         Rng& rng);
    // own message + buffer -> action probabilities (softmax head).
    std::vector<Var> forward(Graph& g, std::span<const Var> own,
                             const std::vector<std::vector<Var>>& buffer);
};

struct CriticNet {
    Dense l1, l2;
    static CriticNet make(int state_width, int hidden, Rng& rng);
    Var forward(Graph& g, std::span<const Var> state);
};

// Named views over a network's parameter tensors, for optimizers and
// checkpointing.
using ParamList = std::vector<std::pair<std::string, Tensor*>>;

ParamList params_of(Dense& d, const std::string& prefix);
ParamList params_of(Attention& a, const std::string& prefix);
ParamList params_of(EncoderNet& n, const std::string& prefix);
ParamList params_of(ResoNetwork& n, const std::string& prefix);
ParamList params_of(ActorNet& n, const std::string& prefix);
ParamList params_of(CriticNet& n, const std::string& prefix);
inline void append(ParamList& dst, ParamList src) {
    for (auto& x : src) dst.push_back(std::move(x));
}

struct Adam {
    double lr = 1e-3;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    int step_count = 0;
    std::vector<std::vector<double>> m, v;

    void init(const ParamList& params);
    // Gradient descent step on tensor.grad; caller zeroes grads after.
    void step(const ParamList& params);
};

// Text checkpoint, versioned with a magic header.
void save_checkpoint(const std::string& path, const ParamList& params);
void load_checkpoint(const std::string& path, const ParamList& params);

}  // namespace vil2c::nets
