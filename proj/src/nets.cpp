#include "vil2c/nets.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vil2c::nets {

namespace {

void init_uniform(Tensor& t, int fan_in, Rng& rng) {
    double bound = 1.0 / std::sqrt((double)fan_in);
    for (double& v : t.values) v = rng.uniform(-bound, bound);
}

Var activate(Graph&, Var x, Activation act) {
    switch (act) {
        case Activation::Linear: return x;
        case Activation::Tanh: return ad::tanh(x);
        case Activation::Relu: return ad::relu(x);
    }
    return x;
}

}  // namespace

Dense Dense::make(int in, int out, Activation act, Rng& rng) {
    Dense d;
    d.weight = Tensor::zeros({out, in});
    d.bias = Tensor::zeros({out});
    d.act = act;
    init_uniform(d.weight, in, rng);
    init_uniform(d.bias, in, rng);
    return d;
}

std::vector<Var> Dense::forward(Graph& g, std::span<const Var> input) {
    if ((int)input.size() != in_width())
        throw std::invalid_argument("Dense: input width " + std::to_string(input.size()) +
                                    " != " + std::to_string(in_width()));
    std::vector<Var> w = g.bind(weight);
    std::vector<Var> b = g.bind(bias);
    int in = in_width(), out = out_width();
    std::vector<Var> result(out);
    std::vector<Var> terms(in + 1);
    for (int r = 0; r < out; ++r) {
        for (int c = 0; c < in; ++c) terms[c] = w[r * in + c] * input[c];
        terms[in] = b[r];
        result[r] = activate(g, ad::sum_pairwise(terms), act);
    }
    return result;
}

Attention Attention::make(int msg_width, int key_width, int out_width, Rng& rng) {
    Attention a;
    a.key = Dense::make(msg_width, key_width, Activation::Linear, rng);
    a.query = Dense::make(msg_width, key_width, Activation::Linear, rng);
    a.value = Dense::make(msg_width, out_width, Activation::Linear, rng);
    a.output = Dense::make(out_width, out_width, Activation::Linear, rng);
    return a;
}

std::vector<Var> Attention::forward(Graph& g, std::span<const Var> own,
                                    const std::vector<std::vector<Var>>& buffer) {
    int ow = out_width();
    if (buffer.empty()) {
        std::vector<Var> zero(ow);
        for (Var& z : zero) z = g.constant(0.0);
        return zero;
    }
    std::vector<Var> q = query.forward(g, own);
    double scale = 1.0 / std::sqrt((double)q.size());
    std::vector<Var> scores;
    std::vector<std::vector<Var>> vals;
    scores.reserve(buffer.size());
    for (const auto& msg : buffer) {
        std::vector<Var> k = key.forward(g, msg);
        std::vector<Var> dots(k.size());
        for (size_t i = 0; i < k.size(); ++i) dots[i] = q[i] * k[i];
        scores.push_back(ad::sum_pairwise(dots) * scale);
        vals.push_back(value.forward(g, msg));
    }
    std::vector<Var> weights = ad::softmax(scores);
    std::vector<Var> agg(ow);
    std::vector<Var> terms(buffer.size());
    for (int d = 0; d < ow; ++d) {
        for (size_t i = 0; i < buffer.size(); ++i) terms[i] = weights[i] * vals[i][d];
        agg[d] = ad::sum_pairwise(terms);
    }
    return output.forward(g, agg);
}

EncoderNet EncoderNet::make(int obs_width, int hidden, int msg_width, Rng& rng) {
    EncoderNet e;
    e.l1 = Dense::make(obs_width, hidden, Activation::Tanh, rng);
    e.l2 = Dense::make(hidden, msg_width, Activation::Linear, rng);
    return e;
}

std::vector<Var> EncoderNet::forward(Graph& g, std::span<const Var> obs) {
    std::vector<Var> h = l1.forward(g, obs);
    return l2.forward(g, h);
}

ResoNetwork ResoNetwork::make(int input_width, int hidden, int peers, Rng& rng) {
    ResoNetwork r;
    r.l1 = Dense::make(input_width, hidden, Activation::Tanh, rng);
    r.bandwidth_head = Dense::make(hidden, peers, Activation::Linear, rng);
    r.power_head = Dense::make(hidden, peers, Activation::Linear, rng);
    return r;
}

std::pair<std::vector<Var>, std::vector<Var>> ResoNetwork::forward(
    Graph& g, std::span<const Var> input, double bandwidth_budget,
    double power_budget) {
    std::vector<Var> h = l1.forward(g, input);
    std::vector<Var> bl = bandwidth_head.forward(g, h);
    std::vector<Var> pl = power_head.forward(g, h);
    std::vector<Var> bs = ad::softmax(bl);
    std::vector<Var> ps = ad::softmax(pl);
    for (Var& x : bs) x = x * bandwidth_budget;
    for (Var& x : ps) x = x * power_budget;
    return {bs, ps};
}

ActorNet ActorNet::make(int msg_width, int key_width, int hidden, int n_actions,
                        Rng& rng) {
    ActorNet a;
    a.attn = Attention::make(msg_width, key_width, msg_width, rng);
    a.trunk = Dense::make(2 * msg_width, hidden, Activation::Tanh, rng);
    a.head = Dense::make(hidden, n_actions, Activation::Linear, rng);
    return a;
}

std::vector<Var> ActorNet::forward(Graph& g, std::span<const Var> own,
                                   const std::vector<std::vector<Var>>& buffer) {
    std::vector<Var> agg = attn.forward(g, own, buffer);
    std::vector<Var> fused;
    fused.reserve(agg.size() + own.size());
    fused.insert(fused.end(), agg.begin(), agg.end());
    fused.insert(fused.end(), own.begin(), own.end());
    std::vector<Var> h = trunk.forward(g, fused);
    std::vector<Var> logits = head.forward(g, h);
    return ad::softmax(logits);
}

CriticNet CriticNet::make(int state_width, int hidden, Rng& rng) {
    CriticNet c;
    c.l1 = Dense::make(state_width, hidden, Activation::Tanh, rng);
    c.l2 = Dense::make(hidden, 1, Activation::Linear, rng);
    return c;
}

Var CriticNet::forward(Graph& g, std::span<const Var> state) {
    std::vector<Var> h = l1.forward(g, state);
    return l2.forward(g, h)[0];
}

ParamList params_of(Dense& d, const std::string& prefix) {
    return {{prefix + ".weight", &d.weight}, {prefix + ".bias", &d.bias}};
}
ParamList params_of(Attention& a, const std::string& prefix) {
    ParamList p;
    append(p, params_of(a.key, prefix + ".key"));
    append(p, params_of(a.value, prefix + ".value"));
    append(p, params_of(a.query, prefix + ".query"));
    append(p, params_of(a.output, prefix + ".output"));
    return p;
}
ParamList params_of(EncoderNet& n, const std::string& prefix) {
    ParamList p;
    append(p, params_of(n.l1, prefix + ".l1"));
    append(p, params_of(n.l2, prefix + ".l2"));
    return p;
}
ParamList params_of(ResoNetwork& n, const std::string& prefix) {
    ParamList p;
    append(p, params_of(n.l1, prefix + ".l1"));
    append(p, params_of(n.bandwidth_head, prefix + ".bandwidth_head"));
    append(p, params_of(n.power_head, prefix + ".power_head"));
    return p;
}
ParamList params_of(ActorNet& n, const std::string& prefix) {
    ParamList p;
    append(p, params_of(n.attn, prefix + ".attn"));
    append(p, params_of(n.trunk, prefix + ".trunk"));
    append(p, params_of(n.head, prefix + ".head"));
    return p;
}
ParamList params_of(CriticNet& n, const std::string& prefix) {
    ParamList p;
    append(p, params_of(n.l1, prefix + ".l1"));
    append(p, params_of(n.l2, prefix + ".l2"));
    return p;
}

void Adam::init(const ParamList& params) {
    m.clear();
    v.clear();
    for (const auto& [name, t] : params) {
        m.push_back(std::vector<double>(t->size(), 0.0));
        v.push_back(std::vector<double>(t->size(), 0.0));
    }
    step_count = 0;
}

void Adam::step(const ParamList& params) {
    if (m.size() != params.size()) init(params);
    ++step_count;
    double bc1 = 1.0 - std::pow(beta1, step_count);
    double bc2 = 1.0 - std::pow(beta2, step_count);
    for (size_t i = 0; i < params.size(); ++i) {
        Tensor* t = params[i].second;
        for (int k = 0; k < t->size(); ++k) {
            double gk = t->grad[k];
            m[i][k] = beta1 * m[i][k] + (1.0 - beta1) * gk;
            v[i][k] = beta2 * v[i][k] + (1.0 - beta2) * gk * gk;
            double mh = m[i][k] / bc1, vh = v[i][k] / bc2;
            t->values[k] -= lr * mh / (std::sqrt(vh) + eps);
        }
    }
}

void save_checkpoint(const std::string& path, const ParamList& params) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
    out << "VIL2C-CKPT v1\n";
    char buf[32];
    for (const auto& [name, t] : params) {
        out << "tensor " << name << " " << t->shape.size();
        for (int d : t->shape) out << " " << d;
        out << "\n";
        for (int k = 0; k < t->size(); ++k) {
            std::snprintf(buf, sizeof(buf), "%.17g", t->values[k]);
            out << buf << (k + 1 == t->size() ? "" : " ");
        }
        out << "\n";
    }
}

void load_checkpoint(const std::string& path, const ParamList& params) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
    std::string magic, version;
    in >> magic >> version;
    if (magic != "VIL2C-CKPT" || version != "v1")
        throw std::runtime_error("load_checkpoint: bad header in " + path);
    size_t idx = 0;
    std::string tag, name;
    while (in >> tag) {
        if (tag != "tensor") throw std::runtime_error("load_checkpoint: malformed file");
        if (idx >= params.size())
            throw std::runtime_error("load_checkpoint: extra tensor in file");
        in >> name;
        if (name != params[idx].first)
            throw std::runtime_error("load_checkpoint: expected tensor '" +
                                     params[idx].first + "', found '" + name + "'");
        int ndim;
        in >> ndim;
        std::vector<int> shape(ndim);
        for (int& d : shape) in >> d;
        Tensor* t = params[idx].second;
        if (shape != t->shape)
            throw std::runtime_error("load_checkpoint: shape mismatch for tensor '" +
                                     name + "'");
        for (int k = 0; k < t->size(); ++k) in >> t->values[k];
        ++idx;
    }
    if (idx != params.size())
        throw std::runtime_error("load_checkpoint: missing tensors in " + path);
}

}  // namespace vil2c::nets
