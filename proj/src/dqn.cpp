#include "coactiv/dqn.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <random>
#include <sstream>
#include <unordered_set>

#include "coactiv/errors.hpp"

namespace coactiv {

void TrainConfig::validate() const {
    if (discount < 0.0 || discount > 1.0) throw Error("discount must lie in [0,1]");
    if (epsilon_decay <= 0.0 || epsilon_decay > 1.0)
        throw Error("epsilon decay must lie in (0,1]");
    if (batch_size <= 0 || replay_capacity <= 0 || max_epochs <= 0 ||
        max_episode_steps <= 0 || eval_episodes <= 0 || target_update_interval <= 0)
        throw Error("train config sizes must be positive");
    if (learning_rate <= 0.0) throw Error("learning rate must be positive");
    if (hidden.empty()) throw Error("at least one hidden layer is required");
    for (int h : hidden)
        if (h <= 0) throw Error("hidden widths must be positive");
    if (epsilon_min < 0.0 || epsilon_start < epsilon_min)
        throw Error("epsilon bounds are inconsistent");
}

namespace {

double uniform01(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

double normal01(std::mt19937_64& rng) {
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform01(rng);
    double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

struct LayerGrads {
    std::vector<std::vector<double>> w;
    std::vector<double> b;
};

std::vector<LayerGrads> zero_grads(const MlpPolicy& p) {
    std::vector<LayerGrads> g;
    for (const auto& l : p.layers) {
        LayerGrads lg;
        lg.w.assign(l.out_dim(), std::vector<double>(l.in_dim(), 0.0));
        lg.b.assign(l.out_dim(), 0.0);
        g.push_back(std::move(lg));
    }
    return g;
}

struct ForwardCache {
    std::vector<std::vector<double>> activations;  // [0] = input, per layer post
    std::vector<std::vector<double>> pre;          // per layer pre-activation
};

std::vector<double> forward_cached(const MlpPolicy& p, const std::vector<double>& x,
                                   ForwardCache& cache) {
    cache.activations.clear();
    cache.pre.clear();
    cache.activations.push_back(x);
    std::vector<double> cur = x;
    for (const auto& l : p.layers) {
        std::vector<double> z(l.out_dim());
        for (std::size_t r = 0; r < l.out_dim(); ++r) {
            double acc = l.bias[r];
            const auto& row = l.weights[r];
            for (std::size_t c = 0; c < row.size(); ++c) acc += row[c] * cur[c];
            z[r] = acc;
        }
        cache.pre.push_back(z);
        if (l.activation == Activation::Relu)
            for (auto& v : z) v = v > 0.0 ? v : 0.0;  // derivative 0 at 0
        cache.activations.push_back(z);
        cur = std::move(z);
    }
    return cur;
}

// Backpropagates dL/dq (delta on the output layer) into grads.
void backward(const MlpPolicy& p, const ForwardCache& cache,
              std::vector<double> delta, std::vector<LayerGrads>& grads) {
    for (std::size_t li = p.layers.size(); li-- > 0;) {
        const auto& l = p.layers[li];
        const auto& a_prev = cache.activations[li];
        for (std::size_t r = 0; r < l.out_dim(); ++r) {
            if (delta[r] == 0.0) continue;
            grads[li].b[r] += delta[r];
            auto& grow = grads[li].w[r];
            for (std::size_t c = 0; c < a_prev.size(); ++c)
                grow[c] += delta[r] * a_prev[c];
        }
        if (li == 0) break;
        std::vector<double> prev_delta(a_prev.size(), 0.0);
        for (std::size_t r = 0; r < l.out_dim(); ++r) {
            if (delta[r] == 0.0) continue;
            const auto& row = l.weights[r];
            for (std::size_t c = 0; c < row.size(); ++c)
                prev_delta[c] += row[c] * delta[r];
        }
        const auto& prev_layer = p.layers[li - 1];
        if (prev_layer.activation == Activation::Relu) {
            const auto& z = cache.pre[li - 1];
            for (std::size_t c = 0; c < prev_delta.size(); ++c)
                if (z[c] <= 0.0) prev_delta[c] = 0.0;
        }
        delta = std::move(prev_delta);
    }
}

void apply_sgd(MlpPolicy& p, const std::vector<LayerGrads>& grads, double lr) {
    for (std::size_t li = 0; li < p.layers.size(); ++li) {
        auto& l = p.layers[li];
        for (std::size_t r = 0; r < l.out_dim(); ++r) {
            auto& row = l.weights[r];
            const auto& grow = grads[li].w[r];
            for (std::size_t c = 0; c < row.size(); ++c) row[c] -= lr * grow[c];
            l.bias[r] -= lr * grads[li].b[r];
        }
    }
}

// --- Environment stepping ------------------------------------------------

struct ModelEnv {
    const FactoredMdp& m;
    int done_label_index = -1;

    explicit ModelEnv(const FactoredMdp& model) : m(model) {
        auto names = model.label_names();
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == "done") done_label_index = int(i);
    }

    bool is_terminal(const StateVector& s) const {
        if (done_label_index < 0) return false;
        return eval_bool(m.labels[std::size_t(done_label_index)].expr, s);
    }

    // action indices into m.action_names with a satisfied guard
    std::vector<int> enabled(const StateVector& s) const {
        std::vector<int> out;
        auto names = enabled_actions(m, s);
        for (const auto& n : names) {
            auto it = std::find(m.action_names.begin(), m.action_names.end(), n);
            out.push_back(int(it - m.action_names.begin()));
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    [[noreturn]] void dead_end(const StateVector& s) const {
        std::string repr = "(";
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i) repr += ",";
            repr += std::to_string(s[i]);
        }
        repr += ")";
        throw ModelError("dead-end state " + repr +
                         " has no enabled action and no 'done' label");
    }

    StateVector sample_step(const StateVector& s, int action, std::mt19937_64& rng,
                            double& reward_out) const {
        const std::string& name = m.action_names[std::size_t(action)];
        reward_out = rational_to_double(reward(m, s, name));
        auto dist = successor_distribution(m, s, name);
        double u = uniform01(rng);
        double acc = 0.0;
        for (const auto& [succ, p] : dist.entries) {
            acc += rational_to_double(p);
            if (u < acc) return succ;
        }
        return dist.entries.back().first;
    }
};

struct Transition {
    std::vector<double> x;
    int action = 0;
    double reward = 0.0;
    std::vector<double> x_next;
    std::vector<int> enabled_next;
    bool terminal = false;
};

int greedy_masked(const std::vector<double>& q, const std::vector<int>& allowed) {
    int best = allowed[0];
    for (int a : allowed)
        if (q[std::size_t(a)] > q[std::size_t(best)]) best = a;
    return best;
}

// Distinct batch indices in [0, size) via Floyd's sampling.
std::vector<std::size_t> sample_batch(std::mt19937_64& rng, std::size_t size,
                                      std::size_t batch) {
    std::unordered_set<std::size_t> chosen;
    std::vector<std::size_t> out;
    for (std::size_t i = size - batch; i < size; ++i) {
        std::size_t j = std::size_t(rng() % (i + 1));
        if (chosen.count(j)) j = i;
        chosen.insert(j);
        out.push_back(j);
    }
    return out;
}

}  // namespace

MlpPolicy make_initial_policy(const FactoredMdp& m, const std::vector<int>& hidden,
                              std::uint64_t seed) {
    std::mt19937_64 rng(mix_seed(seed, 0xC0AC71Full));
    MlpPolicy p;
    p.input_dim = int(m.dimension());
    p.action_names = m.action_names;
    p.normalization = minmax_normalization(m);
    std::size_t in = m.dimension();
    std::vector<std::size_t> widths;
    for (int h : hidden) widths.push_back(std::size_t(h));
    widths.push_back(m.action_names.size());
    for (std::size_t li = 0; li < widths.size(); ++li) {
        Layer l;
        bool last = li + 1 == widths.size();
        l.activation = last ? Activation::Linear : Activation::Relu;
        double scale = last ? 0.01 : std::sqrt(2.0 / double(in));
        l.weights.assign(widths[li], std::vector<double>(in, 0.0));
        l.bias.assign(widths[li], 0.0);
        for (auto& row : l.weights)
            for (auto& w : row) w = scale * normal01(rng);
        p.layers.push_back(std::move(l));
        in = widths[li];
    }
    return p;
}

TrainResult train(const FactoredMdp& m, const TrainConfig& cfg, const StopHook& stop) {
    cfg.validate();
    ModelEnv env(m);
    std::mt19937_64 rng(mix_seed(cfg.seed, 1));

    MlpPolicy online = make_initial_policy(m, cfg.hidden, cfg.seed);
    MlpPolicy target = online;

    std::vector<Transition> replay;
    replay.reserve(std::size_t(cfg.replay_capacity));
    std::size_t replay_next = 0;  // ring position once full

    TrainResult result;
    result.log.stop_reason = "max_epochs";
    double eps = cfg.epsilon_start;
    std::uint64_t steps = 0;
    ForwardCache cache;

    for (int episode = 0; episode < cfg.max_epochs; ++episode) {
        StateVector s = m.initial_state();
        double ep_return = 0.0;
        double loss_sum = 0.0;
        std::size_t loss_count = 0;
        int length = 0;
        std::string reason = "step_cap";

        for (int t = 0; t < cfg.max_episode_steps; ++t) {
            if (env.is_terminal(s)) {
                reason = "done";
                break;
            }
            auto allowed = env.enabled(s);
            if (allowed.empty()) env.dead_end(s);

            std::vector<double> x = normalize_state(online, s);
            int action;
            if (uniform01(rng) < eps) {
                action = allowed[std::size_t(rng() % allowed.size())];
            } else {
                auto q = forward_raw(online, x);
                action = greedy_masked(q, allowed);
            }
            double r = 0.0;
            StateVector next = env.sample_step(s, action, rng, r);
            ep_return += r;
            ++length;
            ++steps;
            eps = std::max(cfg.epsilon_min, eps * cfg.epsilon_decay);

            Transition tr;
            tr.x = std::move(x);
            tr.action = action;
            tr.reward = r;
            tr.x_next = normalize_state(online, next);
            tr.terminal = env.is_terminal(next);
            if (!tr.terminal) {
                tr.enabled_next = env.enabled(next);
                if (tr.enabled_next.empty()) env.dead_end(next);
            }
            if (replay.size() < std::size_t(cfg.replay_capacity)) {
                replay.push_back(std::move(tr));
            } else {
                replay[replay_next] = std::move(tr);
                replay_next = (replay_next + 1) % replay.size();
            }
            s = std::move(next);

            if (replay.size() >= std::size_t(cfg.batch_size)) {
                auto idx = sample_batch(rng, replay.size(), std::size_t(cfg.batch_size));
                auto grads = zero_grads(online);
                double batch_loss = 0.0;
                for (auto bi : idx) {
                    const Transition& b = replay[bi];
                    double y = b.reward;
                    if (!b.terminal) {
                        auto qt = forward_raw(target, b.x_next);
                        y += cfg.discount *
                             qt[std::size_t(greedy_masked(qt, b.enabled_next))];
                    }
                    auto q = forward_cached(online, b.x, cache);
                    double diff = q[std::size_t(b.action)] - y;
                    batch_loss += 0.5 * diff * diff;
                    std::vector<double> delta(q.size(), 0.0);
                    delta[std::size_t(b.action)] = diff / double(cfg.batch_size);
                    backward(online, cache, std::move(delta), grads);
                }
                apply_sgd(online, grads, cfg.learning_rate);
                loss_sum += batch_loss / double(cfg.batch_size);
                ++loss_count;
            }
            if (steps % std::uint64_t(cfg.target_update_interval) == 0) target = online;
        }
        if (reason == "step_cap" && env.is_terminal(s)) reason = "done";

        EpisodeStats st;
        st.episode = episode;
        st.episode_return = ep_return;
        st.length = std::max(length, 1);
        st.terminal_reason = reason;
        st.epsilon = eps;
        st.mean_loss = loss_count ? loss_sum / double(loss_count) : 0.0;
        result.log.episodes.push_back(st);

        if (stop.interval > 0 && stop.callback && (episode + 1) % stop.interval == 0) {
            if (stop.callback(online, episode)) {
                result.log.stop_reason = "callback";
                break;
            }
        }
    }
    result.log.total_steps = steps;
    result.policy = std::move(online);
    return result;
}

std::string TrainLog::to_text() const {
    std::ostringstream out;
    auto fmt = [](double v) {
        char buf[32];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, ptr);
    };
    for (const auto& e : episodes)
        out << "episode=" << e.episode << " return=" << fmt(e.episode_return)
            << " length=" << e.length << " epsilon=" << fmt(e.epsilon)
            << " loss=" << fmt(e.mean_loss) << " end=" << e.terminal_reason << "\n";
    out << "total_steps=" << total_steps << " stop=" << stop_reason << "\n";
    return out.str();
}

EvalResult evaluate(const MlpPolicy& p, const FactoredMdp& m, int episodes,
                    std::uint64_t seed, int max_episode_steps) {
    if (episodes < 1) throw Error("evaluate requires at least one episode");
    ModelEnv env(m);
    EvalResult res;
    for (int e = 0; e < episodes; ++e) {
        std::mt19937_64 rng(mix_seed(seed, std::uint64_t(e) + 1000));
        StateVector s = m.initial_state();
        EpisodeStats st;
        st.episode = e;
        st.terminal_reason = "step_cap";
        for (int t = 0; t < max_episode_steps; ++t) {
            if (env.is_terminal(s)) {
                st.terminal_reason = "done";
                break;
            }
            auto allowed = env.enabled(s);
            if (allowed.empty()) env.dead_end(s);
            auto q = forward_raw(p, normalize_state(p, s));
            int action = greedy_masked(q, allowed);
            double r = 0.0;
            s = env.sample_step(s, action, rng, r);
            st.episode_return += r;
            ++st.length;
        }
        if (st.terminal_reason == "step_cap" && env.is_terminal(s))
            st.terminal_reason = "done";
        st.length = std::max(st.length, 1);
        res.episodes.push_back(st);
        res.mean_return += st.episode_return;
    }
    res.mean_return /= double(episodes);
    return res;
}

double gradient_check(const MlpPolicy& p, const std::vector<GradCheckSample>& batch) {
    if (batch.empty()) throw Error("gradient check requires a nonempty batch");
    const double h = 1e-5;

    auto loss = [&](const MlpPolicy& net) {
        double acc = 0.0;
        for (const auto& s : batch) {
            auto q = forward_raw(net, s.input);
            double diff = q[std::size_t(s.action)] - s.target;
            acc += 0.5 * diff * diff;
        }
        return acc / double(batch.size());
    };

    auto grads = zero_grads(p);
    ForwardCache cache;
    for (const auto& s : batch) {
        auto q = forward_cached(p, s.input, cache);
        std::vector<double> delta(q.size(), 0.0);
        delta[std::size_t(s.action)] =
            (q[std::size_t(s.action)] - s.target) / double(batch.size());
        backward(p, cache, std::move(delta), grads);
    }

    MlpPolicy probe = p;
    double max_rel = 0.0;
    auto compare = [&](double analytic, double* param) {
        double orig = *param;
        *param = orig + h;
        double lp = loss(probe);
        *param = orig - h;
        double lm = loss(probe);
        *param = orig;
        double numeric = (lp - lm) / (2.0 * h);
        double denom = std::max(std::abs(analytic), std::abs(numeric));
        double err = denom > 1e-6 ? std::abs(analytic - numeric) / denom
                                  : std::abs(analytic - numeric);
        max_rel = std::max(max_rel, err);
    };
    for (std::size_t li = 0; li < probe.layers.size(); ++li) {
        auto& l = probe.layers[li];
        for (std::size_t r = 0; r < l.out_dim(); ++r) {
            for (std::size_t c = 0; c < l.in_dim(); ++c)
                compare(grads[li].w[r][c], &l.weights[r][c]);
            compare(grads[li].b[r], &l.bias[r]);
        }
    }
    return max_rel;
}

}  // namespace coactiv
