#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "coactiv/model.hpp"
#include "coactiv/policy.hpp"

namespace coactiv {

// Minimal deep Q-learning: squared TD loss, uniform replay, plain SGD,
// periodically synced target network. Single-threaded and bit-reproducible
// for a fixed (model, config, seed) within one build.
struct TrainConfig {
    std::vector<int> hidden = {64, 64};
    int batch_size = 64;
    int replay_capacity = 20000;
    double epsilon_start = 1.0;
    double epsilon_min = 0.1;
    double epsilon_decay = 0.99999;  // multiplicative, per environment step
    double discount = 0.99;
    int target_update_interval = 1024;  // steps
    double learning_rate = 0.001;
    int max_epochs = 5000;  // one epoch = one episode
    int eval_episodes = 100;
    int max_episode_steps = 200;
    std::uint64_t seed = 0;

    void validate() const;
};

struct EpisodeStats {
    int episode = 0;
    double episode_return = 0.0;
    int length = 0;
    std::string terminal_reason;  // "done" or "step_cap"
    double epsilon = 1.0;
    double mean_loss = 0.0;
};

struct TrainLog {
    std::vector<EpisodeStats> episodes;
    std::uint64_t total_steps = 0;
    std::string stop_reason;  // "max_epochs" or "callback"

    std::string to_text() const;  // line-delimited records
};

struct TrainResult {
    MlpPolicy policy;
    TrainLog log;
};

// Optional early-stop hook, polled every `interval` episodes with the
// current greedy policy; return true to stop training.
struct StopHook {
    int interval = 0;  // 0 disables
    std::function<bool(const MlpPolicy&, int episode)> callback;
};

TrainResult train(const FactoredMdp& m, const TrainConfig& cfg,
                  const StopHook& stop = {});

// Greedy rollouts; per-episode RNG streams derive from (seed, episode) so
// results do not depend on execution order.
struct EvalResult {
    double mean_return = 0.0;
    std::vector<EpisodeStats> episodes;
};

EvalResult evaluate(const MlpPolicy& p, const FactoredMdp& m, int episodes,
                    std::uint64_t seed, int max_episode_steps = 200);

// --- Gradient checking ----------------------------------------------------

struct GradCheckSample {
    std::vector<double> input;  // normalized network input
    int action = 0;
    double target = 0.0;
};

// Analytic backpropagation of the batch squared loss vs central finite
// differences (step 1e-5); returns the max relative error over parameters.
double gradient_check(const MlpPolicy& p, const std::vector<GradCheckSample>& batch);

// Fresh random network for a model: min-max normalization from variable
// bounds, ReLU hidden layers, linear Q outputs.
MlpPolicy make_initial_policy(const FactoredMdp& m, const std::vector<int>& hidden,
                              std::uint64_t seed);

}  // namespace coactiv
