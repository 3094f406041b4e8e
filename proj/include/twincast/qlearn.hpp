#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "twincast/rng.hpp"

namespace twincast {

// Fully-connected net: ReLU hidden layers, linear output. Row-major weight
// matrices; output width is the action count.
struct QNet {
  std::vector<int> layers;                // e.g. {49, 512, 256, 128, 64, 10}
  std::vector<std::vector<double>> w;     // w[l]: layers[l+1] x layers[l]
  std::vector<std::vector<double>> bias;  // bias[l]: layers[l+1]

  static QNet init(std::vector<int> layer_sizes, Rng& rng);
  static QNet zeros_like(const QNet& other);

  int input_dim() const { return layers.front(); }
  int actions() const { return layers.back(); }
  std::vector<double> forward(std::span<const double> state) const;

  // Flat parameter view (weights then bias, layer by layer) for gradient
  // checking and optimizer updates.
  std::size_t param_count() const;
  double get_param(std::size_t i) const;
  void set_param(std::size_t i, double v);
};

// Training hyperparameters. Defaults are the production settings; the
// target-sync period and epsilon floor are implementation choices.
struct AgentConfig {
  double gamma = 0.95;
  double lr = 0.001;
  int batch = 32;
  int episodes = 300;
  int episode_len = 90;
  double eps0 = 1.0;
  double eps_decay = 0.995;
  double eps_min = 0.05;
  int target_sync_period = 50;
  int replay_capacity = 2000;
  int updates_per_step = 1;  // gradient steps per environment step
};

struct Transition {
  std::vector<double> s;
  int a = 1;  // 1-based action
  double r = 0.0;
  std::vector<double> s_next;
  bool terminal = false;
};

// FIFO ring of transitions, capacity-bounded.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity) : capacity_(capacity) {}
  void push(Transition t);
  std::size_t size() const { return data_.size(); }
  // Oldest first.
  const Transition& at(std::size_t i) const;
  std::vector<std::size_t> sample_indices(int batch, Rng& rng) const;

 private:
  int capacity_;
  std::size_t head_ = 0;  // index of the oldest element
  std::vector<Transition> data_;
};

// Epsilon-greedy action in 1..net.actions(); ties resolve to the smallest.
int select_action(const QNet& net, std::span<const double> state, double eps,
                  Rng& rng);

// y = r + gamma * Q_target(s', argmax_a Q_main(s', a)).
double ddqn_target(double r, double gamma, std::span<const double> s_next,
                   const QNet& main, const QNet& target);

// Mean-squared error over the batch targets, gradients on the taken actions
// only. Returns the loss and fills grad (same shape as main).
double loss_and_gradient(const QNet& main, const QNet& target,
                         std::span<const Transition* const> batch,
                         double gamma, QNet& grad);

// One plain gradient-descent step on a uniformly sampled batch. Returns
// std::nullopt when the buffer has fewer than cfg.batch transitions.
std::optional<double> train_step(QNet& main, const QNet& target,
                                 const ReplayBuffer& buffer,
                                 const AgentConfig& cfg, Rng& rng);

void sync_target(const QNet& main, QNet& target);

double epsilon_at(const AgentConfig& cfg, int episode);

// Weights file: one JSON header line (layer sizes, seed, training steps)
// followed by little-endian 64-bit floats.
void save_weights(const std::string& path, const QNet& net,
                  std::uint64_t seed, std::int64_t steps);
struct LoadedWeights {
  QNet net;
  std::uint64_t seed = 0;
  std::int64_t steps = 0;
};
LoadedWeights load_weights(const std::string& path);  // throws on damage

// Synthetic contextual bandit: states are centered uniforms, the optimal
// action is a deterministic bucketing of the first coordinate and the rest
// is noise. Reward decays linearly with the distance to the optimal action
// plus a bonus on the exact optimum, so argmax margins stay crisp.
struct ContextualBandit {
  int state_dim = 4;
  int actions = 5;
  double exact_bonus = 0.5;

  std::vector<double> sample_state(Rng& rng) const;
  int optimal_action(std::span<const double> state) const;
  double reward(std::span<const double> state, int action) const;
};

struct BanditTrainResult {
  QNet net;
  double greedy_accuracy = 0.0;          // on held-out states
  std::vector<double> episode_rewards;
};

// Full DDQN training loop on the bandit; evaluation over 500 held-out
// states drawn after training.
BanditTrainResult train_on_bandit(const ContextualBandit& env,
                                  const AgentConfig& cfg,
                                  const std::vector<int>& hidden,
                                  std::uint64_t seed);

}  // namespace twincast
