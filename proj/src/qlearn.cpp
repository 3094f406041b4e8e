#include "twincast/qlearn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace twincast {

QNet QNet::init(std::vector<int> layer_sizes, Rng& rng) {
  if (layer_sizes.size() < 2)
    throw std::invalid_argument("QNet: need at least input and output layers");
  QNet net;
  net.layers = std::move(layer_sizes);
  for (std::size_t l = 0; l + 1 < net.layers.size(); ++l) {
    const int fan_in = net.layers[l];
    const int fan_out = net.layers[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::vector<double> wl(static_cast<std::size_t>(fan_in) * fan_out);
    for (double& v : wl) v = rng.uniform(-limit, limit);
    net.w.push_back(std::move(wl));
    net.bias.emplace_back(static_cast<std::size_t>(fan_out), 0.0);
  }
  return net;
}

QNet QNet::zeros_like(const QNet& other) {
  QNet net;
  net.layers = other.layers;
  for (std::size_t l = 0; l < other.w.size(); ++l) {
    net.w.emplace_back(other.w[l].size(), 0.0);
    net.bias.emplace_back(other.bias[l].size(), 0.0);
  }
  return net;
}

std::vector<double> QNet::forward(std::span<const double> state) const {
  if (state.size() != static_cast<std::size_t>(input_dim()))
    throw std::invalid_argument("QNet::forward: state width mismatch");
  std::vector<double> act(state.begin(), state.end());
  for (std::size_t l = 0; l < w.size(); ++l) {
    const int in = layers[l];
    const int out = layers[l + 1];
    std::vector<double> next(static_cast<std::size_t>(out));
    for (int j = 0; j < out; ++j) {
      double z = bias[l][static_cast<std::size_t>(j)];
      const double* row = &w[l][static_cast<std::size_t>(j) * in];
      for (int i = 0; i < in; ++i) z += row[i] * act[static_cast<std::size_t>(i)];
      next[static_cast<std::size_t>(j)] =
          (l + 1 == w.size()) ? z : std::max(0.0, z);
    }
    act = std::move(next);
  }
  return act;
}

std::size_t QNet::param_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < w.size(); ++l) n += w[l].size() + bias[l].size();
  return n;
}

double QNet::get_param(std::size_t i) const {
  for (std::size_t l = 0; l < w.size(); ++l) {
    if (i < w[l].size()) return w[l][i];
    i -= w[l].size();
    if (i < bias[l].size()) return bias[l][i];
    i -= bias[l].size();
  }
  throw std::out_of_range("QNet::get_param");
}

void QNet::set_param(std::size_t i, double v) {
  for (std::size_t l = 0; l < w.size(); ++l) {
    if (i < w[l].size()) {
      w[l][i] = v;
      return;
    }
    i -= w[l].size();
    if (i < bias[l].size()) {
      bias[l][i] = v;
      return;
    }
    i -= bias[l].size();
  }
  throw std::out_of_range("QNet::set_param");
}

void ReplayBuffer::push(Transition t) {
  if (static_cast<int>(data_.size()) < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[head_] = std::move(t);
    head_ = (head_ + 1) % data_.size();
  }
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  return data_[(head_ + i) % data_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(int batch,
                                                      Rng& rng) const {
  std::vector<int> picks =
      rng.sample_without_replacement(static_cast<int>(data_.size()), batch);
  std::vector<std::size_t> out(picks.begin(), picks.end());
  return out;
}

int select_action(const QNet& net, std::span<const double> state, double eps,
                  Rng& rng) {
  const int actions = net.actions();
  if (eps > 0.0 && rng.uniform() < eps) return rng.uniform_int(1, actions);
  const std::vector<double> q = net.forward(state);
  int best = 0;
  for (int a = 1; a < actions; ++a)
    if (q[static_cast<std::size_t>(a)] > q[static_cast<std::size_t>(best)])
      best = a;
  return best + 1;
}

double ddqn_target(double r, double gamma, std::span<const double> s_next,
                   const QNet& main, const QNet& target) {
  const std::vector<double> q_main = main.forward(s_next);
  int best = 0;
  for (int a = 1; a < main.actions(); ++a)
    if (q_main[static_cast<std::size_t>(a)] > q_main[static_cast<std::size_t>(best)])
      best = a;
  const std::vector<double> q_target = target.forward(s_next);
  return r + gamma * q_target[static_cast<std::size_t>(best)];
}

double loss_and_gradient(const QNet& main, const QNet& target,
                         std::span<const Transition* const> batch,
                         double gamma, QNet& grad) {
  if (batch.empty()) throw std::invalid_argument("loss_and_gradient: empty batch");
  for (std::size_t l = 0; l < grad.w.size(); ++l) {
    std::fill(grad.w[l].begin(), grad.w[l].end(), 0.0);
    std::fill(grad.bias[l].begin(), grad.bias[l].end(), 0.0);
  }
  const std::size_t L = main.w.size();
  double loss = 0.0;
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  for (const Transition* t : batch) {
    // Forward pass keeping pre-activations per layer.
    std::vector<std::vector<double>> acts;  // acts[0] = input
    acts.emplace_back(t->s.begin(), t->s.end());
    for (std::size_t l = 0; l < L; ++l) {
      const int in = main.layers[l];
      const int out = main.layers[l + 1];
      std::vector<double> next(static_cast<std::size_t>(out));
      for (int j = 0; j < out; ++j) {
        double z = main.bias[l][static_cast<std::size_t>(j)];
        const double* row = &main.w[l][static_cast<std::size_t>(j) * in];
        for (int i = 0; i < in; ++i) z += row[i] * acts[l][static_cast<std::size_t>(i)];
        next[static_cast<std::size_t>(j)] = (l + 1 == L) ? z : std::max(0.0, z);
      }
      acts.push_back(std::move(next));
    }

    const double y =
        t->terminal ? t->r : ddqn_target(t->r, gamma, t->s_next, main, target);
    const int a_idx = t->a - 1;
    const double q_sa = acts[L][static_cast<std::size_t>(a_idx)];
    const double residual = q_sa - y;
    loss += residual * residual * inv_batch;

    // Backward pass: gradient flows through the taken action only.
    std::vector<double> delta(acts[L].size(), 0.0);
    delta[static_cast<std::size_t>(a_idx)] = 2.0 * residual * inv_batch;
    for (std::size_t l = L; l-- > 0;) {
      const int in = main.layers[l];
      const int out = main.layers[l + 1];
      std::vector<double> prev_delta(static_cast<std::size_t>(in), 0.0);
      for (int j = 0; j < out; ++j) {
        const double dj = delta[static_cast<std::size_t>(j)];
        if (dj == 0.0) continue;
        grad.bias[l][static_cast<std::size_t>(j)] += dj;
        double* grow = &grad.w[l][static_cast<std::size_t>(j) * in];
        const double* row = &main.w[l][static_cast<std::size_t>(j) * in];
        for (int i = 0; i < in; ++i) {
          grow[i] += dj * acts[l][static_cast<std::size_t>(i)];
          prev_delta[static_cast<std::size_t>(i)] += dj * row[i];
        }
      }
      if (l > 0) {
        // ReLU mask of the previous layer's activations.
        for (int i = 0; i < in; ++i)
          if (acts[l][static_cast<std::size_t>(i)] <= 0.0)
            prev_delta[static_cast<std::size_t>(i)] = 0.0;
      }
      delta = std::move(prev_delta);
    }
  }
  return loss;
}

std::optional<double> train_step(QNet& main, const QNet& target,
                                 const ReplayBuffer& buffer,
                                 const AgentConfig& cfg, Rng& rng) {
  if (buffer.size() < static_cast<std::size_t>(cfg.batch)) return std::nullopt;
  const auto idx = buffer.sample_indices(cfg.batch, rng);
  std::vector<const Transition*> batch;
  batch.reserve(idx.size());
  for (std::size_t i : idx) batch.push_back(&buffer.at(i));
  QNet grad = QNet::zeros_like(main);
  const double loss = loss_and_gradient(main, target, batch, cfg.gamma, grad);
  for (std::size_t l = 0; l < main.w.size(); ++l) {
    for (std::size_t i = 0; i < main.w[l].size(); ++i)
      main.w[l][i] -= cfg.lr * grad.w[l][i];
    for (std::size_t i = 0; i < main.bias[l].size(); ++i)
      main.bias[l][i] -= cfg.lr * grad.bias[l][i];
  }
  return loss;
}

void sync_target(const QNet& main, QNet& target) {
  target.layers = main.layers;
  target.w = main.w;
  target.bias = main.bias;
}

double epsilon_at(const AgentConfig& cfg, int episode) {
  return std::max(cfg.eps_min, cfg.eps0 * std::pow(cfg.eps_decay, episode));
}

void save_weights(const std::string& path, const QNet& net,
                  std::uint64_t seed, std::int64_t steps) {
  nlohmann::json header;
  header["format"] = "twincast-qnet";
  header["version"] = 1;
  header["layers"] = net.layers;
  header["seed"] = seed;
  header["steps"] = steps;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_weights: cannot open " + path);
  out << header.dump() << "\n";
  auto write_block = [&](const std::vector<double>& v) {
    for (double d : v) {
      // Little-endian 64-bit write.
      std::uint64_t bits;
      std::memcpy(&bits, &d, sizeof(bits));
      char buf[8];
      for (int i = 0; i < 8; ++i)
        buf[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
      out.write(buf, 8);
    }
  };
  for (std::size_t l = 0; l < net.w.size(); ++l) {
    write_block(net.w[l]);
    write_block(net.bias[l]);
  }
}

LoadedWeights load_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_weights: cannot open " + path);
  std::string header_line;
  if (!std::getline(in, header_line))
    throw std::runtime_error("load_weights: missing header");
  const nlohmann::json header = nlohmann::json::parse(header_line);
  if (header.value("format", "") != "twincast-qnet")
    throw std::runtime_error("load_weights: not a weights file");
  LoadedWeights out;
  out.seed = header.value("seed", std::uint64_t{0});
  out.steps = header.value("steps", std::int64_t{0});
  out.net.layers = header.at("layers").get<std::vector<int>>();
  auto read_block = [&](std::size_t count) {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) {
      char buf[8];
      if (!in.read(buf, 8))
        throw std::runtime_error("load_weights: truncated payload");
      std::uint64_t bits = 0;
      for (int k = 0; k < 8; ++k)
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[k]))
                << (8 * k);
      std::memcpy(&v[i], &bits, sizeof(double));
    }
    return v;
  };
  for (std::size_t l = 0; l + 1 < out.net.layers.size(); ++l) {
    const std::size_t in_dim = static_cast<std::size_t>(out.net.layers[l]);
    const std::size_t out_dim = static_cast<std::size_t>(out.net.layers[l + 1]);
    out.net.w.push_back(read_block(in_dim * out_dim));
    out.net.bias.push_back(read_block(out_dim));
  }
  return out;
}

std::vector<double> ContextualBandit::sample_state(Rng& rng) const {
  std::vector<double> s(static_cast<std::size_t>(state_dim));
  for (double& v : s) v = rng.uniform() - 0.5;
  return s;
}

int ContextualBandit::optimal_action(std::span<const double> state) const {
  const int bucket = 1 + static_cast<int>((state[0] + 0.5) * actions);
  return std::min(bucket, actions);
}

double ContextualBandit::reward(std::span<const double> state,
                                int action) const {
  const int d = std::abs(action - optimal_action(state));
  return (d == 0 ? exact_bonus : 0.0) + 1.0 - static_cast<double>(d) / actions;
}

BanditTrainResult train_on_bandit(const ContextualBandit& env,
                                  const AgentConfig& cfg,
                                  const std::vector<int>& hidden,
                                  std::uint64_t seed) {
  Rng rng = derive_rng(seed, RngStream::Agent);
  std::vector<int> layers;
  layers.push_back(env.state_dim);
  layers.insert(layers.end(), hidden.begin(), hidden.end());
  layers.push_back(env.actions);
  QNet main = QNet::init(layers, rng);
  QNet target = main;
  ReplayBuffer buffer(cfg.replay_capacity);

  BanditTrainResult result;
  int steps = 0;
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    const double eps = epsilon_at(cfg, ep);
    double ep_reward = 0.0;
    std::vector<double> s = env.sample_state(rng);
    for (int t = 0; t < cfg.episode_len; ++t) {
      const int a = select_action(main, s, eps, rng);
      const double r = env.reward(s, a);
      ep_reward += r;
      std::vector<double> s_next = env.sample_state(rng);
      // A bandit pull is a one-step episode, so every transition is
      // terminal and the target reduces to the reward.
      buffer.push({s, a, r, s_next, true});
      s = std::move(s_next);
      for (int u = 0; u < cfg.updates_per_step; ++u)
        train_step(main, target, buffer, cfg, rng);
      if (++steps % cfg.target_sync_period == 0) sync_target(main, target);
    }
    result.episode_rewards.push_back(ep_reward / cfg.episode_len);
  }

  int correct = 0;
  const int held_out = 500;
  for (int i = 0; i < held_out; ++i) {
    const std::vector<double> s = env.sample_state(rng);
    if (select_action(main, s, 0.0, rng) == env.optimal_action(s)) ++correct;
  }
  result.greedy_accuracy = static_cast<double>(correct) / held_out;
  result.net = std::move(main);
  return result;
}

}  // namespace twincast
