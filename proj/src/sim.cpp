#include "twincast/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "twincast/demand.hpp"
#include "twincast/features.hpp"
#include "twincast/log.hpp"

namespace twincast {

namespace {

constexpr double kMbit = 1.0e6;  // bits per Mb

// Modeled cost accounting. The metrics stream must be reproducible from
// (scenario, seed) alone, so the reported runtime is derived from operation
// counts at a nominal 1 Gflop/s rather than measured.
struct CostMeter {
  double flops = 0.0;

  void add_kmeans(int n, int lambda, int iterations, std::size_t dim) {
    flops += static_cast<double>(n) * lambda * (iterations + 1) *
             static_cast<double>(dim);
  }
  void add_dbscan(int n, std::size_t dim) {
    flops += static_cast<double>(n) * n * static_cast<double>(dim);
  }
  void add_demand(std::size_t rec, int groups) {
    flops += static_cast<double>(rec) * kSwipeBins * 5.0 * groups;
  }
  void add_solver(long long evals) { flops += 30.0 * static_cast<double>(evals); }

  double runtime_ms() const { return flops * 1.0e-6; }
};

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

// Behavior stream index: window w (0-based) and user u share nothing.
std::uint64_t behavior_index(int window, int user) {
  return (static_cast<std::uint64_t>(window) << 20) |
         static_cast<std::uint64_t>(user);
}

std::uint64_t cluster_index(int window, int lambda) {
  return (static_cast<std::uint64_t>(window + 1) << 16) |
         static_cast<std::uint64_t>(lambda);
}

}  // namespace

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Proposed: return "proposed";
    case Scheme::Wdt: return "wdt";
    case Scheme::DbscanFs: return "dbscan-fs";
    case Scheme::DtBbs: return "dt-bbs";
  }
  return "?";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  if (name == "proposed") return Scheme::Proposed;
  if (name == "wdt") return Scheme::Wdt;
  if (name == "dbscan-fs") return Scheme::DbscanFs;
  if (name == "dt-bbs") return Scheme::DtBbs;
  return std::nullopt;
}

VideoCatalog synthesize_catalog(const SystemConfig& cfg, Rng& rng) {
  VideoCatalog catalog;
  catalog.videos.resize(static_cast<std::size_t>(cfg.V));

  // Zipf(1) popularity over ranks, randomly assigned to ids.
  std::vector<double> pop(static_cast<std::size_t>(cfg.V));
  double norm = 0.0;
  for (int r = 0; r < cfg.V; ++r) {
    pop[static_cast<std::size_t>(r)] = 1.0 / (r + 1);
    norm += pop[static_cast<std::size_t>(r)];
  }
  for (double& p : pop) p /= norm;
  std::vector<int> rank_of = rng.sample_without_replacement(cfg.V, cfg.V);

  for (int v = 0; v < cfg.V; ++v) {
    Video& video = catalog.videos[static_cast<std::size_t>(v)];
    video.id = v + 1;
    video.type = rng.uniform_int(1, cfg.C);
    video.length = kVideoSeconds;
    video.popularity = pop[static_cast<std::size_t>(rank_of[static_cast<std::size_t>(v)])];
    video.layer_sizes.assign(kMaxLayer + 1,
                             std::vector<double>(kVideoSeconds, 0.0));
    for (int e = 0; e < kVideoSeconds; ++e) {
      video.layer_sizes[0][static_cast<std::size_t>(e)] =
          rng.uniform(0.5, 1.0) * kMbit;
      for (int l = 1; l <= kMaxLayer; ++l)
        video.layer_sizes[static_cast<std::size_t>(l)][static_cast<std::size_t>(e)] =
            rng.uniform(0.3, 0.8) * kMbit;
    }
  }
  return catalog;
}

void step_mobility(LatentUser& user, double dt, const Scenario& scen,
                   Rng& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_mobility: dt <= 0");
  const double dx = user.waypoint[0] - user.pos[0];
  const double dy = user.waypoint[1] - user.pos[1];
  const double dist = std::hypot(dx, dy);
  const double step = user.speed_mps * dt;
  if (dist <= step) {
    user.pos = user.waypoint;
    user.waypoint = {rng.uniform(0.0, scen.arena_w),
                     rng.uniform(0.0, scen.arena_h)};
    user.speed_mps =
        rng.uniform(scen.speed_min_kmh, scen.speed_max_kmh) / 3.6;
  } else {
    user.pos[0] += step * dx / dist;
    user.pos[1] += step * dy / dist;
  }
  user.pos[0] = std::clamp(user.pos[0], 0.0, scen.arena_w);
  user.pos[1] = std::clamp(user.pos[1], 0.0, scen.arena_h);
}

double path_loss_db(double distance_m, const Scenario& scen,
                    double shadow_db) {
  const double d = std::max(1.0, distance_m);
  return scen.pl_ref_db + scen.pl_exponent_x10 * std::log10(d) + shadow_db;
}

double channel_gain_linear(double distance_m, const Scenario& scen,
                           double shadow_db) {
  return std::pow(10.0, -path_loss_db(distance_m, scen, shadow_db) / 10.0);
}

double sinr_linear(double gain, const SystemConfig& cfg, const Scenario& scen) {
  const double noise_w = dbm_to_watt(scen.noise_dbm_hz) * cfg.B;
  return dbm_to_watt(scen.tx_power_dbm) * gain / noise_w;
}

BehaviorSample sample_user_behavior(LatentUser& user,
                                    std::span<const int> rec_list,
                                    const VideoCatalog& catalog,
                                    const SystemConfig& cfg,
                                    const Scenario& scen, Rng& rng) {
  BehaviorSample out;
  out.delivered.assign(static_cast<std::size_t>(cfg.C), 0);
  const double dt = cfg.T / cfg.F1;

  double sinr_sum = 0.0;
  for (int f = 0; f < cfg.F1; ++f) {
    step_mobility(user, dt, scen, rng);
    double best_gain = 0.0;
    int best_bs = 0;
    for (std::size_t b = 0; b < scen.bs.size(); ++b) {
      const double d = std::hypot(user.pos[0] - scen.bs[b][0],
                                  user.pos[1] - scen.bs[b][1]);
      const double gain = channel_gain_linear(
          d, scen, rng.normal(0.0, scen.shadow_sigma_db));
      if (gain > best_gain) {
        best_gain = gain;
        best_bs = static_cast<int>(b);
      }
    }
    user.serving_bs = best_bs;
    out.gains.push_back(best_gain);
    out.positions.push_back(user.pos);
    sinr_sum += sinr_linear(best_gain, cfg, scen);
  }
  out.mean_sinr = sinr_sum / cfg.F1;

  // Deliver F2 videos and realize swipe-or-complete per the latent hazard.
  std::vector<int> picks;
  if (!rec_list.empty()) {
    const int n = static_cast<int>(rec_list.size());
    if (n >= cfg.F2) {
      for (int i : rng.sample_without_replacement(n, cfg.F2))
        picks.push_back(rec_list[static_cast<std::size_t>(i)]);
    } else {
      for (int i = 0; i < cfg.F2; ++i)
        picks.push_back(rec_list[static_cast<std::size_t>(rng.uniform_int(0, n - 1))]);
    }
  } else {
    for (int i : rng.sample_without_replacement(catalog.size(), cfg.F2))
      picks.push_back(i + 1);
  }
  for (int id : picks) {
    const Video& video = catalog.by_id(id);
    out.delivered[static_cast<std::size_t>(video.type - 1)] += 1;
    const double theta =
        user.swipe_hazard[static_cast<std::size_t>(video.type - 1)];
    const double u = rng.uniform();
    double cum = 0.0;
    int bin = 0;
    for (int e = 1; e <= video.length; ++e) {
      cum += theta * std::pow(1.0 - theta, e - 1);
      if (u < cum) {
        bin = e;
        break;
      }
    }
    if (bin > 0) {
      // Timestamp inside (bin-1, bin] so ceiling recovers the bin.
      const double w = bin - rng.uniform();
      out.events.push_back({id, video.type, w});
    }
  }

  // Preference snapshots from the drifting latent vector.
  for (int f = 0; f < cfg.F2; ++f) {
    for (double& p : user.pref)
      p = std::clamp(p + rng.normal(0.0, 0.02), 0.0, 1.0);
    out.pref_samples.push_back(user.pref);
  }
  return out;
}

int elbow_lambda(std::span<const double> wcss) {
  if (wcss.size() < 3) return 1;
  int best = 1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < wcss.size(); ++i) {
    const double score = wcss[i - 1] - 2.0 * wcss[i] + wcss[i + 1];
    if (score > best_score) {
      best_score = score;
      best = static_cast<int>(i);
    }
  }
  return best + 1;
}

SimState init_sim(const SystemConfig& cfg, const Scenario& scen,
                  const QNet* agent) {
  const auto errs = validate_config(cfg);
  if (!errs.empty())
    throw std::invalid_argument("init_sim: invalid config: " + errs.front());
  if (scen.bs.empty())
    throw std::invalid_argument("init_sim: scenario needs at least one BS");
  if (scen.windows < 1)
    throw std::invalid_argument("init_sim: scenario needs at least one window");
  SimState st;
  st.cfg = cfg;
  st.scen = scen;
  Rng cat_rng = derive_rng(scen.seed, RngStream::Catalog);
  st.catalog = synthesize_catalog(cfg, cat_rng);
  st.twins.reserve(static_cast<std::size_t>(cfg.K));
  st.latents.reserve(static_cast<std::size_t>(cfg.K));
  for (int u = 0; u < cfg.K; ++u) {
    st.twins.push_back(UserTwin::make(u, cfg.C));
    Rng rng = derive_rng(scen.seed, RngStream::Workload, behavior_index(0, u));
    LatentUser lu;
    const auto& bs = scen.bs[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<int>(scen.bs.size()) - 1))];
    const double ang = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    const double rad = scen.placement_radius * std::sqrt(rng.uniform());
    lu.pos = {std::clamp(bs[0] + rad * std::cos(ang), 0.0, scen.arena_w),
              std::clamp(bs[1] + rad * std::sin(ang), 0.0, scen.arena_h)};
    lu.waypoint = {rng.uniform(0.0, scen.arena_w),
                   rng.uniform(0.0, scen.arena_h)};
    lu.speed_mps = rng.uniform(scen.speed_min_kmh, scen.speed_max_kmh) / 3.6;
    for (int c = 0; c < cfg.C; ++c)
      lu.swipe_hazard.push_back(rng.uniform(0.02, 0.25));
    for (int c = 0; c < cfg.C; ++c) lu.pref.push_back(rng.uniform());
    st.latents.push_back(std::move(lu));
  }
  st.user_sinr.assign(static_cast<std::size_t>(cfg.K), 1.0);
  st.user_group.assign(static_cast<std::size_t>(cfg.K), -1);
  st.agent = agent;
  return st;
}

namespace {

struct WindowOutcome {
  Partition partition;
  std::vector<GroupState> groups;
  std::vector<GroupContext> contexts;
  ReservationDecision decision;
  UtilityReport report;
  std::vector<int> versions;
  bool infeasible = false;
  int lambda = 1;
};

// Proportional fallback when the tangent lower bounds alone exceed the
// budget: spread the budget proportionally to the bounds (largest-remainder
// rounding, ties to the lower index).
std::vector<int> proportional_fallback(std::span<const int> lower,
                                       int budget) {
  const int n = static_cast<int>(lower.size());
  long long total = 0;
  for (int v : lower) total += v;
  std::vector<int> out(static_cast<std::size_t>(n), 0);
  if (total <= 0 || n == 0) return out;
  std::vector<std::pair<double, int>> rem;
  int used = 0;
  for (int g = 0; g < n; ++g) {
    const double share = static_cast<double>(budget) *
                         lower[static_cast<std::size_t>(g)] /
                         static_cast<double>(total);
    out[static_cast<std::size_t>(g)] = static_cast<int>(std::floor(share));
    used += out[static_cast<std::size_t>(g)];
    rem.push_back({share - std::floor(share), g});
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (int i = 0; i < budget - used && i < n; ++i)
    out[static_cast<std::size_t>(rem[static_cast<std::size_t>(i)].second)] += 1;
  return out;
}

// Delivered layer this window: the largest cumulative per-second layer rate
// the reserved bandwidth can carry.
int delivered_version(const SimState& st, const GroupState& group,
                      const GroupContext& ctx, int m_units) {
  if (group.rec_list.empty()) return 0;
  double seconds = 0.0;
  std::array<double, kMaxLayer + 1> layer_bits{};
  for (int id : group.rec_list) {
    const Video& v = st.catalog.by_id(id);
    seconds += v.length;
    for (int l = 0; l <= kMaxLayer; ++l)
      for (int e = 1; e <= v.length; ++e)
        layer_bits[static_cast<std::size_t>(l)] += v.layer_bits(l, e);
  }
  const double capacity = m_units * st.cfg.B * std::log2(1.0 + ctx.ell);
  double cum_rate = 0.0;
  int version = 0;
  for (int l = 0; l <= kMaxLayer; ++l) {
    cum_rate += layer_bits[static_cast<std::size_t>(l)] / seconds;
    if (l == 0) {
      version = 0;
      continue;
    }
    if (cum_rate <= capacity) version = l;
  }
  return version;
}

WindowOutcome evaluate_partition(const SimState& st, Partition partition,
                                 bool swipe_aware, bool use_bnb,
                                 CostMeter& meter) {
  WindowOutcome out;
  out.lambda = partition.groups();
  out.partition = std::move(partition);
  const auto members = partition_members(out.partition);
  const int l_bar = average_version(st.prev_versions);

  std::size_t rec_total = 0;
  for (std::size_t g = 0; g < members.size(); ++g) {
    std::vector<const UserTwin*> twin_ptrs;
    double sinr_sum = 0.0;
    for (int u : members[g]) {
      twin_ptrs.push_back(&st.twins[static_cast<std::size_t>(u)]);
      sinr_sum += st.user_sinr[static_cast<std::size_t>(u)];
    }
    std::span<const double> prev_pref;
    if (g < st.groups.size()) prev_pref = st.groups[g].pref;
    GroupProfile profile =
        abstract_group(twin_ptrs, prev_pref, st.catalog, st.cfg);

    GroupContext ctx;
    ctx.ell = sinr_sum / static_cast<double>(members[g].size());
    // Default sensitivities: one resource unit moves the sigmoid argument
    // by 2 (about 0.5 -> 0.88 at the threshold).
    ctx.xi = 2.0 / (st.cfg.B * std::log2(1.0 + ctx.ell));
    ctx.vartheta = 2.0 / st.cfg.omega;
    const auto rec = make_rec_entries(profile, st.catalog, swipe_aware);
    rec_total += rec.size();
    const DemandEstimate demand =
        predict_demand(rec, l_bar, st.cfg.mu, st.cfg.demand_mode);
    ctx.R = demand.R;
    ctx.O = demand.O;
    ctx.m_prev = g < st.prev_decision.m.size()
                     ? st.prev_decision.m[g]
                     : 0;
    ctx.n_prev = g < st.prev_decision.n.size()
                     ? st.prev_decision.n[g]
                     : 0;
    out.contexts.push_back(ctx);

    GroupState gs;
    gs.members = members[g];
    gs.pref = std::move(profile.pref);
    gs.rec_list = std::move(profile.rec_list);
    out.groups.push_back(std::move(gs));
  }
  meter.add_demand(rec_total, 1);

  const Instance instance = build_instance(out.contexts, st.cfg);
  const SolveResult solved =
      use_bnb ? branch_and_bound(instance) : fs_schedule(instance);
  meter.add_solver(solved.evals);
  out.infeasible = !solved.feasible;
  if (solved.feasible) {
    out.decision = solved.decision;
  } else {
    std::vector<int> lower_m, lower_n;
    for (const auto& t : instance.bw) lower_m.push_back(integral_lower_bound(t));
    for (const auto& t : instance.vm) lower_n.push_back(integral_lower_bound(t));
    out.decision.m = proportional_fallback(lower_m, instance.budget_m);
    out.decision.n = proportional_fallback(lower_n, instance.budget_n);
  }
  out.report = score_reservation(out.contexts, out.decision, st.cfg);
  for (std::size_t g = 0; g < out.groups.size(); ++g)
    out.versions.push_back(delivered_version(
        st, out.groups[g], out.contexts[g], out.decision.m[g]));
  return out;
}

}  // namespace

namespace {

WindowResult run_window_impl(SimState& st, std::optional<int> forced_lambda) {
  const SystemConfig& cfg = st.cfg;
  CostMeter meter;

  // Realize this window's behavior against the previous recommended lists,
  // then fold it into the twins.
  for (int u = 0; u < cfg.K; ++u) {
    Rng rng = derive_rng(st.scen.seed, RngStream::Workload,
                         behavior_index(st.window + 1, u));
    std::span<const int> rec;
    const int g = st.user_group[static_cast<std::size_t>(u)];
    if (g >= 0 && static_cast<std::size_t>(g) < st.groups.size())
      rec = st.groups[static_cast<std::size_t>(g)].rec_list;
    BehaviorSample sample = sample_user_behavior(
        st.latents[static_cast<std::size_t>(u)], rec, st.catalog, cfg,
        st.scen, rng);
    UserTwin& twin = st.twins[static_cast<std::size_t>(u)];
    ingest_window(twin, sample.gains, sample.positions, sample.events,
                  sample.pref_samples, cfg.F1, cfg.F2);
    apply_swipe_update(twin, swipe_counts(twin, sample.delivered), cfg.lambda);
    st.user_sinr[static_cast<std::size_t>(u)] = sample.mean_sinr;
  }

  const int max_lambda = std::min(cfg.max_clusters, cfg.K);
  const bool use_bnb = st.scen.scheme == Scheme::DtBbs;
  WindowOutcome outcome;

  if (st.scen.scheme == Scheme::Wdt) {
    // No twin-side swipe data: cluster on preferences and locations, elbow
    // cluster count, demand with zero swipe probability.
    const auto feats = build_features(st.twins, FeatureSet::PreferenceLocation,
                                      cfg.F1, cfg.F2, cfg.C);
    std::vector<double> wcss;
    std::vector<KMeansResult> runs;
    for (int lam = 1; lam <= max_lambda; ++lam) {
      Rng rng = derive_rng(st.scen.seed, RngStream::Clustering,
                           cluster_index(st.window, lam));
      runs.push_back(kmeans_cluster(feats, lam, 50, 1e-4, rng));
      meter.add_kmeans(cfg.K, lam, runs.back().iterations,
                       feats[0].data.size());
      wcss.push_back(runs.back().wcss_history.back());
    }
    const int lam = elbow_lambda(wcss);
    outcome = evaluate_partition(
        st, runs[static_cast<std::size_t>(lam - 1)].partition, false, false,
        meter);
  } else if (st.scen.scheme == Scheme::DbscanFs) {
    const auto feats =
        build_features(st.twins, FeatureSet::Full, cfg.F1, cfg.F2, cfg.C);
    std::vector<double> dists;
    for (std::size_t i = 0; i < feats.size(); ++i)
      for (std::size_t j = i + 1; j < feats.size(); ++j)
        dists.push_back(twin_distance(feats[i], feats[j]));
    std::sort(dists.begin(), dists.end());
    double eps = 1e-9;
    if (!dists.empty()) {
      const std::size_t at = static_cast<std::size_t>(
          st.scen.dbscan_eps_quantile * static_cast<double>(dists.size() - 1));
      eps = std::max(1e-9, dists[at]);
    }
    meter.add_dbscan(cfg.K, feats[0].data.size());
    Partition part = dbscan_cluster(feats, eps, st.scen.dbscan_min_pts);
    outcome = evaluate_partition(st, std::move(part), true, false, meter);
  } else {
    // Proposed / DT-BBS: cluster on the full twin features. The cluster
    // count comes from the trained agent when present, otherwise from a
    // one-step utility lookahead over every candidate count.
    const auto feats =
        build_features(st.twins, FeatureSet::Full, cfg.F1, cfg.F2, cfg.C);
    std::optional<int> pinned = forced_lambda;
    if (!pinned && st.agent != nullptr) {
      std::vector<double> state = summarize_features(st.twins);
      state.push_back(static_cast<double>(st.window));
      Rng greedy(0);
      pinned = select_action(*st.agent, state, 0.0, greedy);
    }
    if (pinned) {
      const int lam = std::clamp(*pinned, 1, max_lambda);
      Rng rng = derive_rng(st.scen.seed, RngStream::Clustering,
                           cluster_index(st.window, lam));
      KMeansResult run = kmeans_cluster(feats, lam, 50, 1e-4, rng);
      meter.add_kmeans(cfg.K, lam, run.iterations, feats[0].data.size());
      outcome =
          evaluate_partition(st, std::move(run.partition), true, use_bnb, meter);
    } else {
      bool have = false;
      for (int lam = 1; lam <= max_lambda; ++lam) {
        Rng rng = derive_rng(st.scen.seed, RngStream::Clustering,
                             cluster_index(st.window, lam));
        KMeansResult run = kmeans_cluster(feats, lam, 50, 1e-4, rng);
        meter.add_kmeans(cfg.K, lam, run.iterations, feats[0].data.size());
        WindowOutcome candidate = evaluate_partition(
            st, std::move(run.partition), true, use_bnb, meter);
        if (!have || candidate.report.u > outcome.report.u) {
          outcome = std::move(candidate);
          have = true;
        }
      }
    }
  }

  WindowResult result;
  result.metrics.window = st.window;
  result.metrics.scheme = st.scen.scheme;
  result.metrics.lambda_star = outcome.lambda;
  double brs = 0.0, vmrs = 0.0;
  for (double v : outcome.report.u_b) brs += v;
  for (double v : outcome.report.u_v) vmrs += v;
  result.metrics.brs = brs / static_cast<double>(outcome.report.u_b.size());
  result.metrics.vmrs = vmrs / static_cast<double>(outcome.report.u_v.size());
  result.metrics.boc =
      operation_cost(outcome.decision.m, {}, cfg.varpi1, cfg.varpi2);
  result.metrics.vmoc =
      operation_cost({}, outcome.decision.n, cfg.varpi1, cfg.varpi2);
  std::vector<int> m_prev, n_prev;
  for (const auto& ctx : outcome.contexts) {
    m_prev.push_back(ctx.m_prev);
    n_prev.push_back(ctx.n_prev);
  }
  result.metrics.brc =
      bandwidth_reconfig_cost(outcome.decision.m, m_prev, cfg.varpi3);
  result.metrics.vmrc =
      vm_reconfig_cost(outcome.decision.n, n_prev, cfg.varpi4);
  result.metrics.utility = outcome.report.u;
  result.metrics.runtime_ms = meter.runtime_ms();
  result.decision = outcome.decision;
  result.contexts = outcome.contexts;
  result.infeasible = outcome.infeasible;
  if (result.infeasible)
    log_at(LogLevel::Info, "window %d: infeasible lower bounds, fallback used",
           st.window);

  // Commit.
  st.groups = std::move(outcome.groups);
  std::fill(st.user_group.begin(), st.user_group.end(), -1);
  for (std::size_t g = 0; g < st.groups.size(); ++g)
    for (int u : st.groups[g].members)
      st.user_group[static_cast<std::size_t>(u)] = static_cast<int>(g);
  st.prev_decision = outcome.decision;
  st.prev_versions = outcome.versions;
  st.window += 1;
  return result;
}

}  // namespace

WindowResult run_window(SimState& st) {
  return run_window_impl(st, std::nullopt);
}

WindowResult run_window_forced(SimState& st, int lambda) {
  return run_window_impl(st, lambda);
}

std::vector<WindowMetrics> run_episode(const SystemConfig& cfg,
                                       const Scenario& scen,
                                       const QNet* agent) {
  SimState st = init_sim(cfg, scen, agent);
  std::vector<WindowMetrics> rows;
  rows.reserve(static_cast<std::size_t>(scen.windows));
  for (int w = 0; w < scen.windows; ++w)
    rows.push_back(run_window(st).metrics);
  return rows;
}

namespace {

std::string fmt_metric(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::string metrics_to_csv(std::span<const WindowMetrics> rows) {
  std::ostringstream os;
  os << "window,scheme,lambda_star,brs,vmrs,boc,vmoc,brc,vmrc,utility,"
        "runtime_ms\n";
  for (const WindowMetrics& m : rows) {
    os << m.window << ',' << scheme_name(m.scheme) << ',' << m.lambda_star
       << ',' << fmt_metric(m.brs) << ',' << fmt_metric(m.vmrs) << ','
       << fmt_metric(m.boc) << ',' << fmt_metric(m.vmoc) << ','
       << fmt_metric(m.brc) << ',' << fmt_metric(m.vmrc) << ','
       << fmt_metric(m.utility) << ',' << fmt_metric(m.runtime_ms) << '\n';
  }
  return os.str();
}

std::string metrics_to_json(std::span<const WindowMetrics> rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const WindowMetrics& m : rows) {
    arr.push_back({{"window", m.window},
                   {"scheme", scheme_name(m.scheme)},
                   {"lambda_star", m.lambda_star},
                   {"brs", m.brs},
                   {"vmrs", m.vmrs},
                   {"boc", m.boc},
                   {"vmoc", m.vmoc},
                   {"brc", m.brc},
                   {"vmrc", m.vmrc},
                   {"utility", m.utility},
                   {"runtime_ms", m.runtime_ms}});
  }
  return arr.dump(2) + "\n";
}

std::vector<SchemeSummary> bench_schemes(const SystemConfig& cfg,
                                         const Scenario& base,
                                         std::span<const std::uint64_t> seeds,
                                         const QNet* agent, int threads) {
  const std::vector<Scheme> schemes = {Scheme::Proposed, Scheme::Wdt,
                                       Scheme::DbscanFs, Scheme::DtBbs};
  struct Task {
    Scheme scheme;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (Scheme s : schemes)
    for (std::uint64_t seed : seeds) tasks.push_back({s, seed});
  std::vector<std::vector<WindowMetrics>> results(tasks.size());

  if (threads <= 0)
    threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(tasks.size())));

  std::mutex mu;
  std::size_t next = 0;
  auto worker = [&] {
    while (true) {
      std::size_t mine;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= tasks.size()) return;
        mine = next++;
      }
      Scenario scen = base;
      scen.scheme = tasks[mine].scheme;
      scen.seed = tasks[mine].seed;
      results[mine] = run_episode(cfg, scen, agent);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::vector<SchemeSummary> out;
  for (Scheme s : schemes) {
    SchemeSummary sum;
    sum.scheme = s;
    std::vector<double> cols[kMetricColumns];
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (tasks[i].scheme != s) continue;
      sum.episodes += 1;
      double seed_util = 0.0;
      for (const WindowMetrics& m : results[i]) {
        const double vals[kMetricColumns] = {
            static_cast<double>(m.lambda_star),
            m.brs, m.vmrs, m.boc, m.vmoc, m.brc, m.vmrc,
            m.utility, m.runtime_ms};
        for (int c = 0; c < kMetricColumns; ++c) cols[c].push_back(vals[c]);
        seed_util += m.utility;
        sum.windows += 1;
      }
      sum.seed_mean_utility.push_back(
          seed_util / static_cast<double>(results[i].size()));
    }
    for (int c = 0; c < kMetricColumns; ++c) {
      double mean = 0.0;
      for (double v : cols[c]) mean += v;
      mean /= static_cast<double>(cols[c].size());
      double var = 0.0;
      for (double v : cols[c]) var += (v - mean) * (v - mean);
      var /= static_cast<double>(cols[c].size());
      sum.mean[static_cast<std::size_t>(c)] = mean;
      sum.stddev[static_cast<std::size_t>(c)] = std::sqrt(var);
    }
    out.push_back(std::move(sum));
  }
  return out;
}

std::string bench_to_csv(std::span<const SchemeSummary> rows) {
  static const char* cols[kMetricColumns] = {
      "lambda_star", "brs",  "vmrs", "boc",    "vmoc",
      "brc",         "vmrc", "utility", "runtime_ms"};
  std::ostringstream os;
  os << "scheme,episodes,windows";
  for (const char* c : cols) os << ',' << c << "_mean," << c << "_std";
  os << '\n';
  for (const SchemeSummary& s : rows) {
    os << scheme_name(s.scheme) << ',' << s.episodes << ',' << s.windows;
    for (int c = 0; c < kMetricColumns; ++c)
      os << ',' << fmt_metric(s.mean[static_cast<std::size_t>(c)]) << ','
         << fmt_metric(s.stddev[static_cast<std::size_t>(c)]);
    os << '\n';
  }
  return os.str();
}

AgentTrainResult train_agent(const SystemConfig& cfg, const Scenario& base,
                             const AgentConfig& agent_cfg,
                             const std::vector<int>& hidden,
                             std::uint64_t seed) {
  Rng rng = derive_rng(seed, RngStream::Agent);
  const int state_dim = static_cast<int>(kSummaryLength) + 1;
  const int actions = std::min(cfg.max_clusters, cfg.K);
  std::vector<int> layers;
  layers.push_back(state_dim);
  layers.insert(layers.end(), hidden.begin(), hidden.end());
  layers.push_back(actions);
  QNet main = QNet::init(layers, rng);
  QNet target = main;
  ReplayBuffer buffer(agent_cfg.replay_capacity);

  AgentTrainResult result;
  std::int64_t steps = 0;
  for (int ep = 0; ep < agent_cfg.episodes; ++ep) {
    Scenario scen = base;
    scen.scheme = Scheme::Proposed;
    scen.seed = splitmix64(seed + static_cast<std::uint64_t>(ep));
    scen.windows = agent_cfg.episode_len;
    SimState st = init_sim(cfg, scen, nullptr);
    const double eps = epsilon_at(agent_cfg, ep);

    // The observation is the twin summary before the window runs, plus the
    // window index so successive states are distinguishable.
    auto observe = [&](const SimState& s) {
      std::vector<double> state = summarize_features(s.twins);
      state.push_back(static_cast<double>(s.window));
      return state;
    };
    std::vector<double> s_vec = observe(st);
    double ep_reward = 0.0;
    for (int w = 0; w < agent_cfg.episode_len; ++w) {
      const int a = select_action(main, s_vec, eps, rng);
      WindowResult res = run_window_forced(st, std::clamp(a, 1, actions));
      ep_reward += res.metrics.utility;
      std::vector<double> s_next = observe(st);
      buffer.push({s_vec, a, res.metrics.utility, s_next,
                   w + 1 == agent_cfg.episode_len});
      s_vec = std::move(s_next);
      train_step(main, target, buffer, agent_cfg, rng);
      if (++steps % agent_cfg.target_sync_period == 0)
        sync_target(main, target);
    }
    result.episode_mean_reward.push_back(ep_reward / agent_cfg.episode_len);
  }
  result.steps = steps;
  result.net = std::move(main);
  return result;
}

}  // namespace twincast
