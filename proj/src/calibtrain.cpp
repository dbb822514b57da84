// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#include "catts/calibtrain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "catts/error.hpp"
#include "catts/rng.hpp"

namespace catts::calib {

namespace {

int answer_bin(double x, int answers) {
  const double scaled = std::floor(x * answers);
  return static_cast<int>(std::clamp(scaled, 0.0, static_cast<double>(answers - 1)));
}

}  // namespace

std::vector<SyntheticTask> make_tasks(const TaskConfig& config, std::uint64_t seed) {
  if (config.answers < 2) throw Error(Errc::Config, "synthetic tasks need at least two answers");
  Rng rng(seed);
  std::vector<SyntheticTask> tasks(config.num_tasks);
  for (auto& t : tasks) {
    t.answers = config.answers;
    t.answer = answer_bin(rng.uniform(), config.answers);
    const double centre = (t.answer + 0.5) / config.answers;
    if (rng.uniform() < config.clear_fraction) {
      const double v0 = centre + config.clear_jitter * rng.normal();
      const double v1 = centre + config.clear_jitter * rng.normal();
      t.features = {v0, v1, 0.0};
    } else {
      const double v0 = rng.uniform();
      const double v1 = rng.uniform();
      t.features = {v0, v1, 0.0};
    }
    t.features[2] = rng.uniform();
    t.noised = t.features;
    for (std::size_t i = 0; i < kSalientViews; ++i) t.noised[i] += config.noise_sigma * rng.normal();
  }
  return tasks;
}

TabularPolicy::TabularPolicy(const TaskConfig& tasks, double temperature)
    : answers_(tasks.answers),
      mean_bins_(static_cast<std::size_t>(tasks.answers)),
      edges_(tasks.disagreement_edges),
      buckets_(mean_bins_ * (edges_.size() + 1)),
      temperature_(temperature),
      logits_(buckets_ * static_cast<std::size_t>(answers_), 0.0) {
  if (!(temperature >= 0.0)) throw Error(Errc::Config, "temperature must be non-negative");
  if (!std::is_sorted(edges_.begin(), edges_.end())) {
    throw Error(Errc::Config, "disagreement edges must be ascending");
  }
}

TabularPolicy TabularPolicy::overconfident(const TaskConfig& tasks, double temperature,
                                           double certainty) {
  if (!(certainty > 1.0 / tasks.answers && certainty < 1.0)) {
    throw Error(Errc::Config, "initial certainty must lie in (1/m, 1)");
  }
  TabularPolicy p(tasks, temperature);
  const double scale = temperature > 0.0 ? temperature : 1.0;
  const double kappa = scale * std::log(certainty * (tasks.answers - 1) / (1.0 - certainty));
  const std::size_t per_mean = p.edges_.size() + 1;
  for (std::size_t b = 0; b < p.buckets_; ++b) p.logit(b, static_cast<int>(b / per_mean)) = kappa;
  return p;
}

std::size_t TabularPolicy::bucket_of(std::span<const double> features) const {
  const double mean = 0.5 * (features[0] + features[1]);
  const double gap = std::abs(features[0] - features[1]);
  const auto mean_bin = static_cast<std::size_t>(answer_bin(mean, answers_));
  const auto gap_bin = static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [&](double e) { return gap >= e; }));
  return mean_bin * (edges_.size() + 1) + gap_bin;
}

std::vector<double> TabularPolicy::probs(std::size_t bucket) const {
  const auto row = std::span<const double>(logits_).subspan(bucket * answers_, answers_);
  std::vector<double> p(row.size(), 0.0);
  const auto top = std::max_element(row.begin(), row.end());
  if (temperature_ == 0.0) {
    p[static_cast<std::size_t>(top - row.begin())] = 1.0;
    return p;
  }
  double z = 0.0;
  for (std::size_t a = 0; a < row.size(); ++a) {
    p[a] = std::exp((row[a] - *top) / temperature_);
    z += p[a];
  }
  for (double& x : p) x /= z;
  return p;
}

std::vector<Rollout> rollout_group(const TabularPolicy& policy, const SyntheticTask& task,
                                   std::size_t k, std::uint64_t seed, Exec exec) {
  if (k < 2) throw Error(Errc::Config, "a GRPO group needs at least two rollouts");
  const std::vector<double> p = policy.probs(policy.bucket_of(task.features));
  const std::vector<double> pn = policy.probs(policy.bucket_of(task.noised));
  std::vector<Rollout> out(k);
  for_each_index(k, exec, [&](std::size_t j) {
    Rng rng(derive_seed(seed, j));
    const auto a = rng.weighted_index(p);
    const auto an = rng.weighted_index(pn);
    out[j] = {static_cast<int>(a), static_cast<int>(an), p[a], pn[an]};
  });
  return out;
}

std::vector<RewardBreakdown> score_group(const SyntheticTask& task, std::span<const Rollout> group,
                                         const RewardParams& params, RewardMode mode) {
  static const FormatSpec envelope;
  const std::string truth = std::to_string(task.answer);
  std::vector<RewardBreakdown> out;
  out.reserve(group.size());
  for (const auto& r : group) {
    const std::string text = "Answer: " + std::to_string(r.answer);
    const int correct = r_output(*extract_answer(text, envelope), truth);
    if (mode == RewardMode::OutputOnly) {
      RewardBreakdown b;
      b.r_output = correct;
      b.total = total_reward(0.0, correct, 0);
      out.push_back(b);
    } else {
      out.push_back(score_rollout(r.s_orig, r.s_noised, correct, r_format(text, envelope), params));
    }
  }
  assign_advantages(out, params.epsilon);
  return out;
}

namespace {

double bucket_kl(const std::vector<double>& p, const std::vector<double>& ref) {
  double kl = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    if (p[a] > 0.0) kl += p[a] * std::log(p[a] / ref[a]);
  }
  return kl;
}

}  // namespace

double surrogate(const TabularPolicy& policy, const TabularPolicy& reference,
                 std::span<const GroupSample> batch, double beta_kl) {
  if (batch.empty()) return 0.0;
  double total = 0.0;
  for (const auto& g : batch) {
    const auto p = policy.probs(g.bucket);
    double score = 0.0;
    for (std::size_t j = 0; j < g.answers.size(); ++j) {
      score += g.advantages[j] * std::log(p[static_cast<std::size_t>(g.answers[j])]);
    }
    total += score / static_cast<double>(g.answers.size()) -
             beta_kl * bucket_kl(p, reference.probs(g.bucket));
  }
  return total / static_cast<double>(batch.size());
}

std::vector<double> surrogate_gradient(const TabularPolicy& policy, const TabularPolicy& reference,
                                       std::span<const GroupSample> batch, double beta_kl) {
  if (policy.temperature() <= 0.0) throw Error(Errc::Config, "gradients need temperature > 0");
  std::vector<double> grad(policy.parameters().size(), 0.0);
  if (batch.empty()) return grad;
  const auto m = static_cast<std::size_t>(policy.answers());
  const double inv_t = 1.0 / policy.temperature();
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  for (const auto& g : batch) {
    const auto p = policy.probs(g.bucket);
    const auto ref = reference.probs(g.bucket);
    double* row = grad.data() + g.bucket * m;
    const double inv_k = 1.0 / static_cast<double>(g.answers.size());
    // d log p_o / d z_a = (δ_ao − p_a) / T
    for (std::size_t j = 0; j < g.answers.size(); ++j) {
      const double w = g.advantages[j] * inv_k * inv_t * inv_batch;
      for (std::size_t a = 0; a < m; ++a) row[a] -= w * p[a];
      row[static_cast<std::size_t>(g.answers[j])] += w;
    }
    // d KL / d z_a = p_a (log p_a − log r_a − KL) / T
    const double kl = bucket_kl(p, ref);
    for (std::size_t a = 0; a < m; ++a) {
      const double log_ratio = p[a] > 0.0 ? std::log(p[a] / ref[a]) : 0.0;
      row[a] -= beta_kl * p[a] * (log_ratio - kl) * inv_t * inv_batch;
    }
  }
  return grad;
}

StepDiagnostics train_step(TabularPolicy& policy, const TabularPolicy& reference,
                           std::span<const GroupSample> batch, double mean_reward, double beta_kl,
                           double learning_rate) {
  StepDiagnostics d;
  d.mean_reward = mean_reward;
  for (const auto& g : batch) d.kl += bucket_kl(policy.probs(g.bucket), reference.probs(g.bucket));
  if (!batch.empty()) d.kl /= static_cast<double>(batch.size());
  d.objective = grpo_objective(mean_reward, std::max(0.0, d.kl), beta_kl);

  const std::vector<double> grad = surrogate_gradient(policy, reference, batch, beta_kl);
  for (double g : grad) {
    if (!std::isfinite(g)) throw Error(Errc::NonFiniteGradient, "surrogate gradient is not finite");
  }
  auto params = policy.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) params[i] += learning_rate * grad[i];
  return d;
}

double mean_kl(const TabularPolicy& policy, const TabularPolicy& reference,
               std::span<const SyntheticTask> tasks) {
  double total = 0.0;
  for (const auto& t : tasks) {
    const std::size_t b = policy.bucket_of(t.features);
    total += bucket_kl(policy.probs(b), reference.probs(b));
  }
  return tasks.empty() ? 0.0 : total / static_cast<double>(tasks.size());
}

Evaluation evaluate(const TabularPolicy& policy, std::span<const SyntheticTask> tasks) {
  Evaluation e;
  auto greedy = [&](std::span<const double> features, int truth, Condition condition) {
    const auto p = policy.probs(policy.bucket_of(features));
    const auto best = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
    return OutcomeRecord{p[static_cast<std::size_t>(best)], best == truth, condition};
  };
  for (const auto& t : tasks) {
    e.origin.push_back(greedy(t.features, t.answer, Condition::Origin));
    e.noised.push_back(greedy(t.noised, t.answer, Condition::Noised));
  }
  return e;
}

CalibrationReport report_for(const Evaluation& eval, std::size_t bins) {
  CalibrationReport r = calibration_report(eval.origin, bins);
  r.confidence_drop = confidence_drop(eval.origin, eval.noised);
  return r;
}

DemoResult run_demo(const DemoConfig& config, std::uint64_t seed, Exec exec) {
  const std::vector<SyntheticTask> tasks = make_tasks(config.tasks, seed);
  if (tasks.empty()) throw Error(Errc::Config, "no synthetic tasks");
  TabularPolicy policy =
      TabularPolicy::overconfident(config.tasks, config.temperature, config.init_certainty);
  const TabularPolicy reference = policy;

  DemoResult result;
  result.before = report_for(evaluate(policy, tasks), config.ece_bins);

  auto checkpoint = [&](std::size_t step, double mean_reward) {
    const Evaluation e = evaluate(policy, tasks);
    result.curve.push_back({step, mean_reward, ece(e.origin, config.ece_bins),
                            confidence_drop(e.origin, e.noised), accuracy(e.origin)});
  };
  checkpoint(0, 0.0);

  Rng sampler(splitmix64(seed));
  for (std::size_t step = 1; step <= config.steps; ++step) {
    std::vector<std::size_t> picks(config.batch);
    std::vector<std::uint64_t> seeds(config.batch);
    for (std::size_t i = 0; i < config.batch; ++i) {
      picks[i] = static_cast<std::size_t>(sampler.next() % tasks.size());
      seeds[i] = sampler.next();
    }
    std::vector<GroupSample> batch(config.batch);
    std::vector<double> reward_sums(config.batch, 0.0);
    for_each_index(config.batch, exec, [&](std::size_t i) {
      const SyntheticTask& task = tasks[picks[i]];
      const auto rollouts = rollout_group(policy, task, config.group, seeds[i]);
      const auto scored = score_group(task, rollouts, config.reward, config.mode);
      GroupSample& g = batch[i];
      g.bucket = policy.bucket_of(task.features);
      for (std::size_t j = 0; j < rollouts.size(); ++j) {
        g.answers.push_back(rollouts[j].answer);
        g.advantages.push_back(*scored[j].advantage);
        reward_sums[i] += scored[j].total;
      }
    });
    double mean_reward = 0.0;
    for (double s : reward_sums) mean_reward += s;
    mean_reward /= static_cast<double>(config.batch * config.group);

    train_step(policy, reference, batch, mean_reward, config.beta_kl, config.learning_rate);
    if (step % std::max<std::size_t>(1, config.eval_every) == 0 || step == config.steps) {
      checkpoint(step, mean_reward);
    }
  }
  result.after = report_for(evaluate(policy, tasks), config.ece_bins);
  return result;
}

}  // namespace catts::calib
