// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <quadmath.h>
#include <sstream>
#include <string>
#include <vector>

#include "catts/calibtrain.hpp"
#include "catts/confidence.hpp"
#include "catts/error.hpp"
#include "catts/harness.hpp"
#include "catts/http_backend.hpp"
#include "catts/log.hpp"
#include "catts/metrics.hpp"
#include "catts/noisegen.hpp"
#include "catts/reward.hpp"
#include "catts/simulated.hpp"
#include "catts/vcd.hpp"
#include "catts/vote.hpp"
#include "scenarios.hpp"

using namespace catts;

namespace {

const std::filesystem::path kRoot(CATTS_SOURCE_DIR);

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

double rel_err(double got, double want) {
  if (got == want) return 0.0;
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

Backends sim(const Scenario& s) {
  auto b = std::make_shared<SimulatedBackend>(s);
  return {b, b};
}

bool tallies_close(const std::map<std::string, double>& a, const std::map<std::string, double>& b, double tol,
                   double* worst) {
  if (a.size() != b.size()) return false;
  for (const auto& [k, v] : a) {
    const auto it = b.find(k);
    if (it == b.end()) return false;
    *worst = std::max(*worst, std::abs(v - it->second));
  }
  return *worst <= tol;
}

// 1 --------------------------------------------------------------------------

Outcome equation_oracles() {
  constexpr int kTrials = 10000;
  Rng rng(20261015);
  std::map<std::string, double> worst;
  auto track = [&](const char* name, double err) { worst[name] = std::max(worst[name], err); };

  for (int t = 0; t < kTrials; ++t) {
    // Sequence confidence: mean over tokens of the negated mean top-k logprob.
    SequenceTrace trace;
    const std::size_t len = 1 + rng.next() % 30;
    const std::size_t depth = 1 + rng.next() % 5;
    for (std::size_t i = 0; i < len; ++i) {
      TokenTopK tok;
      double lp = -3.0 * rng.uniform() * rng.uniform();
      for (std::size_t d = 0; d < depth; ++d) {
        tok.logprobs.push_back(lp);
        lp -= 4.0 * rng.uniform();
      }
      trace.tokens.push_back(tok);
    }
    long double outer = 0.0L;
    for (const auto& tok : trace.tokens) {
      long double inner = 0.0L;
      for (double lp : tok.logprobs) inner += lp;
      outer += -inner / static_cast<long double>(tok.logprobs.size());
    }
    const double nmlp = static_cast<double>(outer / static_cast<long double>(len));
    track("confidence", rel_err(sequence_nmlp(trace), nmlp));
    track("confidence", rel_err(aggregate(trace, Aggregation::mean()).certainty, std::exp(-nmlp)));

    // Calibration reward.
    const double so = 1e-3 + (1.0 - 1e-3) * rng.uniform();
    const double sn = 1e-3 + (1.0 - 1e-3) * rng.uniform();
    const int out = static_cast<int>(rng.next() % 2);
    const double alpha = 0.01 + 2.0 * rng.uniform();
    const double beta = 0.01 + 10.0 * rng.uniform();
    const double want = alpha * std::tanh(beta * (so - sn)) + (out ? so : -so);
    track("calibration reward", rel_err(r_conf(so, sn, out, alpha, beta), want));

    // Weighted vote, normalization and expert merge.
    const std::size_t n = 1 + rng.next() % 32;
    const std::size_t pool = 1 + rng.next() % 6;
    std::vector<WeightedSample> samples;
    std::map<std::string, long double> sums;
    long double total = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string a(1, static_cast<char>('A' + rng.next() % pool));
      const double w = 1e-3 + (1.0 - 1e-3) * rng.uniform();
      samples.push_back({a, w});
    }
    for (const auto& s : samples) {
      sums[s.answer] += s.weight;
      total += s.weight;
    }
    const VoteTally internal = internal_vote(samples);
    for (const auto& [a, v] : sums) track("vote sums", std::abs(internal.score(a) - static_cast<double>(v)));
    const VoteTally norm = normalize(internal);
    std::vector<BallotEntry> ballot;
    long double ballot_total = 0.0L;
    for (const auto& [a, v] : sums) {
      ballot.push_back({a, rng.uniform() + 1e-3});
      ballot_total += ballot.back().confidence;
    }
    for (auto& b : ballot) b.confidence = static_cast<double>(b.confidence / ballot_total);
    const double tau1 = rng.uniform();
    const VoteTally merged = merge_expert(norm, ballot, tau1);
    for (const auto& b : ballot) {
      const double share = static_cast<double>(sums[b.candidate] / total);
      track("vote normalize", rel_err(norm.score(b.candidate), share));
      track("vote merge", rel_err(merged.score(b.candidate), share + tau1 * b.confidence));
    }

    // Contrastive decoding.
    CandidateScores cs;
    const std::size_t k = 1 + rng.next() % 6;
    for (std::size_t j = 0; j < k; ++j) {
      cs.candidates.push_back(std::string(1, static_cast<char>('a' + j)));
      cs.orig_logp.push_back(-6.0 * rng.uniform());
      cs.noised_logp.push_back(-6.0 * rng.uniform());
    }
    const double va = rng.uniform();
    const double vb = rng.uniform();
    const auto contrast = contrastive_scores(cs, va);
    double z = 0.0;
    for (double lp : cs.orig_logp) z += std::exp(lp);
    double pmax = 0.0;
    for (double lp : cs.orig_logp) pmax = std::max(pmax, std::exp(lp) / z);
    std::size_t best = k;
    double best_score = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double want_j = (1.0 + va) * cs.orig_logp[j] - va * cs.noised_logp[j];
      track("contrastive decoding", rel_err(contrast[j], want_j));
      if (std::exp(cs.orig_logp[j]) / z < vb * pmax) continue;
      if (best == k || want_j > best_score) best = j, best_score = want_j;
    }
    const VcdChoice choice = vcd_select(cs, va, vb);
    track("contrastive decoding", choice.answer == cs.candidates[best] ? 0.0 : 1.0);
    track("contrastive decoding", rel_err(choice.score, best_score));

    // KL divergence.
    const std::size_t m = 2 + rng.next() % 8;
    std::vector<double> p(m), q(m);
    double ps = 0.0, qs = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      p[i] = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
      q[i] = 1e-3 + rng.uniform();
      ps += p[i];
      qs += q[i];
    }
    if (ps == 0.0) p[0] = ps = 1.0;
    for (auto& x : p) x /= ps;
    for (auto& x : q) x /= qs;
    __float128 kl = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (p[i] > 0.0) kl += static_cast<__float128>(p[i]) * logq(static_cast<__float128>(p[i]) / q[i]);
    }
    track("KL divergence", rel_err(kl_divergence(p, q), static_cast<double>(kl)));

    // Group advantages.
    const std::size_t g = 1 + rng.next() % 16;
    std::vector<double> rewards(g);
    for (auto& r : rewards) r = rng.uniform() < 0.1 ? 1.0 : 3.0 * rng.normal();
    const double eps = rng.uniform() < 0.5 ? 0.0 : 1e-6;
    long double mean = 0.0L;
    for (double r : rewards) mean += r;
    mean /= static_cast<long double>(g);
    long double var = 0.0L;
    for (double r : rewards) var += (r - mean) * (r - mean);
    const long double sd = std::sqrt(var / static_cast<long double>(g));
    const auto adv = group_advantage(rewards, eps);
    double adv_sum = 0.0;
    for (std::size_t j = 0; j < g; ++j) {
      const double want_j = sd == 0.0L ? 0.0 : static_cast<double>((rewards[j] - mean) / (sd + eps));
      track("group advantages", rel_err(adv[j], want_j));
      adv_sum += adv[j];
    }
    track("advantage sums", std::abs(adv_sum));
  }

  const std::map<std::string, double> tolerance{
      {"confidence", 1e-9},         {"calibration reward", 1e-9}, {"vote sums", 1e-12},
      {"vote normalize", 1e-9},     {"vote merge", 1e-9},         {"contrastive decoding", 1e-9},
      {"KL divergence", 1e-9},      {"group advantages", 1e-9},   {"advantage sums", 1e-12}};
  Outcome o;
  for (const auto& [name, tol] : tolerance) {
    const double w = worst[name];
    if (!(w <= tol)) o.pass = false;
    o.detail += fmt("%s%s %.1e", o.detail.empty() ? "" : ", ", name.c_str(), w);
  }
  return o;
}

// 2 --------------------------------------------------------------------------

Outcome order_invariance() {
  double worst = 0.0;
  int mismatches = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto g = scenarios::random_question(seed);
    const auto backends = sim(g.scenario);
    RunConfig config;
    config.seed = seed;
    config.logprob_depth = 2;
    Schedule order{ModuleTag::Consistency, ModuleTag::Reflection, ModuleTag::Check};
    std::sort(order.begin(), order.end());
    std::optional<TraceRecord> ref;
    do {
      config.schedule = order;
      const auto t = run_question(g.records[0], config, backends, PromptLibrary::bundled());
      if (t.error) {
        ++mismatches;
        continue;
      }
      if (!ref) {
        ref = t;
        continue;
      }
      double w = 0.0;
      if (!tallies_close(t.tally.scores(), ref->tally.scores(), 1e-12, &w) || t.final_answer != ref->final_answer) {
        ++mismatches;
      }
      worst = std::max(worst, w);
    } while (std::next_permutation(order.begin(), order.end()));
  }
  return {mismatches == 0, fmt("50 scenarios x 6 orders, %d mismatches, max score divergence %.1e", mismatches, worst)};
}

// 3 --------------------------------------------------------------------------

Outcome conservation() {
  RunConfig config;
  const double want = 1.0 + config.tau1 + config.tau2 + config.tau3;
  std::vector<std::pair<std::vector<QuestionRecord>, Backends>> suites;
  for (std::uint64_t seed = 1000; seed < 1300; ++seed) {
    auto g = scenarios::random_question(seed);
    suites.push_back({g.records, sim(g.scenario)});
  }
  auto bench = scenarios::scaling_benchmark(100, 3);
  suites.push_back({bench.records, sim(bench.scenario)});
  for (const char* name : {"cubes", "oracle12"}) {
    const auto c = load_config(kRoot / "fixtures" / name / "config.json");
    suites.push_back({load_dataset(kRoot / "fixtures" / name / "dataset.jsonl").records, open_backends(c)});
  }

  std::size_t full = 0, runs = 0;
  double worst_full = 0.0, worst_any = 0.0;
  for (const auto& [records, backends] : suites) {
    for (const auto& t : run_records(records, config, backends, PromptLibrary::bundled())) {
      if (t.error) continue;
      ++runs;
      worst_any = std::max(worst_any, std::abs(t.tally.mass() - t.expected_mass(config)));
      const bool all_ran = std::all_of(t.steps.begin(), t.steps.end(), [](const ModuleStep& s) { return s.ran; }) &&
                           t.steps.size() == 3 && !t.ballot.empty() &&
                           t.reflected_answers.size() == config.reflection_samples;
      if (!all_ran) continue;
      ++full;
      worst_full = std::max(worst_full, std::abs(t.tally.mass() - want));
    }
  }
  const bool pass = full > 0 && worst_full <= 1e-9 && worst_any <= 1e-9;
  return {pass, fmt("%zu full runs at mass %.2f (max error %.1e); %zu runs match their executed-module mass "
                    "(max error %.1e)",
                    full, want, worst_full, runs, worst_any)};
}

// 4 --------------------------------------------------------------------------

Outcome worked_example() {
  const auto config = load_config(kRoot / "fixtures/cubes/config.json");
  const auto backends = open_backends(config);
  const auto record = load_dataset(kRoot / "fixtures/cubes/dataset.jsonl").records.at(0);
  const auto t = run_question(record, config, backends, open_prompts(config));
  if (t.error || t.steps.size() != 3) return {false, "run failed: " + t.error.value_or("wrong step count")};

  // Five "4" and three "6" samples of equal certainty, an even ballot at
  // τ1 = 0.5, then τ2 and τ3 both landing on "6".
  const std::vector<std::map<std::string, double>> expected{
      {{"4", 0.625 + 0.25}, {"6", 0.375 + 0.25}},
      {{"4", 0.875}, {"6", 0.625 + 0.5}},
      {{"4", 0.875}, {"6", 1.125 + 0.5}},
  };
  const std::vector<ModuleTag> order{ModuleTag::Consistency, ModuleTag::Reflection, ModuleTag::Check};
  double worst = 0.0;
  bool ok = true;
  std::vector<std::string> leaders;
  for (std::size_t i = 0; i < 3; ++i) {
    ok = ok && t.steps[i].module == order[i] && t.steps[i].ran;
    ok = tallies_close(t.steps[i].tally, expected[i], 1e-12, &worst) && ok;
    leaders.push_back(final_answer(VoteTally::restore(t.steps[i].tally, {})));
  }
  ok = ok && leaders[0] == "4" && leaders[0] != record.ground_truth;
  ok = ok && leaders[1] == "6" && t.vcd && t.vcd->answer == "6";
  ok = ok && t.final_answer == record.ground_truth && t.correct;
  return {ok, fmt("consistency -> %s (wrong), reflection -> %s, check -> %s, final %s (truth %s), "
                  "max tally error %.1e",
                  leaders[0].c_str(), leaders[1].c_str(), t.vcd ? t.vcd->answer.c_str() : "-",
                  t.final_answer.c_str(), record.ground_truth.c_str(), worst)};
}

// 5 --------------------------------------------------------------------------

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

Outcome scaling() {
  const auto g = scenarios::scaling_benchmark(200, 5);
  const auto backends = sim(g.scenario);
  RunConfig config;
  config.seed = 5;

  config.n = 32;
  std::vector<double> cert, correct;
  for (const auto& t : run_records(g.records, config, backends, PromptLibrary::bundled())) {
    for (const auto& s : t.samples) {
      cert.push_back(s.certainty);
      correct.push_back(s.answer && *s.answer == t.ground_truth ? 1.0 : 0.0);
    }
  }
  const double r = pearson(cert, correct);

  const auto result = run_scaling(g.records, config, backends, PromptLibrary::bundled());
  const auto& ours = result.fits.at("ca-tts");
  const auto& majority = result.fits.at("majority");
  if (!ours || !majority) return {false, "slope fit missing"};
  const bool pass = r >= 0.6 && ours->slope > majority->slope;
  return {pass, fmt("certainty/correctness correlation %.3f; slope CA-TTS %.2f vs majority %.2f points per doubling",
                    r, ours->slope, majority->slope)};
}

// 6 --------------------------------------------------------------------------

Outcome calibration_demo() {
  const calib::DemoConfig config;
  const auto r = calib::run_demo(config, 17);
  const double cd_before = r.before.confidence_drop.value_or(NAN);
  const double cd_after = r.after.confidence_drop.value_or(NAN);
  const double auc_before = r.before.auroc.value_or(NAN);
  const double auc_after = r.after.auroc.value_or(NAN);
  const bool pass = config.steps <= 500 && r.after.ece < r.before.ece && cd_after < 0.0 && cd_before >= -0.02 &&
                    auc_after >= auc_before;
  return {pass, fmt("%zu steps: ECE %.4f -> %.4f, CD %.4f -> %.4f, AUROC %.4f -> %.4f", config.steps, r.before.ece,
                    r.after.ece, cd_before, cd_after, auc_before, auc_after)};
}

// 7 --------------------------------------------------------------------------

Outcome metric_oracles() {
  Rng rng(7);
  int auroc_mismatch = 0;
  for (int set = 0; set < 100; ++set) {
    std::vector<OutcomeRecord> recs(200);
    for (auto& rec : recs) {
      rec.certainty = std::ceil(rng.uniform() * 20.0) / 20.0;
      rec.correct = rng.uniform() < rng.uniform() + 0.2 * rec.certainty;
    }
    double wins = 0.0, pos = 0.0, neg = 0.0;
    for (const auto& a : recs) {
      (a.correct ? pos : neg) += 1.0;
      if (!a.correct) continue;
      for (const auto& b : recs) {
        if (b.correct) continue;
        wins += a.certainty > b.certainty ? 1.0 : a.certainty == b.certainty ? 0.5 : 0.0;
      }
    }
    if (auroc(recs) != wins / (pos * neg)) ++auroc_mismatch;
  }

  // Three bins over (0, 1/3], (1/3, 2/3], (2/3, 1].
  const std::vector<OutcomeRecord> even{{0.2, false}, {0.3, true}, {0.5, true}, {0.6, false}, {0.9, true}, {1.0, true}};
  const double even_want = (0.25 + 0.05 + 0.05) / 3.0;
  const std::vector<OutcomeRecord> gap{{0.1, false}, {0.9, true}, {0.8, false}};
  const double gap_want = (1.0 * 0.1 + 2.0 * 0.35) / 3.0;
  const std::vector<OutcomeRecord> single{{0.5, true}, {0.5, true}, {0.5, false}, {0.5, true}};
  const double single_want = 0.25;
  const double ece_err = std::max({std::abs(ece(even, 3) - even_want), std::abs(ece(gap, 3) - gap_want),
                                   std::abs(ece(single, 3) - single_want)});

  double slope_err = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const double a = 100.0 * rng.uniform();
    const double b = 10.0 * rng.normal();
    std::vector<ScalingPoint> pts;
    for (int n : {1, 2, 4, 8, 16, 32}) pts.push_back({n, a + b * std::log2(static_cast<double>(n))});
    const auto fit = scaling_slope(pts);
    slope_err = std::max({slope_err, std::abs(fit.slope - b), std::abs(fit.intercept - a)});
  }
  const bool pass = auroc_mismatch == 0 && ece_err <= 1e-12 && slope_err <= 1e-9;
  return {pass, fmt("AUROC all-pairs mismatches %d/100; ECE fixture error %.1e; slope recovery error %.1e",
                    auroc_mismatch, ece_err, slope_err)};
}

// 8 --------------------------------------------------------------------------

Outcome determinism() {
  const auto base = std::filesystem::temp_directory_path() / "catts-acceptance";
  std::filesystem::remove_all(base);
  bool same = true;
  std::size_t bytes = 0;
  for (const char* name : {"cubes", "oracle12"}) {
    auto config = load_config(kRoot / "fixtures" / name / "config.json");
    const auto backends = open_backends(config);
    const auto prompts = open_prompts(config);
    std::string first;
    for (std::size_t inflight : {8u, 8u, 1u}) {
      config.max_inflight = inflight;
      const auto dir = base / name / std::to_string(inflight) / (first.empty() ? "a" : "b");
      std::filesystem::create_directories(dir);
      run_dataset(kRoot / "fixtures" / name / "dataset.jsonl", config, backends, prompts, dir);
      const auto traces = slurp(dir / "traces.jsonl") + slurp(dir / "summary.json");
      if (first.empty()) {
        first = traces;
        bytes += traces.size();
      } else {
        same = same && traces == first;
      }
    }
  }
  const auto data = kRoot / "tests/data/noise";
  const RasterImage img = read_pnm_file(data / "input.ppm");
  const SaliencyMap sal = saliency_from_image(read_pnm_file(data / "saliency.pgm"));
  const auto noised = write_pnm(apply_noise(img, sal, 64.0, 7));
  const auto golden = slurp(data / "golden_sigma64_seed7.ppm");
  const bool image_ok = std::string(noised.begin(), noised.end()) == golden;
  return {same && image_ok, fmt("dataset outputs identical across 3 runs each (%zu bytes): %s; noise golden: %s", bytes,
                                same ? "yes" : "no", image_ok ? "identical" : "differs")};
}

// 9 --------------------------------------------------------------------------

Outcome gradient_check() {
  using namespace calib;
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng(splitmix64(900 + s));
    TaskConfig cfg;
    cfg.answers = 2 + static_cast<int>(rng.next() % 3);
    cfg.disagreement_edges = {0.3};
    const double temperature = 0.5 + rng.uniform();
    TabularPolicy policy(cfg, temperature), reference(cfg, temperature);
    for (double& x : policy.parameters()) x = 2.0 * rng.normal();
    for (double& x : reference.parameters()) x = 2.0 * rng.normal();
    const double beta = rng.uniform();
    std::vector<GroupSample> batch;
    for (std::size_t g = 0, groups = 1 + rng.next() % 4; g < groups; ++g) {
      GroupSample gs;
      gs.bucket = rng.next() % policy.buckets();
      for (std::size_t j = 0, k = 2 + rng.next() % 6; j < k; ++j) {
        gs.answers.push_back(static_cast<int>(rng.next() % static_cast<std::uint64_t>(cfg.answers)));
        gs.advantages.push_back(rng.normal());
      }
      batch.push_back(gs);
    }
    const auto grad = surrogate_gradient(policy, reference, batch, beta);
    auto params = policy.parameters();
    constexpr double h = 1e-5;
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double keep = params[i];
      params[i] = keep + h;
      const double up = surrogate(policy, reference, batch, beta);
      params[i] = keep - h;
      const double down = surrogate(policy, reference, batch, beta);
      params[i] = keep;
      const double fd = (up - down) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - grad[i]) / std::max(1.0, std::abs(fd)));
    }
  }
  return {worst <= 1e-5, fmt("100 instances, max relative error %.2e", worst)};
}

// 10 -------------------------------------------------------------------------

Outcome protocol() {
  const auto data = kRoot / "tests/data/http";
  GenerationRequest req;
  req.images = {(kRoot / "tests/data/noise/input.ppm").string()};
  req.prompt = "How many cubes are visible? End with 'Answer: <answer>'.";
  req.sampling = {0.7, 20, 256, 42, 5};
  const auto body = build_request_body(req, "qwen2.5-vl-7b");
  const bool body_ok = body == nlohmann::json::parse(slurp(data / "request_image.json"));

  auto code = [](const std::string& text, int depth) -> std::optional<Errc> {
    try {
      parse_response(text, depth);
    } catch (const Error& e) {
      return e.code();
    }
    return std::nullopt;
  };
  const bool errors_ok = code(slurp(data / "response_malformed.json"), 1) == Errc::MalformedResponse &&
                         code("not json", 1) == Errc::MalformedResponse &&
                         code(slurp(data / "response_no_logprobs.json"), 1) == Errc::MissingLogprobs &&
                         code(slurp(data / "response_shallow.json"), 5) == Errc::MissingLogprobs &&
                         !code(slurp(data / "response_ok.json"), 5);

  // Every request goes to an in-process transport.
  int calls = 0;
  HttpConfig cfg;
  cfg.endpoint = "http://offline.invalid";
  cfg.model = "qwen2.5-vl-7b";
  HttpBackend backend(cfg, [&](const std::string&, const std::string& sent, const HttpHeaders&) {
    ++calls;
    return HttpReply{calls < 3 ? 503 : 200, calls < 3 ? "" : slurp(data / "response_ok.json")};
  }, [](double) {});
  const auto r = backend.generate(req);
  const bool retry_ok = calls == 3 && r.trace.tokens.size() == 3 && r.trace.tokens[0].logprobs.size() == 5;
  return {body_ok && errors_ok && retry_ok,
          fmt("request body %s; error mapping %s; retries %s; transport offline", body_ok ? "matches" : "differs",
              errors_ok ? "ok" : "wrong", retry_ok ? "ok" : "wrong")};
}

}  // namespace

int main() {
  set_log_level("off");
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "equation oracles", 10.0, equation_oracles},
      {2, "planner-order invariance", 30.0, order_invariance},
      {3, "tally conservation", 60.0, conservation},
      {4, "worked example", 5.0, worked_example},
      {5, "scaling slope", 120.0, scaling},
      {6, "calibration demo", 60.0, calibration_demo},
      {7, "metric oracles", 5.0, metric_oracles},
      {8, "determinism and golden files", 30.0, determinism},
      {9, "gradient check", 10.0, gradient_check},
      {10, "protocol conformance", 10.0, protocol},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.limit_s) {
      o.pass = false;
      o.detail += fmt("; over the %.0f s limit", c.limit_s);
    }
    failed += !o.pass;
    std::printf("%s %2d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
