// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#include <algorithm>
#include <map>
#include <random>

#include "catts/error.hpp"
#include "catts/vote.hpp"
#include "doctest.h"

using namespace catts;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return Errc::Io;
}

void check_provenance_sums(const VoteTally& t) {
  std::map<std::string, double> sums;
  for (const auto& e : t.provenance()) sums[e.candidate] += e.delta;
  CHECK(sums.size() == t.scores().size());
  for (const auto& [k, s] : t.scores()) CHECK(sums[k] == doctest::Approx(s).epsilon(1e-12));
}

}  // namespace

TEST_CASE("internal_vote examples") {
  const std::vector<WeightedSample> a{{"A", 0.8}, {"B", 0.6}, {"A", 0.4}};
  const VoteTally t = internal_vote(a);
  CHECK(t.scores().size() == 2);
  CHECK(t.score("A") == doctest::Approx(1.2));
  CHECK(t.score("B") == doctest::Approx(0.6));
  check_provenance_sums(t);

  const std::vector<WeightedSample> single{{"A", 1.0}};
  CHECK(internal_vote(single).score("A") == 1.0);

  const std::vector<WeightedSample> eight(8, WeightedSample{"A", 0.5});
  CHECK(internal_vote(eight).score("A") == doctest::Approx(4.0));
  CHECK(code_of([] { internal_vote({}); }) == Errc::NoSamples);
}

TEST_CASE("normalize examples") {
  const std::vector<WeightedSample> s{{"A", 1.2}, {"B", 0.6}};
  const VoteTally n = normalize(internal_vote(s));
  CHECK(n.score("A") == doctest::Approx(0.666667).epsilon(1e-6));
  CHECK(n.score("B") == doctest::Approx(0.333333).epsilon(1e-6));
  CHECK(n.mass() == doctest::Approx(1.0).epsilon(1e-9));
  check_provenance_sums(n);

  VoteTally five;
  five.add(ModuleTag::Consistency, "A", 5.0);
  CHECK(normalize(five).score("A") == 1.0);
  CHECK(code_of([] { normalize(VoteTally{}); }) == Errc::ZeroMass);
}

TEST_CASE("merge_expert examples") {
  VoteTally t;
  t.add(ModuleTag::Consistency, "A", 0.6667);
  t.add(ModuleTag::Consistency, "B", 0.3333);
  const std::vector<BallotEntry> ballot{{"A", 0.7}, {"B", 0.3}};
  const VoteTally m = merge_expert(t, ballot, 0.5);
  CHECK(m.score("A") == doctest::Approx(1.0167).epsilon(1e-9));
  CHECK(m.score("B") == doctest::Approx(0.4833).epsilon(1e-9));
  check_provenance_sums(m);

  CHECK(merge_expert(t, ballot, 0.0).scores() == t.scores());

  VoteTally one;
  one.add(ModuleTag::Consistency, "A", 1.0);
  const std::vector<BallotEntry> wide{{"A", 0.5}, {"B", 0.5}};
  const VoteTally w = merge_expert(one, wide, 0.5);
  CHECK(w.score("A") == doctest::Approx(1.25));
  CHECK(w.score("B") == doctest::Approx(0.25));

  const std::vector<BallotEntry> missing{{"B", 1.0}};
  CHECK(code_of([&] { merge_expert(one, missing, 0.5); }) == Errc::BallotMismatch);
  const std::vector<BallotEntry> dup{{"A", 0.5}, {"A", 0.5}};
  CHECK(code_of([&] { merge_expert(one, dup, 0.5); }) == Errc::BallotMismatch);
  const std::vector<BallotEntry> heavy{{"A", 0.9}, {"B", 0.2}};
  CHECK(code_of([&] { merge_expert(one, heavy, 0.5); }) == Errc::UnnormalizedBallot);
  const std::vector<BallotEntry> near{{"A", 0.9995}};
  CHECK(merge_expert(one, near, 0.5).score("A") == doctest::Approx(1.49975));
}

TEST_CASE("add_weighted examples") {
  VoteTally t;
  t.add(ModuleTag::Consistency, "A", 1.0);
  const VoteTally r = add_weighted(t, "B", 0.5, ModuleTag::Reflection);
  CHECK(r.score("A") == 1.0);
  CHECK(r.score("B") == 0.5);
  CHECK(r.provenance().size() == 2);
  CHECK(r.provenance().back().tag == ModuleTag::Reflection);
  CHECK(add_weighted(t, "A", 0.5, ModuleTag::Check).score("A") == 1.5);
  CHECK(add_weighted(t, "A", 0.0, ModuleTag::Check) == t);
}

TEST_CASE("final_answer examples") {
  VoteTally t;
  t.add(ModuleTag::Consistency, "A", 1.5167);
  t.add(ModuleTag::Consistency, "B", 0.4833);
  CHECK(final_answer(t) == "A");

  VoteTally tie;
  tie.add(ModuleTag::Consistency, "B", 0.5);
  tie.add(ModuleTag::Consistency, "A", 0.5);
  CHECK(final_answer(tie) == "A");

  // Provenance count outranks lexicographic order.
  VoteTally counted;
  counted.add(ModuleTag::Check, "A", 0.5);
  counted.add(ModuleTag::Consistency, "B", 0.25);
  counted.add(ModuleTag::Consistency, "B", 0.25);
  CHECK(final_answer(counted) == "B");

  CHECK(code_of([] { final_answer(VoteTally{}); }) == Errc::EmptyTally);
}

TEST_CASE("property: internal_vote equals brute-force grouping") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> size(1, 64), label(0, 5);
  std::uniform_real_distribution<double> weight(1e-6, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<WeightedSample> samples(static_cast<std::size_t>(size(rng)));
    for (auto& s : samples) s = {std::string(1, static_cast<char>('A' + label(rng))), weight(rng)};
    const VoteTally t = internal_vote(samples);
    // Oracle: for each distinct label, scan the whole list.
    std::vector<std::string> labels;
    for (const auto& s : samples) labels.push_back(s.answer);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    REQUIRE(t.scores().size() == labels.size());
    for (const auto& l : labels) {
      double want = 0.0;
      for (const auto& s : samples) want += s.answer == l ? s.weight : 0.0;
      CHECK(t.score(l) == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: contributions are order-insensitive and conserve mass") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> w(0.05, 1.0);
  std::uniform_int_distribution<int> label(0, 3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<WeightedSample> samples(8);
    for (auto& s : samples) s = {std::string(1, static_cast<char>('A' + label(rng))), w(rng)};
    const VoteTally base = normalize(internal_vote(samples));
    std::vector<BallotEntry> ballot;
    double total = 0.0;
    for (const auto& [k, _] : base.scores()) {
      ballot.push_back({k, w(rng)});
      total += ballot.back().confidence;
    }
    for (auto& b : ballot) b.confidence /= total;
    const std::string refl(1, static_cast<char>('A' + label(rng)));
    const std::string chk(1, static_cast<char>('A' + label(rng)));
    const double t1 = 0.5, t2 = 0.5, t3 = 0.5;

    std::vector<int> order{0, 1, 2};
    std::vector<std::map<std::string, double>> outcomes;
    do {
      VoteTally t = base;
      for (int step : order) {
        if (step == 0) t = merge_expert(t, ballot, t1);
        if (step == 1) t = add_weighted(t, refl, t2, ModuleTag::Reflection);
        if (step == 2) t = add_weighted(t, chk, t3, ModuleTag::Check);
      }
      CHECK(t.mass() == doctest::Approx(1.0 + t1 + t2 + t3).epsilon(1e-9));
      check_provenance_sums(t);
      outcomes.push_back(t.scores());
    } while (std::next_permutation(order.begin(), order.end()));
    for (const auto& o : outcomes) {
      REQUIRE(o.size() == outcomes.front().size());
      for (const auto& [k, s] : o) CHECK(std::abs(s - outcomes.front().at(k)) <= 1e-12);
    }
  }
}

TEST_CASE("property: final_answer is scale invariant") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> w(0.01, 2.0), scale(1e-3, 1e3);
  for (int trial = 0; trial < 500; ++trial) {
    VoteTally t;
    for (char c = 'A'; c < 'F'; ++c) t.add(ModuleTag::Consistency, std::string(1, c), w(rng));
    const std::string before = final_answer(t);
    t.scale(scale(rng));
    CHECK(final_answer(t) == before);
  }
}
