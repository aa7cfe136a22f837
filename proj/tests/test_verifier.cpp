#include "ringx/verifier.hpp"

#include <set>

#include "doctest.h"
#include "ringx/algorithms.hpp"

using namespace ringx;

namespace {

SystemState state_of(const std::string& text, int n, Model model) {
  return initial_state(parse_configuration(text, n), model);
}

std::set<std::string> solves_set(const UniversalityReport& rep) {
  std::set<std::string> out;
  for (const auto& e : rep.entries)
    if (e.status == AuditEntry::Status::AlgorithmSolves)
      out.insert(format_configuration(e.config));
  return out;
}

}  // namespace

TEST_CASE("reachable graph shapes") {
  Algorithm fp2 = builtin_algorithm("FP2");
  auto walker = build_reachable_graph(state_of("G,W", 6, Model::Fsync), fp2,
                                      1000);
  CHECK(walker.states.size() == 1);  // one canonical state with a self-loop
  CHECK(walker.edge_count == 1);
  CHECK(walker.edges[0][0].second == 0);

  auto idle = build_reachable_graph(state_of("G,.,.,G", 6, Model::Fsync), fp2,
                                    1000);
  CHECK(idle.states.size() == 1);
  CHECK(idle.edge_count == 0);

  // Regression values for the three-robot walker.
  Algorithm ap3 = builtin_algorithm("AP3");
  auto ssync = build_reachable_graph(state_of("W,W,G", 6, Model::Ssync), ap3,
                                     100000);
  CHECK(ssync.states.size() == 3);
  CHECK(ssync.edge_count == 3);
  auto async_graph = build_reachable_graph(state_of("W,W,G", 6, Model::Async),
                                           ap3, 100000);
  CHECK(async_graph.states.size() == 9);
  CHECK(async_graph.edge_count == 9);

  CHECK_THROWS_AS(
      build_reachable_graph(state_of("W,W,G", 6, Model::Async), ap3, 2),
      StateLimitExceeded);
}

TEST_CASE("perpetual verdicts") {
  Algorithm fp2 = builtin_algorithm("FP2");
  for (int n = 3; n <= 10; ++n) {
    Verdict v = check_perpetual_exploration(state_of("G,W", n, Model::Fsync),
                                            fp2);
    CHECK(v.holds());
  }

  // Disconnected robots never move: terminal failure with uncovered nodes.
  Verdict stuck =
      check_perpetual_exploration(state_of("G,.,.,G", 6, Model::Fsync), fp2);
  REQUIRE(!stuck.holds());
  CHECK(stuck.witness_kind == Verdict::WitnessKind::Terminal);
  CHECK(stuck.uncovered.size() == 4);
  CHECK(replay_witness(fp2, stuck));

  Algorithm ap3 = builtin_algorithm("AP3");
  Verdict xyx =
      check_perpetual_exploration(state_of("W,G,W", 9, Model::Ssync), ap3);
  REQUIRE(!xyx.holds());
  CHECK(replay_witness(ap3, xyx));

  // The same walker from a solvable class stays live under async scheduling.
  CHECK(check_perpetual_exploration(state_of("W,W,G", 5, Model::Async), ap3)
            .holds());
}

TEST_CASE("terminating verdicts") {
  Algorithm ft3 = builtin_algorithm("FT3");
  for (const char* c : {"W,W,W", "G,W,W", "W,W,G", "G,W,G"}) {
    for (int n : {3, 4, 5, 8}) {
      Verdict v = check_terminating_exploration(state_of(c, n, Model::Fsync),
                                                ft3);
      CHECK(v.holds());
    }
  }

  // The perpetual walker never terminates: a fair non-termination lasso.
  Algorithm fp2 = builtin_algorithm("FP2");
  Verdict lasso =
      check_terminating_exploration(state_of("G,W", 6, Model::Fsync), fp2);
  REQUIRE(!lasso.holds());
  CHECK(lasso.witness_kind == Verdict::WitnessKind::Lasso);
  CHECK(lasso.witness.steps.size() > lasso.cycle_begin);
  CHECK(replay_witness(fp2, lasso));

  Algorithm at4 = builtin_algorithm("AT4");
  Verdict v = check_terminating_exploration(
      state_of("W,W,G,G", 6, Model::Async), at4);
  CHECK(v.holds());
}

TEST_CASE("state limit reporting") {
  Algorithm ap3 = builtin_algorithm("AP3");
  CheckOptions opt;
  opt.state_limit = 3;
  CHECK_THROWS_AS(check_perpetual_exploration(
                      state_of("W,W,G", 8, Model::Async), ap3, opt),
                  StateLimitExceeded);
}

TEST_CASE("territory sets") {
  auto ts = find_independent_territory_set(parse_configuration("G,.,.,G,.,."));
  REQUIRE(ts);
  REQUIRE(ts->territories.size() == 2);
  CHECK(ts->territories[0] == std::pair<int, int>{0, 1});
  CHECK(ts->territories[1] == std::pair<int, int>{3, 4});

  auto wrap = find_independent_territory_set(parse_configuration("G,.,G,.,.,."));
  REQUIRE(wrap);
  CHECK(wrap->territories[0] == std::pair<int, int>{0, 5});
  CHECK(wrap->territories[1] == std::pair<int, int>{2, 3});

  // Adjacent robots violate the hypotheses.
  CHECK(!find_independent_territory_set(parse_configuration("G,W", 6)));
  // Mixed towers are declined outright.
  CHECK(!find_independent_territory_set(parse_configuration("GW,.,.,.", 6)));
  // A same-color tower on one node is confined to one territory.
  CHECK(find_independent_territory_set(parse_configuration("GG,.,.", 6)));
}

TEST_CASE("certificate catalog") {
  auto kind = [](std::optional<Certificate> c) {
    REQUIRE(c);
    return c->kind;
  };
  Palette p;

  CHECK(kind(classify_configuration(parse_configuration("G,.,.,G", 6),
                                    Model::Fsync, Objective::Perpetual)) ==
        Certificate::Kind::Territory);
  CHECK(kind(classify_configuration(parse_configuration("G,G", 6), Model::Fsync,
                                    Objective::Perpetual)) ==
        Certificate::Kind::PairSameColor);
  CHECK(kind(classify_configuration(parse_configuration("W,W", 8), Model::Async,
                                    Objective::Terminating)) ==
        Certificate::Kind::PairSameColor);

  // Same-color tower beside a third robot: confinement does not apply, the
  // tower lemma does (semi-synchronous schedulers only).
  Configuration tower_adj = parse_configuration("GG,W", 7);
  CHECK(kind(classify_configuration(tower_adj, Model::Ssync,
                                    Objective::Perpetual)) ==
        Certificate::Kind::SameColorTower);
  CHECK(!classify_configuration(tower_adj, Model::Fsync, Objective::Perpetual));

  CHECK(kind(classify_configuration(parse_configuration("G,.,.,.,W,.,.,.,W", 9),
                                    Model::Ssync, Objective::Perpetual)) ==
        Certificate::Kind::DistanceClass);
  auto d3 = classify_configuration(parse_configuration("G,W,.,.,W,.,.,.,.", 9),
                                   Model::Ssync, Objective::Perpetual);
  REQUIRE(d3);
  CHECK(d3->kind == Certificate::Kind::DistanceClass);
  CHECK(d3->longest_distance == 3);

  CHECK(kind(classify_configuration(parse_configuration("GW,.,W,.,.,.,.,.,.", 9),
                                    Model::Ssync, Objective::Perpetual)) ==
        Certificate::Kind::TowerDistance2);
  CHECK(kind(classify_configuration(parse_configuration("W,G,W", 9),
                                    Model::Ssync, Objective::Perpetual)) ==
        Certificate::Kind::SymmetricXYX);
  CHECK(kind(classify_configuration(parse_configuration("W,G,G,W", 8),
                                    Model::Ssync, Objective::Terminating)) ==
        Certificate::Kind::SymmetricClass);
  // Two monochromatic towers at distance two are already territory-confined;
  // an adjacent occupied node defeats confinement and leaves the tower lemma.
  CHECK(kind(classify_configuration(parse_configuration(".,GG,.,GG,.,.,.,.", 8),
                                    Model::Ssync, Objective::Terminating)) ==
        Certificate::Kind::Territory);
  CHECK(kind(classify_configuration(parse_configuration(".,GG,W,.,G,.,.,.", 8),
                                    Model::Ssync, Objective::Terminating)) ==
        Certificate::Kind::SameColorTower);

  // Below the lemma thresholds nothing fires.
  CHECK(!classify_configuration(parse_configuration("W,G,W", 8), Model::Ssync,
                                Objective::Perpetual));
  CHECK(!classify_configuration(parse_configuration("G,G", 5), Model::Fsync,
                                Objective::Perpetual));

  // Solvable classes stay uncertified.
  for (const char* c : {"W,W,G", "W,GW", "GW,G", "G,W"}) {
    Configuration config = parse_configuration(c, 9, p);
    CHECK(!classify_configuration(config, Model::Ssync, Objective::Perpetual));
  }
}

TEST_CASE("initial configuration enumeration") {
  Palette p;
  auto adjacent =
      enumerate_initial_configurations(6, 2, p, PlacementFilter::AdjacentOnly);
  std::set<std::string> texts;
  for (const auto& c : adjacent) texts.insert(format_configuration(c));
  CHECK(texts == std::set<std::string>{"G,G,.,.,.,.", "G,W,.,.,.,.",
                                       "W,W,.,.,.,."});

  CHECK(enumerate_initial_configurations(3, 1, Palette("G")).size() == 1);
  CHECK(enumerate_initial_configurations(9, 3, p).size() == 74);
  CHECK(enumerate_initial_configurations(6, 2, p).size() == 12);
  CHECK(enumerate_initial_configurations(6, 2, p, PlacementFilter::NoTowers)
            .size() == 9);

  // Canonical outputs are canonical and duplicate-free.
  auto all = enumerate_initial_configurations(7, 3, p);
  std::set<std::string> keys;
  for (const auto& c : all) {
    CHECK(canonicalize(c).first == c);
    CHECK(keys.insert(canonical_key(c)).second);
  }
}

TEST_CASE("universality audits") {
  Algorithm fp2 = builtin_algorithm("FP2");
  AuditOptions opt;
  opt.filter = PlacementFilter::NoTowers;
  auto rep = universality_audit(fp2, Model::Fsync, Objective::Perpetual,
                                {6, 7}, 2, opt);
  CHECK(rep.zero_discrepancy());
  CHECK(solves_set(rep) ==
        std::set<std::string>{"G,W,.,.,.,.", "G,W,.,.,.,.,."});
  CHECK(rep.count(AuditEntry::Status::AlgorithmSolves) == 2);
  for (const auto& e : rep.entries) {
    if (e.status == AuditEntry::Status::CertifiedUnsolvable) {
      REQUIRE(e.certificate);
      bool expected = e.certificate->kind == Certificate::Kind::Territory ||
                      e.certificate->kind == Certificate::Kind::PairSameColor;
      CHECK(expected);
    }
  }

  Algorithm ap3 = builtin_algorithm("AP3");
  auto rep3 = universality_audit(ap3, Model::Ssync, Objective::Perpetual, {9},
                                 3, AuditOptions{});
  CHECK(rep3.entries.size() == 74);
  CHECK(rep3.zero_discrepancy());
  CHECK(solves_set(rep3) ==
        std::set<std::string>{"G,G,W,.,.,.,.,.,.", "G,GW,.,.,.,.,.,.,.",
                              "G,W,W,.,.,.,.,.,.", "GW,W,.,.,.,.,.,.,."});

  // Terminating universality is deliberately out of the catalog's reach:
  // discrepancies are expected there.
  Algorithm ft3 = builtin_algorithm("FT3");
  AuditOptions t_opt;
  t_opt.filter = PlacementFilter::NoTowers;
  auto rep_t = universality_audit(ft3, Model::Fsync, Objective::Terminating,
                                  {6}, 3, t_opt);
  std::set<std::string> ft3_solves = solves_set(rep_t);
  CHECK(ft3_solves.count("G,W,G,.,.,.") == 1);
  CHECK(ft3_solves.count("G,W,W,.,.,.") == 1);
  CHECK(ft3_solves.count("W,W,W,.,.,.") == 1);
  CHECK(rep_t.count(AuditEntry::Status::Discrepancy) > 0);
}

TEST_CASE("audit parallelism is deterministic") {
  Algorithm ap3 = builtin_algorithm("AP3");
  AuditOptions serial;
  AuditOptions parallel;
  parallel.threads = 4;
  auto a = universality_audit(ap3, Model::Ssync, Objective::Perpetual, {7}, 3,
                              serial);
  auto b = universality_audit(ap3, Model::Ssync, Objective::Perpetual, {7}, 3,
                              parallel);
  REQUIRE(a.entries.size() == b.entries.size());
  for (size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(a.entries[i].status == b.entries[i].status);
    CHECK(format_configuration(a.entries[i].config) ==
          format_configuration(b.entries[i].config));
  }
}

TEST_CASE("verdicts are invariant under ring symmetries and color swap") {
  Algorithm ap3 = builtin_algorithm("AP3");
  Algorithm swapped = color_swapped(ap3);
  Configuration base = parse_configuration("W,W,G", 7);
  Verdict reference =
      check_perpetual_exploration(initial_state(base, Model::Ssync), ap3);
  for (int refl = 0; refl < 2; ++refl) {
    for (int shift : {1, 3}) {
      Configuration moved =
          transform_configuration(base, RingTransform{shift, refl != 0});
      Verdict v =
          check_perpetual_exploration(initial_state(moved, Model::Ssync), ap3);
      CHECK(v.holds() == reference.holds());
    }
  }
  Configuration recolored = color_swap_configuration(base, {1, 0});
  Verdict v = check_perpetual_exploration(
      initial_state(recolored, Model::Ssync), swapped);
  CHECK(v.holds() == reference.holds());

  Verdict bad_ref =
      check_perpetual_exploration(state_of("W,G,W", 9, Model::Ssync), ap3);
  Verdict bad_swapped = check_perpetual_exploration(
      initial_state(color_swap_configuration(parse_configuration("W,G,W", 9),
                                             {1, 0}),
                    Model::Ssync),
      swapped);
  CHECK(bad_ref.holds() == bad_swapped.holds());
}
