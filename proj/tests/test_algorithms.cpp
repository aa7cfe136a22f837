#include "ringx/algorithms.hpp"

#include <algorithm>
#include <set>

#include "doctest.h"
#include "ringx/semantics.hpp"

using namespace ringx;

namespace {

std::set<std::string> label_set(const std::vector<std::string>& labels) {
  return {labels.begin(), labels.end()};
}

std::string init_text(const Algorithm& alg, size_t i) {
  return format_nodes(alg.initial_configs[i], alg.palette);
}

}  // namespace

TEST_CASE("builtin catalog") {
  Algorithm fp2 = builtin_algorithm("FP2");
  CHECK(fp2.rules.size() == 2);
  CHECK(fp2.rules[0].label == "0GW");
  CHECK(fp2.rules[1].label == "0WG");
  REQUIRE(fp2.initial_configs.size() == 2);
  CHECK(init_text(fp2, 0) == "G,W");
  CHECK(init_text(fp2, 1) == "W,G");

  Algorithm ft3 = builtin_algorithm("FT3");
  CHECK(ft3.rules.size() == 5);
  CHECK(ft3.initial_configs.size() == 4);

  Algorithm ap3 = builtin_algorithm("AP3");
  CHECK(ap3.rules.size() == 4);
  CHECK(ap3.initial_configs.size() == 8);

  Algorithm at4 = builtin_algorithm("AT4");
  CHECK(at4.rules.size() == 6);
  CHECK(at4.initial_configs.size() == 6);

  CHECK_THROWS_AS(builtin_algorithm("XYZ"), ParseError);

  // Every builtin validates cleanly and its initials parse.
  for (const auto& name : builtin_algorithm_names()) {
    Algorithm alg = builtin_algorithm(name);
    CHECK(validate_algorithm(alg).empty());
    for (const auto& init : alg.initial_configs) CHECK(!init.empty());
  }
}

TEST_CASE("AP3 rules are a subset of AT4") {
  Algorithm ap3 = builtin_algorithm("AP3");
  Algorithm at4 = builtin_algorithm("AT4");
  for (const char* label : {"0GW", "0TW", "0TG"}) {
    const Rule* a = nullptr;
    const Rule* b = nullptr;
    for (const Rule& r : ap3.rules)
      if (r.label == label) a = &r;
    for (const Rule& r : at4.rules)
      if (r.label == label) b = &r;
    REQUIRE(a);
    REQUIRE(b);
    CHECK(a->guard == b->guard);
    CHECK(a->action == b->action);
  }
}

TEST_CASE("color swap is an involution and swaps initials") {
  Algorithm ft3 = builtin_algorithm("FT3");
  Algorithm swapped = color_swapped(ft3);
  std::set<std::string> inits;
  for (size_t i = 0; i < swapped.initial_configs.size(); ++i)
    inits.insert(init_text(swapped, i));
  CHECK(inits == std::set<std::string>{"G,G,G", "W,G,G", "G,G,W", "W,G,W"});
  CHECK(format_algorithm(color_swapped(swapped)) == format_algorithm(ft3));

  Algorithm at4s = color_swapped(builtin_algorithm("AT4"));
  std::set<std::string> at4_inits;
  for (size_t i = 0; i < at4s.initial_configs.size(); ++i)
    at4_inits.insert(init_text(at4s, i));
  CHECK(at4_inits.count("G,G,G,W") == 1);
  CHECK(validate_algorithm(at4s).empty());
}

TEST_CASE("configuration class catalogs") {
  CHECK(cpe_members().size() == 3);
  CHECK(cexp_members().size() == 8);
  CHECK(csym_members().size() == 7);
  CHECK(csol_members().size() == 10);
  CHECK(appendix_rules().size() == 16);

  // Every perpetual-exploration core appears among the exploration classes,
  // up to reflection.
  for (const SubConfiguration& pe : cpe_members()) {
    bool found = false;
    for (const SubConfiguration& exp : cexp_members()) {
      SubConfiguration rev(exp.rbegin(), exp.rend());
      if (pe == exp || pe == rev) found = true;
    }
    CHECK(found);
  }
}

TEST_CASE("exploration-class transition graph") {
  CexpGraph graph = cexp_transition_graph(appendix_rules());
  REQUIRE(graph.classes.size() == 4);
  CHECK(graph.class_names[0] == "G,W,W");
  CHECK(graph.class_names[1] == "W,G,G");
  CHECK(graph.class_names[2] == "W,GW");
  CHECK(graph.class_names[3] == "G,GW");

  auto has_edge = [&](int from, const std::string& rule, int to) {
    for (const CexpEdge& e : graph.edges)
      if (e.from == from && e.rule == rule && e.to == to) return true;
    return false;
  };
  CHECK(has_edge(0, "R2", 3));
  CHECK(has_edge(0, "R8", 2));
  CHECK(has_edge(0, "R15", 1));
  CHECK(has_edge(1, "R6", 3));
  CHECK(has_edge(1, "R10", 2));
  CHECK(has_edge(1, "R16", 0));
  CHECK(has_edge(2, "R4", 3));
  CHECK(has_edge(2, "R7", 0));
  CHECK(has_edge(2, "R9", 1));
  CHECK(has_edge(2, "R12", 2));
  CHECK(has_edge(2, "R14", 3));
  CHECK(has_edge(3, "R1", 0));
  CHECK(has_edge(3, "R3", 2));
  CHECK(has_edge(3, "R5", 1));
  CHECK(has_edge(3, "R11", 3));
  CHECK(has_edge(3, "R13", 2));

  // Rules whose guards never fire from the classes produce no edges.
  CexpGraph empty = cexp_transition_graph({});
  CHECK(empty.edges.empty());
}

TEST_CASE("rule cycles and displacements") {
  auto cycles = find_progressing_rule_cycles(appendix_rules());
  // The class graph over R1..R14 carries exactly the twenty simple cycles.
  CHECK(cycles.size() == 20);

  std::set<std::set<std::string>> progressing;
  for (const CycleAnalysis& c : cycles) {
    if (c.progressing())
      progressing.insert(
          std::set<std::string>(c.rule_labels.begin(), c.rule_labels.end()));
    CHECK(std::abs(c.net_displacement) <= 1);
  }
  std::set<std::set<std::string>> expected{{"R2", "R3", "R7"},
                                           {"R8", "R4", "R1"},
                                           {"R10", "R4", "R5"},
                                           {"R6", "R3", "R9"}};
  CHECK(progressing == expected);

  // The four-rule tour returns to its starting nodes.
  for (const CycleAnalysis& c : cycles) {
    auto labels = label_set(c.rule_labels);
    if (labels == std::set<std::string>{"R2", "R5", "R10", "R7"})
      CHECK(c.net_displacement == 0);
    if (labels == std::set<std::string>{"R11"}) CHECK(c.net_displacement == 0);
  }

  // Excluding nothing adds the R15/R16 cycles through the recolor edges.
  auto with_all = find_progressing_rule_cycles(appendix_rules(), {});
  CHECK(with_all.size() > cycles.size());
}

TEST_CASE("catalog export round-trips through the rule-file format") {
  for (const auto& name : builtin_algorithm_names()) {
    Algorithm alg = builtin_algorithm(name);
    Algorithm reparsed = parse_algorithm_text(format_algorithm(alg));
    CHECK(format_algorithm(reparsed) == format_algorithm(alg));
    CHECK(reparsed.rules.size() == alg.rules.size());
    CHECK(reparsed.initial_configs.size() == alg.initial_configs.size());
  }
}
