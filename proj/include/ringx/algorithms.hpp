#pragma once

// Built-in algorithm catalog, the appendix rule set R1..R16, the named
// configuration classes, and the rule-cycle analysis over the exploration
// class transition graph.

#include <string>
#include <vector>

#include "ringx/core.hpp"

namespace ringx {

// FP2: fully synchronous perpetual exploration, two robots.
// FT3: fully synchronous terminating exploration, three robots.
// AP3: asynchronous perpetual exploration, three robots.
// AT4: asynchronous terminating exploration, four robots.
Algorithm builtin_algorithm(const std::string& name);
std::vector<std::string> builtin_algorithm_names();

// Either a builtin name or a rule-file path.
Algorithm resolve_algorithm(const std::string& ref);

// Swaps the two palette colors in guards, actions, and initial configurations.
Algorithm color_swapped(const Algorithm& algorithm);

// Appendix catalog R1..R16 over the default palette.
std::vector<Rule> appendix_rules();

// Named configuration classes (patterns over the default palette).
std::vector<SubConfiguration> cpe_members();   // perpetual-exploration cores
std::vector<SubConfiguration> cexp_members();  // exploration classes
std::vector<SubConfiguration> csym_members();  // symmetric unsolvable classes
std::vector<SubConfiguration> csol_members();  // solvable k=4 initials

// --- exploration-class transition graph ------------------------------------------
//
// Nodes are the four exploration classes up to reflection. An edge applies
// one rule to the class representative placed on a reference ring and lands
// in another class (possibly mirrored). Rule applications that leave the
// class set are recorded as exits.

struct CexpEdge {
  int from = 0;
  int to = -1;            // -1 for an exit edge
  std::string rule;
  bool mirrored = false;  // landed on the reflected representative
  int window_shift = 0;   // movement of the occupied window, in nodes
  SubConfiguration result;
};

struct CexpGraph {
  std::vector<SubConfiguration> classes;  // representatives
  std::vector<std::string> class_names;
  std::vector<CexpEdge> edges;            // exits included
};

CexpGraph cexp_transition_graph(const std::vector<Rule>& rules);

struct CycleAnalysis {
  std::vector<std::string> rule_labels;  // in traversal order
  std::vector<std::pair<std::string, std::string>>
      transition_sequence;               // (class name, applied rule)
  int net_displacement = 0;              // signed nodes per traversal
  bool progressing() const { return net_displacement != 0; }
};

// Enumerates all simple cycles of the class graph restricted to the appendix
// rules minus `exclusions`, reporting each cycle's net displacement.
std::vector<CycleAnalysis> find_progressing_rule_cycles(
    const std::vector<Rule>& catalog,
    const std::vector<std::string>& exclusions = {"R15", "R16"});

}  // namespace ringx
