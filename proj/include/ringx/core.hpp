#pragma once

// Ring-world primitives: palettes, per-node color multisets, configurations,
// views, guarded rules, and the symmetry transforms everything else relies on.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ringx {

using ColorId = std::uint8_t;

constexpr int kMaxPalette = 4;
constexpr int kMaxRobots = 5;

// Raised on malformed user input (configuration strings, rule files, CLI args).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An ordered set of color letters. The order fixes canonicalization
// tie-breaks and the sort order of tower letters.
class Palette {
 public:
  Palette() : letters_("GW") {}
  explicit Palette(std::string letters);

  static Palette default_gw() { return Palette(); }

  int size() const { return static_cast<int>(letters_.size()); }
  char letter(ColorId c) const { return letters_.at(c); }
  std::optional<ColorId> find(char letter) const;
  ColorId require(char letter) const;

  bool operator==(const Palette&) const = default;

 private:
  std::string letters_;
};

// Multiset of robot colors occupying one node. Two robots of equal color on
// one node are indistinguishable, so only counts are kept.
class ColorMultiset {
 public:
  ColorMultiset() = default;

  void add(ColorId c, int m = 1);
  void remove(ColorId c);
  int count(ColorId c) const { return counts_[c]; }
  int size() const { return total_; }
  bool empty() const { return total_ == 0; }
  bool is_tower() const { return total_ >= 2; }
  bool contains(ColorId c) const { return counts_[c] > 0; }

  bool operator==(const ColorMultiset&) const = default;

  // Letters in palette order, e.g. "GW" for {G,W}; "" when empty.
  std::string letters(const Palette& p) const;

 private:
  std::array<std::uint8_t, kMaxPalette> counts_{};
  std::uint8_t total_ = 0;
};

// A run of nodes with no ring closure; used for declared initial patterns,
// configuration-class catalogs, and sub-configuration matching.
using SubConfiguration = std::vector<ColorMultiset>;

// Full ring of per-node multisets. Indices wrap modulo n; n >= 3.
struct Configuration {
  Palette palette;
  std::vector<ColorMultiset> nodes;

  int n() const { return static_cast<int>(nodes.size()); }
  int robot_count() const;
  const ColorMultiset& at(int i) const { return nodes[mod(i)]; }
  ColorMultiset& at(int i) { return nodes[mod(i)]; }
  int mod(int i) const {
    int n_ = n();
    return ((i % n_) + n_) % n_;
  }
  // Ring distance between node indices.
  int distance(int a, int b) const;

  bool operator==(const Configuration&) const = default;
};

// Node-index bijection of the ring: optionally reflect about v0 (i -> -i),
// then rotate by `shift` (i -> i + shift).
struct RingTransform {
  int shift = 0;
  bool reflected = false;

  int apply_index(int i, int n) const;
  RingTransform inverse(int n) const;
  bool operator==(const RingTransform&) const = default;
};

// One observation: own color plus the three surrounding multisets.
struct View {
  ColorId self_color = 0;
  ColorMultiset left;    // M_{i-1} in forward orientation
  ColorMultiset center;  // includes the observer
  ColorMultiset right;   // M_{i+1} in forward orientation

  bool symmetric() const { return left == right; }
  bool operator==(const View&) const = default;
};

// Guard of a rule: matched against a forward or backward view.
struct Guard {
  ColorId self_color = 0;
  ColorMultiset minus;  // side the rule's "left" movement points to
  ColorMultiset zero;   // includes self_color
  ColorMultiset plus;

  bool symmetric() const { return minus == plus; }
  bool matches(const View& v) const {
    return self_color == v.self_color && minus == v.left && zero == v.center &&
           plus == v.right;
  }
  Guard mirrored() const { return Guard{self_color, plus, zero, minus}; }
  bool operator==(const Guard&) const = default;
};

enum class Movement : std::uint8_t { Stay, TowardMinus, TowardPlus, Either };

struct Action {
  ColorId new_color = 0;
  Movement movement = Movement::Stay;
  bool operator==(const Action&) const = default;
};

struct Rule {
  std::string label;
  Guard guard;
  Action action;
};

struct Algorithm {
  std::string name;
  Palette palette;
  std::vector<Rule> rules;
  std::vector<SubConfiguration> initial_configs;
};

// --- configuration text grammar ---------------------------------------------
//
// Comma-separated node entries; "." is a free node, a string of palette
// letters is a tower multiset, ".^h" expands to h free nodes.

SubConfiguration parse_nodes(const std::string& text, const Palette& palette);
std::string format_nodes(const SubConfiguration& nodes, const Palette& palette);

Configuration parse_configuration(const std::string& text,
                                  std::optional<int> n = std::nullopt,
                                  const Palette& palette = Palette());
std::string format_configuration(const Configuration& config);

// Places a pattern at node `offset` of an n-ring (remaining nodes free).
Configuration place_on_ring(const SubConfiguration& pattern, int n,
                            int offset = 0, const Palette& palette = Palette());

// --- transforms --------------------------------------------------------------

Configuration transform_configuration(const Configuration& config,
                                      const RingTransform& t);
Configuration rotate_configuration(const Configuration& config, int shift);
Configuration reflect_configuration(const Configuration& config);
// `perm` maps old ColorId -> new ColorId and must be a bijection on the palette.
Configuration color_swap_configuration(const Configuration& config,
                                       const std::vector<ColorId>& perm);

// Lexicographically least representative over all n rotations x 2 reflections.
// Robots sort before free nodes; colors sort in palette order. The returned
// transform maps the input onto the canonical form.
std::pair<Configuration, RingTransform> canonicalize(
    const Configuration& config);

// Comparison encoding used by canonicalize; exposed for deterministic sorts.
std::string canonical_key(const Configuration& config);

// --- views and rule matching -------------------------------------------------

// Forward view (self, M_{i-1}, M_i, M_{i+1}) and backward view with the
// neighbor multisets swapped. Throws if no robot of that color is at `node`.
std::pair<View, View> robot_views(const Configuration& config, int node,
                                  ColorId self_color);

struct RuleMatch {
  int rule_index = -1;
  bool forward = false;
  bool backward = false;
};

// All rules matched by either view orientation; empty result = not enabled.
std::vector<RuleMatch> match_rules(const Algorithm& algorithm,
                                   const View& forward, const View& backward);

// --- validation ---------------------------------------------------------------

struct ValidationIssue {
  enum class Kind {
    SymmetricGuardDirectionalMove,
    ConflictingRules,
    ColorOutsidePalette,
    DuplicateLabel,
  };
  Kind kind;
  std::string detail;
};

std::vector<ValidationIssue> validate_algorithm(const Algorithm& algorithm);

// --- algorithm definition files -----------------------------------------------
//
// One rule per line:  LABEL : M-1 | M0 | M+1 :: COLOR, MOVE
// M0 carries the self color in parentheses, e.g. "G(W)" for a {G,W} tower
// observed by the W robot. MOVE is stay|left|right|either. Optional header
// lines: "name: X", "palette: G W", "init: W,W,G" (repeatable). '#' comments.

Algorithm parse_algorithm_text(const std::string& text);
Algorithm load_algorithm_file(const std::string& path);
std::string format_algorithm(const Algorithm& algorithm);

// True when `pattern` occurs as a consecutive run somewhere on the ring, in
// either orientation.
bool contains_subconfiguration(const Configuration& config,
                               const SubConfiguration& pattern);

}  // namespace ringx
