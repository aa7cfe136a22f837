#include "ringx/core.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace ringx {

Palette::Palette(std::string letters) : letters_(std::move(letters)) {
  if (letters_.empty()) throw ParseError("palette must not be empty");
  if (static_cast<int>(letters_.size()) > kMaxPalette)
    throw ParseError("palette larger than supported maximum");
  for (size_t i = 0; i < letters_.size(); ++i) {
    char c = letters_[i];
    if (!std::isalpha(static_cast<unsigned char>(c)))
      throw ParseError("palette letters must be alphabetic");
    if (letters_.find(c, i + 1) != std::string::npos)
      throw ParseError(std::string("duplicate palette letter '") + c + "'");
  }
}

std::optional<ColorId> Palette::find(char letter) const {
  auto pos = letters_.find(letter);
  if (pos == std::string::npos) return std::nullopt;
  return static_cast<ColorId>(pos);
}

ColorId Palette::require(char letter) const {
  auto c = find(letter);
  if (!c) throw ParseError(std::string("unknown color letter '") + letter + "'");
  return *c;
}

void ColorMultiset::add(ColorId c, int m) {
  counts_[c] = static_cast<std::uint8_t>(counts_[c] + m);
  total_ = static_cast<std::uint8_t>(total_ + m);
}

void ColorMultiset::remove(ColorId c) {
  if (counts_[c] == 0) throw std::logic_error("removing absent color");
  --counts_[c];
  --total_;
}

std::string ColorMultiset::letters(const Palette& p) const {
  std::string out;
  for (int c = 0; c < p.size(); ++c)
    out.append(counts_[c], p.letter(static_cast<ColorId>(c)));
  return out;
}

int Configuration::robot_count() const {
  int k = 0;
  for (const auto& m : nodes) k += m.size();
  return k;
}

int Configuration::distance(int a, int b) const {
  int d = std::abs(mod(a) - mod(b));
  return std::min(d, n() - d);
}

int RingTransform::apply_index(int i, int n) const {
  int j = reflected ? (n - i % n) % n : i % n;
  return ((j + shift) % n + n) % n;
}

RingTransform RingTransform::inverse(int n) const {
  // reflected: i -> -(i - shift); plain: i -> i - shift.
  if (reflected) return RingTransform{shift, true};
  return RingTransform{((-shift) % n + n) % n, false};
}

// --- parsing -------------------------------------------------------------------

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

SubConfiguration parse_nodes(const std::string& text, const Palette& palette) {
  SubConfiguration nodes;
  for (const std::string& raw : split(text, ',')) {
    std::string entry = strip(raw);
    if (entry.empty()) throw ParseError("empty node entry in '" + text + "'");
    if (entry[0] == '.') {
      int repeat = 1;
      if (entry.size() > 1) {
        if (entry[1] != '^' || entry.size() < 3)
          throw ParseError("bad free-node entry '" + entry + "'");
        try {
          size_t used = 0;
          repeat = std::stoi(entry.substr(2), &used);
          if (used != entry.size() - 2) throw std::invalid_argument("");
        } catch (const std::exception&) {
          throw ParseError("bad repeat count in '" + entry + "'");
        }
        if (repeat < 1) throw ParseError("repeat count must be positive");
      }
      nodes.insert(nodes.end(), repeat, ColorMultiset{});
    } else {
      ColorMultiset m;
      for (char c : entry) m.add(palette.require(c));
      nodes.push_back(m);
    }
  }
  return nodes;
}

std::string format_nodes(const SubConfiguration& nodes, const Palette& palette) {
  std::string out;
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (i) out.push_back(',');
    out += nodes[i].empty() ? "." : nodes[i].letters(palette);
  }
  return out;
}

Configuration parse_configuration(const std::string& text, std::optional<int> n,
                                  const Palette& palette) {
  SubConfiguration nodes = parse_nodes(text, palette);
  if (n) {
    if (*n < static_cast<int>(nodes.size()))
      throw ParseError("n smaller than the number of listed nodes");
    nodes.resize(*n);
  }
  Configuration config{palette, std::move(nodes)};
  if (config.n() < 3) throw ParseError("ring size must be at least 3");
  if (config.robot_count() < 1) throw ParseError("configuration has no robots");
  if (config.robot_count() > kMaxRobots)
    throw ParseError("more robots than supported maximum");
  return config;
}

std::string format_configuration(const Configuration& config) {
  return format_nodes(config.nodes, config.palette);
}

Configuration place_on_ring(const SubConfiguration& pattern, int n, int offset,
                            const Palette& palette) {
  if (n < 3) throw ParseError("ring size must be at least 3");
  if (static_cast<int>(pattern.size()) > n)
    throw ParseError("pattern longer than ring");
  Configuration config{palette, std::vector<ColorMultiset>(n)};
  for (size_t i = 0; i < pattern.size(); ++i)
    config.at(offset + static_cast<int>(i)) = pattern[i];
  if (config.robot_count() < 1) throw ParseError("configuration has no robots");
  return config;
}

// --- transforms ----------------------------------------------------------------

Configuration transform_configuration(const Configuration& config,
                                      const RingTransform& t) {
  Configuration out{config.palette,
                    std::vector<ColorMultiset>(config.nodes.size())};
  int n = config.n();
  for (int i = 0; i < n; ++i) out.nodes[t.apply_index(i, n)] = config.nodes[i];
  return out;
}

Configuration rotate_configuration(const Configuration& config, int shift) {
  return transform_configuration(config, RingTransform{shift, false});
}

Configuration reflect_configuration(const Configuration& config) {
  return transform_configuration(config, RingTransform{0, true});
}

Configuration color_swap_configuration(const Configuration& config,
                                       const std::vector<ColorId>& perm) {
  int kappa = config.palette.size();
  if (static_cast<int>(perm.size()) != kappa)
    throw ParseError("color permutation size differs from palette");
  std::vector<bool> seen(kappa, false);
  for (ColorId c : perm) {
    if (c >= kappa || seen[c]) throw ParseError("not a palette permutation");
    seen[c] = true;
  }
  Configuration out = config;
  for (auto& node : out.nodes) {
    ColorMultiset m;
    for (int c = 0; c < kappa; ++c)
      if (int cnt = node.count(static_cast<ColorId>(c)))
        m.add(perm[c], cnt);
    node = m;
  }
  return out;
}

std::string canonical_key(const Configuration& config) {
  // Robots sort before free nodes, colors in palette order.
  std::string key;
  key.reserve(config.nodes.size() * 2);
  for (const auto& node : config.nodes) {
    if (node.empty()) {
      key.push_back('~');
    } else {
      for (int c = 0; c < config.palette.size(); ++c)
        key.append(node.count(static_cast<ColorId>(c)),
                   static_cast<char>('A' + c));
    }
    key.push_back(',');
  }
  return key;
}

std::pair<Configuration, RingTransform> canonicalize(
    const Configuration& config) {
  int n = config.n();
  std::optional<std::string> best;
  Configuration best_config = config;
  RingTransform best_t;
  for (int refl = 0; refl < 2; ++refl) {
    for (int shift = 0; shift < n; ++shift) {
      RingTransform t{shift, refl != 0};
      Configuration candidate = transform_configuration(config, t);
      std::string key = canonical_key(candidate);
      if (!best || key < *best) {
        best = std::move(key);
        best_config = std::move(candidate);
        best_t = t;
      }
    }
  }
  return {best_config, best_t};
}

// --- views and matching ----------------------------------------------------------

std::pair<View, View> robot_views(const Configuration& config, int node,
                                  ColorId self_color) {
  const ColorMultiset& center = config.at(node);
  if (!center.contains(self_color))
    throw std::invalid_argument("no robot of that color at the node");
  View fwd{self_color, config.at(node - 1), center, config.at(node + 1)};
  View bwd{self_color, config.at(node + 1), center, config.at(node - 1)};
  return {fwd, bwd};
}

std::vector<RuleMatch> match_rules(const Algorithm& algorithm,
                                   const View& forward, const View& backward) {
  std::vector<RuleMatch> matches;
  for (size_t i = 0; i < algorithm.rules.size(); ++i) {
    const Guard& g = algorithm.rules[i].guard;
    bool f = g.matches(forward);
    bool b = g.matches(backward);
    if (f || b) matches.push_back(RuleMatch{static_cast<int>(i), f, b});
  }
  return matches;
}

// --- validation -------------------------------------------------------------------

namespace {

bool multiset_within_palette(const ColorMultiset& m, int kappa) {
  for (int c = kappa; c < kMaxPalette; ++c)
    if (m.count(static_cast<ColorId>(c))) return false;
  return true;
}

// Outcomes of a rule as seen on its own guard view: (new color, movement with
// Either collapsed to both directions), as a canonical comparable set.
std::vector<std::pair<ColorId, int>> rule_outcomes_local(const Rule& r,
                                                         bool mirrored) {
  std::vector<std::pair<ColorId, int>> out;
  switch (r.action.movement) {
    case Movement::Stay:
      out.push_back({r.action.new_color, 0});
      break;
    case Movement::TowardMinus:
      out.push_back({r.action.new_color, mirrored ? +1 : -1});
      break;
    case Movement::TowardPlus:
      out.push_back({r.action.new_color, mirrored ? -1 : +1});
      break;
    case Movement::Either:
      out.push_back({r.action.new_color, -1});
      out.push_back({r.action.new_color, +1});
      break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<ValidationIssue> validate_algorithm(const Algorithm& algorithm) {
  std::vector<ValidationIssue> issues;
  int kappa = algorithm.palette.size();

  for (size_t i = 0; i < algorithm.rules.size(); ++i) {
    const Rule& r = algorithm.rules[i];
    if (r.guard.symmetric() && (r.action.movement == Movement::TowardMinus ||
                                r.action.movement == Movement::TowardPlus)) {
      issues.push_back({ValidationIssue::Kind::SymmetricGuardDirectionalMove,
                        "rule " + r.label +
                            " has a symmetric guard with a directional move"});
    }
    bool colors_ok = r.guard.self_color < kappa &&
                     r.action.new_color < kappa &&
                     multiset_within_palette(r.guard.minus, kappa) &&
                     multiset_within_palette(r.guard.zero, kappa) &&
                     multiset_within_palette(r.guard.plus, kappa);
    if (!colors_ok) {
      issues.push_back({ValidationIssue::Kind::ColorOutsidePalette,
                        "rule " + r.label + " uses colors outside the palette"});
    }
    if (!r.guard.zero.contains(r.guard.self_color)) {
      issues.push_back({ValidationIssue::Kind::ColorOutsidePalette,
                        "rule " + r.label + " self color missing from M0"});
    }
    for (size_t j = 0; j < i; ++j) {
      if (algorithm.rules[j].label == r.label) {
        issues.push_back({ValidationIssue::Kind::DuplicateLabel,
                          "duplicate rule label " + r.label});
        break;
      }
    }
  }

  // Two rules conflict when some view pair matches both but the resolved
  // outcomes differ. Guards are concrete multisets, so this happens exactly
  // when the guards are equal or mirror images.
  for (size_t i = 0; i < algorithm.rules.size(); ++i) {
    for (size_t j = i + 1; j < algorithm.rules.size(); ++j) {
      const Rule& a = algorithm.rules[i];
      const Rule& b = algorithm.rules[j];
      bool same = a.guard == b.guard;
      bool mirror = a.guard == b.guard.mirrored();
      if (!same && !mirror) continue;
      auto oa = rule_outcomes_local(a, false);
      auto ob = rule_outcomes_local(b, same ? false : true);
      if (oa != ob) {
        issues.push_back(
            {ValidationIssue::Kind::ConflictingRules,
             "rules " + a.label + " and " + b.label +
                 " match the same views with different actions"});
      }
    }
  }

  for (const auto& init : algorithm.initial_configs) {
    for (const auto& node : init) {
      if (!multiset_within_palette(node, kappa)) {
        issues.push_back({ValidationIssue::Kind::ColorOutsidePalette,
                          "initial configuration uses colors outside palette"});
      }
    }
  }
  return issues;
}

// --- algorithm files -----------------------------------------------------------------

namespace {

ColorMultiset parse_guard_side(const std::string& text, const Palette& palette,
                               const std::string& where) {
  std::string entry = strip(text);
  if (entry.empty()) throw ParseError("empty guard entry in " + where);
  ColorMultiset m;
  if (entry == ".") return m;
  for (char c : entry) m.add(palette.require(c));
  return m;
}

// M0 grammar: letters with exactly one parenthesized self letter, e.g. "(G)",
// "G(W)", "GW(W)".
std::pair<ColorMultiset, ColorId> parse_guard_center(const std::string& text,
                                                     const Palette& palette,
                                                     const std::string& where) {
  std::string entry = strip(text);
  ColorMultiset m;
  std::optional<ColorId> self;
  for (size_t i = 0; i < entry.size(); ++i) {
    char c = entry[i];
    if (c == '(') {
      if (self || i + 2 >= entry.size() || entry[i + 2] != ')')
        throw ParseError("bad self marker in guard center of " + where);
      self = palette.require(entry[i + 1]);
      m.add(*self);
      i += 2;
    } else {
      m.add(palette.require(c));
    }
  }
  if (!self) throw ParseError("guard center lacks a (self) color in " + where);
  return {m, *self};
}

Movement parse_movement(const std::string& text, const std::string& where) {
  std::string m = strip(text);
  if (m == "stay") return Movement::Stay;
  if (m == "left") return Movement::TowardMinus;
  if (m == "right") return Movement::TowardPlus;
  if (m == "either") return Movement::Either;
  throw ParseError("unknown movement '" + m + "' in " + where);
}

const char* movement_name(Movement m) {
  switch (m) {
    case Movement::Stay: return "stay";
    case Movement::TowardMinus: return "left";
    case Movement::TowardPlus: return "right";
    case Movement::Either: return "either";
  }
  return "?";
}

}  // namespace

Algorithm parse_algorithm_text(const std::string& text) {
  Algorithm alg;
  alg.palette = Palette::default_gw();
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  std::vector<std::string> pending_inits;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = strip(raw);
    if (auto hash = line.find('#'); hash != std::string::npos)
      line = strip(line.substr(0, hash));
    if (line.empty()) continue;
    std::string where = "line " + std::to_string(lineno);

    if (line.rfind("name:", 0) == 0) {
      alg.name = strip(line.substr(5));
      continue;
    }
    if (line.rfind("palette:", 0) == 0) {
      std::string letters;
      for (char c : line.substr(8))
        if (!std::isspace(static_cast<unsigned char>(c))) letters.push_back(c);
      alg.palette = Palette(letters);
      continue;
    }
    if (line.rfind("init:", 0) == 0) {
      pending_inits.push_back(strip(line.substr(5)));
      continue;
    }

    auto action_sep = line.find("::");
    if (action_sep == std::string::npos)
      throw ParseError("missing '::' in rule at " + where);
    std::string head = line.substr(0, action_sep);
    std::string action_text = strip(line.substr(action_sep + 2));

    auto label_sep = head.find(':');
    if (label_sep == std::string::npos)
      throw ParseError("missing label separator ':' at " + where);
    Rule rule;
    rule.label = strip(head.substr(0, label_sep));
    if (rule.label.empty()) throw ParseError("empty rule label at " + where);

    auto parts = split(head.substr(label_sep + 1), '|');
    if (parts.size() != 3)
      throw ParseError("guard must have three '|' separated parts at " + where);
    rule.guard.minus = parse_guard_side(parts[0], alg.palette, where);
    auto [zero, self] = parse_guard_center(parts[1], alg.palette, where);
    rule.guard.zero = zero;
    rule.guard.self_color = self;
    rule.guard.plus = parse_guard_side(parts[2], alg.palette, where);

    auto comma = action_text.find(',');
    if (comma == std::string::npos)
      throw ParseError("action must be 'COLOR, MOVE' at " + where);
    std::string color_text = strip(action_text.substr(0, comma));
    if (color_text.size() != 1)
      throw ParseError("action color must be one letter at " + where);
    rule.action.new_color = alg.palette.require(color_text[0]);
    rule.action.movement = parse_movement(action_text.substr(comma + 1), where);
    alg.rules.push_back(std::move(rule));
  }
  for (const auto& init : pending_inits)
    alg.initial_configs.push_back(parse_nodes(init, alg.palette));
  if (alg.rules.empty()) throw ParseError("algorithm file defines no rules");
  return alg;
}

Algorithm load_algorithm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open algorithm file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  Algorithm alg = parse_algorithm_text(buf.str());
  if (alg.name.empty()) alg.name = path;
  return alg;
}

std::string format_algorithm(const Algorithm& algorithm) {
  std::ostringstream out;
  const Palette& p = algorithm.palette;
  if (!algorithm.name.empty()) out << "name: " << algorithm.name << "\n";
  out << "palette:";
  for (int c = 0; c < p.size(); ++c)
    out << ' ' << p.letter(static_cast<ColorId>(c));
  out << "\n";
  for (const auto& init : algorithm.initial_configs)
    out << "init: " << format_nodes(init, p) << "\n";
  auto side = [&](const ColorMultiset& m) {
    return m.empty() ? std::string(".") : m.letters(p);
  };
  for (const Rule& r : algorithm.rules) {
    ColorMultiset rest = r.guard.zero;
    rest.remove(r.guard.self_color);
    std::string center =
        rest.letters(p) + "(" + std::string(1, p.letter(r.guard.self_color)) + ")";
    out << r.label << " : " << side(r.guard.minus) << " | " << center << " | "
        << side(r.guard.plus) << " :: " << p.letter(r.action.new_color) << ", "
        << movement_name(r.action.movement) << "\n";
  }
  return out.str();
}

bool contains_subconfiguration(const Configuration& config,
                               const SubConfiguration& pattern) {
  int n = config.n();
  int len = static_cast<int>(pattern.size());
  if (len > n) return false;
  for (int refl = 0; refl < 2; ++refl) {
    for (int start = 0; start < n; ++start) {
      bool ok = true;
      for (int i = 0; i < len && ok; ++i) {
        int idx = refl ? start - i : start + i;
        ok = config.at(idx) == pattern[i];
      }
      if (ok) return true;
    }
  }
  return false;
}

}  // namespace ringx
