#include "hl/json_io.hpp"

#include <set>

#include "hl/error.hpp"

namespace hl {

using nlohmann::json;

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::InvalidInput, std::string("missing field '") + key + "'");
  return j.at(key);
}

int int_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer()) throw Error(ErrorKind::InvalidInput, std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

}  // namespace

json nodes_to_json(const std::vector<Node>& nodes) {
  json out = json::array();
  for (const Node& t : nodes) out.push_back(t.str());
  return out;
}

std::vector<Node> nodes_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorKind::InvalidInput, "expected an array of node strings");
  std::vector<Node> out;
  for (const auto& s : j) {
    if (!s.is_string()) throw Error(ErrorKind::InvalidInput, "node must be a digit string");
    out.emplace_back(s.get<std::string>());
  }
  return out;
}

json tree_to_json(const TreeSpace& space) {
  if (space.is_uniform()) return {{"branching", space.branching()}, {"height", space.height()}};
  return {{"nodes", nodes_to_json(space.nodes())}};
}

TreeSpace tree_from_json(const json& j) {
  if (j.is_object() && j.contains("nodes")) return TreeSpace::from_nodes(nodes_from_json(j.at("nodes")));
  return TreeSpace::uniform(int_field(j, "branching"), int_field(j, "height"));
}

std::vector<TreeSpace> trees_from_document(const json& doc, int d) {
  std::vector<TreeSpace> out;
  if (doc.contains("trees")) {
    for (const auto& t : doc.at("trees")) out.push_back(tree_from_json(t));
    if (d > 0 && static_cast<int>(out.size()) != d) {
      throw Error(ErrorKind::InvalidInput, "expected " + std::to_string(d) + " trees, got " + std::to_string(out.size()));
    }
    return out;
  }
  if (d <= 0) throw Error(ErrorKind::InvalidInput, "a single 'tree' needs a known arity; give 'trees' instead");
  out.assign(static_cast<size_t>(d), tree_from_json(field(doc, "tree")));
  return out;
}

json report_to_json(const SubtreeReport& r) {
  return {{"nodes", nodes_to_json(r.nodes)}, {"level_set", r.level_set}};
}

SubtreeReport report_from_json(const json& j) {
  auto nodes = nodes_from_json(field(j, "nodes"));
  std::vector<int> levels;
  if (j.contains("level_set")) {
    levels = j.at("level_set").get<std::vector<int>>();
  } else {
    std::set<int> hs;
    for (const Node& t : nodes) hs.insert(t.height());
    levels.assign(hs.begin(), hs.end());
  }
  return make_report(std::move(nodes), std::move(levels));
}

json verdict_to_json(const Verdict& v) { return {{"valid", v.valid}, {"violations", v.violations}}; }

json witness_to_json(const SdhlWitness& w) {
  json m = json::array();
  for (const auto& col : w.matrix) m.push_back(nodes_to_json(col));
  return {{"base", nodes_to_json(w.base)}, {"xi", w.xi}, {"matrix", m}, {"color", w.color}};
}

SdhlWitness witness_from_json(const json& j) {
  SdhlWitness w;
  w.base = nodes_from_json(field(j, "base"));
  w.xi = int_field(j, "xi");
  for (const auto& col : field(j, "matrix")) w.matrix.push_back(nodes_from_json(col));
  w.color = int_field(j, "color");
  return w;
}

ColoringFamily family_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorKind::InvalidInput, "coloring family must be an array");
  ColoringFamily fam;
  for (const auto& c : j) fam.push_back(Coloring::from_json(c));
  return fam;
}

json certificate_to_json(const TailConeCertificate& c) {
  json subs = json::array();
  for (const auto& r : c.subtrees) subs.push_back(report_to_json(r));
  json colors = json::object();
  for (const auto& [i, table] : c.colors) {
    json t = json::object();
    for (const auto& [key, col] : table) t[key] = col;
    colors[std::to_string(i)] = t;
  }
  return {{"subtrees", subs}, {"level_set", c.level_set}, {"colors", colors}};
}

TailConeCertificate certificate_from_json(const json& j) {
  TailConeCertificate c;
  for (const auto& r : field(j, "subtrees")) c.subtrees.push_back(report_from_json(r));
  c.level_set = field(j, "level_set").get<std::vector<int>>();
  for (const auto& [key, table] : field(j, "colors").items()) {
    int i = 0;
    try {
      i = std::stoi(key);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::InvalidInput, "color table key '" + key + "' is not an index");
    }
    auto& out = c.colors[i];
    for (const auto& [tk, col] : table.items()) {
      parse_tuple_key(tk);
      out[tk] = col.get<int>();
    }
  }
  return c;
}

}  // namespace hl
