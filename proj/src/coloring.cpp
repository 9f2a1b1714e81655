#include "hl/coloring.hpp"

#include <algorithm>
#include <numeric>

#include "expr.hpp"
#include "hl/error.hpp"

namespace hl {

using nlohmann::json;

namespace {

unsigned long long splitmix64(unsigned long long x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

int param_int(const json& params, const char* key, int fallback) {
  if (!params.is_object() || !params.contains(key)) return fallback;
  if (!params.at(key).is_number_integer()) {
    throw Error(ErrorKind::InvalidInput, std::string("coloring parameter '") + key + "' must be an integer");
  }
  return params.at(key).get<int>();
}

const Node& coordinate(const std::vector<Node>& tuple, int j) {
  if (j < 0 || j >= static_cast<int>(tuple.size())) {
    throw Error(ErrorKind::InvalidInput, "coloring coordinate " + std::to_string(j) + " out of range");
  }
  return tuple[static_cast<size_t>(j)];
}

}  // namespace

long long factorial(int k) {
  long long f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

int permutation_index(const std::vector<int>& perm) {
  int k = static_cast<int>(perm.size());
  std::vector<int> rest(perm.size());
  std::iota(rest.begin(), rest.end(), 0);
  long long index = 0;
  for (int i = 0; i < k; ++i) {
    auto it = std::find(rest.begin(), rest.end(), perm[static_cast<size_t>(i)]);
    if (it == rest.end()) throw Error(ErrorKind::InvalidInput, "not a permutation");
    index += (it - rest.begin()) * factorial(k - 1 - i);
    rest.erase(it);
  }
  return static_cast<int>(index);
}

std::vector<int> permutation_from_index(int index, int k) {
  if (index < 0 || index >= factorial(k)) throw Error(ErrorKind::OutOfRange, "permutation index out of range");
  std::vector<int> rest(static_cast<size_t>(k));
  std::iota(rest.begin(), rest.end(), 0);
  std::vector<int> out;
  long long r = index;
  for (int i = k - 1; i >= 0; --i) {
    long long f = factorial(i);
    auto pos = static_cast<size_t>(r / f);
    r %= f;
    out.push_back(rest[pos]);
    rest.erase(rest.begin() + static_cast<long>(pos));
  }
  return out;
}

std::vector<int> height_sorting_permutation(const std::vector<Node>& tuple) {
  std::vector<int> perm(tuple.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
    return tuple[static_cast<size_t>(a)].height() < tuple[static_cast<size_t>(b)].height();
  });
  return perm;
}

int hashed_color(unsigned long long seed, const std::vector<Node>& tuple, int colors) {
  unsigned long long h = 1469598103934665603ULL;
  for (const Node& t : tuple) {
    for (char c : t.str()) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ULL;
    }
    h ^= 0xff;
    h *= 1099511628211ULL;
  }
  return static_cast<int>(splitmix64(h ^ splitmix64(seed)) % static_cast<unsigned long long>(colors));
}

Coloring Coloring::table(int arity, int colors, const std::map<std::vector<Node>, int>& entries) {
  if (arity < 1) throw Error(ErrorKind::InvalidInput, "coloring arity must be positive");
  if (colors < 1) throw Error(ErrorKind::InvalidInput, "coloring needs at least one color");
  auto tbl = std::make_shared<std::unordered_map<std::string, int>>();
  tbl->reserve(entries.size());
  for (const auto& [tuple, color] : entries) {
    if (static_cast<int>(tuple.size()) != arity) {
      throw Error(ErrorKind::InvalidInput, "table entry (" + tuple_key(tuple) + ") has the wrong arity");
    }
    if (color < 0 || color >= colors) {
      throw Error(ErrorKind::InvalidInput, "table entry (" + tuple_key(tuple) + ") has color " +
                                               std::to_string(color) + " outside [0, " +
                                               std::to_string(colors) + ")");
    }
    (*tbl)[tuple_key(tuple)] = color;
  }
  Coloring c;
  c.arity_ = arity;
  c.colors_ = colors;
  c.kind_ = "table";
  c.name_ = "table";
  c.table_ = std::move(tbl);
  return c;
}

Coloring Coloring::named(const std::string& name, const json& params, int arity, int colors) {
  Coloring c;
  c.kind_ = "named";
  c.name_ = name;
  c.params_ = params.is_null() ? json::object() : params;
  int a = arity > 0 ? arity : 1;
  if (name == "constant") {
    int color = param_int(params, "color", 0);
    if (color < 0) throw Error(ErrorKind::InvalidInput, "constant color must be non-negative");
    c.colors_ = colors > 0 ? colors : color + 1;
    if (color >= c.colors_) throw Error(ErrorKind::InvalidInput, "constant color exceeds the color count");
    c.fn_ = [color](const std::vector<Node>&) { return color; };
  } else if (name == "level-parity") {
    int j = param_int(params, "coordinate", 0);
    c.colors_ = colors > 0 ? colors : 2;
    if (c.colors_ < 2) throw Error(ErrorKind::InvalidInput, "level-parity needs two colors");
    c.fn_ = [j](const std::vector<Node>& t) { return coordinate(t, j).height() % 2; };
  } else if (name == "height-permutation") {
    int d = param_int(params, "d", arity > 0 ? arity - 1 : 1);
    if (d < 1) throw Error(ErrorKind::InvalidInput, "height-permutation needs d >= 1");
    if (arity > 0 && arity != d + 1) {
      throw Error(ErrorKind::InvalidInput, "height-permutation with d=" + std::to_string(d) + " has arity " +
                                               std::to_string(d + 1));
    }
    a = d + 1;
    c.params_["d"] = d;
    c.colors_ = static_cast<int>(factorial(d + 1));
    c.fn_ = [](const std::vector<Node>& t) { return permutation_index(height_sorting_permutation(t)); };
  } else if (name == "antichain-split") {
    int j = param_int(params, "coordinate", 0);
    c.colors_ = colors > 0 ? colors : 2;
    int k = c.colors_;
    c.fn_ = [j, k](const std::vector<Node>& t) {
      const Node& n = coordinate(t, j);
      return n.height() == 0 ? 0 : n.digit(0) % k;
    };
  } else if (name == "random") {
    if (!params.is_object() || !params.contains("seed")) {
      throw Error(ErrorKind::InvalidInput, "random coloring needs a seed parameter");
    }
    auto seed = params.at("seed").get<unsigned long long>();
    c.colors_ = colors > 0 ? colors : param_int(params, "colors", 2);
    int k = c.colors_;
    c.fn_ = [seed, k](const std::vector<Node>& t) { return hashed_color(seed, t, k); };
  } else if (name == "expression") {
    if (!params.is_object() || !params.contains("expr") || !params.at("expr").is_string()) {
      throw Error(ErrorKind::InvalidInput, "expression coloring needs an 'expr' string parameter");
    }
    auto prog = expr::Program::compile(params.at("expr").get<std::string>());
    c.colors_ = colors > 0 ? colors : param_int(params, "colors", 2);
    long long k = c.colors_;
    c.fn_ = [prog, k](const std::vector<Node>& t) {
      long long v = prog.eval(t) % k;
      return static_cast<int>(v < 0 ? v + k : v);
    };
  } else {
    throw Error(ErrorKind::InvalidInput, "unknown named coloring '" + name + "'");
  }
  if (c.colors_ < 1) throw Error(ErrorKind::InvalidInput, "coloring needs at least one color");
  c.arity_ = a;
  return c;
}

Coloring Coloring::custom(int arity, int colors, Fn fn, std::string label) {
  Coloring c;
  c.kind_ = "custom";
  c.name_ = std::move(label);
  c.arity_ = arity;
  c.colors_ = colors;
  c.fn_ = std::move(fn);
  return c;
}

int Coloring::operator()(const std::vector<Node>& tuple) const {
  if (static_cast<int>(tuple.size()) != arity_) {
    throw Error(ErrorKind::InvalidInput, "coloring of arity " + std::to_string(arity_) + " applied to a " +
                                             std::to_string(tuple.size()) + "-tuple");
  }
  if (table_) {
    auto it = table_->find(tuple_key(tuple));
    if (it == table_->end()) {
      throw Error(ErrorKind::InvalidInput, "coloring table has no entry for (" + tuple_key(tuple) + ")");
    }
    return it->second;
  }
  int v = fn_(tuple);
  if (v < 0 || v >= colors_) {
    throw Error(ErrorKind::InvalidInput, "coloring produced color " + std::to_string(v) + " outside [0, " +
                                             std::to_string(colors_) + ")");
  }
  return v;
}

bool Coloring::defines(const std::vector<Node>& tuple) const {
  if (static_cast<int>(tuple.size()) != arity_) return false;
  return !table_ || table_->count(tuple_key(tuple)) > 0;
}

std::map<std::vector<Node>, int> Coloring::entries() const {
  std::map<std::vector<Node>, int> out;
  if (!table_) return out;
  for (const auto& [key, color] : *table_) out[parse_tuple_key(key)] = color;
  return out;
}

json Coloring::to_json() const {
  if (kind_ == "table") {
    json entries = json::array();
    for (const auto& [tuple, color] : this->entries()) {
      json t = json::array();
      for (const Node& n : tuple) t.push_back(n.str());
      entries.push_back({{"tuple", t}, {"color", color}});
    }
    return {{"kind", "table"}, {"arity", arity_}, {"colors", colors_}, {"entries", entries}};
  }
  if (kind_ == "named") {
    return {{"kind", "named"}, {"name", name_}, {"params", params_}, {"arity", arity_}, {"colors", colors_}};
  }
  throw Error(ErrorKind::InvalidInput, "coloring '" + name_ + "' has no wire form");
}

Coloring Coloring::from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw Error(ErrorKind::InvalidInput, "coloring needs a 'kind'");
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "table") {
    int arity = j.at("arity").get<int>();
    int colors = j.at("colors").get<int>();
    std::map<std::vector<Node>, int> entries;
    for (const json& e : j.at("entries")) {
      std::vector<Node> tuple;
      for (const json& n : e.at("tuple")) tuple.emplace_back(n.get<std::string>());
      if (entries.count(tuple)) {
        throw Error(ErrorKind::InvalidInput, "duplicate table entry (" + tuple_key(tuple) + ")");
      }
      entries[tuple] = e.at("color").get<int>();
    }
    return table(arity, colors, entries);
  }
  if (kind == "named") {
    int arity = j.contains("arity") ? j.at("arity").get<int>() : -1;
    int colors = j.contains("colors") ? j.at("colors").get<int>() : -1;
    json params = j.contains("params") ? j.at("params") : json::object();
    return named(j.at("name").get<std::string>(), params, arity, colors);
  }
  throw Error(ErrorKind::InvalidInput, "unknown coloring kind '" + kind + "'");
}

Coloring random_level_table(const std::vector<TreeSpace>& spaces, int colors, unsigned long long seed) {
  if (spaces.empty()) throw Error(ErrorKind::InvalidInput, "at least one factor tree is required");
  int n = spaces[0].height();
  for (const auto& s : spaces) n = std::min(n, s.height());
  std::map<std::vector<Node>, int> entries;
  for (int h = 0; h < n; ++h) {
    std::vector<std::vector<Node>> factors;
    for (const auto& s : spaces) factors.push_back(s.level(h));
    for_each_product(factors, [&](const std::vector<Node>& t) {
      entries[t] = hashed_color(seed, t, colors);
      return true;
    });
  }
  return Coloring::table(static_cast<int>(spaces.size()), colors, entries);
}

}  // namespace hl
