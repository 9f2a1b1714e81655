#include "hl/cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <limits>
#include <sstream>

#include "CLI11.hpp"

#include "hl/condition.hpp"
#include "hl/error.hpp"
#include "hl/json_io.hpp"
#include "hl/polarized.hpp"
#include "hl/tailcone.hpp"
#include "hl/witness.hpp"

#ifndef HL_LAB_VERSION
#define HL_LAB_VERSION "0.0.0"
#endif

namespace hl::cli {

using nlohmann::json;

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error(ErrorKind::Internal, "sha-256 digest failed");
  }
  EVP_MD_CTX_free(ctx);
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return out.str();
}

namespace {

// ---------- table rendering ----------

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>().empty() ? "\"\"" : v.get<std::string>();
  if (v.is_null()) return "-";
  return v.dump();
}

bool is_scalar(const json& v) { return !v.is_object() && !v.is_array(); }

void render_into(const json& doc, const std::string& indent, std::ostringstream& out);

void render_rows(const json& rows, const std::string& indent, std::ostringstream& out) {
  std::vector<std::string> cols;
  for (const auto& row : rows) {
    for (const auto& [k, v] : row.items()) {
      if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
    }
  }
  std::vector<std::vector<std::string>> cells = {cols};
  for (const auto& row : rows) {
    std::vector<std::string> line;
    for (const auto& c : cols) {
      if (!row.contains(c)) {
        line.push_back("");
      } else if (is_scalar(row.at(c))) {
        line.push_back(scalar_text(row.at(c)));
      } else {
        line.push_back(row.at(c).dump());
      }
    }
    cells.push_back(line);
  }
  std::vector<size_t> width(cols.size(), 0);
  for (const auto& line : cells) {
    for (size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  }
  for (const auto& line : cells) {
    out << indent;
    for (size_t c = 0; c < line.size(); ++c) {
      if (c) out << "  ";
      out << std::left << std::setw(static_cast<int>(width[c])) << line[c];
    }
    out << "\n";
  }
}

void render_value(const std::string& key, const json& v, const std::string& indent, std::ostringstream& out) {
  if (is_scalar(v)) {
    out << indent << key << ": " << scalar_text(v) << "\n";
  } else if (v.is_array() && v.empty()) {
    out << indent << key << ":\n" << indent << "  (none)\n";
  } else if (v.is_array() && std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_object(); })) {
    out << indent << key << ":\n";
    render_rows(v, indent + "  ", out);
  } else if (v.is_array() && std::all_of(v.begin(), v.end(), is_scalar)) {
    out << indent << key << ": ";
    for (size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << scalar_text(v[i]);
    out << "\n";
  } else if (v.is_array()) {
    out << indent << key << ":\n";
    for (size_t i = 0; i < v.size(); ++i) render_value("[" + std::to_string(i) + "]", v[i], indent + "  ", out);
  } else {
    out << indent << key << ":\n";
    render_into(v, indent + "  ", out);
  }
}

void render_into(const json& doc, const std::string& indent, std::ostringstream& out) {
  if (!doc.is_object()) {
    render_value("value", doc, indent, out);
    return;
  }
  for (const auto& [k, v] : doc.items()) render_value(k, v, indent, out);
}

}  // namespace

std::string render_table(const json& doc) {
  std::ostringstream out;
  render_into(doc, "", out);
  return out.str();
}

namespace {

// ---------- subcommand plumbing ----------

struct Options {
  std::string input;
  std::string format = "json";
  int workers = 1;
  unsigned long long cap = kDefaultSearchCap;
  unsigned long long per_stage_cap = 200'000;
  std::string transcript;
  // positional / numeric arguments
  std::vector<std::string> nodes;
  long long number = 0;
  int from = 1;
  int d = 1;
  int b = 2;
  int r = 2;
  int max_n = 6;
  int height = -1;
  int branching = 2;
  std::string mode = "exhaustive";
  std::string variant = "sdhl";
  std::string oracle = "top-level";
  int samples = 100;
  unsigned long long seed = 0;
  int h = -1;
  int depth = -1;
  std::string epsilon;
  int stride = -1;
  bool unbounded = false;
};

struct Outcome {
  json doc;
  int code = 0;
};

json read_input(const Options& o, std::istream& in, std::string& raw) {
  if (o.input.empty()) return json::object();
  if (o.input == "-") {
    raw.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  } else {
    std::ifstream f(o.input, std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidInput, "cannot read input file '" + o.input + "'");
    raw.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
  }
  try {
    return json::parse(raw);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidInput, std::string("input is not valid JSON: ") + e.what());
  }
}

const json& need(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw Error(ErrorKind::InvalidInput, std::string("input needs a '") + key + "' field");
  }
  return doc.at(key);
}

int int_or(const json& doc, const char* key, int flag, int fallback) {
  if (flag >= 0) return flag;
  if (doc.is_object() && doc.contains(key)) return doc.at(key).get<int>();
  return fallback;
}

json big_json(const BigInt& v) {
  if (v <= BigInt(std::numeric_limits<long long>::max())) return json(static_cast<long long>(v));
  return json(v.str());
}

void write_transcript(const Options& o, const std::vector<json>& records) {
  if (o.transcript.empty()) return;
  std::ofstream f(o.transcript, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidInput, "cannot write transcript file '" + o.transcript + "'");
  for (const auto& r : records) f << r.dump() << "\n";
}

int outcome_code(BuildOutcome o) {
  switch (o) {
    case BuildOutcome::Found: return 0;
    case BuildOutcome::Cap: return 3;
    case BuildOutcome::Exhausted: return 1;
  }
  return 2;
}

StageCaps stage_caps(const Options& o) { return {o.per_stage_cap, o.cap}; }

json failure_json(const StagedFailure& f) {
  return {{"deepest_stage", f.deepest_stage}, {"blocking", f.blocking}, {"message", f.message}};
}

// ---------- handlers ----------

Outcome run_lex_sort(const Options& o, const json& doc) {
  std::vector<Node> nodes;
  if (doc.contains("nodes")) {
    nodes = nodes_from_json(doc.at("nodes"));
  } else {
    for (const auto& s : o.nodes) nodes.emplace_back(s);
  }
  for (const Node& t : nodes) {
    if (t.max_digit() > 1) {
      throw Error(ErrorKind::UnsupportedAlphabet, "lexicographic order is defined on binary nodes only; \"" + t.str() +
                                                      "\" has digit " + std::to_string(t.max_digit()));
    }
  }
  std::stable_sort(nodes.begin(), nodes.end(), lex_less);
  return {{{"sorted", nodes_to_json(nodes)}}, 0};
}

Outcome run_validate_subtree(const Options& o, const json& doc) {
  SubtreeReport r = report_from_json(doc);
  TreeSpace space = [&] {
    if (doc.contains("tree")) return tree_from_json(doc.at("tree"));
    int maxh = 0;
    for (const Node& t : r.nodes) maxh = std::max(maxh, t.height());
    return TreeSpace::uniform(o.branching, o.height > 0 ? o.height : maxh + 1);
  }();
  Verdict v = validate_strong_subtree(r, space);
  json out = verdict_to_json(v);
  out["report"] = report_to_json(r);
  out["tree"] = tree_to_json(space);
  return {out, v.valid ? 0 : 1};
}

Outcome run_sdhl_search(const Options& o, const json& doc) {
  Coloring f = Coloring::from_json(need(doc, "coloring"));
  auto spaces = trees_from_document(doc, f.arity());
  json out = {{"variant", o.variant}};
  bool found = false;
  if (o.variant == "sdhl" || o.variant == "prime") {
    auto w = o.variant == "sdhl" ? sdhl_search(f, spaces, o.cap) : sdhl_prime_search(f, spaces, o.cap);
    found = w.has_value();
    out["witness"] = w ? witness_to_json(*w) : json(nullptr);
  } else if (o.variant == "dshl") {
    auto w = dshl_search(f, spaces, o.cap);
    found = w.has_value();
    out["witness"] = w ? json{{"base", nodes_to_json(w->base)}, {"color", w->color}} : json(nullptr);
  } else {
    throw Error(ErrorKind::InvalidInput, "unknown variant '" + o.variant + "' (sdhl, prime, dshl)");
  }
  out["found"] = found;
  return {out, found ? 0 : 1};
}

Outcome run_fhl(const Options& o) {
  FhlOptions fo;
  fo.d = o.d;
  fo.b = o.b;
  fo.r = o.r;
  fo.max_n = o.max_n;
  fo.cap = o.cap;
  fo.seed = o.seed;
  fo.samples = o.samples;
  if (o.mode == "randomized") {
    fo.randomized = true;
  } else if (o.mode != "exhaustive") {
    throw Error(ErrorKind::InvalidInput, "mode must be exhaustive or randomized");
  }
  FhlResult r = finite_hl_number(fo);
  json out = {{"d", o.d}, {"b", o.b}, {"r", o.r}, {"mode", r.mode}, {"max_n", o.max_n}};
  out["n"] = r.value ? json(*r.value) : json(nullptr);
  out["lower_bound"] = r.lower_bound;
  out["counterexample_at"] = r.counterexample_n ? json(*r.counterexample_n) : json(nullptr);
  out["counterexample"] = r.counterexample ? r.counterexample->to_json() : json(nullptr);
  if (fo.randomized) {
    out["clean_n"] = r.clean_n ? json(*r.clean_n) : json(nullptr);
    out["samples"] = r.samples;
    out["seed"] = r.seed;
  }
  out["report"] = r.report;
  bool ok = fo.randomized ? r.clean_n.has_value() : r.value.has_value();
  return {out, ok ? 0 : 1};
}

Outcome run_hl_check(const Options& o, const json& doc) {
  Coloring f = Coloring::from_json(need(doc, "coloring"));
  json out;
  Verdict v;
  if (doc.contains("subtrees")) {
    std::vector<SubtreeReport> reports;
    for (const auto& r : doc.at("subtrees")) reports.push_back(report_from_json(r));
    out["check"] = "strong-subtree";
    if (doc.contains("tree") || doc.contains("trees")) {
      auto spaces = trees_from_document(doc, f.arity());
      for (size_t j = 0; j < reports.size() && j < spaces.size(); ++j) {
        Verdict sv = validate_strong_subtree(reports[j], spaces[j]);
        for (const auto& m : sv.violations) v.fail("subtree " + std::to_string(j) + ": " + m);
      }
    }
    if (v.valid) v = check_hl_strong_subtree(reports, f);
  } else if (doc.contains("witness")) {
    auto spaces = trees_from_document(doc, f.arity());
    SdhlWitness w = witness_from_json(doc.at("witness"));
    out["check"] = o.variant == "prime" ? "sdhl-prime" : "sdhl";
    v = o.variant == "prime" ? check_sdhl_prime_witness(w, f, spaces) : check_sdhl_witness(w, f, spaces);
  } else if (doc.contains("dshl")) {
    auto spaces = trees_from_document(doc, f.arity());
    const json& dj = doc.at("dshl");
    auto dv = check_dshl_witness(nodes_from_json(need(dj, "base")), need(dj, "color").get<int>(), f, spaces, o.cap);
    out["check"] = "dshl";
    out["asym"] = dv.asym;
    json ms = json::array();
    for (const auto& m : dv.matrices) ms.push_back(witness_to_json(m));
    out["matrices"] = ms;
    v = dv.verdict;
  } else {
    throw Error(ErrorKind::InvalidInput, "hl-check needs 'subtrees', 'witness' or 'dshl'");
  }
  out["valid"] = v.valid;
  out["violations"] = v.violations;
  return {out, v.valid ? 0 : 1};
}

Outcome run_mono_subtree(const Options& o, const json& doc) {
  Coloring f = Coloring::from_json(need(doc, "coloring"));
  if (f.arity() != 1) throw Error(ErrorKind::InvalidInput, "monochromatic subtree needs a unary coloring");
  TreeSpace space = trees_from_document(doc, 1).front();
  LargenessOracle oracle;
  if (o.oracle == "top-level") {
    oracle = top_level_oracle(f, space);
  } else if (o.oracle == "top-half") {
    oracle = top_half_oracle(f, space);
  } else {
    throw Error(ErrorKind::InvalidInput, "oracle must be top-level or top-half");
  }
  int target = int_or(doc, "height", o.height, -1);
  auto r = build_monochromatic_subtree(f, space, oracle, target > 0 ? std::optional<int>(target) : std::nullopt);
  json out = {{"oracle", oracle.name},
              {"report", report_to_json(r.report)},
              {"color", r.color},
              {"case", r.case_label},
              {"complete", r.complete},
              {"transcript", r.transcript}};
  if (!r.failure.empty()) out["failure"] = r.failure;
  return {out, r.complete ? 0 : 3};
}

Outcome run_fusion_run(const Options& o, const json& doc) {
  ColoringFamily fam = family_from_json(need(doc, "family"));
  if (fam.empty()) throw Error(ErrorKind::InvalidInput, "coloring family is empty");
  auto spaces = trees_from_document(doc, fam.front().arity());
  int h = int_or(doc, "h", o.h, static_cast<int>(fam.size()) + 1);
  FuseResult r = fuse(fam, spaces, h, stage_caps(o));
  write_transcript(o, r.transcript);
  json out = {{"outcome", outcome_name(r.outcome)}, {"h", h}, {"steps", r.steps}, {"transcript", r.transcript}};
  out["certificate"] = r.certificate ? certificate_to_json(*r.certificate) : json(nullptr);
  if (r.outcome != BuildOutcome::Found) out["failure"] = failure_json(r.failure);
  return {out, outcome_code(r.outcome)};
}

Outcome run_fusion_check(const json& doc) {
  ColoringFamily fam = family_from_json(need(doc, "family"));
  if (fam.empty()) throw Error(ErrorKind::InvalidInput, "coloring family is empty");
  auto spaces = trees_from_document(doc, fam.front().arity());
  Verdict v = check_tail_cone(certificate_from_json(need(doc, "certificate")), fam, spaces);
  return {verdict_to_json(v), v.valid ? 0 : 1};
}

Outcome run_fusion_partial(const Options& o, const json& doc) {
  Coloring f = Coloring::from_json(need(doc, "coloring"));
  auto spaces = trees_from_document(doc, f.arity());
  auto B = need(doc, "B").get<std::vector<int>>();
  int h = int_or(doc, "h", o.h, 3);
  PartialResult r = apply_tailcone_partial(f, B, spaces, h, stage_caps(o));
  write_transcript(o, r.transcript);
  json subs = json::array();
  for (const auto& s : r.subtrees) subs.push_back(report_to_json(s));
  json out = {{"outcome", outcome_name(r.outcome)},
              {"h", h},
              {"B", B},
              {"subtrees", subs},
              {"level_set", r.level_set},
              {"verdict", verdict_to_json(r.verdict)},
              {"steps", r.steps},
              {"transcript", r.transcript}};
  if (r.outcome != BuildOutcome::Found) out["failure"] = failure_json(r.failure);
  return {out, outcome_code(r.outcome)};
}

Outcome run_dim_induct(const Options& o, const json& doc) {
  Coloring f = Coloring::from_json(need(doc, "coloring"));
  auto spaces = trees_from_document(doc, f.arity());
  int h = int_or(doc, "h", o.h, spaces.front().height());
  DimResult r = dimension_induction(f, spaces, h, stage_caps(o));
  write_transcript(o, r.transcript);
  json out = {{"outcome", outcome_name(r.outcome)},
              {"h", h},
              {"witness", r.witness ? witness_to_json(*r.witness) : json(nullptr)},
              {"verdict", verdict_to_json(r.verdict)},
              {"transcript", r.transcript}};
  if (!r.message.empty()) out["message"] = r.message;
  return {out, outcome_code(r.outcome)};
}

Outcome run_polarized_search(const Options& o, const json& doc) {
  Coloring f = Coloring::from_json(need(doc, "coloring"));
  auto spaces = trees_from_document(doc, f.arity());
  PolarizedOptions po;
  po.splitting_depth = int_or(doc, "depth", o.depth, 3);
  po.cap = o.cap;
  po.per_stage_cap = o.per_stage_cap;
  PolarizedResult r = polarized_search(f, spaces, po);
  write_transcript(o, r.transcript);
  json out = r.to_json();
  out["splitting_depth"] = po.splitting_depth;
  out["bound"] = factorial(f.arity());
  out["transcript"] = r.transcript;
  return {out, r.found ? 0 : (r.capped ? 3 : 1)};
}

Outcome run_polarized_verify_lb(const json& doc) {
  std::vector<SubtreeReport> reports;
  for (const auto& r : need(doc, "subtrees")) reports.push_back(report_from_json(r));
  int d = doc.contains("d") ? doc.at("d").get<int>() : static_cast<int>(reports.size()) - 1;
  LowerBoundReport r = verify_lower_bound(reports, d);
  json out = r.to_json();
  out["d"] = d;
  out["types"] = factorial(d + 1);
  return {out, r.all_realized ? 0 : 1};
}

Outcome run_polarized_almost_all(const Options& o, const json& doc) {
  Coloring f = Coloring::from_json(need(doc, "coloring"));
  auto spaces = trees_from_document(doc, f.arity());
  AlmostAllOptions ao;
  ao.height = int_or(doc, "height", o.height, 3);
  if (!o.epsilon.empty()) {
    ao.epsilon = parse_fraction(o.epsilon);
  } else if (doc.contains("epsilon")) {
    ao.epsilon = parse_fraction(doc.at("epsilon").get<std::string>());
  }
  if (doc.contains("pattern")) ao.pattern = doc.at("pattern").get<std::vector<int>>();
  ao.cap = o.cap;
  AlmostAllResult r = almost_all_homogenize(f, spaces, ao);
  return {r.to_json(), r.within_budget ? 0 : 3};
}

Outcome run_degrees(const std::string& which, const Options& o) {
  if (which == "tangent") return {{{"n", o.number}, {"value", big_json(tangent(static_cast<int>(o.number)))}}, 0};
  if (which == "devlin") return {{{"d", o.number}, {"value", big_json(devlin_lower_bound(static_cast<int>(o.number)))}}, 0};
  json t = degree_table(static_cast<int>(o.number)).to_json();
  json rows = json::array();
  for (const auto& row : t.at("rows")) {
    if (row.at("d").get<int>() >= o.from) rows.push_back(row);
  }
  t["rows"] = rows;
  return {t, 0};
}

Outcome run_cond(const std::string& which, const json& doc) {
  if (which == "glb") {
    std::vector<Condition> cs;
    for (const auto& c : need(doc, "conditions")) cs.push_back(Condition::from_json(c));
    try {
      return {{{"compatible", true}, {"glb", glb(cs).to_json()}}, 0};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Incompatibility) throw;
      return {{{"compatible", false}, {"glb", nullptr}, {"message", e.what()}}, 1};
    }
  }
  Condition p = Condition::from_json(need(doc, "condition"));
  if (which == "copy") {
    auto W0 = make_index_set(need(doc, "W0").get<std::vector<Index>>());
    auto W1 = make_index_set(need(doc, "W1").get<std::vector<Index>>());
    return {{{"condition", copying_action(p, W0, W1).to_json()}}, 0};
  }
  auto B = make_index_set(need(doc, "B").get<std::vector<Index>>());
  return {{{"condition", restrict_condition(p, B).to_json()}}, 0};
}

Outcome run_wmap(const std::string& which, const Options& o, const json& doc) {
  WMap m = WMap::from_json(doc);
  int d = need(doc, "d").get<int>();
  if (which == "build") {
    int stride = o.stride > 0 ? o.stride : d + 2;
    WMap w = build_w_map(m, d, stride, o.unbounded ? XBound::Unbounded : XBound::Bounded);
    json out = w.to_json();
    out["d"] = d;
    out["stride"] = stride;
    out["x_search"] = o.unbounded ? "unbounded" : "bounded";
    return {out, 0};
  }
  ClReport r = verify_cl(m, d);
  return {r.to_json(), r.pass() ? 0 : 1};
}

Outcome run_delta_system(const json& doc) {
  std::vector<IndexSet> family;
  for (const auto& s : need(doc, "family")) family.push_back(make_index_set(s.get<std::vector<Index>>()));
  auto target = need(doc, "target").get<long long>();
  if (target < 0) throw Error(ErrorKind::InvalidInput, "target must be non-negative");
  auto r = delta_system(family, static_cast<size_t>(target));
  if (!r) return {{{"found", false}, {"target", target}, {"members", json::array()}, {"root", nullptr}}, 1};
  json sub = json::array();
  for (size_t i : r->members) sub.push_back(family[i]);
  return {{{"found", true}, {"target", target}, {"members", r->members}, {"root", r->root}, {"subfamily", sub}}, 0};
}

void add_common(CLI::App* app, Options& o, bool input = true) {
  if (input) app->add_option("-i,--input", o.input, "input JSON file, '-' for stdin");
  app->add_option("--format", o.format, "json or table")->check(CLI::IsMember({"json", "table"}));
  app->add_option("--workers", o.workers, "worker count (HL_LAB_WORKERS overrides)");
  app->add_option("--cap", o.cap, "global search cap");
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"hl-lab: finite Halpern-Lauchli combinatorics", "hl-lab"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  auto* lex = app.add_subcommand("lex-sort", "sort binary nodes lexicographically");
  lex->add_option("nodes", o.nodes, "node digit strings");
  add_common(lex, o);

  auto* val = app.add_subcommand("validate-subtree", "validate a strong subtree report");
  val->add_option("--branching", o.branching);
  val->add_option("--height", o.height);
  add_common(val, o);

  auto* sdhl = app.add_subcommand("sdhl-search", "search for a monochromatic dense matrix");
  sdhl->add_option("--variant", o.variant, "sdhl, prime or dshl");
  add_common(sdhl, o);

  auto* fhl = app.add_subcommand("fhl", "finite Halpern-Lauchli number");
  fhl->add_option("--d", o.d);
  fhl->add_option("--b", o.b);
  fhl->add_option("--r", o.r);
  fhl->add_option("--max-n", o.max_n);
  fhl->add_option("--mode", o.mode)->check(CLI::IsMember({"exhaustive", "randomized"}));
  fhl->add_option("--samples", o.samples);
  fhl->add_option("--seed", o.seed);
  add_common(fhl, o, false);

  auto* hlc = app.add_subcommand("hl-check", "check strong subtrees, witnesses or dense-set bases");
  hlc->add_option("--variant", o.variant, "sdhl or prime for witness checks");
  add_common(hlc, o);

  auto* mono = app.add_subcommand("mono-subtree", "build a monochromatic strong subtree of a unary coloring");
  mono->add_option("--oracle", o.oracle, "top-level or top-half");
  mono->add_option("--height", o.height, "target subtree height");
  add_common(mono, o);

  auto* fusion = app.add_subcommand("fusion", "tail-cone fusion");
  fusion->require_subcommand(1);
  auto* frun = fusion->add_subcommand("run", "build a tail-cone certificate");
  auto* fcheck = fusion->add_subcommand("check", "check a tail-cone certificate");
  auto* fpart = fusion->add_subcommand("partial", "partial tail-cone on a coordinate subset");
  for (auto* s : {frun, fpart}) {
    s->add_option("--h", o.h, "target subtree height");
    s->add_option("--per-stage-cap", o.per_stage_cap);
    s->add_option("--transcript", o.transcript, "write stage records as JSON lines");
    add_common(s, o);
  }
  add_common(fcheck, o);

  auto* dim = app.add_subcommand("dim-induct", "dimension induction to a somewhere dense matrix");
  dim->add_option("--h", o.h, "partial subtree height");
  dim->add_option("--per-stage-cap", o.per_stage_cap);
  dim->add_option("--transcript", o.transcript);
  add_common(dim, o);

  auto* pol = app.add_subcommand("polarized", "polarized partition tools");
  pol->require_subcommand(1);
  auto* psearch = pol->add_subcommand("search", "forbidden-node subtree construction");
  psearch->add_option("--depth", o.depth, "splitting depth");
  psearch->add_option("--per-stage-cap", o.per_stage_cap);
  psearch->add_option("--transcript", o.transcript);
  add_common(psearch, o);
  auto* plb = pol->add_subcommand("verify-lb", "check that every permutation type is realized");
  add_common(plb, o);
  auto* palmost = pol->add_subcommand("almost-all", "almost-all homogenization with an exception budget");
  palmost->add_option("--epsilon", o.epsilon, "exception fraction, e.g. 1/10");
  palmost->add_option("--height", o.height, "subtree height");
  add_common(palmost, o);

  auto* deg = app.add_subcommand("degrees", "tangent numbers and Devlin bounds");
  deg->require_subcommand(1);
  std::vector<CLI::App*> deg_subs;
  for (const char* name : {"tangent", "devlin", "table"}) {
    auto* s = deg->add_subcommand(name);
    s->add_option("value", o.number)->required();
    if (std::string(name) == "table") s->add_option("--from", o.from, "first d shown");
    add_common(s, o, false);
    deg_subs.push_back(s);
  }

  auto* cond = app.add_subcommand("cond", "condition algebra");
  cond->require_subcommand(1);
  std::vector<CLI::App*> cond_subs;
  for (const char* name : {"glb", "copy", "restrict"}) {
    auto* s = cond->add_subcommand(name);
    add_common(s, o);
    cond_subs.push_back(s);
  }

  auto* wmap = app.add_subcommand("wmap", "W-map construction and CL checks");
  wmap->require_subcommand(1);
  auto* wbuild = wmap->add_subcommand("build");
  wbuild->add_option("--stride", o.stride, "thinning stride (default d+2)");
  wbuild->add_flag("--unbounded", o.unbounded, "search every X instead of |X| <= d+1");
  add_common(wbuild, o);
  auto* wverify = wmap->add_subcommand("verify");
  add_common(wverify, o);

  auto* delta = app.add_subcommand("delta-system", "extract a delta-system subfamily");
  add_common(delta, o);

  std::string name;
  std::string raw;
  int code = 2;
  json doc;
  auto emit = [&](const json& d) {
    if (o.format == "table") {
      out << render_table(d);
    } else {
      out << d.dump(2) << "\n";
    }
  };

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << app.help();
    out << json{{"error", {{"kind", "invalid-input"}, {"message", e.what()}}}}.dump(2) << "\n";
    err << json{{"tool", "hl-lab"}, {"version", HL_LAB_VERSION}, {"args", args}, {"outcome", 2}}.dump() << "\n";
    return 2;
  }

  if (const char* env = std::getenv("HL_LAB_WORKERS")) {
    try {
      o.workers = std::stoi(env);
    } catch (const std::logic_error&) {
      // ignored: the flag value stays in effect
    }
  }

  try {
    for (auto* s : app.get_subcommands()) {
      name = s->get_name();
      for (auto* t : s->get_subcommands()) name += " " + t->get_name();
    }
    json input = read_input(o, in, raw);
    Outcome res;
    if (lex->parsed()) {
      res = run_lex_sort(o, input);
    } else if (val->parsed()) {
      res = run_validate_subtree(o, input);
    } else if (sdhl->parsed()) {
      res = run_sdhl_search(o, input);
    } else if (fhl->parsed()) {
      res = run_fhl(o);
    } else if (hlc->parsed()) {
      res = run_hl_check(o, input);
    } else if (mono->parsed()) {
      res = run_mono_subtree(o, input);
    } else if (frun->parsed()) {
      res = run_fusion_run(o, input);
    } else if (fcheck->parsed()) {
      res = run_fusion_check(input);
    } else if (fpart->parsed()) {
      res = run_fusion_partial(o, input);
    } else if (dim->parsed()) {
      res = run_dim_induct(o, input);
    } else if (psearch->parsed()) {
      res = run_polarized_search(o, input);
    } else if (plb->parsed()) {
      res = run_polarized_verify_lb(input);
    } else if (palmost->parsed()) {
      res = run_polarized_almost_all(o, input);
    } else if (wbuild->parsed() || wverify->parsed()) {
      res = run_wmap(wbuild->parsed() ? "build" : "verify", o, input);
    } else if (delta->parsed()) {
      res = run_delta_system(input);
    } else {
      for (auto* s : deg_subs) {
        if (s->parsed()) res = run_degrees(s->get_name(), o);
      }
      for (auto* s : cond_subs) {
        if (s->parsed()) res = run_cond(s->get_name(), input);
      }
    }
    doc = std::move(res.doc);
    code = res.code;
  } catch (const Error& e) {
    code = e.kind() == ErrorKind::CapExceeded ? 3 : 2;
    doc = {{"error", {{"kind", error_kind_name(e.kind())}, {"message", e.what()}}}};
  } catch (const json::exception& e) {
    code = 2;
    doc = {{"error", {{"kind", "invalid-input"}, {"message", e.what()}}}};
  }
  emit(doc);

  std::string digest_src;
  for (const auto& a : args) digest_src += a + '\0';
  digest_src += raw;
  json caps = {{"cap", o.cap}};
  if (frun->parsed() || fpart->parsed() || dim->parsed() || psearch->parsed()) caps["per_stage_cap"] = o.per_stage_cap;
  json manifest = {{"tool", "hl-lab"},
                   {"version", HL_LAB_VERSION},
                   {"subcommand", name},
                   {"args", args},
                   {"input_digest", "sha256:" + sha256_hex(digest_src)},
                   {"seed", fhl->parsed() ? json(o.seed) : json(nullptr)},
                   {"caps", caps},
                   {"workers", o.workers},
                   {"outcome", code}};
  err << manifest.dump() << "\n";
  return code;
}

}  // namespace hl::cli
