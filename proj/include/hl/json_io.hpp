#pragma once

#include <vector>

#include "json.hpp"

#include "hl/coloring.hpp"
#include "hl/subtree.hpp"
#include "hl/tailcone.hpp"
#include "hl/tree.hpp"
#include "hl/witness.hpp"

namespace hl {

nlohmann::json nodes_to_json(const std::vector<Node>& nodes);
std::vector<Node> nodes_from_json(const nlohmann::json& j);

nlohmann::json tree_to_json(const TreeSpace& space);
// {"branching": b, "height": n} or {"nodes": [...]}.
TreeSpace tree_from_json(const nlohmann::json& j);

// Either "trees": [...] or "tree" together with "d" copies.
std::vector<TreeSpace> trees_from_document(const nlohmann::json& doc, int d);

nlohmann::json report_to_json(const SubtreeReport& r);
SubtreeReport report_from_json(const nlohmann::json& j);

nlohmann::json verdict_to_json(const Verdict& v);

nlohmann::json witness_to_json(const SdhlWitness& w);
SdhlWitness witness_from_json(const nlohmann::json& j);

ColoringFamily family_from_json(const nlohmann::json& j);

nlohmann::json certificate_to_json(const TailConeCertificate& c);
TailConeCertificate certificate_from_json(const nlohmann::json& j);

}  // namespace hl
