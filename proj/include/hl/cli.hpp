#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace hl::cli {

// Runs one subcommand. Writes a JSON document (or its table rendering) to `out` and the run
// manifest to `err`. Returns 0 found/valid, 1 not-found/invalid, 2 input error, 3 cap exceeded.
int dispatch(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

std::string render_table(const nlohmann::json& doc);

std::string sha256_hex(const std::string& data);

}  // namespace hl::cli
