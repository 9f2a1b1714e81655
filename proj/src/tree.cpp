#include "hl/tree.hpp"

#include <algorithm>

#include "hl/error.hpp"

namespace hl {

Node::Node(std::string digits) : digits_(std::move(digits)) {
  for (char c : digits_) {
    if (c < '0' || c > '9') {
      throw Error(ErrorKind::InvalidInput, "node \"" + digits_ + "\" has a non-digit character");
    }
  }
}

int Node::max_digit() const {
  int m = -1;
  for (char c : digits_) m = std::max(m, c - '0');
  return m;
}

Node Node::prefix(int len) const {
  if (len < 0 || len > height()) {
    throw Error(ErrorKind::OutOfRange,
                "prefix length " + std::to_string(len) + " out of range for \"" + digits_ + "\"");
  }
  Node out;
  out.digits_ = digits_.substr(0, static_cast<size_t>(len));
  return out;
}

Node Node::child(int digit) const {
  Node out;
  out.digits_ = digits_;
  out.digits_.push_back(static_cast<char>('0' + digit));
  return out;
}

bool Node::is_prefix_of(const Node& other) const {
  return digits_.size() <= other.digits_.size() &&
         other.digits_.compare(0, digits_.size(), digits_) == 0;
}

bool Node::comparable(const Node& other) const {
  return is_prefix_of(other) || other.is_prefix_of(*this);
}

std::strong_ordering Node::operator<=>(const Node& other) const {
  if (digits_.size() != other.digits_.size()) return digits_.size() <=> other.digits_.size();
  int c = digits_.compare(other.digits_);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string_view lex_order_name(LexOrder o) {
  switch (o) {
    case LexOrder::Less: return "Less";
    case LexOrder::Equal: return "Equal";
    case LexOrder::Greater: return "Greater";
  }
  return "Equal";
}

LexOrder lex_compare(const Node& s, const Node& t) {
  if (s.max_digit() > 1 || t.max_digit() > 1) {
    throw Error(ErrorKind::UnsupportedAlphabet, "lexicographic order is defined on binary nodes only");
  }
  const std::string& a = s.str();
  const std::string& b = t.str();
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    if (a[i] != b[i]) return a[i] < b[i] ? LexOrder::Less : LexOrder::Greater;
  }
  if (a.size() == b.size()) return LexOrder::Equal;
  if (a.size() < b.size()) return b[a.size()] == '1' ? LexOrder::Less : LexOrder::Greater;
  return a[b.size()] == '0' ? LexOrder::Less : LexOrder::Greater;
}

bool lex_less(const Node& s, const Node& t) { return lex_compare(s, t) == LexOrder::Less; }

TreeSpace TreeSpace::uniform(int branching, int height) {
  if (branching < 2 || branching > 10) {
    throw Error(ErrorKind::InvalidInput, "branching must lie in [2, 10]");
  }
  if (height < 1) throw Error(ErrorKind::InvalidInput, "height must be at least 1");
  TreeSpace s;
  s.branching_ = branching;
  s.height_ = height;
  return s;
}

TreeSpace TreeSpace::from_nodes(const std::vector<Node>& nodes) {
  TreeSpace s;
  s.explicit_ = true;
  s.nodes_.insert(nodes.begin(), nodes.end());
  if (!s.nodes_.count(Node())) {
    throw Error(ErrorKind::InvalidInput, "explicit tree must contain the empty node");
  }
  int maxh = 0;
  int maxd = 1;
  for (const Node& t : s.nodes_) {
    maxh = std::max(maxh, t.height());
    maxd = std::max(maxd, t.max_digit());
    if (t.height() > 0 && !s.nodes_.count(t.prefix(t.height() - 1))) {
      throw Error(ErrorKind::InvalidInput,
                  "explicit tree is not closed under predecessors at \"" + t.str() + "\"");
    }
  }
  s.height_ = maxh + 1;
  s.branching_ = maxd + 1;
  s.levels_.assign(static_cast<size_t>(s.height_), {});
  for (const Node& t : s.nodes_) s.levels_[static_cast<size_t>(t.height())].push_back(t);
  for (const Node& t : s.nodes_) {
    if (t.height() + 1 < s.height_) {
      bool has = false;
      for (int c = 0; c < s.branching_ && !has; ++c) has = s.nodes_.count(t.child(c)) > 0;
      if (!has) {
        throw Error(ErrorKind::InvalidInput,
                    "explicit tree is not well-pruned: \"" + t.str() + "\" has no successor");
      }
    }
  }
  return s;
}

bool TreeSpace::contains(const Node& t) const {
  if (explicit_) return nodes_.count(t) > 0;
  return t.height() < height_ && t.max_digit() < branching_;
}

void TreeSpace::require(const Node& t) const {
  if (!contains(t)) throw Error(ErrorKind::UnknownNode, "node \"" + t.str() + "\" is not in the tree");
}

std::vector<Node> TreeSpace::level(int alpha) const {
  if (alpha < 0 || alpha >= height_) {
    throw Error(ErrorKind::OutOfRange, "level " + std::to_string(alpha) + " is outside the tree");
  }
  if (explicit_) return levels_[static_cast<size_t>(alpha)];
  return extensions_at(Node(), alpha);
}

std::vector<Node> TreeSpace::successors(const Node& t) const {
  require(t);
  std::vector<Node> out;
  if (t.height() + 1 >= height_) return out;
  for (int c = 0; c < branching_; ++c) {
    Node s = t.child(c);
    if (!explicit_ || nodes_.count(s)) out.push_back(std::move(s));
  }
  return out;
}

std::vector<Node> TreeSpace::extensions_at(const Node& t, int alpha) const {
  std::vector<Node> out;
  if (alpha < t.height() || alpha >= height_) return out;
  if (explicit_) {
    for (const Node& s : levels_[static_cast<size_t>(alpha)]) {
      if (t.is_prefix_of(s)) out.push_back(s);
    }
    return out;
  }
  int extra = alpha - t.height();
  size_t count = 1;
  for (int i = 0; i < extra; ++i) count *= static_cast<size_t>(branching_);
  out.reserve(count);
  std::string buf = t.str();
  buf.resize(static_cast<size_t>(alpha), '0');
  std::vector<int> digits(static_cast<size_t>(extra), 0);
  for (size_t k = 0; k < count; ++k) {
    for (int i = 0; i < extra; ++i) {
      buf[static_cast<size_t>(t.height() + i)] = static_cast<char>('0' + digits[static_cast<size_t>(i)]);
    }
    out.emplace_back(buf);
    for (int i = extra - 1; i >= 0; --i) {
      if (++digits[static_cast<size_t>(i)] < branching_) break;
      digits[static_cast<size_t>(i)] = 0;
    }
  }
  return out;
}

std::vector<Node> TreeSpace::extensions(const Node& t) const {
  std::vector<Node> out;
  for (int a = t.height(); a < height_; ++a) {
    auto lv = extensions_at(t, a);
    out.insert(out.end(), lv.begin(), lv.end());
  }
  return out;
}

std::vector<Node> TreeSpace::nodes() const { return extensions(Node()); }

size_t TreeSpace::size() const {
  if (explicit_) return nodes_.size();
  size_t total = 0;
  size_t width = 1;
  for (int a = 0; a < height_; ++a) {
    total += width;
    width *= static_cast<size_t>(branching_);
  }
  return total;
}

bool TreeSpace::operator==(const TreeSpace& other) const {
  if (explicit_ != other.explicit_) return false;
  if (explicit_) return nodes_ == other.nodes_;
  return branching_ == other.branching_ && height_ == other.height_;
}

int sequence_height(const LevelSequence& seq) {
  if (seq.empty()) return 0;
  int h = seq[0].height();
  for (const Node& t : seq) {
    if (t.height() != h) throw Error(ErrorKind::InvalidInput, "tuple is not a level sequence");
  }
  return h;
}

LevelSequence restrict(const LevelSequence& seq, int xi) {
  int h = sequence_height(seq);
  if (xi < 0 || xi > h) {
    throw Error(ErrorKind::OutOfRange,
                "restriction level " + std::to_string(xi) + " exceeds height " + std::to_string(h));
  }
  LevelSequence out;
  out.reserve(seq.size());
  for (const Node& t : seq) out.push_back(t.prefix(xi));
  return out;
}

LevelSequence restrict(const LevelSequence& seq, int xi, const TreeSpace& space) {
  for (const Node& t : seq) space.require(t);
  return restrict(seq, xi);
}

std::string tuple_key(const std::vector<Node>& tuple) {
  std::string key;
  for (size_t j = 0; j < tuple.size(); ++j) {
    if (j) key.push_back(',');
    key += tuple[j].str();
  }
  return key;
}

std::vector<Node> parse_tuple_key(std::string_view key) {
  std::vector<Node> out;
  size_t start = 0;
  while (true) {
    size_t pos = key.find(',', start);
    out.emplace_back(std::string(key.substr(start, pos == std::string_view::npos ? key.npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<Node> sorted_canonical(std::vector<Node> nodes) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

}  // namespace hl
