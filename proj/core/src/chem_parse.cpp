#include "molkd/chem.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>

namespace molkd {

namespace {

struct ElementInfo {
  int mass_bucket;
  std::vector<int> valences;  // ascending
};

const std::unordered_map<std::string, ElementInfo>& element_table() {
  static const std::unordered_map<std::string, ElementInfo> table = {
      {"H", {1, {1}}},    {"B", {11, {3}}},      {"C", {12, {4}}},
      {"N", {14, {3, 5}}}, {"O", {16, {2}}},      {"F", {19, {1}}},
      {"P", {31, {3, 5}}}, {"S", {32, {2, 4, 6}}}, {"Cl", {35, {1}}},
      {"Br", {80, {1}}},  {"I", {127, {1}}},
  };
  return table;
}

bool aromatic_capable(const std::string& symbol) {
  return symbol == "B" || symbol == "C" || symbol == "N" || symbol == "O" ||
         symbol == "P" || symbol == "S";
}

int implicit_h_for_bare(const std::string& element, double order_sum) {
  const auto& info = element_table().at(element);
  for (int v : info.valences) {
    if (static_cast<double>(v) >= order_sum) {
      return v - static_cast<int>(std::ceil(order_sum));
    }
  }
  return 0;  // hypervalent as written; no hydrogens to add
}

struct RingOpen {
  std::size_t atom;
  std::optional<BondKind> bond;
  std::size_t offset;
};

struct Parser {
  const std::string& s;
  std::size_t pos = 0;

  MolGraph graph;
  std::vector<bool> from_bracket;

  std::ptrdiff_t prev = -1;
  std::optional<BondKind> pending_bond;
  std::vector<std::pair<std::ptrdiff_t, std::size_t>> branch_stack;  // (prev, '(' offset)
  std::map<int, RingOpen> open_rings;

  explicit Parser(const std::string& text) : s(text) {}

  [[noreturn]] void fail(Errc code, const std::string& what, std::size_t at) {
    throw Error(code, what + " at byte " + std::to_string(at), static_cast<std::ptrdiff_t>(at));
  }

  void add_atom(AtomRecord atom, bool bracket) {
    const std::size_t idx = graph.atoms.size();
    graph.atoms.push_back(std::move(atom));
    from_bracket.push_back(bracket);
    if (prev >= 0) {
      add_bond(static_cast<std::size_t>(prev), idx, pending_bond);
    }
    pending_bond.reset();
    prev = static_cast<std::ptrdiff_t>(idx);
  }

  void add_bond(std::size_t a, std::size_t b, std::optional<BondKind> kind) {
    if (a == b) {
      fail(Errc::unclosed_ring, "ring bond closes on its opening atom", pos);
    }
    for (const Bond& e : graph.bonds) {
      if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) {
        fail(Errc::unclosed_ring, "duplicate bond between atom pair", pos);
      }
    }
    BondKind k;
    if (kind) {
      k = *kind;
    } else {
      k = (graph.atoms[a].aromatic && graph.atoms[b].aromatic) ? BondKind::aromatic_bond
                                                               : BondKind::single;
    }
    graph.bonds.push_back(Bond{a, b, k});
  }

  void ring_closure(int digit, std::size_t at) {
    if (prev < 0) {
      fail(Errc::unknown_element, "ring closure before any atom", at);
    }
    auto it = open_rings.find(digit);
    if (it == open_rings.end()) {
      open_rings.emplace(digit, RingOpen{static_cast<std::size_t>(prev), pending_bond, at});
    } else {
      // Closing-side bond symbol wins when both sides carry one.
      std::optional<BondKind> kind = pending_bond ? pending_bond : it->second.bond;
      add_bond(it->second.atom, static_cast<std::size_t>(prev), kind);
      open_rings.erase(it);
    }
    pending_bond.reset();
  }

  int read_digits(int max_digits) {
    int value = 0;
    int seen = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])) &&
           seen < max_digits) {
      value = value * 10 + (s[pos] - '0');
      ++pos;
      ++seen;
    }
    return seen > 0 ? value : -1;
  }

  void parse_bracket_atom() {
    const std::size_t start = pos;
    ++pos;  // '['
    read_digits(3);  // isotope, discarded

    if (pos >= s.size()) {
      fail(Errc::malformed_bracket_atom, "unterminated bracket atom", start);
    }

    std::string symbol;
    bool aromatic = false;
    const std::size_t sym_at = pos;
    if (s.compare(pos, 2, "Cl") == 0 || s.compare(pos, 2, "Br") == 0) {
      symbol = s.substr(pos, 2);
      pos += 2;
    } else if (std::isupper(static_cast<unsigned char>(s[pos]))) {
      symbol = s.substr(pos, 1);
      ++pos;
    } else if (std::islower(static_cast<unsigned char>(s[pos]))) {
      symbol = std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(s[pos]))));
      aromatic = true;
      ++pos;
    } else {
      fail(Errc::malformed_bracket_atom, "expected element symbol", pos);
    }
    if (!is_supported_element(symbol)) {
      fail(Errc::unknown_element, "unknown element '" + symbol + "'", sym_at);
    }
    if (aromatic && !aromatic_capable(symbol)) {
      fail(Errc::unknown_element, "element cannot be aromatic: '" + symbol + "'", sym_at);
    }

    while (pos < s.size() && s[pos] == '@') ++pos;  // chirality, discarded

    int h_count = 0;
    if (pos < s.size() && s[pos] == 'H') {
      ++pos;
      int n = read_digits(2);
      h_count = (n < 0) ? 1 : n;
    }

    int charge = 0;
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
      const char sign_char = s[pos];
      const int sign = (sign_char == '+') ? 1 : -1;
      ++pos;
      int n = read_digits(2);
      if (n >= 0) {
        charge = sign * n;
      } else {
        charge = sign;
        while (pos < s.size() && s[pos] == sign_char) {
          charge += sign;
          ++pos;
        }
      }
    }

    int class_id = 0;
    if (pos < s.size() && s[pos] == ':') {
      ++pos;
      int n = read_digits(4);
      if (n < 0) {
        fail(Errc::malformed_bracket_atom, "expected class number after ':'", pos);
      }
      class_id = n;
    }

    if (pos >= s.size() || s[pos] != ']') {
      fail(Errc::malformed_bracket_atom, "expected ']'", pos);
    }
    ++pos;

    AtomRecord atom;
    atom.element = symbol;
    atom.aromatic = aromatic;
    atom.mass_bucket = element_mass_bucket(symbol);
    atom.implicit_h = h_count;
    atom.implicit_h_at_parse = h_count;
    atom.charge = charge;
    atom.class_id = class_id;
    add_atom(std::move(atom), /*bracket=*/true);
  }

  void parse_organic_atom() {
    const std::size_t at = pos;
    std::string symbol;
    bool aromatic = false;
    if (s.compare(pos, 2, "Cl") == 0 || s.compare(pos, 2, "Br") == 0) {
      symbol = s.substr(pos, 2);
      pos += 2;
    } else {
      const char c = s[pos];
      switch (c) {
        case 'B': case 'C': case 'N': case 'O': case 'P': case 'S':
        case 'F': case 'I':
          symbol = std::string(1, c);
          break;
        case 'b': case 'c': case 'n': case 'o': case 'p': case 's':
          symbol = std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
          aromatic = true;
          break;
        default:
          fail(Errc::unknown_element, std::string("unexpected character '") + c + "'", at);
      }
      ++pos;
    }

    AtomRecord atom;
    atom.element = symbol;
    atom.aromatic = aromatic;
    atom.mass_bucket = element_mass_bucket(symbol);
    add_atom(std::move(atom), /*bracket=*/false);
  }

  MolGraph run() {
    if (s.empty()) {
      throw Error(Errc::empty_input, "empty SMILES input", 0);
    }
    while (pos < s.size()) {
      const char c = s[pos];
      if (c == '(') {
        if (prev < 0) {
          fail(Errc::unbalanced_paren, "branch with no preceding atom", pos);
        }
        branch_stack.emplace_back(prev, pos);
        ++pos;
      } else if (c == ')') {
        if (branch_stack.empty()) {
          fail(Errc::unbalanced_paren, "unmatched ')'", pos);
        }
        prev = branch_stack.back().first;
        branch_stack.pop_back();
        ++pos;
      } else if (c == '-' || c == '/' || c == '\\') {
        pending_bond = BondKind::single;  // stereo slashes read as single bonds
        ++pos;
      } else if (c == '=') {
        pending_bond = BondKind::double_bond;
        ++pos;
      } else if (c == '#') {
        pending_bond = BondKind::triple;
        ++pos;
      } else if (c == ':') {
        pending_bond = BondKind::aromatic_bond;
        ++pos;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        ring_closure(c - '0', pos);
        ++pos;
      } else if (c == '%') {
        const std::size_t at = pos;
        ++pos;
        if (pos + 1 >= s.size() ||
            !std::isdigit(static_cast<unsigned char>(s[pos])) ||
            !std::isdigit(static_cast<unsigned char>(s[pos + 1]))) {
          fail(Errc::unknown_element, "expected two digits after '%'", at);
        }
        const int number = (s[pos] - '0') * 10 + (s[pos + 1] - '0');
        pos += 2;
        ring_closure(number, at);
      } else if (c == '[') {
        parse_bracket_atom();
      } else {
        parse_organic_atom();
      }
    }

    if (!branch_stack.empty()) {
      fail(Errc::unbalanced_paren, "unmatched '('", branch_stack.back().second);
    }
    if (!open_rings.empty()) {
      const auto& first = *open_rings.begin();
      fail(Errc::unclosed_ring,
           "ring bond " + std::to_string(first.first) + " never closed", first.second.offset);
    }
    if (pending_bond) {
      fail(Errc::unknown_element, "dangling bond at end of input", s.size() - 1);
    }

    assign_implicit_hydrogens();
    graph.source = s;
    return std::move(graph);
  }

  void assign_implicit_hydrogens() {
    std::vector<double> order_sum(graph.atoms.size(), 0.0);
    for (const Bond& b : graph.bonds) {
      order_sum[b.a] += bond_order(b.kind);
      order_sum[b.b] += bond_order(b.kind);
    }
    for (std::size_t i = 0; i < graph.atoms.size(); ++i) {
      if (from_bracket[i]) continue;  // bracket atoms take their written count
      AtomRecord& a = graph.atoms[i];
      a.implicit_h = implicit_h_for_bare(a.element, order_sum[i]);
      a.implicit_h_at_parse = a.implicit_h;
    }
  }
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = text.find(sep, start);
    if (at == std::string::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, at - start));
    start = at + 1;
  }
}

}  // namespace

double bond_order(BondKind k) {
  switch (k) {
    case BondKind::single: return 1.0;
    case BondKind::aromatic_bond: return 1.5;
    case BondKind::double_bond: return 2.0;
    case BondKind::triple: return 3.0;
  }
  return 1.0;
}

bool is_supported_element(const std::string& symbol) {
  return element_table().count(symbol) > 0;
}

int element_mass_bucket(const std::string& symbol) {
  auto it = element_table().find(symbol);
  if (it == element_table().end()) {
    throw Error(Errc::unknown_element, "unknown element '" + symbol + "'");
  }
  return it->second.mass_bucket;
}

MolGraph parse_smiles(const std::string& s) {
  Parser parser(s);
  return parser.run();
}

MolGraph explicit_hydrogens(const MolGraph& g) {
  MolGraph out = g;
  const std::size_t heavy = g.atoms.size();
  for (std::size_t i = 0; i < heavy; ++i) {
    const int count = out.atoms[i].implicit_h;
    out.atoms[i].implicit_h = 0;
    for (int k = 0; k < count; ++k) {
      AtomRecord h;
      h.element = "H";
      h.mass_bucket = 1;
      out.bonds.push_back(Bond{i, out.atoms.size(), BondKind::single});
      out.atoms.push_back(std::move(h));
    }
  }
  return out;
}

ReactionRecord parse_reaction_line(const std::string& line) {
  std::string text = line;
  if (!text.empty() && text.back() == '\r') text.pop_back();

  const std::vector<std::string> columns = split(text, '\t');
  if (columns.size() != 3) {
    throw Error(Errc::bad_column_count,
                "expected 3 tab-separated columns, got " + std::to_string(columns.size()));
  }

  ReactionRecord record;
  for (const std::string& smiles : split(columns[0], '.')) {
    record.reactants.push_back(explicit_hydrogens(parse_smiles(smiles)));
  }
  for (const std::string& smiles : split(columns[1], '.')) {
    record.products.push_back(explicit_hydrogens(parse_smiles(smiles)));
  }

  const std::string& ytext = columns[2];
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(ytext.data(), ytext.data() + ytext.size(), value);
  if (ec != std::errc() || ptr != ytext.data() + ytext.size() || std::isnan(value)) {
    throw Error(Errc::yield_out_of_range, "yield is not a number: '" + ytext + "'");
  }
  if (value < 0.0 || value > 1.0) {
    throw Error(Errc::yield_out_of_range, "yield " + ytext + " outside [0, 1]");
  }
  record.yield_fraction = value;
  return record;
}

namespace {

struct Writer {
  const MolGraph& g;
  std::vector<std::vector<std::size_t>> adjacency;     // neighbor atom indices, ascending
  std::vector<std::vector<BondKind>> adjacency_kind;
  std::vector<double> order_sum;
  std::string out;

  explicit Writer(const MolGraph& graph) : g(graph) {
    adjacency.resize(g.atoms.size());
    adjacency_kind.resize(g.atoms.size());
    order_sum.assign(g.atoms.size(), 0.0);
    for (const Bond& b : g.bonds) {
      adjacency[b.a].push_back(b.b);
      adjacency_kind[b.a].push_back(b.kind);
      adjacency[b.b].push_back(b.a);
      adjacency_kind[b.b].push_back(b.kind);
      order_sum[b.a] += bond_order(b.kind);
      order_sum[b.b] += bond_order(b.kind);
    }
    for (std::size_t i = 0; i < adjacency.size(); ++i) {
      std::vector<std::size_t> perm(adjacency[i].size());
      for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = k;
      std::sort(perm.begin(), perm.end(),
                [&](std::size_t x, std::size_t y) { return adjacency[i][x] < adjacency[i][y]; });
      std::vector<std::size_t> nb;
      std::vector<BondKind> kinds;
      for (std::size_t k : perm) {
        nb.push_back(adjacency[i][k]);
        kinds.push_back(adjacency_kind[i][k]);
      }
      adjacency[i] = std::move(nb);
      adjacency_kind[i] = std::move(kinds);
    }
  }

  std::string bond_token(std::size_t a, std::size_t b, BondKind k) const {
    const bool both_aromatic = g.atoms[a].aromatic && g.atoms[b].aromatic;
    switch (k) {
      case BondKind::single: return both_aromatic ? "-" : "";
      case BondKind::aromatic_bond: return both_aromatic ? "" : ":";
      case BondKind::double_bond: return "=";
      case BondKind::triple: return "#";
    }
    return "";
  }

  std::string atom_token(std::size_t i) const {
    const AtomRecord& a = g.atoms[i];
    std::string sym = a.element;
    if (a.aromatic) {
      for (char& c : sym) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    bool bracket = a.charge != 0 || a.class_id != 0 || a.element == "H";
    if (!bracket) {
      bracket = implicit_h_for_bare(a.element, order_sum[i]) != a.implicit_h;
    }
    if (!bracket) return sym;

    std::string token = "[" + sym;
    if (a.implicit_h == 1) {
      token += "H";
    } else if (a.implicit_h > 1) {
      token += "H" + std::to_string(a.implicit_h);
    }
    if (a.charge == 1) {
      token += "+";
    } else if (a.charge == -1) {
      token += "-";
    } else if (a.charge > 1) {
      token += "+" + std::to_string(a.charge);
    } else if (a.charge < -1) {
      token += "-" + std::to_string(-a.charge);
    }
    if (a.class_id != 0) token += ":" + std::to_string(a.class_id);
    return token + "]";
  }

  void write() {
    std::vector<bool> visited(g.atoms.size(), false);
    bool first_component = true;
    for (std::size_t root = 0; root < g.atoms.size(); ++root) {
      if (visited[root]) continue;
      if (!first_component) out += ".";
      first_component = false;
      write_component(root, visited);
    }
  }

  struct RingLabel {
    std::size_t other;
    BondKind kind;
    int number = 0;
    bool opener = false;
  };

  void write_component(std::size_t root, std::vector<bool>& visited) {
    // Iterative DFS pass: spanning tree + back edges in emission order.
    std::vector<std::ptrdiff_t> parent(g.atoms.size(), -1);
    std::vector<std::vector<std::size_t>> children(g.atoms.size());
    std::vector<std::vector<RingLabel>> rings(g.atoms.size());
    std::vector<std::size_t> emit_order;
    std::set<std::pair<std::size_t, std::size_t>> ring_edges;

    std::vector<std::size_t> stack{root};
    visited[root] = true;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      emit_order.push_back(u);
      // Reverse order so the lowest-index neighbor is emitted first.
      for (std::size_t k = adjacency[u].size(); k-- > 0;) {
        const std::size_t v = adjacency[u][k];
        if (!visited[v]) {
          visited[v] = true;
          parent[v] = static_cast<std::ptrdiff_t>(u);
          stack.push_back(v);
        }
      }
      // Children in ascending neighbor order (stack gave us discovery; rebuild).
    }
    for (std::size_t u : emit_order) {
      if (parent[u] >= 0) children[static_cast<std::size_t>(parent[u])].push_back(u);
    }
    // Back edges: any bond not in the spanning tree, attributed to both ends.
    std::vector<std::size_t> emit_rank(g.atoms.size(), 0);
    for (std::size_t r = 0; r < emit_order.size(); ++r) emit_rank[emit_order[r]] = r;
    for (std::size_t u : emit_order) {
      for (std::size_t k = 0; k < adjacency[u].size(); ++k) {
        const std::size_t v = adjacency[u][k];
        if (parent[v] == static_cast<std::ptrdiff_t>(u) ||
            parent[u] == static_cast<std::ptrdiff_t>(v)) {
          continue;
        }
        const auto key = std::minmax(u, v);
        if (ring_edges.count({key.first, key.second})) continue;
        ring_edges.insert({key.first, key.second});
        const bool u_first = emit_rank[u] < emit_rank[v];
        rings[u].push_back(RingLabel{v, adjacency_kind[u][k], 0, u_first});
        rings[v].push_back(RingLabel{u, adjacency_kind[u][k], 0, !u_first});
      }
    }

    // Emission pass with on-the-fly ring numbering.
    std::map<std::pair<std::size_t, std::size_t>, int> ring_number;
    std::set<int> in_use;
    auto allocate = [&]() {
      for (int n = 1; n < 100; ++n) {
        if (!in_use.count(n)) {
          in_use.insert(n);
          return n;
        }
      }
      throw Error(Errc::io_error, "more than 99 simultaneously open ring bonds");
    };

    std::string& s = out;
    auto emit_ring_labels = [&](std::size_t u) {
      for (RingLabel& rl : rings[u]) {
        const auto key = std::minmax(u, rl.other);
        int number;
        if (rl.opener) {
          number = allocate();
          ring_number[{key.first, key.second}] = number;
          s += bond_token(u, rl.other, rl.kind);
        } else {
          number = ring_number.at({key.first, key.second});
          in_use.erase(number);
        }
        s += number < 10 ? std::to_string(number) : "%" + std::to_string(number);
      }
    };

    // Recursive emit over the spanning tree.
    auto emit = [&](auto&& self, std::size_t u) -> void {
      s += atom_token(u);
      emit_ring_labels(u);
      const auto& kids = children[u];
      for (std::size_t k = 0; k < kids.size(); ++k) {
        const std::size_t v = kids[k];
        BondKind kind = BondKind::single;
        for (std::size_t j = 0; j < adjacency[u].size(); ++j) {
          if (adjacency[u][j] == v) kind = adjacency_kind[u][j];
        }
        const bool last = (k + 1 == kids.size());
        if (!last) s += "(";
        s += bond_token(u, v, kind);
        self(self, v);
        if (!last) s += ")";
      }
    };
    emit(emit, root);
  }
};

}  // namespace

std::string write_smiles(const MolGraph& g) {
  if (g.atoms.empty()) {
    throw Error(Errc::empty_input, "cannot serialize an empty graph");
  }
  Writer w(g);
  w.write();
  return w.out;
}

}  // namespace molkd
