#include "memodyn/netlist.hpp"

#include "memodyn/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <sstream>

namespace memodyn {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string at_line(int line, const std::string& what) {
  return "netlist line " + std::to_string(line) + ": " + what;
}

}  // namespace

QuadraticMemductance quadratic_coefficients(const Polynomial<double>& g) {
  const auto& c = g.coefficients();
  for (Eigen::Index i = 3; i < c.size(); ++i)
    if (c(i) != 0) fail_validation("memductance must have the form a + 3 b w^2");
  if (c.size() > 1 && c(1) != 0) fail_validation("memductance must have the form a + 3 b w^2 (zero linear term)");
  return {c(0), c.size() > 2 ? c(2) / 3.0 : 0.0};
}

ComponentValues component_values(const NetlistSpec& spec) {
  const MmoParams& p = spec.params;
  validate(p);
  if (!(spec.R > 0 && spec.C > 0)) fail_validation("base R and C must be positive");
  if (std::abs(spec.R * spec.C - 1.0) > 1e-12) fail_validation("base values must satisfy RC = 1 second");
  const QuadraticMemductance q = quadratic_coefficients(p.g);
  if (q.b == 0) fail_validation("multiplier branch undefined");
  if (p.K == 0) fail_validation("R7 undefined");
  if (p.beta == 0) fail_validation("R6 undefined");
  if (p.alpha == 0) fail_validation("C1 undefined");
  const double R = spec.R, C = spec.C;
  return {
      {"C1", C * p.alpha / p.s_c},
      {"R1", 0.1 * p.epsilon * R / p.s_c},
      {"R2", p.eta * p.epsilon * R / p.s_c},
      {"R3", R / p.s_c},
      {"R4", 0.1 * R / (3 * q.b * p.eta * p.eta)},
      {"R5", R / p.eta},
      {"R6", R / (p.beta * p.s_c)},
      {"R7", R / p.K},
      {"V", p.a_s},
  };
}

std::string emit_netlist(const NetlistSpec& spec) {
  const ComponentValues v = component_values(spec);
  const MmoParams& p = spec.params;
  const QuadraticMemductance q = quadratic_coefficients(p.g);
  double T = spec.period_estimate;
  if (!(T > 0)) {
    const double ab = p.alpha * p.beta;
    T = 2 * std::numbers::pi / (p.s_c * (ab > 0 ? std::sqrt(ab) : 1.0));
  }
  const std::string R = fmt(spec.R), C = fmt(spec.C);

  std::ostringstream os;
  os << "memristive MMO oscillator, g(w) = a + 3 b w^2\n";
  os << "* a = " << fmt(q.a) << ", b = " << fmt(q.b) << ", epsilon = " << fmt(p.epsilon) << ", alpha = " << fmt(p.alpha)
     << ", K = " << fmt(p.K) << ", beta = " << fmt(p.beta) << ", eta = " << fmt(p.eta) << ", s_c = " << fmt(p.s_c)
     << "\n";
  os << "* node voltages: nxb = x/eta, nxbn = -x/eta, ny = y, nz = z, nwb = w/eta, ngn = -g(w)\n";
  os << "\n";
  os << ".SUBCKT OPAMP INP INN OUT\n"
        "RIN INP INN 1e12\n"
        "GA 0 NA INP INN 1e-3\n"
        "RA NA 0 1e8\n"
        "CA NA 0 1.5915494309189535e-09\n"
        "EOUT OUT 0 NA 0 1\n"
        ".ENDS OPAMP\n";
  os << ".SUBCKT MULT X Y W COM\n"
        "BMUL W COM V=0.1*V(X,COM)*V(Y,COM)\n"
        ".ENDS MULT\n";
  os << "\n* fast integrator: xbar' = -(s_c/eps)(y/eta + g(w) xbar)\n";
  os << "R2 ny sx " << fmt(v.at("R2")) << "\n";
  os << "R1 nm2 sx " << fmt(v.at("R1")) << "\n";
  os << "CX sx nxb " << C << "\n";
  os << "XOX 0 sx nxb OPAMP\n";
  os << "\n* inverter: -xbar\n";
  os << "RIX1 nxb six " << R << "\n";
  os << "RIX2 six nxbn " << R << "\n";
  os << "XOIX 0 six nxbn OPAMP\n";
  os << "\n* internal state: (w/eta)' = s_c xbar\n";
  os << "R3 nxbn sw " << fmt(v.at("R3")) << "\n";
  os << "CW sw nwb " << C << "\n";
  os << "XOW 0 sw nwb OPAMP\n";
  os << "\n* slow integrator: y' from xbar, y, z and the bias source\n";
  os << "R5 nxbn sy " << fmt(v.at("R5")) << "\n";
  os << "R7 ny sy " << fmt(v.at("R7")) << "\n";
  os << "RZY nz sy " << R << "\n";
  os << "RAS nas sy " << R << "\n";
  os << "VAS 0 nas DC " << fmt(v.at("V")) << "\n";
  os << "C1 sy ny " << fmt(v.at("C1")) << "\n";
  os << "XOY 0 sy ny OPAMP\n";
  os << "\n* z' = -s_c beta y\n";
  os << "R6 ny sz " << fmt(v.at("R6")) << "\n";
  os << "CZ sz nz " << C << "\n";
  os << "XOZ 0 sz nz OPAMP\n";
  os << "\n* first multiplier: 0.1 (w/eta)^2\n";
  os << "XM1 nwb nwb nm1 0 MULT\n";
  os << "\n* summer: -(a + 3 b w^2)\n";
  os << "R4 nm1 sg " << fmt(v.at("R4")) << "\n";
  os << "RA nva sg " << R << "\n";
  os << "VA nva 0 DC " << fmt(q.a) << "\n";
  os << "RGF sg ngn " << R << "\n";
  os << "XOG 0 sg ngn OPAMP\n";
  os << "\n* second multiplier: 0.1 g(w) xbar\n";
  os << "XM2 ngn nxbn nm2 0 MULT\n";
  os << "\n";
  const CoreState<double>& s0 = spec.initial;
  os << ".IC V(nxb)=" << fmt(s0.x) << " V(nxbn)=" << fmt(-s0.x) << " V(ny)=" << fmt(s0.y) << " V(nz)=" << fmt(s0.z)
     << " V(nwb)=" << fmt(s0.w / p.eta) << "\n";
  os << ".TRAN " << fmt(T / 200) << " " << fmt(5 * T) << " 0 " << fmt(T / 200) << " UIC\n";
  os << ".END\n";
  return os.str();
}

double parse_spice_number(std::string_view text) {
  const std::string s(text);
  const char* begin = s.c_str();
  char* end = nullptr;
  const double base = std::strtod(begin, &end);
  if (end == begin) fail_validation("not a number: '" + s + "'");
  const std::string suffix = upper(std::string_view(end));
  double scale = 1;
  if (suffix.empty()) scale = 1;
  else if (suffix.rfind("MEG", 0) == 0) scale = 1e6;
  else if (suffix.rfind("MIL", 0) == 0) scale = 25.4e-6;
  else {
    switch (suffix[0]) {
      case 'F': scale = 1e-15; break;
      case 'P': scale = 1e-12; break;
      case 'N': scale = 1e-9; break;
      case 'U': scale = 1e-6; break;
      case 'M': scale = 1e-3; break;
      case 'K': scale = 1e3; break;
      case 'G': scale = 1e9; break;
      case 'T': scale = 1e12; break;
      default:
        // Trailing unit letters such as "V" or "OHM" carry no scale.
        if (!std::isalpha(static_cast<unsigned char>(suffix[0]))) fail_validation("not a number: '" + s + "'");
    }
  }
  return base * scale;
}

namespace {

struct Line {
  std::string text;
  int number;
};

// Joins '+' continuation lines and drops comments and blank lines; the first
// physical line is the title.
std::vector<Line> logical_lines(std::string_view text, std::string& title) {
  std::vector<Line> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  int number = 0;
  bool first = true;
  while (std::getline(in, raw)) {
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (first) {
      title = raw;
      first = false;
      continue;
    }
    const auto start = raw.find_first_not_of(" \t");
    if (start == std::string::npos || raw[start] == '*') continue;
    const std::string body = raw.substr(start);
    if (body[0] == '+') {
      if (out.empty()) fail_validation(at_line(number, "continuation without a preceding card"));
      out.back().text += " " + body.substr(1);
      continue;
    }
    out.push_back({body, number});
  }
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> tokens;
  std::istringstream in(s);
  std::string t;
  while (in >> t) tokens.push_back(t);
  return tokens;
}

// Node names referenced by an element card, and minimum token count.
std::vector<std::string> element_nodes(const Card& c) {
  const char kind = c.name[0];
  const auto need = [&](std::size_t n, const char* what) {
    if (c.tokens.size() < n) fail_validation(at_line(c.line, c.name + ": expected " + what));
  };
  switch (kind) {
    case 'R':
    case 'C':
    case 'L':
      need(3, "two nodes and a value");
      parse_spice_number(c.tokens[2]);
      return {c.tokens[0], c.tokens[1]};
    case 'V':
    case 'I': {
      need(3, "two nodes and a value");
      const std::size_t vi = upper(c.tokens[2]) == "DC" ? 3 : 2;
      need(vi + 1, "a source value");
      parse_spice_number(c.tokens[vi]);
      return {c.tokens[0], c.tokens[1]};
    }
    case 'E':
    case 'G':
      need(5, "four nodes and a gain");
      parse_spice_number(c.tokens[4]);
      return {c.tokens[0], c.tokens[1], c.tokens[2], c.tokens[3]};
    case 'B': {
      need(3, "two nodes and V= or I= expression");
      const std::string e = upper(c.tokens[2]);
      if (e.rfind("V=", 0) != 0 && e.rfind("I=", 0) != 0)
        fail_validation(at_line(c.line, c.name + ": expected V= or I= expression"));
      return {c.tokens[0], c.tokens[1]};
    }
    case 'X':
      need(2, "nodes and a subcircuit name");
      return {c.tokens.begin(), c.tokens.end() - 1};
    default:
      fail_validation(at_line(c.line, "unsupported element '" + c.name + "'"));
  }
}

void check_connectivity(const std::vector<Card>& elements, const std::vector<std::string>& pins,
                        const std::string& scope) {
  std::map<std::string, int> count;
  std::map<std::string, int> first_line;
  for (const Card& c : elements) {
    for (const std::string& n : element_nodes(c)) {
      const std::string key = upper(n);
      ++count[key];
      first_line.emplace(key, c.line);
    }
  }
  std::set<std::string> external;
  for (const std::string& p : pins) external.insert(upper(p));
  for (const auto& [node, n] : count) {
    if (node == "0" || node == "GND" || external.count(node)) continue;
    if (n < 2) fail_validation(at_line(first_line[node], "node '" + node + "' in " + scope + " is connected only once"));
  }
}

}  // namespace

Deck parse_netlist(std::string_view text) {
  Deck deck;
  const std::vector<Line> lines = logical_lines(text, deck.title);
  Subcircuit* open = nullptr;
  bool ended = false;
  std::set<std::string> names;
  for (const Line& l : lines) {
    if (ended) fail_validation(at_line(l.number, "card after .END"));
    std::vector<std::string> tokens = split(l.text);
    Card card{upper(tokens[0]), {tokens.begin() + 1, tokens.end()}, l.number};
    if (card.name[0] == '.') {
      if (card.name == ".SUBCKT") {
        if (open) fail_validation(at_line(l.number, "nested .SUBCKT"));
        if (card.tokens.size() < 2) fail_validation(at_line(l.number, ".SUBCKT needs a name and pins"));
        deck.subcircuits.push_back({upper(card.tokens[0]), {card.tokens.begin() + 1, card.tokens.end()}, {}});
        open = &deck.subcircuits.back();
      } else if (card.name == ".ENDS") {
        if (!open) fail_validation(at_line(l.number, ".ENDS without .SUBCKT"));
        if (!card.tokens.empty() && upper(card.tokens[0]) != open->name)
          fail_validation(at_line(l.number, ".ENDS name does not match " + open->name));
        open = nullptr;
      } else if (card.name == ".END") {
        ended = true;
      } else if (card.name == ".TRAN") {
        if (card.tokens.size() < 2) fail_validation(at_line(l.number, ".TRAN needs tstep and tstop"));
        for (std::size_t i = 0; i < card.tokens.size(); ++i)
          if (upper(card.tokens[i]) != "UIC") parse_spice_number(card.tokens[i]);
        deck.controls.push_back(card);
      } else if (card.name == ".IC") {
        for (const std::string& t : card.tokens) {
          const auto eq = t.find('=');
          if (upper(t).rfind("V(", 0) != 0 || eq == std::string::npos || t[eq - 1] != ')')
            fail_validation(at_line(l.number, "malformed .IC entry '" + t + "'"));
          parse_spice_number(t.substr(eq + 1));
        }
        deck.controls.push_back(card);
      } else {
        deck.controls.push_back(card);
      }
      continue;
    }
    const std::string scoped = (open ? open->name + "." : std::string()) + card.name;
    if (!names.insert(scoped).second) fail_validation(at_line(l.number, "duplicate element '" + card.name + "'"));
    element_nodes(card);
    (open ? open->elements : deck.elements).push_back(std::move(card));
  }
  if (open) fail_validation("netlist: unterminated .SUBCKT " + open->name);
  if (!ended) fail_validation("netlist: missing .END");

  for (const Card& c : deck.elements) {
    if (c.name[0] != 'X') continue;
    const std::string sub = upper(c.tokens.back());
    const auto it = std::find_if(deck.subcircuits.begin(), deck.subcircuits.end(),
                                 [&](const Subcircuit& s) { return s.name == sub; });
    if (it == deck.subcircuits.end()) fail_validation(at_line(c.line, "unknown subcircuit '" + sub + "'"));
    if (it->pins.size() != c.tokens.size() - 1)
      fail_validation(at_line(c.line, c.name + ": " + sub + " expects " + std::to_string(it->pins.size()) + " pins"));
  }
  check_connectivity(deck.elements, {}, "top level");
  for (const Subcircuit& s : deck.subcircuits) check_connectivity(s.elements, s.pins, s.name);
  return deck;
}

ComponentValues component_values(const Deck& deck) {
  static const std::set<std::string> kFormulaParts = {"C1", "R1", "R2", "R3", "R4", "R5", "R6", "R7"};
  ComponentValues out;
  for (const Card& c : deck.elements) {
    if (kFormulaParts.count(c.name)) {
      out[c.name] = parse_spice_number(c.tokens[2]);
    } else if (c.name == "VAS") {
      const std::size_t vi = upper(c.tokens[2]) == "DC" ? 3 : 2;
      out["V"] = parse_spice_number(c.tokens[vi]);
    }
  }
  return out;
}

}  // namespace memodyn
