#pragma once

#include "memodyn/circuits.hpp"
#include "memodyn/state.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace memodyn {

/// Op-amp/multiplier realization of the MMO circuit with g(w) = a + 3 b w^2.
/// Base R and C must satisfy RC = 1 s; node voltages carry xbar, y, z and w/eta.
struct NetlistSpec {
  MmoParams params;
  double R = 1e5;
  double C = 1e-5;
  CoreState<double> initial;   ///< stored coordinates (xbar, y, z, w)
  double period_estimate = 0;  ///< seconds; 0 selects 2 pi / (s_c sqrt(alpha beta))
};

struct QuadraticMemductance {
  double a = 0, b = 0;
};

/// (a, b) from a memductance of exactly the form a + 3 b w^2.
QuadraticMemductance quadratic_coefficients(const Polynomial<double>& g);

using ComponentValues = std::map<std::string, double>;

/// C1, R1..R7 and V (= a_s).
ComponentValues component_values(const NetlistSpec& spec);

/// Deterministic SPICE deck, LF line endings, values printed with 17 significant digits.
std::string emit_netlist(const NetlistSpec& spec);

/// One element or control card, continuation lines joined.
struct Card {
  std::string name;                 ///< upper-cased first token
  std::vector<std::string> tokens;  ///< remaining tokens, as written
  int line = 0;
};

struct Subcircuit {
  std::string name;
  std::vector<std::string> pins;
  std::vector<Card> elements;
};

struct Deck {
  std::string title;
  std::vector<Card> elements;
  std::vector<Subcircuit> subcircuits;
  std::vector<Card> controls;
};

/// SPICE number with optional scale suffix (f p n u m k meg g t mil).
double parse_spice_number(std::string_view text);

/// Reader for the SPICE subset emitted here: R C L V I E G B X elements,
/// .SUBCKT/.ENDS, .IC, .TRAN, .OPTIONS and .END. Checks token counts,
/// subcircuit references and pin counts, and that no node dangles.
Deck parse_netlist(std::string_view text);

/// Component map recovered from a parsed deck (VAS reported as "V").
ComponentValues component_values(const Deck& deck);

}  // namespace memodyn
