#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "molkd/error.hpp"

namespace molkd {

enum class BondKind : std::uint8_t { single, aromatic_bond, double_bond, triple };

/// Fractional bond order used for valence bookkeeping (aromatic counts 1.5).
double bond_order(BondKind k);

struct AtomRecord {
  std::string element;       // symbol from the supported element table
  bool aromatic = false;     // lowercase / bracketed-aromatic in the source
  int mass_bucket = 0;       // integer-rounded standard atomic weight
  int implicit_h = 0;        // hydrogens still to materialize
  int implicit_h_at_parse = 0;  // count inferred at parse time, kept for featurization
  int charge = 0;
  int class_id = 0;
};

struct Bond {
  std::size_t a = 0;
  std::size_t b = 0;
  BondKind kind = BondKind::single;
};

struct MolGraph {
  std::vector<AtomRecord> atoms;
  std::vector<Bond> bonds;
  std::string source;  // original SMILES text

  std::size_t atom_count() const { return atoms.size(); }
  std::size_t bond_count() const { return bonds.size(); }
};

struct ReactionRecord {
  std::vector<MolGraph> reactants;  // hydrogen-explicit
  std::vector<MolGraph> products;   // hydrogen-explicit
  double yield_fraction = 0.0;      // in [0, 1]
};

/// True for the eleven elements this library knows about.
bool is_supported_element(const std::string& symbol);

/// Integer mass bucket for a supported element (H=1, C=12, ..., I=127).
int element_mass_bucket(const std::string& symbol);

/// Parse one SMILES term (no dots) into a molecular graph.
///
/// Grammar subset: organic-subset atoms B,C,N,O,P,S,F,Cl,Br,I and aromatic
/// b,c,n,o,p,s; bracket atoms [isotope? symbol chirality? Hn? charge? :class?];
/// bonds - = # :; branches; ring closures 1-9 and %nn. Stereo markers and
/// isotopes are consumed and discarded. An unspecified bond between two
/// aromatic atoms is aromatic, otherwise single.
///
/// Implicit hydrogens for unbracketed atoms come from the valence table
/// B=3, C=4, N={3,5}, O=2, P={3,5}, S={2,4,6}, halogens=1: the smallest
/// allowed valence >= the bond-order sum (aromatic bonds count 1.5) minus
/// ceil(sum). Sums beyond the largest allowed valence yield zero hydrogens.
/// Bracket atoms take their written H count verbatim.
MolGraph parse_smiles(const std::string& s);

/// Materialize implicit hydrogens as H atom nodes bonded single to their
/// parent. Original atom order is preserved, hydrogens appended after;
/// `implicit_h_at_parse` stays on the heavy atoms for featurization.
MolGraph explicit_hydrogens(const MolGraph& g);

/// Parse one reaction TSV row: `reactants<TAB>products<TAB>yield`, molecules
/// within a column separated by ".". Every molecule is parsed and
/// hydrogen-explicitized.
ReactionRecord parse_reaction_line(const std::string& line);

/// Serialize a graph back to SMILES. Disconnected components are joined with
/// "." (such strings are used as dedup keys; parse_smiles itself accepts a
/// single component only). Atoms are bracketed only where a bare token would
/// not round-trip the stored properties.
std::string write_smiles(const MolGraph& g);

}  // namespace molkd
