//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cardiogen/smiles/parser.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cardiogen/core/error.h"
#include "cardiogen/smiles/tokenizer.h"

namespace cardiogen::smiles {

namespace {

constexpr int kPendingSlot = -2;

struct BracketSpec {
  Element element;
  bool aromatic;
  StereoMark stereo;
  int hydrogens;
  int charge;
};

bool is_digit(char c) {
  return std::isdigit(static_cast<unsigned char>(c)) != 0;
}

BracketSpec parse_bracket(std::string_view text, std::size_t token_index) {
  // text includes the surrounding brackets.
  std::string_view s = text.substr(1, text.size() - 2);
  std::size_t i = 0;
  auto fail = [&](ErrorCode code, const std::string &what) {
    throw Error(code, what + " in " + std::string(text), token_index);
  };

  if (i < s.size() && is_digit(s[i]))
    fail(ErrorCode::kUnsupportedFeature, "isotope label");
  if (i < s.size() && s[i] == '*')
    fail(ErrorCode::kUnsupportedFeature, "wildcard atom");

  BracketSpec spec { Element::kC, false, StereoMark::kNone, 0, 0 };
  if (i >= s.size() || !std::isalpha(static_cast<unsigned char>(s[i])))
    fail(ErrorCode::kInvalidSyntax, "missing element symbol");

  std::string symbol;
  if (std::islower(static_cast<unsigned char>(s[i]))) {
    // Aromatic symbols; two-letter ones (se, as) are outside the supported
    // element set.
    symbol.push_back(s[i++]);
    if (i < s.size() && std::islower(static_cast<unsigned char>(s[i])))
      fail(ErrorCode::kUnsupportedElement,
           "element " + symbol + std::string(1, s[i]));
    spec.aromatic = true;
    symbol[0] = static_cast<char>(std::toupper(symbol[0]));
    if (symbol != "B" && symbol != "C" && symbol != "N" && symbol != "O"
        && symbol != "P" && symbol != "S")
      fail(ErrorCode::kUnsupportedElement, "aromatic element " + symbol);
  } else {
    symbol.push_back(s[i++]);
    if (i < s.size() && std::islower(static_cast<unsigned char>(s[i])))
      symbol.push_back(s[i++]);
  }
  const auto element = element_from_symbol(symbol);
  if (!element)
    fail(ErrorCode::kUnsupportedElement, "element " + symbol);
  spec.element = *element;

  if (i < s.size() && s[i] == '@') {
    ++i;
    spec.stereo = StereoMark::kAt;
    if (i < s.size() && s[i] == '@') {
      ++i;
      spec.stereo = StereoMark::kAtAt;
    }
    if (i < s.size() && std::isupper(static_cast<unsigned char>(s[i]))
        && s[i] != 'H')
      fail(ErrorCode::kUnsupportedFeature, "extended chirality class");
  }

  if (i < s.size() && s[i] == 'H') {
    ++i;
    spec.hydrogens = 1;
    if (i < s.size() && is_digit(s[i])) {
      spec.hydrogens = s[i++] - '0';
      if (i < s.size() && is_digit(s[i]))
        fail(ErrorCode::kInvalidSyntax, "hydrogen count above 9");
    }
  }

  if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
    const char sign = s[i++];
    int magnitude = 1;
    if (i < s.size() && is_digit(s[i])) {
      magnitude = 0;
      while (i < s.size() && is_digit(s[i]))
        magnitude = magnitude * 10 + (s[i++] - '0');
    } else {
      while (i < s.size() && s[i] == sign) {
        ++magnitude;
        ++i;
      }
    }
    if (magnitude > 4)
      fail(ErrorCode::kInvalidSyntax, "formal charge magnitude above 4");
    spec.charge = sign == '+' ? magnitude : -magnitude;
  }

  if (i < s.size() && s[i] == ':')
    fail(ErrorCode::kUnsupportedFeature, "atom class");
  if (i != s.size())
    fail(ErrorCode::kInvalidSyntax, "trailing characters");
  return spec;
}

std::optional<BondOrder> bond_from_symbol(char c) {
  switch (c) {
  case '-':
  case '/':
  case '\\':
    return BondOrder::kSingle;
  case '=':
    return BondOrder::kDouble;
  case '#':
    return BondOrder::kTriple;
  case ':':
    return BondOrder::kAromatic;
  default:
    return std::nullopt;
  }
}

struct RingOpen {
  int atom;
  std::optional<BondOrder> order;
  std::size_t slot;
  std::size_t token;
};

// Pi electrons an atom donates to a ring candidate, or -1 if the atom cannot
// take part in an aromatic system.
int pi_contribution(const Molecule &mol, int a,
                    const std::vector<bool> &in_candidate) {
  const Atom &atom = mol.atom(a);
  int exocyclic = 0;  // 0 none, 1 double to ring atom, 2 double to hetero
  for (const Neighbor &nb: mol.neighbors(a)) {
    const BondOrder o = mol.bond(nb.bond).order;
    if (o == BondOrder::kTriple)
      return -1;
    if (o != BondOrder::kDouble)
      continue;
    if (in_candidate[nb.atom])
      return 1;
    const Element pe = mol.atom(nb.atom).element;
    if (mol.in_ring(nb.atom) && !mol.in_ring(a))
      return -1;
    if (mol.in_ring(nb.atom))
      exocyclic = std::max(exocyclic, 1);
    else if (pe == Element::kO || pe == Element::kN || pe == Element::kS)
      exocyclic = 2;
    else
      return -1;
  }
  if (exocyclic == 1)
    return 1;
  if (exocyclic == 2)
    return 0;

  const int connections = mol.degree(a) + atom.hydrogens;
  const int q = atom.formal_charge;
  if (atom.aromatic) {
    switch (atom.element) {
    case Element::kC:
      return q == -1 ? 2 : q == 1 ? 0 : 1;
    case Element::kN:
    case Element::kP:
      if (q == 1)
        return 1;
      if (q == -1)
        return 2;
      return connections >= 3 ? 2 : 1;
    case Element::kO:
    case Element::kS:
      return q == 1 ? 1 : 2;
    case Element::kB:
      return 0;
    default:
      return -1;
    }
  }
  switch (atom.element) {
  case Element::kC:
    return q == -1 ? 2 : q == 1 ? 0 : -1;
  case Element::kN:
  case Element::kP:
    if (q == -1)
      return 2;
    return q == 0 && connections <= 3 ? 2 : -1;
  case Element::kO:
  case Element::kS:
    return q == 0 && mol.degree(a) == 2 ? 2 : -1;
  case Element::kB:
    return connections == 3 ? 0 : -1;
  default:
    return -1;
  }
}

struct RingCandidate {
  std::vector<int> atoms;
  std::vector<int> bonds;
};

std::vector<RingCandidate> aromatic_candidates(const Molecule &mol) {
  std::vector<RingCandidate> out;
  const auto &rings = mol.rings();
  const auto &rbonds = mol.ring_bonds();
  for (std::size_t i = 0; i < rings.size(); ++i)
    out.push_back({ rings[i], rbonds[i] });
  // Fused pairs catch systems such as azulene whose individual rings fail
  // the count.
  for (std::size_t i = 0; i < rings.size(); ++i) {
    for (std::size_t j = i + 1; j < rings.size(); ++j) {
      std::set<int> bi(rbonds[i].begin(), rbonds[i].end());
      bool shares = false;
      for (int b: rbonds[j])
        shares = shares || bi.count(b) > 0;
      if (!shares)
        continue;
      std::set<int> atoms(rings[i].begin(), rings[i].end());
      atoms.insert(rings[j].begin(), rings[j].end());
      bi.insert(rbonds[j].begin(), rbonds[j].end());
      out.push_back({ std::vector<int>(atoms.begin(), atoms.end()),
                      std::vector<int>(bi.begin(), bi.end()) });
    }
  }
  return out;
}

}  // namespace

void perceive_aromaticity(Molecule &mol) {
  const std::vector<RingCandidate> candidates = aromatic_candidates(mol);
  std::vector<bool> in_candidate(mol.atom_count(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const RingCandidate &c: candidates) {
      bool done = true;
      for (int a: c.atoms)
        done = done && mol.atom(a).aromatic;
      for (int b: c.bonds)
        done = done && mol.bond(b).order == BondOrder::kAromatic;
      if (done)
        continue;

      for (int a: c.atoms)
        in_candidate[a] = true;
      int electrons = 0;
      bool ok = true;
      for (int a: c.atoms) {
        const int e = pi_contribution(mol, a, in_candidate);
        if (e < 0) {
          ok = false;
          break;
        }
        electrons += e;
      }
      for (int a: c.atoms)
        in_candidate[a] = false;

      if (!ok || electrons % 4 != 2)
        continue;
      for (int a: c.atoms)
        mol.atom(a).aromatic = true;
      for (int b: c.bonds)
        mol.bond(b).order = BondOrder::kAromatic;
      changed = true;
    }
  }
}

Molecule parse(std::string_view smiles) {
  if (smiles.empty())
    throw Error(ErrorCode::kInvalidSyntax, "empty SMILES");
  const std::vector<Token> tokens = tokenize_detailed(smiles);

  Molecule raw;
  std::vector<std::size_t> atom_token;
  std::vector<std::vector<int>> order;  // neighbor order per atom
  std::vector<bool> has_prev;
  std::vector<std::pair<int, std::size_t>> branch_stack;  // atom, token
  std::map<int, RingOpen> open_rings;

  int prev = -1;
  std::optional<BondOrder> pending;
  std::size_t pending_token = 0;

  auto connect = [&](int a, int b, std::optional<BondOrder> given,
                     std::size_t ti) {
    if (raw.find_bond(a, b) >= 0)
      throw Error(ErrorCode::kInvalidSyntax, "duplicate bond", ti);
    BondOrder o = BondOrder::kSingle;
    if (given)
      o = *given;
    else if (raw.atom(a).aromatic && raw.atom(b).aromatic)
      o = BondOrder::kAromatic;
    raw.add_bond(a, b, o);
  };

  for (std::size_t ti = 0; ti < tokens.size(); ++ti) {
    const Token &t = tokens[ti];
    switch (t.kind) {
    case TokenKind::kAtom:
    case TokenKind::kBracketAtom: {
      Atom atom;
      if (t.kind == TokenKind::kAtom) {
        if (t.text == "*")
          throw Error(ErrorCode::kUnsupportedFeature, "wildcard atom", ti);
        const char c = t.text[0];
        atom.aromatic = std::islower(static_cast<unsigned char>(c)) != 0;
        std::string sym = t.text;
        sym[0] = static_cast<char>(std::toupper(c));
        atom.element = *element_from_symbol(sym);
      } else {
        const BracketSpec spec = parse_bracket(t.text, ti);
        atom.element = spec.element;
        atom.aromatic = spec.aromatic;
        atom.formal_charge = spec.charge;
        atom.stereo = spec.stereo;
        atom.explicit_h_count = spec.hydrogens;
      }
      const int idx = raw.add_atom(std::move(atom));
      atom_token.push_back(ti);
      order.emplace_back();
      has_prev.push_back(prev >= 0);
      if (prev >= 0) {
        connect(prev, idx, pending, ti);
        order[prev].push_back(idx);
        order[idx].push_back(prev);
      } else if (pending) {
        throw Error(ErrorCode::kInvalidSyntax, "bond before first atom",
                    pending_token);
      }
      pending.reset();
      prev = idx;
      break;
    }
    case TokenKind::kBond:
      if (prev < 0 || pending)
        throw Error(ErrorCode::kInvalidSyntax, "misplaced bond symbol", ti);
      pending = bond_from_symbol(t.text[0]);
      pending_token = ti;
      break;
    case TokenKind::kBranchOpen:
      if (prev < 0 || pending)
        throw Error(ErrorCode::kInvalidSyntax, "misplaced branch", ti);
      branch_stack.emplace_back(prev, ti);
      break;
    case TokenKind::kBranchClose:
      if (branch_stack.empty())
        throw Error(ErrorCode::kUnclosedBranch, "unmatched ')'", ti);
      if (pending)
        throw Error(ErrorCode::kInvalidSyntax, "bond before ')'", ti);
      if (tokens[ti - 1].kind == TokenKind::kBranchOpen)
        throw Error(ErrorCode::kInvalidSyntax, "empty branch", ti);
      prev = branch_stack.back().first;
      branch_stack.pop_back();
      break;
    case TokenKind::kRingClosure: {
      if (prev < 0)
        throw Error(ErrorCode::kInvalidSyntax, "ring closure before atom", ti);
      const int number = t.text[0] == '%' ? std::stoi(t.text.substr(1))
                                          : t.text[0] - '0';
      auto it = open_rings.find(number);
      if (it == open_rings.end()) {
        open_rings[number] = { prev, pending, order[prev].size(), ti };
        order[prev].push_back(kPendingSlot);
      } else {
        const RingOpen ro = it->second;
        open_rings.erase(it);
        if (ro.atom == prev)
          throw Error(ErrorCode::kInvalidSyntax, "ring closes on itself", ti);
        if (ro.order && pending && *ro.order != *pending)
          throw Error(ErrorCode::kInvalidSyntax, "conflicting ring bond", ti);
        connect(ro.atom, prev, ro.order ? ro.order : pending, ti);
        order[ro.atom][ro.slot] = prev;
        order[prev].push_back(ro.atom);
      }
      pending.reset();
      break;
    }
    case TokenKind::kDot:
      throw Error(ErrorCode::kMultiComponentInput,
                  "disconnected components are not supported", ti);
    }
  }
  if (pending)
    throw Error(ErrorCode::kInvalidSyntax, "dangling bond", pending_token);
  if (!branch_stack.empty())
    throw Error(ErrorCode::kUnclosedBranch, "unclosed '('",
                branch_stack.back().second);
  if (!open_rings.empty())
    throw Error(ErrorCode::kUnclosedRing,
                "ring bond " + std::to_string(open_rings.begin()->first)
                    + " never closed",
                open_rings.begin()->second.token);

  // Hydrogen counts and valence.
  for (int a = 0; a < raw.atom_count(); ++a) {
    Atom &atom = raw.atom(a);
    if (atom.explicit_h_count)
      atom.hydrogens = *atom.explicit_h_count;
    else
      atom.hydrogens = default_implicit_hydrogens(raw, a);
    int v = atom.hydrogens;
    for (const Neighbor &nb: raw.neighbors(a))
      v += bond_valence(raw.bond(nb.bond).order);
    if (v > max_valence(atom.element, atom.formal_charge))
      throw Error(ErrorCode::kValenceViolation,
                  std::string(element_symbol(atom.element)) + " with valence "
                      + std::to_string(v),
                  atom_token[a]);
  }

  // Fold explicit hydrogen atoms into their heavy neighbor.
  std::vector<int> new_index(raw.atom_count(), -1);
  int kept = 0;
  for (int a = 0; a < raw.atom_count(); ++a) {
    const Atom &atom = raw.atom(a);
    if (atom.element != Element::kH) {
      new_index[a] = kept++;
      continue;
    }
    if (raw.degree(a) != 1 || atom.formal_charge != 0 || atom.hydrogens != 0)
      throw Error(ErrorCode::kUnsupportedElement,
                  "hydrogen must be a neutral terminal atom", atom_token[a]);
    const Neighbor nb = raw.neighbors(a)[0];
    if (raw.bond(nb.bond).order != BondOrder::kSingle
        || raw.atom(nb.atom).element == Element::kH)
      throw Error(ErrorCode::kUnsupportedElement,
                  "hydrogen must be singly bonded to a heavy atom",
                  atom_token[a]);
  }
  if (kept == 0)
    throw Error(ErrorCode::kUnsupportedElement, "no heavy atoms", 0);

  Molecule mol;
  for (int a = 0; a < raw.atom_count(); ++a) {
    if (new_index[a] < 0)
      continue;
    Atom atom = raw.atom(a);
    for (const Neighbor &nb: raw.neighbors(a))
      if (new_index[nb.atom] < 0)
        ++atom.hydrogens;
    if (atom.stereo != StereoMark::kNone) {
      std::vector<int> refs;
      for (int r: order[a])
        refs.push_back(new_index[r] < 0 ? kImplicitHydrogen : new_index[r]);
      if (atom.explicit_h_count.value_or(0) > 0) {
        const auto pos = refs.begin() + (has_prev[a] ? 1 : 0);
        refs.insert(pos, kImplicitHydrogen);
      }
      atom.stereo_refs = std::move(refs);
    }
    mol.add_atom(std::move(atom));
  }
  for (const Bond &b: raw.bonds())
    if (new_index[b.begin] >= 0 && new_index[b.end] >= 0)
      mol.add_bond(new_index[b.begin], new_index[b.end], b.order);
  mol.finalize();

  std::vector<std::size_t> mol_token(mol.atom_count());
  for (int a = 0; a < raw.atom_count(); ++a)
    if (new_index[a] >= 0)
      mol_token[new_index[a]] = atom_token[a];

  for (int a = 0; a < mol.atom_count(); ++a)
    if (mol.atom(a).aromatic && !mol.in_ring(a))
      throw Error(ErrorCode::kInvalidAromaticity,
                  "aromatic atom outside a ring", mol_token[a]);
  for (int b = 0; b < mol.bond_count(); ++b) {
    Bond &bond = mol.bond(b);
    if (bond.order != BondOrder::kAromatic)
      continue;
    if (!mol.atom(bond.begin).aromatic || !mol.atom(bond.end).aromatic)
      throw Error(ErrorCode::kInvalidAromaticity,
                  "aromatic bond between non-aromatic atoms",
                  mol_token[bond.end]);
    if (!mol.bond_in_ring(b))
      bond.order = BondOrder::kSingle;
  }

  perceive_aromaticity(mol);
  return mol;
}

}  // namespace cardiogen::smiles
