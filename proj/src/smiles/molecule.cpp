//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cardiogen/smiles/molecule.h"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <cstdint>
#include <queue>
#include <utility>

#include "cardiogen/core/error.h"

namespace cardiogen::smiles {

namespace {

constexpr std::array<std::string_view, kElementCount> kSymbols = {
  "B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I", "H",
};

constexpr std::array<int, kElementCount> kAtomicNumbers = {
  5, 6, 7, 8, 15, 16, 9, 17, 35, 53, 1,
};

int lowest_valence(Element e) {
  switch (e) {
  case Element::kB:
    return 3;
  case Element::kC:
    return 4;
  case Element::kN:
  case Element::kP:
    return 3;
  case Element::kO:
  case Element::kS:
    return 2;
  default:
    return 1;
  }
}

std::span<const int> allowed_valences(Element e) {
  static constexpr int b[] = { 3 }, c[] = { 4 }, n[] = { 3, 5 }, o[] = { 2 },
                       s[] = { 2, 4, 6 }, f[] = { 1 }, x[] = { 1, 3, 5, 7 };
  switch (e) {
  case Element::kB:
    return b;
  case Element::kC:
    return c;
  case Element::kN:
  case Element::kP:
    return n;
  case Element::kO:
    return o;
  case Element::kS:
    return s;
  case Element::kCl:
  case Element::kBr:
  case Element::kI:
    return x;
  default:
    return f;
  }
}

// Edge bitset used by the cycle-basis elimination.
class EdgeSet {
public:
  explicit EdgeSet(int n): words_((n + 63) / 64, 0) { }

  void flip(int i) { words_[i / 64] ^= std::uint64_t { 1 } << (i % 64); }
  bool test(int i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  void xor_with(const EdgeSet &o) {
    for (std::size_t i = 0; i < words_.size(); ++i)
      words_[i] ^= o.words_[i];
  }
  bool none() const {
    return std::all_of(words_.begin(), words_.end(),
                       [](std::uint64_t w) { return w == 0; });
  }
  int lowest() const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] != 0)
        return static_cast<int>(i * 64) + __builtin_ctzll(words_[i]);
    return -1;
  }
  bool operator==(const EdgeSet &o) const { return words_ == o.words_; }
  bool operator<(const EdgeSet &o) const { return words_ < o.words_; }

private:
  std::vector<std::uint64_t> words_;
};

struct Cycle {
  std::vector<int> atoms;
  std::vector<int> bonds;
  EdgeSet edges;
};

// Tarjan bridge finding; non-bridge bonds are exactly the ring bonds.
std::vector<bool> find_ring_bonds(const Molecule &mol) {
  const int n = mol.atom_count();
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<bool> ring(mol.bond_count(), true);
  int timer = 0;

  struct Frame {
    int atom;
    int parent_bond;
    std::size_t next;
  };
  std::vector<Frame> stack;
  for (int root = 0; root < n; ++root) {
    if (disc[root] >= 0)
      continue;
    disc[root] = low[root] = timer++;
    stack.push_back({ root, -1, 0 });
    while (!stack.empty()) {
      Frame &f = stack.back();
      auto nbrs = mol.neighbors(f.atom);
      if (f.next < nbrs.size()) {
        const Neighbor nb = nbrs[f.next++];
        if (nb.bond == f.parent_bond)
          continue;
        if (disc[nb.atom] >= 0) {
          low[f.atom] = std::min(low[f.atom], disc[nb.atom]);
        } else {
          disc[nb.atom] = low[nb.atom] = timer++;
          stack.push_back({ nb.atom, nb.bond, 0 });
        }
        continue;
      }
      const Frame done = f;
      stack.pop_back();
      if (!stack.empty()) {
        Frame &p = stack.back();
        low[p.atom] = std::min(low[p.atom], low[done.atom]);
        if (low[done.atom] > disc[p.atom])
          ring[done.parent_bond] = false;
      }
    }
  }
  return ring;
}

// Horton candidate cycles followed by greedy GF(2) elimination gives a
// minimum cycle basis (the SSSR).
void perceive_sssr(const Molecule &mol, const std::vector<bool> &ring_bond,
                   std::vector<std::vector<int>> &rings,
                   std::vector<std::vector<int>> &ring_bonds) {
  rings.clear();
  ring_bonds.clear();
  const int n = mol.atom_count(), m = mol.bond_count();
  int ring_edge_count = 0;
  for (int b = 0; b < m; ++b)
    ring_edge_count += ring_bond[b] ? 1 : 0;
  if (ring_edge_count == 0)
    return;

  std::vector<bool> ring_atom(n, false);
  for (int b = 0; b < m; ++b) {
    if (ring_bond[b]) {
      ring_atom[mol.bond(b).begin] = true;
      ring_atom[mol.bond(b).end] = true;
    }
  }
  int ring_atom_count = 0;
  for (bool r: ring_atom)
    ring_atom_count += r ? 1 : 0;

  // Components of the ring-bond subgraph.
  std::vector<int> comp(n, -1);
  int n_comp = 0;
  for (int s = 0; s < n; ++s) {
    if (!ring_atom[s] || comp[s] >= 0)
      continue;
    std::queue<int> q;
    q.push(s);
    comp[s] = n_comp;
    while (!q.empty()) {
      const int a = q.front();
      q.pop();
      for (const Neighbor &nb: mol.neighbors(a)) {
        if (ring_bond[nb.bond] && comp[nb.atom] < 0) {
          comp[nb.atom] = n_comp;
          q.push(nb.atom);
        }
      }
    }
    ++n_comp;
  }
  const int nu = ring_edge_count - ring_atom_count + n_comp;

  std::vector<Cycle> candidates;
  std::vector<int> dist(n), parent_atom(n), parent_bond(n);
  for (int v = 0; v < n; ++v) {
    if (!ring_atom[v])
      continue;
    std::fill(dist.begin(), dist.end(), -1);
    std::queue<int> q;
    q.push(v);
    dist[v] = 0;
    parent_atom[v] = parent_bond[v] = -1;
    // Neighbors are visited in a fixed order so the path tree is
    // deterministic for a given numbering.
    while (!q.empty()) {
      const int a = q.front();
      q.pop();
      for (const Neighbor &nb: mol.neighbors(a)) {
        if (!ring_bond[nb.bond] || dist[nb.atom] >= 0)
          continue;
        dist[nb.atom] = dist[a] + 1;
        parent_atom[nb.atom] = a;
        parent_bond[nb.atom] = nb.bond;
        q.push(nb.atom);
      }
    }
    auto path = [&](int x, std::vector<int> &atoms, std::vector<int> &bonds) {
      atoms.clear();
      bonds.clear();
      for (int a = x; a != v; a = parent_atom[a]) {
        atoms.push_back(a);
        bonds.push_back(parent_bond[a]);
      }
      atoms.push_back(v);
    };
    std::vector<int> pa, pb, qa, qb;
    for (int b = 0; b < m; ++b) {
      if (!ring_bond[b])
        continue;
      const int x = mol.bond(b).begin, y = mol.bond(b).end;
      if (dist[x] < 0 || dist[y] < 0)
        continue;
      if (parent_bond[x] == b || parent_bond[y] == b)
        continue;
      path(x, pa, pb);
      path(y, qa, qb);
      // Paths must meet only at v.
      bool disjoint = true;
      for (std::size_t i = 0; i + 1 < pa.size() && disjoint; ++i)
        for (std::size_t j = 0; j + 1 < qa.size(); ++j)
          if (pa[i] == qa[j]) {
            disjoint = false;
            break;
          }
      if (!disjoint)
        continue;
      Cycle c { {}, {}, EdgeSet(m) };
      // v ... x (reversed pa), then y ... back towards v (qa without v)
      for (auto it = pa.rbegin(); it != pa.rend(); ++it)
        c.atoms.push_back(*it);
      for (std::size_t j = 0; j + 1 < qa.size(); ++j)
        c.atoms.push_back(qa[j]);
      c.bonds.insert(c.bonds.end(), pb.begin(), pb.end());
      c.bonds.push_back(b);
      c.bonds.insert(c.bonds.end(), qb.begin(), qb.end());
      for (int e: c.bonds)
        c.edges.flip(e);
      candidates.push_back(std::move(c));
    }
  }

  std::sort(candidates.begin(), candidates.end(),
            [](const Cycle &a, const Cycle &b) {
              if (a.bonds.size() != b.bonds.size())
                return a.bonds.size() < b.bonds.size();
              return a.edges < b.edges;
            });
  candidates.erase(std::unique(candidates.begin(), candidates.end(),
                               [](const Cycle &a, const Cycle &b) {
                                 return a.edges == b.edges;
                               }),
                   candidates.end());

  // Row-reduced basis keyed by pivot edge.
  std::vector<EdgeSet> basis;
  std::vector<int> pivots;
  for (Cycle &c: candidates) {
    if (static_cast<int>(rings.size()) == nu)
      break;
    EdgeSet r = c.edges;
    for (std::size_t i = 0; i < basis.size(); ++i)
      if (r.test(pivots[i]))
        r.xor_with(basis[i]);
    if (r.none())
      continue;
    const int piv = r.lowest();
    for (std::size_t i = 0; i < basis.size(); ++i)
      if (basis[i].test(piv))
        basis[i].xor_with(r);
    basis.push_back(r);
    pivots.push_back(piv);
    rings.push_back(std::move(c.atoms));
    ring_bonds.push_back(std::move(c.bonds));
  }
}

}  // namespace

std::string_view element_symbol(Element e) noexcept {
  return kSymbols[static_cast<int>(e)];
}

std::optional<Element> element_from_symbol(std::string_view symbol) noexcept {
  for (int i = 0; i < kElementCount; ++i)
    if (kSymbols[i] == symbol)
      return static_cast<Element>(i);
  return std::nullopt;
}

int atomic_number(Element e) noexcept {
  return kAtomicNumbers[static_cast<int>(e)];
}

bool is_halogen(Element e) noexcept {
  return e == Element::kF || e == Element::kCl || e == Element::kBr
         || e == Element::kI;
}

int Molecule::add_atom(Atom atom) {
  atom.index = static_cast<int>(atoms_.size());
  atoms_.push_back(std::move(atom));
  adj_.emplace_back();
  return atoms_.back().index;
}

int Molecule::add_bond(int a, int b, BondOrder order) {
  if (a == b || a < 0 || b < 0 || a >= atom_count() || b >= atom_count())
    throw Error(ErrorCode::kInvalidArgument, "bond endpoints out of range");
  const int idx = static_cast<int>(bonds_.size());
  bonds_.push_back({ a, b, order });
  adj_[a].push_back({ b, idx });
  adj_[b].push_back({ a, idx });
  return idx;
}

int Molecule::find_bond(int a, int b) const {
  for (const Neighbor &nb: adj_[a])
    if (nb.atom == b)
      return nb.bond;
  return -1;
}

void Molecule::finalize() {
  bond_in_ring_ = find_ring_bonds(*this);
  atom_in_ring_.assign(atoms_.size(), false);
  for (int b = 0; b < bond_count(); ++b) {
    if (bond_in_ring_[b]) {
      atom_in_ring_[bonds_[b].begin] = true;
      atom_in_ring_[bonds_[b].end] = true;
    }
  }
  perceive_sssr(*this, bond_in_ring_, rings_, ring_bonds_);
}

int Molecule::total_hydrogens() const noexcept {
  int h = 0;
  for (const Atom &a: atoms_)
    h += a.hydrogens;
  return h;
}

int Molecule::total_charge() const noexcept {
  int q = 0;
  for (const Atom &a: atoms_)
    q += a.formal_charge;
  return q;
}

Molecule renumber_atoms(const Molecule &mol, std::span<const int> new_index) {
  const int n = mol.atom_count();
  if (static_cast<int>(new_index.size()) != n)
    throw Error(ErrorCode::kLengthMismatch, "permutation size");
  std::vector<int> old_of(n, -1);
  for (int i = 0; i < n; ++i) {
    const int j = new_index[i];
    if (j < 0 || j >= n || old_of[j] >= 0)
      throw Error(ErrorCode::kInvalidArgument, "not a permutation");
    old_of[j] = i;
  }
  Molecule out;
  for (int j = 0; j < n; ++j) {
    Atom a = mol.atom(old_of[j]);
    for (int &r: a.stereo_refs)
      if (r != kImplicitHydrogen)
        r = new_index[r];
    out.add_atom(std::move(a));
  }
  // Bonds are re-emitted sorted by their new endpoints so that the bond list
  // carries no trace of the original numbering.
  std::vector<Bond> bonds(mol.bonds().begin(), mol.bonds().end());
  for (Bond &b: bonds) {
    b.begin = new_index[b.begin];
    b.end = new_index[b.end];
    if (b.begin > b.end)
      std::swap(b.begin, b.end);
  }
  std::sort(bonds.begin(), bonds.end(), [](const Bond &x, const Bond &y) {
    return std::pair(x.begin, x.end) < std::pair(y.begin, y.end);
  });
  for (const Bond &b: bonds)
    out.add_bond(b.begin, b.end, b.order);
  out.finalize();
  return out;
}

int default_implicit_hydrogens(const Molecule &mol, int atom) {
  const Atom &a = mol.atom(atom);
  int v = 0;
  bool has_double = false;
  for (const Neighbor &nb: mol.neighbors(atom)) {
    const BondOrder o = mol.bond(nb.bond).order;
    v += bond_valence(o);
    has_double = has_double || o == BondOrder::kDouble;
  }
  if (a.aromatic) {
    v += has_double ? 0 : 1;
    return std::max(0, lowest_valence(a.element) - v);
  }
  for (int allowed: allowed_valences(a.element))
    if (allowed >= v)
      return allowed - v;
  return 0;
}

int max_valence(Element e, int formal_charge) {
  const int base = allowed_valences(e).back();
  switch (e) {
  case Element::kC:
    return base - std::abs(formal_charge);
  case Element::kB:
    return base - formal_charge;
  case Element::kH:
    return 1 - std::abs(formal_charge);
  default:
    return base + formal_charge;
  }
}

int count_components(const Molecule &mol) {
  const int n = mol.atom_count();
  std::vector<bool> seen(n, false);
  int count = 0;
  for (int s = 0; s < n; ++s) {
    if (seen[s])
      continue;
    ++count;
    std::vector<int> stack { s };
    seen[s] = true;
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (const Neighbor &nb: mol.neighbors(a)) {
        if (!seen[nb.atom]) {
          seen[nb.atom] = true;
          stack.push_back(nb.atom);
        }
      }
    }
  }
  return count;
}

}  // namespace cardiogen::smiles
