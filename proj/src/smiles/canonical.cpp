//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cardiogen/smiles/canonical.h"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "cardiogen/core/error.h"
#include "cardiogen/smiles/parser.h"

namespace cardiogen::smiles {

namespace {

// Upper bound on fully-discrete leaves explored by the tie-breaking search.
// Past it only the first member of each tied class is tried, which keeps
// pathological highly symmetric cages bounded.
constexpr int kLeafBudget = 4096;

std::vector<int> dense_rank(const std::vector<std::vector<int>> &keys) {
  std::vector<int> idx(keys.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return keys[a] < keys[b]; });
  std::vector<int> rank(keys.size(), 0);
  int r = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i > 0 && keys[idx[i]] != keys[idx[i - 1]])
      ++r;
    rank[idx[i]] = r;
  }
  return rank;
}

int class_count(const std::vector<int> &cls) {
  return cls.empty() ? 0 : *std::max_element(cls.begin(), cls.end()) + 1;
}

std::vector<int> refine(const Molecule &mol, std::vector<int> cls) {
  const int n = mol.atom_count();
  int count = class_count(cls);
  std::vector<std::vector<int>> keys(n);
  while (true) {
    for (int a = 0; a < n; ++a) {
      std::vector<std::pair<int, int>> env;
      for (const Neighbor &nb: mol.neighbors(a))
        env.emplace_back(cls[nb.atom],
                         static_cast<int>(mol.bond(nb.bond).order));
      std::sort(env.begin(), env.end());
      std::vector<int> &k = keys[a];
      k.clear();
      k.push_back(cls[a]);
      for (auto [c, o]: env) {
        k.push_back(c);
        k.push_back(o);
      }
    }
    std::vector<int> next = dense_rank(keys);
    const int next_count = class_count(next);
    cls = std::move(next);
    if (next_count == count)
      return cls;
    count = next_count;
  }
}

std::string bond_symbol(const Molecule &mol, const Bond &b) {
  switch (b.order) {
  case BondOrder::kSingle:
    return mol.atom(b.begin).aromatic && mol.atom(b.end).aromatic ? "-" : "";
  case BondOrder::kDouble:
    return "=";
  case BondOrder::kTriple:
    return "#";
  case BondOrder::kAromatic:
    return "";
  }
  return "";
}

std::string ring_label(int d) {
  return d < 10 ? std::to_string(d) : "%" + std::to_string(d);
}

int permutation_parity(const std::vector<int> &from,
                       const std::vector<int> &to) {
  // Position of each `to` entry in `from`; parity of inversions.
  std::vector<int> perm;
  for (int x: to) {
    auto it = std::find(from.begin(), from.end(), x);
    if (it == from.end())
      return -1;
    perm.push_back(static_cast<int>(it - from.begin()));
  }
  int inversions = 0;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      inversions += perm[i] > perm[j] ? 1 : 0;
  return inversions % 2;
}

class DfsWriter {
public:
  DfsWriter(const Molecule &mol, std::span<const int> ranks)
      : mol_(mol), ranks_(ranks), visited_(mol.atom_count(), false),
        closure_seen_(mol.bond_count(), false), parent_(mol.atom_count(), -1),
        children_(mol.atom_count()), opens_(mol.atom_count()),
        closes_(mol.atom_count()), digit_(mol.bond_count(), -1) { }

  std::string run() {
    if (mol_.empty())
      return {};
    int root = 0;
    for (int a = 1; a < mol_.atom_count(); ++a)
      if (ranks_[a] < ranks_[root])
        root = a;
    build(root, -1);
    order_children(root);
    emit(root, -1);
    return out_;
  }

private:
  void build(int a, int parent_bond) {
    visited_[a] = true;
    std::vector<Neighbor> nbrs(mol_.neighbors(a).begin(),
                               mol_.neighbors(a).end());
    std::sort(nbrs.begin(), nbrs.end(),
              [&](const Neighbor &x, const Neighbor &y) {
                return ranks_[x.atom] < ranks_[y.atom];
              });
    for (const Neighbor &nb: nbrs) {
      if (nb.bond == parent_bond)
        continue;
      if (visited_[nb.atom]) {
        if (!closure_seen_[nb.bond]) {
          closure_seen_[nb.bond] = true;
          closes_[a].push_back(nb.bond);
          opens_[nb.atom].push_back(nb.bond);
        }
        continue;
      }
      parent_[nb.atom] = a;
      children_[a].push_back(nb.atom);
      build(nb.atom, nb.bond);
    }
  }

  // Smaller subtrees are written first so the largest one continues the
  // main chain without parentheses. Siblings never share ring closures, so
  // reordering them keeps every closure opened before it is closed.
  int order_children(int a) {
    int size = 1;
    std::vector<std::pair<int, int>> keyed;
    for (int c: children_[a]) {
      const int sub = order_children(c);
      size += sub;
      keyed.emplace_back(sub, c);
    }
    std::stable_sort(keyed.begin(), keyed.end(),
                     [&](const auto &x, const auto &y) {
                       if (x.first != y.first)
                         return x.first < y.first;
                       return ranks_[x.second] < ranks_[y.second];
                     });
    for (std::size_t i = 0; i < keyed.size(); ++i)
      children_[a][i] = keyed[i].second;
    return size;
  }

  std::string atom_text(int a) const {
    const Atom &atom = mol_.atom(a);
    std::string sym(element_symbol(atom.element));
    if (atom.aromatic)
      sym[0] = static_cast<char>(sym[0] - 'A' + 'a');

    StereoMark stereo = atom.stereo;
    if (stereo != StereoMark::kNone) {
      std::vector<int> out_order;
      if (parent_[a] >= 0)
        out_order.push_back(parent_[a]);
      if (atom.hydrogens > 0)
        out_order.push_back(kImplicitHydrogen);
      for (int b: closes_[a])
        out_order.push_back(mol_.bond(b).other(a));
      for (int b: opens_[a])
        out_order.push_back(mol_.bond(b).other(a));
      for (int c: children_[a])
        out_order.push_back(c);
      if (out_order.size() == atom.stereo_refs.size()
          && permutation_parity(atom.stereo_refs, out_order) == 1)
        stereo = stereo == StereoMark::kAt ? StereoMark::kAtAt
                                           : StereoMark::kAt;
    }

    const bool bracket = atom.formal_charge != 0
                         || stereo != StereoMark::kNone
                         || atom.hydrogens
                                != default_implicit_hydrogens(mol_, a);
    if (!bracket)
      return sym;
    std::string s = "[" + sym;
    if (stereo == StereoMark::kAt)
      s += "@";
    else if (stereo == StereoMark::kAtAt)
      s += "@@";
    if (atom.hydrogens > 0) {
      s += "H";
      if (atom.hydrogens > 1)
        s += std::to_string(atom.hydrogens);
    }
    if (atom.formal_charge != 0) {
      s += atom.formal_charge > 0 ? "+" : "-";
      if (std::abs(atom.formal_charge) > 1)
        s += std::to_string(std::abs(atom.formal_charge));
    }
    return s + "]";
  }

  void emit(int a, int parent_bond) {
    if (parent_bond >= 0)
      out_ += bond_symbol(mol_, mol_.bond(parent_bond));
    out_ += atom_text(a);
    for (int b: closes_[a])
      out_ += ring_label(digit_[b]);
    for (int b: opens_[a]) {
      int d = 1;
      while (d < static_cast<int>(in_use_.size()) && in_use_[d])
        ++d;
      if (d >= static_cast<int>(in_use_.size()))
        in_use_.resize(d + 1, false);
      in_use_[d] = true;
      digit_[b] = d;
      out_ += bond_symbol(mol_, mol_.bond(b)) + ring_label(d);
    }
    // Labels closed here are released only now so that one atom never
    // closes and reopens the same label.
    for (int b: closes_[a])
      in_use_[digit_[b]] = false;
    const auto &kids = children_[a];
    for (std::size_t i = 0; i < kids.size(); ++i) {
      const int bond = mol_.find_bond(a, kids[i]);
      if (i + 1 < kids.size()) {
        out_ += "(";
        emit(kids[i], bond);
        out_ += ")";
      } else {
        emit(kids[i], bond);
      }
    }
  }

  const Molecule &mol_;
  std::span<const int> ranks_;
  std::vector<bool> visited_;
  std::vector<bool> closure_seen_;
  std::vector<int> parent_;
  std::vector<std::vector<int>> children_;
  std::vector<std::vector<int>> opens_;
  std::vector<std::vector<int>> closes_;
  std::vector<int> digit_;
  std::vector<bool> in_use_ = std::vector<bool>(10, false);
  std::string out_;
};

void search(const Molecule &mol, std::vector<int> cls, std::string &best,
            int &leaves) {
  cls = refine(mol, std::move(cls));
  const int n = mol.atom_count();
  if (class_count(cls) == n) {
    std::string s = write_smiles(mol, cls);
    if (leaves == 0 || s < best)
      best = std::move(s);
    ++leaves;
    return;
  }
  std::vector<int> size(n, 0);
  for (int c: cls)
    ++size[c];
  int tied = 0;
  while (size[tied] < 2)
    ++tied;
  bool first = true;
  for (int m = 0; m < n; ++m) {
    if (cls[m] != tied)
      continue;
    if (!first && leaves >= kLeafBudget)
      break;
    first = false;
    std::vector<int> split(n);
    for (int a = 0; a < n; ++a)
      split[a] = 2 * cls[a] + (cls[a] == tied && a != m ? 1 : 0);
    search(mol, std::move(split), best, leaves);
  }
}

}  // namespace

std::vector<int> refined_atom_classes(const Molecule &mol) {
  const int n = mol.atom_count();
  std::vector<std::vector<int>> keys(n);
  for (int a = 0; a < n; ++a) {
    const Atom &atom = mol.atom(a);
    keys[a] = { static_cast<int>(atom.element), atom.formal_charge,
                mol.degree(a), atom.hydrogens, atom.aromatic ? 1 : 0 };
  }
  return refine(mol, dense_rank(keys));
}

std::string write_smiles(const Molecule &mol, std::span<const int> ranks) {
  return DfsWriter(mol, ranks).run();
}

std::string write_canonical(const Molecule &mol) {
  if (mol.empty())
    return {};
  std::string best;
  int leaves = 0;
  search(mol, refined_atom_classes(mol), best, leaves);
  return best;
}

std::string canonicalize(std::string_view smiles) {
  return write_canonical(parse(smiles));
}

CanonicalCorpus canonicalize_corpus(std::span<const std::string> input) {
  CanonicalCorpus out;
  for (std::size_t i = 0; i < input.size(); ++i) {
    try {
      out.smiles.push_back(canonicalize(input[i]));
      out.source.push_back(i);
    } catch (const Error &) {
      out.failed.push_back(i);
    }
  }
  return out;
}

}  // namespace cardiogen::smiles
