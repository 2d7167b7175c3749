//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <map>
#include <vector>

#include "cardiogen/chem/fingerprint.h"
#include "cardiogen/chem/properties.h"
#include "cardiogen/chem/scaffold.h"
#include "cardiogen/core/error.h"
#include "cardiogen/smiles/canonical.h"
#include "cardiogen/smiles/parser.h"
#include "test_util.h"

using namespace cardiogen;
using namespace cardiogen::chem;
using smiles::parse;

namespace {

Fingerprint from_bits(std::initializer_list<int> bits) {
  Fingerprint fp;
  for (int b: bits)
    fp.set(b);
  return fp;
}

// Repeatedly deletes non-ring atoms of degree <= 1 and returns the element
// multiset of what remains (plus atoms double-bonded to the remainder).
std::map<smiles::Element, int> pruned_elements(const smiles::Molecule &m) {
  std::vector<bool> alive(m.atom_count(), true);
  for (bool again = true; again;) {
    again = false;
    for (int a = 0; a < m.atom_count(); ++a) {
      if (!alive[a] || m.in_ring(a))
        continue;
      int live = 0;
      for (const auto &nb: m.neighbors(a))
        live += alive[nb.atom] ? 1 : 0;
      if (live <= 1) {
        alive[a] = false;
        again = true;
      }
    }
  }
  std::map<smiles::Element, int> out;
  for (int a = 0; a < m.atom_count(); ++a) {
    bool keep = alive[a];
    if (!keep && m.degree(a) == 1) {
      const auto &nb = m.neighbors(a)[0];
      keep = alive[nb.atom]
             && m.bond(nb.bond).order == smiles::BondOrder::kDouble;
    }
    if (keep)
      out[m.atom(a).element] += 1;
  }
  return out;
}

}  // namespace

TEST_CASE("physchem properties of small molecules") {
  auto water = physchem_properties(parse("O"));
  CHECK(water.molecular_weight == doctest::Approx(2 * 1.008 + 15.999).epsilon(1e-9));
  CHECK(water.molecular_weight == doctest::Approx(18.015).epsilon(0.01 / 18));
  CHECK(water.n_heteroatoms == 1);
  CHECK(water.formal_charge == 0);

  auto benzene = physchem_properties(parse("c1ccccc1"));
  CHECK(benzene.n_rings == 1);
  CHECK(benzene.n_hbd == 0);
  CHECK(benzene.n_rotatable_bonds == 0);
  CHECK(benzene.tpsa == 0);

  auto ammonium = physchem_properties(parse("[NH4+]"));
  CHECK(ammonium.formal_charge == 1);
  CHECK(ammonium.n_hbd == 1);
  CHECK(ammonium.n_hba == 0);

  auto alanine = physchem_properties(parse("C[C@H](N)C(=O)O"));
  CHECK(alanine.n_stereocenters == 1);
  CHECK(alanine.n_hbd == 2);
  CHECK(alanine.n_hba == 3);
  // Ertl values: NH2 26.02, C=O 17.07, OH 20.23.
  CHECK(alanine.tpsa == doctest::Approx(26.02 + 17.07 + 20.23));
}

TEST_CASE("rotatable bonds exclude ring, terminal and amide bonds") {
  CHECK(rotatable_bond_count(parse("CCCC")) == 1);
  CHECK(rotatable_bond_count(parse("CC")) == 0);
  CHECK(rotatable_bond_count(parse("CC(=O)NC")) == 0);
  CHECK(rotatable_bond_count(parse("CCC(=O)NCC")) == 2);
  CHECK(rotatable_bond_count(parse("c1ccccc1-c1ccccc1")) == 1);
  CHECK(rotatable_bond_count(parse("C1CCCCC1")) == 0);
}

TEST_CASE("LogP orders by polarity") {
  CHECK(crippen_logp(parse("CCCCCC")) > crippen_logp(parse("CCCCCO")));
  CHECK(crippen_logp(parse("c1ccccc1Cl")) > crippen_logp(parse("c1ccccc1")));
  CHECK(crippen_logp(parse("CC(=O)[O-]")) < crippen_logp(parse("CC(=O)O")));
  for (int a = 0; a < 3; ++a)
    CHECK(logp_class(parse("CCO"), a) >= 1);
}

TEST_CASE("descriptor layout") {
  for (const auto &s: test::load_corpus()) {
    auto m = parse(s);
    auto d = compute_descriptors(m);
    REQUIRE(d.values.size() == kDescriptorCount);
    const auto p = physchem_properties(m).values();
    for (int i = 0; i < kPropertyCount; ++i)
      CHECK(d.values[i] == p[i]);
    CHECK(d.values.allFinite());
  }
  auto d = compute_descriptors(parse("CCO")).values;
  const auto names = descriptor_names();
  auto at = [&](std::string_view name) {
    for (int i = 0; i < kDescriptorCount; ++i)
      if (names[i] == name)
        return d[i];
    FAIL("missing descriptor " << name);
    return 0.0;
  };
  CHECK(at("count_C") == 2);
  CHECK(at("count_O") == 1);
  CHECK(at("count_N") == 0);
  CHECK(at("graph_diameter") == 2);
  CHECK(at("heavy_atom_count") == 3);
  CHECK(at("hydrogen_count") == 6);
}

TEST_CASE("descriptors are invariant under atom order") {
  CounterRng rng(11);
  const auto &corpus = test::load_corpus();
  for (std::size_t k = 0; k < corpus.size(); k += 5) {
    auto m = parse(corpus[k]);
    auto ref = compute_descriptors(m).values;
    auto p = test::shuffled(m, rng);
    CHECK((compute_descriptors(p).values - ref).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((compute_descriptors(parse(smiles::write_canonical(p))).values - ref)
              .cwiseAbs()
              .maxCoeff()
          < 1e-12);
  }
}

TEST_CASE("fingerprint basics") {
  auto c = morgan_fingerprint(parse("C"));
  CHECK(c.size() == 1024);
  CHECK(c.count() == 1);
  CHECK(morgan_fingerprint(parse("CCO")) != morgan_fingerprint(parse("CCN")));
  // Ethane: both atoms share radius-0 and radius-1 identifiers, and the
  // radius-1 environments cover the same single bond.
  CHECK(morgan_fingerprint(parse("CC")).count() == 2);
}

TEST_CASE("fingerprint is invariant under atom order") {
  CounterRng rng(3);
  for (const auto &s: test::load_corpus()) {
    auto m = parse(s);
    auto ref = morgan_fingerprint(m);
    for (int t = 0; t < 4; ++t)
      CHECK(morgan_fingerprint(test::shuffled(m, rng)) == ref);
  }
}

TEST_CASE("tanimoto") {
  auto f = morgan_fingerprint(parse("c1ccccc1O"));
  CHECK(tanimoto(f, f) == 1.0);
  CHECK(tanimoto(from_bits({ 1, 2, 3 }), from_bits({ 2, 3, 4 })) == 0.5);
  CHECK(tanimoto(from_bits({ 1 }), from_bits({ 2 })) == 0.0);
  CHECK(tanimoto(Fingerprint(), Fingerprint()) == 1.0);
  auto g = morgan_fingerprint(parse("c1ccccc1N"));
  CHECK(tanimoto(f, g) == tanimoto(g, f));
  try {
    tanimoto(Fingerprint(1024), Fingerprint(2048));
    FAIL("no error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kLengthMismatch);
  }
}

TEST_CASE("murcko scaffold") {
  using smiles::canonicalize;
  CHECK(murcko_scaffold_smiles("c1ccccc1") == canonicalize("c1ccccc1"));
  CHECK(murcko_scaffold(parse("CCCC")).empty());
  CHECK(murcko_scaffold_smiles("Cc1ccccc1") == canonicalize("c1ccccc1"));
  CHECK(murcko_scaffold_smiles("CCc1ccc(cc1)CCc1ccncc1")
        == canonicalize("c1ccc(cc1)CCc1ccncc1"));
  CHECK(murcko_scaffold_smiles("O=C1CCCCC1CC") == canonicalize("O=C1CCCCC1"));
  CHECK(murcko_scaffold_smiles("CC(=O)c1ccccc1") == canonicalize("c1ccccc1"));
  CHECK(murcko_scaffold_smiles("Cn1cccc1") == canonicalize("c1cc[nH]c1"));
  CHECK(murcko_scaffold_smiles("N[C@@H](Cc1ccccc1)C(=O)O")
        == canonicalize("c1ccccc1"));
}

TEST_CASE("murcko scaffold matches the pruning oracle and is idempotent") {
  for (const auto &s: test::load_corpus()) {
    CAPTURE(s);
    auto m = parse(s);
    auto scaffold = murcko_scaffold(m);
    std::map<smiles::Element, int> got;
    for (const auto &a: scaffold.atoms())
      got[a.element] += 1;
    CHECK(got == pruned_elements(m));
    const auto text = smiles::write_canonical(scaffold);
    if (!text.empty()) {
      auto reparsed = parse(text);
      CHECK(test::isomorphic(reparsed, scaffold));
    }
    CHECK(smiles::write_canonical(murcko_scaffold(scaffold)) == text);
  }
}
