#!/usr/bin/env python3
#
# Project cardiogen - Copyright 2026 cardiogen contributors.
# SPDX-License-Identifier: Apache-2.0
#
"""Writes data/corpus500.smi: known drugs plus scaffold/substituent combos.

Only the supported element set is used. The output is deterministic.
"""

import argparse
import random

DRUGS = [
    "CC(=O)Oc1ccccc1C(=O)O",                      # aspirin
    "CC(C)Cc1ccc(cc1)C(C)C(=O)O",                 # ibuprofen
    "CC(=O)Nc1ccc(O)cc1",                         # paracetamol
    "CN1C=NC2=C1C(=O)N(C)C(=O)N2C",               # caffeine
    "CN(C)CCCN1c2ccccc2CCc2ccccc21",              # imipramine
    "CN(C)CCC=C1c2ccccc2CCc2ccccc12",             # amitriptyline
    "Clc1ccc2c(c1)C(=NCc1nncn1-2)c1ccccc1",      # alprazolam-like
    "CN1CCN(CC1)C(c1ccccc1)c1ccc(Cl)cc1",         # chlorcyclizine
    "O=C(CCCN1CCC(CC1)(O)c1ccc(Cl)cc1)c1ccc(F)cc1",  # haloperidol
    "O=C1Nc2ccccc2N1C1CCN(CCCC(c2ccc(F)cc2)c2ccc(F)cc2)CC1",  # pimozide
    "O=C1NCN(c2ccccc2)C12CCN(CCCC(c1ccc(F)cc1)c1ccc(F)cc1)CC2",  # fluspirilene
    "COc1ccc2[nH]cc(CCN(C)C)c2c1",                # 5-MeO-DMT
    "CCN(CC)CC(=O)Nc1c(C)cccc1C",                 # lidocaine
    "CC(C)NCC(O)COc1cccc2ccccc12",                # propranolol
    "CC(C)NCC(O)c1ccc(NS(C)(=O)=O)cc1",           # sotalol
    "CCCCN(CCCC)CCCOc1ccc(cc1)C(=O)c1c(CCCC)oc2ccccc12",  # dronedarone-like
    "CCCCc1oc2ccccc2c1C(=O)c1cc(I)c(OCCN(CC)CC)c(I)c1",  # amiodarone
    "COc1ccc(CCN(C)CCCC(C#N)(C(C)C)c2ccc(OC)c(OC)c2)cc1OC",  # verapamil
    "CCOC(=O)C1=C(COCCN)NC(C)=C(C1c1ccccc1Cl)C(=O)OC",  # amlodipine
    "COC(=O)C1=C(C)NC(C)=C(C1c1ccccc1[N+](=O)[O-])C(=O)OC",  # nifedipine
    "CC(C)(C)NCC(O)c1ccc(O)c(CO)c1",              # salbutamol
    "CN1CCCC1c1cccnc1",                           # nicotine
    "OC(=O)CCCc1ccc(N(CCCl)CCCl)cc1",             # chlorambucil
    "Cc1ccc(cc1)S(=O)(=O)NC(=O)NCCCC",            # tolbutamide
    "CCC(=O)N(c1ccccc1)C1CCN(CCc2ccccc2)CC1",     # fentanyl
    "CN1C2CCC1C(C(=O)OC)C(C2)OC(=O)c1ccccc1",     # cocaine
    "Oc1ccc(cc1)C1(c2ccc(O)cc2)OC(=O)c2ccccc12",  # phenolphthalein
    "NC(=O)c1cccnc1",                             # nicotinamide
    "Cn1cnc2c1c(=O)[nH]c(=O)n2C",                 # theophylline-like
    "OCC1OC(O)C(O)C(O)C1O",                       # glucose
    "N[C@@H](Cc1ccccc1)C(=O)O",                   # phenylalanine
    "N[C@@H](CC(C)C)C(=O)O",                      # leucine
    "C[C@H](N)C(=O)O",                            # alanine
    "NCCc1c[nH]c2ccc(O)cc12",                     # serotonin
    "NCCc1ccc(O)c(O)c1",                          # dopamine
    "CNC[C@H](O)c1ccc(O)c(O)c1",                  # adrenaline
    "Clc1ccc(cc1)C(c1ccccc1)N1CCN(CCOCC(=O)O)CC1",  # cetirizine
    "CN(C)CCOC(c1ccccc1)c1ccccc1",                # diphenhydramine
    "OC(c1ccc(cc1)C(C)(C)C(=O)O)(c1ccccc1)C1CCN(CCCC(O)c2ccc(cc2)C(C)(C)C)CC1",  # terfenadine-like
    "CC(C)(C)c1ccc(cc1)C(O)CCCN1CCC(CC1)C(O)(c1ccccc1)c1ccccc1",  # terfenadine
    "COc1ccc2nc(S(=O)Cc3ncc(C)c(OC)c3C)[nH]c2c1",  # omeprazole
    "CN1C(=O)CN=C(c2ccccc2)c2cc(Cl)ccc12",        # diazepam
    "OC1N=C(c2ccccc2)c2cc(Cl)ccc2NC1=O",          # oxazepam
    "CN(C)CCCN1c2ccccc2Sc2ccc(Cl)cc21",           # chlorpromazine
    "CC(=O)N1CCN(CC1)c1ccc(OCC2COC(Cn3ccnc3)(O2)c2ccc(Cl)cc2Cl)cc1",  # ketoconazole
    "FC(F)(F)c1ccc(OC(CCNC)c2ccccc2)cc1",         # fluoxetine
    "CNCCC(Oc1cccc2ccccc12)c1cccs1",              # duloxetine
    "COc1cc2c(cc1OC)C(=O)C(CC1CCN(Cc3ccccc3)CC1)C2",  # donepezil
    "CN1CCc2cccc3c2C1Cc1ccc(O)c(O)c1-3",          # apomorphine
    "O=C(O)c1ccccc1O",                            # salicylic acid
    "CC(C)NCC(O)COc1ccc(CC(N)=O)cc1",             # atenolol
    "COc1ccc(CC(C)NCC(O)c2ccc(O)c(NC=O)c2)cc1",   # formoterol
    "CS(=O)(=O)Nc1ccc(cc1)C(O)CNC(C)C",           # sotalol isomer
    "Cc1ncc([N+](=O)[O-])n1CCO",                  # metronidazole
    "NS(=O)(=O)c1cc(C(=O)O)c(NCc2ccco2)cc1Cl",    # furosemide
    "CCN(CC)C(=O)c1ccc(cc1)C(=C1CCNCC1)c1ccccc1",  # diarylmethylene
    "Nc1ccc(cc1)S(=O)(=O)Nc1ccccn1",              # sulfapyridine
    "CC1(C)SC2C(NC(=O)Cc3ccccc3)C(=O)N2C1C(=O)O",  # penicillin G
    "OC(=O)c1cc2ccccn2c1",                        # indolizine acid
    "Brc1ccc(cc1)C(c1ccccn1)CCN(C)C",             # brompheniramine
    "C#CC1(O)CCC2C3CCc4cc(O)ccc4C3CCC21C",        # ethinylestradiol
    "CC12CCC3C(CCC4=CC(=O)CCC34C)C1CCC2O",        # testosterone
    "OP(=O)(O)OCC1OC(n2cnc3c(N)ncnc23)C(O)C1O",   # AMP
    "B(O)(O)c1ccccc1",                            # phenylboronic acid
    "FC(F)Oc1ccc2[nH]c(S(=O)Cc3nccc(OC)c3OC)nc2c1",  # pantoprazole
    "CC(=O)OCC[N+](C)(C)C",                       # acetylcholine
    "C1CCC(CC1)NC(=O)Nc1ccccc1",                  # urea
    "O=C1CCCN1",                                  # pyrrolidone
    "c1ccc2c(c1)ccc1ccccc12",                     # phenanthrene
    "c1ccc2cc3ccccc3cc2c1",                       # anthracene
    "c1ccc(cc1)-c1ccccc1",                        # biphenyl
    "c1ccc2[nH]ccc2c1",                           # indole
    "c1ccc2ncccc2c1",                             # quinoline
    "c1cnc2[nH]cnc2c1",                           # azaindole
    "c1ccsc1",                                    # thiophene
    "c1cc[nH]c1",                                 # pyrrole
    "c1cnccn1",                                   # pyrazine
    "C1CC2CCC1C2",                                # norbornane
    "C1CC2CC1C1CCCCC21",                          # tricyclic
    "C1CC2(C1)CCC2",                              # spiro
]

# (scaffold, number of attachment points)
SCAFFOLDS = [
    "c1ccc({0})cc1",
    "c1cc({0})ccc1{1}",
    "c1cc({0})cc({1})c1",
    "c1ccc2cc({0})ccc2c1",
    "c1ccnc({0})c1",
    "c1cnc({0})nc1",
    "c1ccc2[nH]c({0})cc2c1",
    "c1csc({0})c1",
    "c1coc({0})c1",
    "C1CCN(CC1){0}",
    "C1CCC(CC1){0}",
    "C1CN(CCN1{0}){1}",
    "C1CCC(CC1)N{0}",
    "O=C1CCC(N1){0}",
    "c1ccc(cc1)C(=O)N{0}",
    "c1ccc(cc1)C({0})c1ccccc1",
    "c1ccc(cc1)Oc1ccc({0})cc1",
    "c1ccc(cc1)CN1CCC(CC1){0}",
    "O=C(Nc1ccccc1)c1ccc({0})cc1",
    "c1ccc2c(c1)CCN(C2){0}",
    "c1ccc(cc1)-c1ccc({0})cc1",
    "C1COCCN1C(=O)c1ccc({0})cc1",
    "c1ccc(nc1)N1CCN(CC1){0}",
    "c1cc2ccccc2nc1{0}",
    "FC(F)(F)c1ccc(cc1){0}",
]

SUBSTITUENTS = [
    "C", "CC", "CCC", "C(C)C", "O", "OC", "OCC", "N", "NC", "N(C)C", "F",
    "Cl", "Br", "I", "C(F)(F)F", "C#N", "C(=O)O", "C(=O)OC", "C(=O)N",
    "NC(=O)C", "S(=O)(=O)N", "S(C)(=O)=O", "[N+](=O)[O-]", "CO", "CN",
    "CCN(C)C", "CCCN1CCCC1", "C(=O)c1ccccc1", "Cc1ccccc1", "OCC(O)CO",
    "SC", "C=C", "C#C", "CC(=O)O", "NS(C)(=O)=O", "c1ccncc1", "C1CC1",
    "OC(F)(F)F", "CCO", "P(=O)(O)O",
]


def fill(scaffold, n_slots, rng):
    subs = [rng.choice(SUBSTITUENTS) for _ in range(n_slots)]
    return scaffold.format(*subs)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/corpus500.smi")
    ap.add_argument("--n", type=int, default=500)
    ap.add_argument("--seed", type=int, default=20260101)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    seen = set()
    rows = []
    for s in DRUGS:
        if s not in seen:
            seen.add(s)
            rows.append(s)
    while len(rows) < args.n:
        scaffold = rng.choice(SCAFFOLDS)
        slots = scaffold.count("{")
        s = fill(scaffold, slots, rng)
        if s in seen:
            continue
        seen.add(s)
        rows.append(s)
    with open(args.out, "w") as f:
        f.write("# desk corpus: known drugs followed by scaffold/substituent "
                "combinations\n")
        for s in rows:
            f.write(s + "\n")


if __name__ == "__main__":
    main()
