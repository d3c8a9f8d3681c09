#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Generate the bundled molecule corpora (assets/corpus.jsonl, assets/overfit16.jsonl).

Each molecule is built from idealized internal coordinates whose bond lengths
match assets/bond_lengths.json, so bonds can be re-derived from distances on
the clean geometries. Copies are written with a small coordinate jitter and a
random rigid rotation; everything is seeded, so the output is reproducible.
"""

import json
import math
import random

# --- small vector helpers -------------------------------------------------


def add(a, b):
    return [a[0] + b[0], a[1] + b[1], a[2] + b[2]]


def scale(a, s):
    return [a[0] * s, a[1] * s, a[2] * s]


def norm(a):
    return math.sqrt(sum(x * x for x in a))


def unit(a):
    n = norm(a)
    return [x / n for x in a]


TET = [unit(v) for v in ([1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1])]


def atom(sym, xyz, charge=0):
    return {"type": sym, "charge": charge, "xyz": [round(c, 6) for c in xyz]}


class Mol:
    def __init__(self, name):
        self.name = name
        self.atoms = []
        self.bonds = []

    def add(self, sym, xyz, charge=0):
        self.atoms.append(atom(sym, xyz, charge))
        return len(self.atoms) - 1

    def bond(self, i, j, order=1):
        self.bonds.append([i, j, order])

    def record(self):
        return {"atoms": self.atoms, "bonds": self.bonds}


# --- molecule builders (lengths in angstroms) ------------------------------


def methane():
    m = Mol("methane")
    c = m.add("C", [0, 0, 0])
    for d in TET:
        h = m.add("H", scale(d, 1.09))
        m.bond(c, h)
    return m


def water():
    m = Mol("water")
    ang = math.radians(104.5 / 2)
    o = m.add("O", [0, 0, 0])
    h1 = m.add("H", [0.96 * math.sin(ang), 0.96 * math.cos(ang), 0])
    h2 = m.add("H", [-0.96 * math.sin(ang), 0.96 * math.cos(ang), 0])
    m.bond(o, h1)
    m.bond(o, h2)
    return m


def ammonia():
    m = Mol("ammonia")
    n = m.add("N", [0, 0, 0])
    # Pyramidal: three N-H of 1.01 with ~107 degree H-N-H angles.
    drop = math.radians(112)
    for k in range(3):
        th = 2 * math.pi * k / 3
        d = [math.sin(drop) * math.cos(th), math.sin(drop) * math.sin(th),
             math.cos(drop)]
        h = m.add("H", scale(d, 1.01))
        m.bond(n, h)
    return m


def hydronium():
    m = Mol("hydronium")
    o = m.add("O", [0, 0, 0], charge=1)
    drop = math.radians(112)
    for k in range(3):
        th = 2 * math.pi * k / 3
        d = [math.sin(drop) * math.cos(th), math.sin(drop) * math.sin(th),
             math.cos(drop)]
        h = m.add("H", scale(d, 0.98))
        m.bond(o, h)
    return m


def ammonium():
    m = Mol("ammonium")
    n = m.add("N", [0, 0, 0], charge=1)
    for d in TET:
        h = m.add("H", scale(d, 1.02))
        m.bond(n, h)
    return m


def hydrogen():
    m = Mol("hydrogen")
    a = m.add("H", [0, 0, 0])
    b = m.add("H", [0.74, 0, 0])
    m.bond(a, b)
    return m


def hf():
    m = Mol("hydrogen fluoride")
    f = m.add("F", [0, 0, 0])
    h = m.add("H", [0.92, 0, 0])
    m.bond(f, h)
    return m


def n2():
    m = Mol("nitrogen")
    a = m.add("N", [0, 0, 0])
    b = m.add("N", [1.10, 0, 0])
    m.bond(a, b, 3)
    return m


def f2():
    m = Mol("fluorine")
    a = m.add("F", [0, 0, 0])
    b = m.add("F", [1.41, 0, 0])
    m.bond(a, b)
    return m


def carbon_monoxide():
    m = Mol("carbon monoxide")
    c = m.add("C", [0, 0, 0], charge=-1)
    o = m.add("O", [1.13, 0, 0], charge=1)
    m.bond(c, o, 3)
    return m


def cyanide():
    m = Mol("cyanide")
    c = m.add("C", [0, 0, 0], charge=-1)
    n = m.add("N", [1.16, 0, 0])
    m.bond(c, n, 3)
    return m


def hydroxide():
    m = Mol("hydroxide")
    o = m.add("O", [0, 0, 0], charge=-1)
    h = m.add("H", [0.96, 0, 0])
    m.bond(o, h)
    return m


def fluoride():
    m = Mol("fluoride")
    m.add("F", [0, 0, 0], charge=-1)
    return m


def hydrogen_cyanide():
    m = Mol("hydrogen cyanide")
    c = m.add("C", [0, 0, 0])
    n = m.add("N", [1.16, 0, 0])
    h = m.add("H", [-1.07, 0, 0])
    m.bond(c, n, 3)
    m.bond(c, h)
    return m


def carbon_dioxide():
    m = Mol("carbon dioxide")
    c = m.add("C", [0, 0, 0])
    o1 = m.add("O", [1.21, 0, 0])
    o2 = m.add("O", [-1.21, 0, 0])
    m.bond(c, o1, 2)
    m.bond(c, o2, 2)
    return m


def formaldehyde():
    m = Mol("formaldehyde")
    c = m.add("C", [0, 0, 0])
    o = m.add("O", [1.21, 0, 0])
    a = math.radians(120)
    h1 = m.add("H", [-1.09 * math.cos(a - math.pi), 1.09 * math.sin(a), 0])
    h2 = m.add("H", [-1.09 * math.cos(a - math.pi), -1.09 * math.sin(a), 0])
    m.bond(c, o, 2)
    m.bond(c, h1)
    m.bond(c, h2)
    return m


def hydrogen_peroxide():
    m = Mol("hydrogen peroxide")
    o1 = m.add("O", [0, 0, 0])
    o2 = m.add("O", [1.48, 0, 0])
    ang = math.radians(100)
    h1 = m.add("H", [-0.97 * math.cos(ang), 0.97 * math.sin(ang), 0])
    # Skewed dihedral on the second hydroxyl.
    h2 = m.add("H", [1.48 + 0.97 * math.cos(ang),
                     0.97 * math.sin(ang) * math.cos(math.radians(111)),
                     0.97 * math.sin(ang) * math.sin(math.radians(111))])
    m.bond(o1, o2)
    m.bond(o1, h1)
    m.bond(o2, h2)
    return m


def hydrazine():
    m = Mol("hydrazine")
    n1 = m.add("N", [0, 0, 0])
    n2 = m.add("N", [1.45, 0, 0])
    m.bond(n1, n2)
    ang = math.radians(108)
    for base, sgn in ((n1, -1), (n2, 1)):
        x0 = 0.0 if base == n1 else 1.45
        for k in (0, 1):
            dih = math.radians(60 + 180 * k)
            d = [sgn * math.cos(math.pi - ang) * -1,
                 math.sin(ang) * math.cos(dih),
                 math.sin(ang) * math.sin(dih)]
            d = unit([sgn * abs(d[0]) * -1 if base == n1 else abs(d[0]), d[1], d[2]])
            h = m.add("H", add([x0, 0, 0], scale(d, 1.01)))
            m.bond(base, h)
    return m


def hydroxylamine():
    m = Mol("hydroxylamine")
    n = m.add("N", [0, 0, 0])
    o = m.add("O", [1.45, 0, 0])
    ang = math.radians(103)
    ho = m.add("H", [1.45 + 0.96 * math.cos(ang), 0.96 * math.sin(ang), 0])
    for dih in (math.radians(120), math.radians(240)):
        d = [math.cos(math.pi - math.radians(105)),
             math.sin(math.radians(105)) * math.cos(dih),
             math.sin(math.radians(105)) * math.sin(dih)]
        h = m.add("H", scale(unit(d), 1.01))
        m.bond(n, h)
    m.bond(n, o)
    m.bond(o, ho)
    return m


def nitrosyl_hydride():
    m = Mol("nitrosyl hydride")
    n = m.add("N", [0, 0, 0])
    o = m.add("O", [1.21, 0, 0])
    ang = math.radians(109)
    h = m.add("H", [-1.06 * math.cos(math.pi - ang), 1.06 * math.sin(ang), 0])
    m.bond(n, o, 2)
    m.bond(n, h)
    return m


def _methyl(m, carbon_at, axis, hydrogen_len=1.09, dih0=0.0):
    """Three hydrogens around `carbon_at` pointing away from -axis."""
    axis = unit(axis)
    # Build an orthonormal frame aroundured axis.
    ref = [0, 0, 1] if abs(axis[2]) < 0.9 else [1, 0, 0]
    u = unit([axis[1] * ref[2] - axis[2] * ref[1],
              axis[2] * ref[0] - axis[0] * ref[2],
              axis[0] * ref[1] - axis[1] * ref[0]])
    v = [axis[1] * u[2] - axis[2] * u[1],
         axis[2] * u[0] - axis[0] * u[2],
         axis[0] * u[1] - axis[1] * u[0]]
    base = m.atoms[carbon_at]["xyz"]
    ids = []
    cosb = math.cos(math.radians(180 - 109.5))
    sinb = math.sin(math.radians(180 - 109.5))
    for k in range(3):
        th = dih0 + 2 * math.pi * k / 3
        d = add(scale(axis, cosb),
                add(scale(u, sinb * math.cos(th)), scale(v, sinb * math.sin(th))))
        h = m.add("H", add(base, scale(d, hydrogen_len)))
        m.bond(carbon_at, h)
        ids.append(h)
    return ids


def methanol():
    m = Mol("methanol")
    c = m.add("C", [0, 0, 0])
    o = m.add("O", [1.43, 0, 0])
    m.bond(c, o)
    _methyl(m, c, [-1, 0, 0])
    ang = math.radians(108.5)
    h = m.add("H", [1.43 + 0.96 * math.cos(ang), 0.96 * math.sin(ang), 0])
    m.bond(o, h)
    return m


def methoxide():
    m = Mol("methoxide")
    c = m.add("C", [0, 0, 0])
    o = m.add("O", [1.40, 0, 0], charge=-1)
    m.bond(c, o)
    _methyl(m, c, [-1, 0, 0])
    return m


def methylamine():
    m = Mol("methylamine")
    c = m.add("C", [0, 0, 0])
    n = m.add("N", [1.47, 0, 0])
    m.bond(c, n)
    _methyl(m, c, [-1, 0, 0])
    ang = math.radians(110)
    for dih in (math.radians(60), math.radians(-60)):
        d = [math.cos(ang), math.sin(ang) * math.cos(dih),
             math.sin(ang) * math.sin(dih)]
        h = m.add("H", add([1.47, 0, 0], scale(unit(d), 1.01)))
        m.bond(n, h)
    return m


def methylammonium():
    m = Mol("methylammonium")
    c = m.add("C", [0, 0, 0])
    n = m.add("N", [1.49, 0, 0], charge=1)
    m.bond(c, n)
    _methyl(m, c, [-1, 0, 0])
    _methyl(m, n, [1, 0, 0], hydrogen_len=1.02, dih0=math.pi / 3)
    return m


def fluoromethane():
    m = Mol("fluoromethane")
    c = m.add("C", [0, 0, 0])
    f = m.add("F", [1.38, 0, 0])
    m.bond(c, f)
    _methyl(m, c, [-1, 0, 0])
    return m


def difluoromethane():
    m = Mol("difluoromethane")
    c = m.add("C", [0, 0, 0])
    ids = []
    for i, d in enumerate(TET):
        if i < 2:
            a = m.add("F", scale(d, 1.36))
        else:
            a = m.add("H", scale(d, 1.09))
        m.bond(c, a)
        ids.append(a)
    return m


def fluoroform():
    m = Mol("fluoroform")
    c = m.add("C", [0, 0, 0])
    for i, d in enumerate(TET):
        if i < 3:
            a = m.add("F", scale(d, 1.33))
        else:
            a = m.add("H", scale(d, 1.09))
        m.bond(c, a)
    return m


def tetrafluoromethane():
    m = Mol("tetrafluoromethane")
    c = m.add("C", [0, 0, 0])
    for d in TET:
        f = m.add("F", scale(d, 1.32))
        m.bond(c, f)
    return m


def ethane():
    m = Mol("ethane")
    c1 = m.add("C", [0, 0, 0])
    c2 = m.add("C", [1.54, 0, 0])
    m.bond(c1, c2)
    _methyl(m, c1, [-1, 0, 0])
    _methyl(m, c2, [1, 0, 0], dih0=math.pi / 3)
    return m


def ethene():
    m = Mol("ethene")
    c1 = m.add("C", [0, 0, 0])
    c2 = m.add("C", [1.33, 0, 0])
    m.bond(c1, c2, 2)
    a = math.radians(121)
    for base, sgn in ((c1, -1), (c2, 1)):
        x0 = 0.0 if base == c1 else 1.33
        for up in (1, -1):
            h = m.add("H", [x0 + sgn * 1.09 * math.cos(math.pi - a) * -1,
                            up * 1.09 * math.sin(a), 0])
            m.bond(base, h)
    return m


def ethyne():
    m = Mol("ethyne")
    c1 = m.add("C", [0, 0, 0])
    c2 = m.add("C", [1.20, 0, 0])
    h1 = m.add("H", [-1.06, 0, 0])
    h2 = m.add("H", [2.26, 0, 0])
    m.bond(c1, c2, 3)
    m.bond(c1, h1)
    m.bond(c2, h2)
    return m


def methanimine():
    m = Mol("methanimine")
    c = m.add("C", [0, 0, 0])
    n = m.add("N", [1.27, 0, 0])
    m.bond(c, n, 2)
    a = math.radians(119)
    for up in (1, -1):
        h = m.add("H", [-1.09 * math.cos(math.pi - a) * -1, up * 1.09 * math.sin(a), 0])
        m.bond(c, h)
    hn = m.add("H", [1.27 + 1.02 * math.cos(math.radians(110)),
                     1.02 * math.sin(math.radians(110)), 0])
    m.bond(n, hn)
    return m


def formic_acid():
    m = Mol("formic acid")
    c = m.add("C", [0, 0, 0])
    o1 = m.add("O", [1.21 * math.cos(math.radians(25)),
                     1.21 * math.sin(math.radians(25)), 0])
    o2 = m.add("O", [1.36 * math.cos(math.radians(-95)),
                     1.36 * math.sin(math.radians(-95)), 0])
    h = m.add("H", [-1.09 * math.cos(math.radians(35)),
                    1.09 * math.sin(math.radians(35)), 0])
    oh = m.add("H", add(m.atoms[o2]["xyz"], [0.96 * math.cos(math.radians(0)),
                                             -0.96 * math.sin(math.radians(74)), 0]))
    # Recompute hydroxyl hydrogen properly: place off o2 away from c.
    m.atoms[oh]["xyz"] = [round(v, 6) for v in
                          add(m.atoms[o2]["xyz"],
                              scale(unit([math.cos(math.radians(-35)),
                                          math.sin(math.radians(-35)), 0]), 0.96))]
    m.bond(c, o1, 2)
    m.bond(c, o2)
    m.bond(c, h)
    m.bond(o2, oh)
    return m


def formamide():
    m = Mol("formamide")
    c = m.add("C", [0, 0, 0])
    o = m.add("O", [1.21 * math.cos(math.radians(28)),
                    1.21 * math.sin(math.radians(28)), 0])
    n = m.add("N", [1.42 * math.cos(math.radians(-94)),
                    1.42 * math.sin(math.radians(-94)), 0])
    h = m.add("H", [-1.09 * math.cos(math.radians(30)),
                    1.09 * math.sin(math.radians(30)), 0])
    m.bond(c, o, 2)
    m.bond(c, n)
    m.bond(c, h)
    base = m.atoms[n]["xyz"]
    for ang in (-35, -155):
        hn = m.add("H", add(base, scale(unit([math.cos(math.radians(ang)),
                                              math.sin(math.radians(ang)), 0]), 1.01)))
        m.bond(n, hn)
    return m


def acetaldehyde():
    m = Mol("acetaldehyde")
    c1 = m.add("C", [0, 0, 0])
    c2 = m.add("C", [1.50, 0, 0])
    o = m.add("O", add([1.50, 0, 0], scale(unit([math.cos(math.radians(60)),
                                                 math.sin(math.radians(60)), 0]), 1.21)))
    h = m.add("H", add([1.50, 0, 0], scale(unit([math.cos(math.radians(-60)),
                                                 math.sin(math.radians(-60)), 0]), 1.09)))
    m.bond(c1, c2)
    m.bond(c2, o, 2)
    m.bond(c2, h)
    _methyl(m, c1, [-1, 0, 0])
    return m


def acetonitrile():
    m = Mol("acetonitrile")
    c1 = m.add("C", [0, 0, 0])
    c2 = m.add("C", [1.46, 0, 0])
    n = m.add("N", [1.46 + 1.16, 0, 0])
    m.bond(c1, c2)
    m.bond(c2, n, 3)
    _methyl(m, c1, [-1, 0, 0])
    return m


def dimethyl_ether():
    m = Mol("dimethyl ether")
    ang = math.radians(111.5 / 2)
    o = m.add("O", [0, 0, 0])
    c1 = m.add("C", [1.41 * math.sin(ang), 1.41 * math.cos(ang), 0])
    c2 = m.add("C", [-1.41 * math.sin(ang), 1.41 * math.cos(ang), 0])
    m.bond(o, c1)
    m.bond(o, c2)
    _methyl(m, c1, unit(m.atoms[c1]["xyz"]))
    _methyl(m, c2, unit(m.atoms[c2]["xyz"]), dih0=math.pi / 5)
    return m


def ethanol():
    m = Mol("ethanol")
    c1 = m.add("C", [0, 0, 0])
    c2 = m.add("C", [1.51, 0, 0])
    d = unit([math.cos(math.radians(70)), math.sin(math.radians(70)), 0])
    o = m.add("O", add([1.51, 0, 0], scale(d, 1.43)))
    m.bond(c1, c2)
    m.bond(c2, o)
    _methyl(m, c1, [-1, 0, 0])
    # Two hydrogens on the middle carbon.
    for dih in (math.radians(115), math.radians(245)):
        dd = unit([math.cos(math.radians(250)),
                   math.sin(math.radians(250)) * math.cos(dih),
                   math.sin(math.radians(250)) * math.sin(dih)])
        h = m.add("H", add([1.51, 0, 0], scale(dd, 1.09)))
        m.bond(c2, h)
    op = m.atoms[o]["xyz"]
    oh = m.add("H", add(op, scale(unit([math.cos(math.radians(25)),
                                        math.sin(math.radians(25)), 0]), 0.96)))
    m.bond(o, oh)
    return m


def propane():
    m = Mol("propane")
    ang = math.radians(112 / 2)
    c0 = m.add("C", [0, 0, 0])
    c1 = m.add("C", [1.54 * math.sin(ang), 1.54 * math.cos(ang), 0])
    c2 = m.add("C", [-1.54 * math.sin(ang), 1.54 * math.cos(ang), 0])
    m.bond(c0, c1)
    m.bond(c0, c2)
    _methyl(m, c1, unit(m.atoms[c1]["xyz"]))
    _methyl(m, c2, unit(m.atoms[c2]["xyz"]), dih0=math.pi / 7)
    for up in (1, -1):
        h = m.add("H", [0, -1.09 * math.cos(math.radians(36)),
                        up * 1.09 * math.sin(math.radians(36))])
        m.bond(c0, h)
    return m


def cyclopropane():
    m = Mol("cyclopropane")
    r = 1.51 / math.sqrt(3.0)
    cs = []
    for k in range(3):
        th = 2 * math.pi * k / 3
        cs.append(m.add("C", [r * math.cos(th), r * math.sin(th), 0]))
    for k in range(3):
        m.bond(cs[k], cs[(k + 1) % 3])
    for k in range(3):
        th = 2 * math.pi * k / 3
        out = [math.cos(th), math.sin(th), 0]
        for up in (1, -1):
            d = unit(add(scale(out, math.cos(math.radians(30))),
                         [0, 0, up * math.sin(math.radians(60))]))
            h = m.add("H", add(m.atoms[cs[k]]["xyz"], scale(d, 1.09)))
            m.bond(cs[k], h)
    return m


def propene():
    m = Mol("propene")
    c1 = m.add("C", [0, 0, 0])
    c2 = m.add("C", [1.33, 0, 0])
    d = unit([math.cos(math.radians(55)), math.sin(math.radians(55)), 0])
    c3 = m.add("C", add([1.33, 0, 0], scale(d, 1.50)))
    m.bond(c1, c2, 2)
    m.bond(c2, c3)
    a = math.radians(121)
    for up in (1, -1):
        h = m.add("H", [1.09 * math.cos(math.pi - a) * -1, up * 1.09 * math.sin(a), 0])
        m.bond(c1, h)
    h2 = m.add("H", add([1.33, 0, 0],
                        scale(unit([math.cos(math.radians(-60)),
                                    math.sin(math.radians(-60)), 0]), 1.09)))
    m.bond(c2, h2)
    _methyl(m, c3, d)
    return m


def benzene():
    m = Mol("benzene")
    rc = 1.395
    cs = []
    for k in range(6):
        th = math.pi * k / 3
        cs.append(m.add("C", [rc * math.cos(th), rc * math.sin(th), 0]))
    for k in range(6):
        m.bond(cs[k], cs[(k + 1) % 6], "ar")
    for k in range(6):
        th = math.pi * k / 3
        h = m.add("H", [(rc + 1.09) * math.cos(th), (rc + 1.09) * math.sin(th), 0])
        m.bond(cs[k], h)
    return m


def pyridine():
    m = Mol("pyridine")
    # Regular hexagon of carbons (side 1.395) with the nitrogen pulled
    # radially inward so both N-C bonds measure exactly 1.34.
    rc = 1.395
    rn = (rc + math.sqrt(4 * 1.34 ** 2 - 3 * rc ** 2)) / 2
    angles = [math.pi / 2 + k * math.pi / 3 for k in range(6)]
    ring = [m.add("N", [0, rn, 0])]
    for th in angles[1:]:
        ring.append(m.add("C", [rc * math.cos(th), rc * math.sin(th), 0]))
    for k in range(6):
        m.bond(ring[k], ring[(k + 1) % 6], "ar")
    for k in range(1, 6):
        th = angles[k]
        h = m.add("H", [(rc + 1.09) * math.cos(th),
                        (rc + 1.09) * math.sin(th), 0])
        m.bond(ring[k], h)
    return m


BUILDERS = [
    (methane, 8), (water, 8), (ammonia, 7), (hydrogen, 5), (hf, 4),
    (methanol, 7), (ethane, 7), (ethene, 6), (ethyne, 5),
    (hydrogen_cyanide, 5), (carbon_dioxide, 5), (formaldehyde, 6),
    (hydrogen_peroxide, 5), (hydrazine, 5), (hydroxylamine, 4),
    (nitrosyl_hydride, 4), (methylamine, 6), (fluoromethane, 5),
    (difluoromethane, 4), (fluoroform, 4), (tetrafluoromethane, 4),
    (ethanol, 6), (dimethyl_ether, 5), (acetonitrile, 5), (acetaldehyde, 5),
    (formic_acid, 5), (formamide, 5), (propane, 5), (cyclopropane, 4),
    (propene, 5), (methanimine, 4), (n2, 4), (f2, 3), (carbon_monoxide, 3),
    (cyanide, 3), (hydroxide, 3), (fluoride, 3), (hydronium, 3),
    (ammonium, 3), (methoxide, 3), (methylammonium, 3), (benzene, 3),
    (pyridine, 2),
]

OVERFIT = [methane, water, ammonia, methanol]


def rotate(xyz, q):
    """Apply a rotation matrix (3 rows) to one point."""
    return [sum(q[r][k] * xyz[k] for k in range(3)) for r in range(3)]


def random_rotation(rng):
    # Rodrigues from a random axis and angle.
    while True:
        v = [rng.gauss(0, 1) for _ in range(3)]
        if norm(v) > 1e-6:
            break
    a = unit(v)
    th = rng.uniform(0, 2 * math.pi)
    c, s = math.cos(th), math.sin(th)
    q = [[0.0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            q[i][j] = c * (1.0 if i == j else 0.0) + (1 - c) * a[i] * a[j]
    q[0][1] -= s * a[2]
    q[0][2] += s * a[1]
    q[1][0] += s * a[2]
    q[1][2] -= s * a[0]
    q[2][0] -= s * a[1]
    q[2][1] += s * a[0]
    return q


def jittered_copy(mol, rng, sigma=0.005):
    rec = {"atoms": [], "bonds": [list(b) for b in mol.bonds]}
    q = random_rotation(rng)
    pts = [rotate(a["xyz"], q) for a in mol.atoms]
    pts = [[x + rng.gauss(0, sigma) for x in p] for p in pts]
    com = [sum(p[k] for p in pts) / len(pts) for k in range(3)]
    for a, p in zip(mol.atoms, pts):
        rec["atoms"].append({"type": a["type"], "charge": a["charge"],
                             "xyz": [round(p[k] - com[k], 6) for k in range(3)]})
    return rec


def check_bond_lengths(mol, table):
    """Verify every bonded distance sits inside its table band."""
    for i, j, order in mol.bonds:
        pi = mol.atoms[i]["xyz"]
        pj = mol.atoms[j]["xyz"]
        d = norm([pi[k] - pj[k] for k in range(3)])
        key = "-".join(sorted([mol.atoms[i]["type"], mol.atoms[j]["type"]]))
        entry = table.get(key, {}).get(str(order))
        if entry is None:
            raise SystemExit(f"{mol.name}: no table entry for {key} order {order}")
        lo = entry["length"] - entry["tol"]
        hi = entry["length"] + entry["tol"]
        if not (lo + 0.02 <= d <= hi - 0.02):
            raise SystemExit(
                f"{mol.name}: {key} order {order} distance {d:.3f} not safely in "
                f"[{lo:.3f}, {hi:.3f}]")


def main():
    with open("assets/bond_lengths.json") as fh:
        raw = json.load(fh)
    table = {}
    for entry in raw:
        key = "-".join(sorted(entry["atoms"]))
        table.setdefault(key, {})[str(entry["order"])] = entry

    rng = random.Random(20260814)
    mols = []
    for builder, count in BUILDERS:
        mol = builder()
        check_bond_lengths(mol, table)
        for _ in range(count):
            mols.append(jittered_copy(mol, rng))
    rng.shuffle(mols)
    assert len(mols) <= 200, len(mols)
    with open("assets/corpus.jsonl", "w") as fh:
        for rec in mols:
            fh.write(json.dumps(rec) + "\n")

    rng16 = random.Random(31)
    with open("assets/overfit16.jsonl", "w") as fh:
        for builder in OVERFIT:
            for _ in range(4):
                fh.write(json.dumps(jittered_copy(builder(), rng16)) + "\n")
    print(f"wrote {len(mols)} molecules to assets/corpus.jsonl and 16 to "
          "assets/overfit16.jsonl")


if __name__ == "__main__":
    main()
