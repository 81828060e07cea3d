"""Brute-force enumeration oracles for the discrete concordance paths.

Every constant frozen into the test suite that is not a literal input is
recomputed here by a route that shares no code with the library: plain
Python loops over outcome atoms. Run with python3; output is meant to be
read and pasted, not parsed.
"""

import math
from fractions import Fraction


def cfb_by_atom_enumeration(atoms):
    # atoms: list of (b, h, weight); ordered-pair expectation of Eq-style score
    num = Fraction(0)
    den = Fraction(0)
    for b1, h1, w1 in atoms:
        for b2, h2, w2 in atoms:
            if b1 == b2:
                continue
            w = w1 * w2
            den += w
            if h1 == h2:
                num += Fraction(1, 2) * w
            elif (b1 > b2) == (h1 > h2):
                num += w
    return num, den


def two_group_atoms(c, p, q, h0=0, h1=1):
    c = Fraction(c)
    p = [Fraction(v) for v in p]
    q = [Fraction(v) for v in q]
    bs = (-1, 0, 1)
    atoms = [(b, h0, (1 - c) * p[i]) for i, b in enumerate(bs)]
    atoms += [(b, h1, c * q[i]) for i, b in enumerate(bs)]
    return atoms


def pair_cells(atoms):
    # joint Pr(H-rel, B-rel) over ordered pairs, keys like ('>', '<')
    cells = {}
    for b1, h1, w1 in atoms:
        for b2, h2, w2 in atoms:
            hr = "=" if h1 == h2 else (">" if h1 > h2 else "<")
            br = "=" if b1 == b2 else (">" if b1 > b2 else "<")
            cells[(hr, br)] = cells.get((hr, br), Fraction(0)) + w1 * w2
    return cells


def show_cells(tag, cells):
    print(tag)
    for hr in ("<", "=", ">"):
        row = [cells.get((hr, br), Fraction(0)) for br in ("<", "=", ">")]
        print("  H%s: %s" % (hr, "  ".join("%.10g" % float(v) for v in row)))


def main():
    # headline two-group population
    c = Fraction(1, 2)
    P1 = ("0.25", "0.01", "0.74")
    Q1 = ("0.14", "0.18", "0.68")
    atoms = two_group_atoms(c, P1, Q1)
    cells = pair_cells(atoms)
    show_cells("pair cells, c=0.5 P=(0.25,0.01,0.74) Q=(0.14,0.18,0.68):", cells)
    num, den = cfb_by_atom_enumeration(atoms)
    print("cfb = %s = %.17g" % (num / den, float(num / den)))

    # hand-expansion check pair
    atoms = two_group_atoms(c, ("0", "0.8", "0.2"), ("0", "0.3", "0.7"))
    cells = pair_cells(atoms)
    show_cells("pair cells, c=0.5 P=(0,0.8,0.2) Q=(0,0.3,0.7):", cells)
    num, den = cfb_by_atom_enumeration(atoms)
    print("cfb = %s = %.17g" % (num / den, float(num / den)))

    # grid minimum pair, exact rational value
    atoms = two_group_atoms(c, ("0.03", "0", "0.97"), ("0", "0.06", "0.94"))
    num, den = cfb_by_atom_enumeration(atoms)
    print("grid argmin cfb = %s = %.17g" % (num / den, float(num / den)))

    # inverse logit spot values
    print("expit(2) = %.17g" % (1.0 / (1.0 + math.exp(-2.0))))
    print("expit(4) = %.17g" % (1.0 / (1.0 + math.exp(-4.0))))

    # interpolation midpoint
    p = (0.08, 0.0, 0.92)
    q = (0.0, 0.15, 0.85)
    mid = tuple(p[i] + (q[i] - p[i]) * 0.5 for i in range(3))
    print("midpoint triple = %.17g %.17g %.17g" % mid)

    # Gini mean difference closed forms, two-atom H
    print("gini {0.49,0.54} w=(.5,.5) = %.17g" % (2 * 0.5 * 0.5 * abs(0.54 - 0.49)))
    print("gini {-1,1} w=(.4,.6)  = %.17g" % (2 * 0.4 * 0.6 * 2.0))

    # matched-population conditioning: squared and renormalized masses
    m = [0.5, 0.3, 0.2]
    s = sum(v * v for v in m)
    print("squared/renorm (0.5,0.3,0.2) = %s" % (["%.17g" % (v * v / s) for v in m]))

    # quadratic-root examples for the counterfactual solver
    for trip in [(0.81, 0.18, 0.01), (0.25, 0.5, 0.25), (0.03, 0.0, 0.97)]:
        pm, pz, pp = trip
        disc = (pm - 1.0 - pp) ** 2 - 4.0 * pp
        print("disc%s = %.17g" % (trip, disc))

    # closed-form constants for the correlated-counterfactual route
    for r in (-0.9, -0.5, 0.5, 0.9):
        print("quadrant prob r=%.1f: %.17g" % (r, 0.25 + math.asin(r) / (2 * math.pi)))
    r = 1.0 / math.sqrt(3.0)
    print("lin-gauss (bxt=1,s=1,rho=0): %.17g" % (0.5 + math.asin(r) / math.pi))


if __name__ == "__main__":
    main()
