"""Enumeration oracle for benefit-given-prediction distributions.

Recomputes the worked example (a=b=0.25, coefficients (0,2,0,2), quadratic
predictor with groups {0,1} and {2}) by enumerating covariate draws and
binary outcome combinations directly. No shared code with the library.
"""

import math
from itertools import product


def expit(z):
    return 1.0 / (1.0 + math.exp(-z))


def main():
    a, b = 0.25, 0.25
    beta0, betax, betat, betaxt = 0.0, 2.0, 0.0, 2.0
    mass = {0: a, 1: b, 2: 1.0 - a - b}

    def y(t, x):
        return expit(beta0 + betax * x + betat * t + betaxt * t * x)

    group = [0, 1]  # covariate levels mapped to the low prediction
    wg = sum(mass[x] for x in group)

    # factor: shared covariate. One x, counterfactual pair at that x.
    probs = {-1: 0.0, 0: 0.0, 1: 0.0}
    for x in group:
        px = mass[x] / wg
        for y1, y0 in product((0, 1), repeat=2):
            w = (y(1, x) if y1 else 1 - y(1, x)) * (y(0, x) if y0 else 1 - y(0, x))
            probs[y1 - y0] += px * w
    print("covariate factor   (B|H=-1): -1: %.17g  0: %.17g  +1: %.17g"
          % (probs[-1], probs[0], probs[1]))

    # factor: shared prediction. Treated unit at x1, control unit at x2.
    probs = {-1: 0.0, 0: 0.0, 1: 0.0}
    for x1 in group:
        for x2 in group:
            pxx = (mass[x1] / wg) * (mass[x2] / wg)
            for y1, y0 in product((0, 1), repeat=2):
                w = (y(1, x1) if y1 else 1 - y(1, x1)) * (y(0, x2) if y0 else 1 - y(0, x2))
                probs[y1 - y0] += pxx * w
    print("prediction factor  (B|H=-1): -1: %.17g  0: %.17g  +1: %.17g"
          % (probs[-1], probs[0], probs[1]))

    # the singleton high group is identical under both factors
    probs = {-1: 0.0, 0: 0.0, 1: 0.0}
    for y1, y0 in product((0, 1), repeat=2):
        w = (y(1, 2) if y1 else 1 - y(1, 2)) * (y(0, 2) if y0 else 1 - y(0, 2))
        probs[y1 - y0] += w
    print("either factor      (B|H=+1): -1: %.17g  0: %.17g  +1: %.17g"
          % (probs[-1], probs[0], probs[1]))


if __name__ == "__main__":
    main()
