#!/usr/bin/env python3
"""Independent oracle for the dip statistic of samples with distinct values.

The dip is min over unimodal CDFs G of sup |F_n - G|. For distinct sorted
values z_0 < ... < z_{m-1}, it is enough to search over piecewise-linear G
with knots at the data points whose segment slopes rise and then fall. For
each candidate peak segment k this is a small linear program in
(G_0, ..., G_{m-1}, eps); the dip is the smallest optimum over k.

Running the script prints a C++ table of (sample, dip) pairs that is pasted
into tests/unit/test_modality.cpp.
"""

import numpy as np
from scipy.optimize import linprog


def dip_lp(values):
    z = np.sort(np.asarray(values, dtype=float))
    n = len(z)
    if np.any(np.diff(z) == 0):
        raise ValueError("oracle requires distinct values")
    m = n
    best = np.inf
    nvar = m + 1  # G_0..G_{m-1}, eps
    eps = m
    for k in range(m - 1):
        A, b = [], []

        def row():
            return np.zeros(nvar)

        for j in range(m):
            r = row(); r[j] = -1; r[eps] = -1; A.append(r); b.append(-(j + 1) / n)
            r = row(); r[j] = 1; r[eps] = -1; A.append(r); b.append(j / n)
        for j in range(m - 1):
            r = row(); r[j] = 1; r[j + 1] = -1; A.append(r); b.append(0.0)

        def slope(j):
            r = row()
            w = 1.0 / (z[j + 1] - z[j])
            r[j + 1] += w
            r[j] -= w
            return r

        for j in range(m - 2):
            if j + 1 <= k:
                A.append(slope(j) - slope(j + 1)); b.append(0.0)
            else:
                A.append(slope(j + 1) - slope(j)); b.append(0.0)
        c = np.zeros(nvar); c[eps] = 1
        bounds = [(0, 1)] * m + [(0, 1)]
        res = linprog(c, A_ub=np.array(A), b_ub=np.array(b), bounds=bounds,
                      method="highs")
        if res.status == 0:
            best = min(best, res.fun)
    return best


def main():
    rng = np.random.default_rng(20240917)
    samples = [
        [0.0, 1.0, 2.0, 3.0],
        [-3.5, -1.5, 0.5, 2.5],
        [0.0, 0.01, 0.02, 1.0, 1.01, 1.02],
    ]
    for i in range(45):
        n = int(rng.integers(4, 13))
        kind = i % 3
        if kind == 0:
            x = rng.uniform(0, 1, n)
        elif kind == 1:
            x = rng.normal(0, 1, n)
        else:
            x = np.concatenate([rng.normal(-2, 0.5, n // 2),
                                rng.normal(2, 0.5, n - n // 2)])
        x = np.round(x, 6)
        if len(np.unique(x)) < n:
            continue
        samples.append(list(x))
    print("// generated by tests/oracles/dip_lp_oracle.py")
    for s in samples:
        d = dip_lp(s)
        vals = ", ".join(repr(float(v)) for v in s)
        print(f"    {{{{{vals}}}, {d:.15g}}},")


if __name__ == "__main__":
    main()
