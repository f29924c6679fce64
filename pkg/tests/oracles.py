"""Independent high-precision reference computations used to check the library.

These deliberately avoid the package's own code paths: mpmath at 50 digits,
direct formula evaluation and brute-force tallies.
"""

import itertools

import mpmath as mp

mp.mp.dps = 50


def entropy(ps):
    return float(-mp.fsum(mp.mpf(p) * mp.log(mp.mpf(p), 2) for p in ps if p > 0))


def kld(r, s):
    return float(mp.fsum(mp.mpf(a) * mp.log(mp.mpf(a) / mp.mpf(b), 2) for a, b in zip(r, s) if a > 0))


def jsd(p, q):
    p = [mp.mpf(x) for x in p]
    q = [mp.mpf(x) for x in q]
    m = [(a + b) / 2 for a, b in zip(p, q)]
    half = lambda r: mp.fsum(a * mp.log(a / c, 2) for a, c in zip(r, m) if a > 0)
    return float(half(p) / 2 + half(q) / 2)


def normal_pdf(x, mean=0.0):
    return float(mp.npdf(mp.mpf(x), mp.mpf(mean), 1))


def normal_sf(x):
    return float(1 - mp.ncdf(mp.mpf(x)))


def criterion_by_root(beta, d_prime):
    """Evidence value where the signal/noise density ratio equals beta, by root finding."""
    f = lambda x: mp.npdf(x, mp.mpf(d_prime), 1) / mp.npdf(x) - mp.mpf(beta)
    return float(mp.findroot(f, mp.mpf(d_prime) / 2))


def conditional_entropy_counts(counts):
    """H(Z|Y) by summing over every (y, z) cell of a {(y, z): count} mapping."""
    n = mp.mpf(sum(counts.values()))
    ys = {y for y, _ in counts}
    zs = {z for _, z in counts}
    total = mp.mpf(0)
    for y, z in itertools.product(ys, zs):
        c = counts.get((y, z), 0)
        if c == 0:
            continue
        n_y = sum(counts.get((y, zz), 0) for zz in zs)
        total += (c / n) * mp.log(mp.mpf(n_y) / c, 2)
    return float(total)


def mutual_information_counts(counts):
    """I(Y;Z) = H(Y) + H(Z) - H(Y,Z), from marginal and joint tallies."""
    n = sum(counts.values())
    py, pz = {}, {}
    for (y, z), c in counts.items():
        py[y] = py.get(y, 0) + c
        pz[z] = pz.get(z, 0) + c
    h = lambda cs: -mp.fsum(mp.mpf(c) / n * mp.log(mp.mpf(c) / n, 2) for c in cs if c > 0)
    return float(h(py.values()) + h(pz.values()) - h(counts.values()))
