"""One- and two-electron integrals over contracted Cartesian Gaussians.

McMurchie-Davidson scheme: Hermite expansion coefficients E and Hermite
Coulomb integrals R, with the Boys function from scipy.  Handles arbitrary
angular momentum; the bundled basis only uses s and p shells.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import hyp1f1

from .basis import BasisFunction


def boys(n: int, t: float) -> float:
    return hyp1f1(n + 0.5, n + 1.5, -t) / (2.0 * n + 1.0)


def _hermite_e(i: int, j: int, t: int, qx: float, a: float, b: float) -> float:
    """Expansion coefficient E_t^{ij} for a 1D Gaussian product."""
    p = a + b
    q = a * b / p
    if t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return np.exp(-q * qx * qx)
    if j == 0:
        return (
            _hermite_e(i - 1, j, t - 1, qx, a, b) / (2 * p)
            - (q * qx / a) * _hermite_e(i - 1, j, t, qx, a, b)
            + (t + 1) * _hermite_e(i - 1, j, t + 1, qx, a, b)
        )
    return (
        _hermite_e(i, j - 1, t - 1, qx, a, b) / (2 * p)
        + (q * qx / b) * _hermite_e(i, j - 1, t, qx, a, b)
        + (t + 1) * _hermite_e(i, j - 1, t + 1, qx, a, b)
    )


def _overlap_prim(a, la, ra, b, lb, rb) -> float:
    s = 1.0
    for ax in range(3):
        s *= _hermite_e(la[ax], lb[ax], 0, ra[ax] - rb[ax], a, b)
    return s * (np.pi / (a + b)) ** 1.5


def overlap(fa: BasisFunction, fb: BasisFunction) -> float:
    total = 0.0
    for a, ca in zip(fa.exponents, fa.coefficients):
        for b, cb in zip(fb.exponents, fb.coefficients):
            total += ca * cb * _overlap_prim(a, fa.powers, fa.center, b, fb.powers, fb.center)
    return total


def _kinetic_prim(a, la, ra, b, lb, rb) -> float:
    l2, m2, n2 = lb

    def s(powers_b):
        return _overlap_prim(a, la, ra, b, powers_b, rb)

    term0 = b * (2 * (l2 + m2 + n2) + 3) * s((l2, m2, n2))
    term1 = -2.0 * b**2 * (
        s((l2 + 2, m2, n2)) + s((l2, m2 + 2, n2)) + s((l2, m2, n2 + 2))
    )
    term2 = -0.5 * (
        l2 * (l2 - 1) * s((l2 - 2, m2, n2)) if l2 > 1 else 0.0
    )
    term2 += -0.5 * (m2 * (m2 - 1) * s((l2, m2 - 2, n2)) if m2 > 1 else 0.0)
    term2 += -0.5 * (n2 * (n2 - 1) * s((l2, m2, n2 - 2)) if n2 > 1 else 0.0)
    return term0 + term1 + term2


def kinetic(fa: BasisFunction, fb: BasisFunction) -> float:
    total = 0.0
    for a, ca in zip(fa.exponents, fa.coefficients):
        for b, cb in zip(fb.exponents, fb.coefficients):
            total += ca * cb * _kinetic_prim(a, fa.powers, fa.center, b, fb.powers, fb.center)
    return total


def _hermite_r(t: int, u: int, v: int, n: int, p: float, pc: np.ndarray, dist2: float):
    if t < 0 or u < 0 or v < 0:
        return 0.0
    if t == u == v == 0:
        return (-2.0 * p) ** n * boys(n, p * dist2)
    if t > 0:
        return (t - 1) * _hermite_r(t - 2, u, v, n + 1, p, pc, dist2) + pc[0] * _hermite_r(
            t - 1, u, v, n + 1, p, pc, dist2
        )
    if u > 0:
        return (u - 1) * _hermite_r(t, u - 2, v, n + 1, p, pc, dist2) + pc[1] * _hermite_r(
            t, u - 1, v, n + 1, p, pc, dist2
        )
    return (v - 1) * _hermite_r(t, u, v - 2, n + 1, p, pc, dist2) + pc[2] * _hermite_r(
        t, u, v - 1, n + 1, p, pc, dist2
    )


def _nuclear_prim(a, la, ra, b, lb, rb, rc) -> float:
    p = a + b
    rp = (a * ra + b * rb) / p
    pc = rp - rc
    dist2 = float(pc @ pc)
    total = 0.0
    for t in range(la[0] + lb[0] + 1):
        et = _hermite_e(la[0], lb[0], t, ra[0] - rb[0], a, b)
        if et == 0.0:
            continue
        for u in range(la[1] + lb[1] + 1):
            eu = _hermite_e(la[1], lb[1], u, ra[1] - rb[1], a, b)
            if eu == 0.0:
                continue
            for v in range(la[2] + lb[2] + 1):
                ev = _hermite_e(la[2], lb[2], v, ra[2] - rb[2], a, b)
                if ev == 0.0:
                    continue
                total += et * eu * ev * _hermite_r(t, u, v, 0, p, pc, dist2)
    return 2.0 * np.pi / p * total


def nuclear_attraction(fa: BasisFunction, fb: BasisFunction, charges, centers) -> float:
    total = 0.0
    for a, ca in zip(fa.exponents, fa.coefficients):
        for b, cb in zip(fb.exponents, fb.coefficients):
            for z, rc in zip(charges, centers):
                total -= z * ca * cb * _nuclear_prim(
                    a, fa.powers, fa.center, b, fb.powers, fb.center, rc
                )
    return total


def _eri_prim(a, la, ra, b, lb, rb, c, lc, rc, d, ld, rd) -> float:
    p = a + b
    q = c + d
    alpha = p * q / (p + q)
    rp = (a * ra + b * rb) / p
    rq = (c * rc + d * rd) / q
    pq = rp - rq
    dist2 = float(pq @ pq)

    def es(l1, l2, x1, x2, e1, e2, axis_range):
        out = []
        for t in axis_range:
            out.append(_hermite_e(l1, l2, t, x1 - x2, e1, e2))
        return out

    ex_ab = [es(la[ax], lb[ax], ra[ax], rb[ax], a, b, range(la[ax] + lb[ax] + 1)) for ax in range(3)]
    ex_cd = [es(lc[ax], ld[ax], rc[ax], rd[ax], c, d, range(lc[ax] + ld[ax] + 1)) for ax in range(3)]

    total = 0.0
    for t in range(la[0] + lb[0] + 1):
        for u in range(la[1] + lb[1] + 1):
            for v in range(la[2] + lb[2] + 1):
                e_ab = ex_ab[0][t] * ex_ab[1][u] * ex_ab[2][v]
                if e_ab == 0.0:
                    continue
                for tt in range(lc[0] + ld[0] + 1):
                    for uu in range(lc[1] + ld[1] + 1):
                        for vv in range(lc[2] + ld[2] + 1):
                            e_cd = ex_cd[0][tt] * ex_cd[1][uu] * ex_cd[2][vv]
                            if e_cd == 0.0:
                                continue
                            total += (
                                e_ab
                                * e_cd
                                * (-1.0) ** (tt + uu + vv)
                                * _hermite_r(t + tt, u + uu, v + vv, 0, alpha, pq, dist2)
                            )
    return total * 2.0 * np.pi**2.5 / (p * q * np.sqrt(p + q))


def electron_repulsion(fa, fb, fc, fd) -> float:
    """Chemists' notation (ab|cd) = integral a(1)b(1) r12^-1 c(2)d(2)."""
    total = 0.0
    for a, ca in zip(fa.exponents, fa.coefficients):
        for b, cb in zip(fb.exponents, fb.coefficients):
            for c, cc in zip(fc.exponents, fc.coefficients):
                for d, cd in zip(fd.exponents, fd.coefficients):
                    total += ca * cb * cc * cd * _eri_prim(
                        a, fa.powers, fa.center,
                        b, fb.powers, fb.center,
                        c, fc.powers, fc.center,
                        d, fd.powers, fd.center,
                    )
    return total


def integral_tables(functions: list[BasisFunction], charges, centers):
    """Assemble S, T, V matrices and the full (ij|kl) tensor."""
    n = len(functions)
    s = np.zeros((n, n))
    t = np.zeros((n, n))
    v = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            s[i, j] = s[j, i] = overlap(functions[i], functions[j])
            t[i, j] = t[j, i] = kinetic(functions[i], functions[j])
            v[i, j] = v[j, i] = nuclear_attraction(functions[i], functions[j], charges, centers)

    eri = np.zeros((n, n, n, n))
    # 8-fold permutational symmetry of real orbitals
    pair_list = [(i, j) for i in range(n) for j in range(i + 1)]
    for a, (i, j) in enumerate(pair_list):
        for k, l in pair_list[: a + 1]:
            value = electron_repulsion(functions[i], functions[j], functions[k], functions[l])
            for (p, q, r, w) in {
                (i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
                (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i),
            }:
                eri[p, q, r, w] = value
    return s, t, v, eri
