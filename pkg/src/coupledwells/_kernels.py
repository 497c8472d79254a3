"""Compiled inner loops for the master-equation integrator.

The Liouvillian of the exchange Hamiltonian plus symmetric heating jumps
conserves q = (i + j) - (k + l), the excitation difference between the bra
and ket indices of rho[(i,j),(k,l)].  Each q sector is stored densely as
T[i, j, k] with l = i + j - k - q implicit, so every Liouvillian term is a
nearest-neighbour stencil on a small 3-D array instead of an operation on
the full N^4 density matrix.

Layout: sectors stacked as (nsec, dim_a + 2, dim_b + 2, dim_a + 2) with one
layer of ghost zeros on every axis; storage index = physical index + 1.
Slots whose implicit l falls outside [0, dim_b) are structurally zero and
are never written.

Coefficient vectors use a deliberate trick: raise_a[n] = sqrt(n+1) with
raise_a[dim_a - 1] = 0 encodes the truncated raising operator, and Python
wrap-around indexing makes raise_a[-1] = 0 kill lowering terms at n = 0.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def sector_rhs(T, out, qs, ra, rb, wa, wb, half_delta, omega, ga, gb, na, nb):
    """out = L(T) for every stacked sector.

    ra/rb: truncated sqrt(n+1) vectors; wa/wb: per-side dissipative
    diagonal weights (rates folded in); half_delta: detuning/2 (rad/s);
    omega: exchange rate (rad/s); ga/gb: heating rates (1/s).
    """
    nsec = T.shape[0]
    for s in range(nsec):
        q = qs[s]
        for i in range(na):
            ii = i + 1
            for j in range(nb):
                jj = j + 1
                lbase = i + j - q
                klo = lbase - (nb - 1)
                if klo < 0:
                    klo = 0
                khi = lbase
                if khi > na - 1:
                    khi = na - 1
                cl1 = omega * ra[i] * rb[j - 1]
                cl2 = omega * ra[i - 1] * rb[j]
                waij = wa[i] + wb[j]
                dij = i - j
                for k in range(klo, khi + 1):
                    kk = k + 1
                    l = lbase - k
                    v = T[s, ii, jj, kk]
                    dr = -(waij + wa[k] + wb[l])
                    di = -half_delta * (dij - k + l)
                    # left commutator part: -i*omega*(a b+ + a+ b) rho
                    t1 = T[s, ii + 1, jj - 1, kk]
                    t2 = T[s, ii - 1, jj + 1, kk]
                    # right part: +i*omega*rho*(a b+ + a+ b)
                    cr1 = omega * ra[k] * rb[l - 1]
                    cr2 = omega * ra[k - 1] * rb[l]
                    t3 = T[s, ii, jj, kk + 1]
                    t4 = T[s, ii, jj, kk - 1]
                    re = (dr * v.real - di * v.imag
                          + cl1 * t1.imag + cl2 * t2.imag
                          - cr1 * t3.imag - cr2 * t4.imag)
                    im = (dr * v.imag + di * v.real
                          - cl1 * t1.real - cl2 * t2.real
                          + cr1 * t3.real + cr2 * t4.real)
                    # heating jumps: a rho a+, a+ rho a, b rho b+, b+ rho b
                    jump = (ga * (ra[i] * ra[k] * T[s, ii + 1, jj, kk + 1]
                                  + ra[i - 1] * ra[k - 1] * T[s, ii - 1, jj, kk - 1])
                            + gb * (rb[j] * rb[l] * T[s, ii, jj + 1, kk]
                                    + rb[j - 1] * rb[l - 1] * T[s, ii, jj - 1, kk]))
                    out[s, ii, jj, kk] = complex(re + jump.real, im + jump.imag)


@njit(cache=True)
def stage(base, k, c, out):
    """out = base + c*k, elementwise over the stacked sectors."""
    n0, n1, n2, n3 = base.shape
    for a in range(n0):
        for b in range(n1):
            for c2 in range(n2):
                for d in range(n3):
                    out[a, b, c2, d] = base[a, b, c2, d] + c * k[a, b, c2, d]


@njit(cache=True)
def rk4_update(y, k1, k2, k3, k4, h6):
    """y += h/6 * (k1 + 2 k2 + 2 k3 + k4)."""
    n0, n1, n2, n3 = y.shape
    for a in range(n0):
        for b in range(n1):
            for c2 in range(n2):
                for d in range(n3):
                    y[a, b, c2, d] += h6 * (k1[a, b, c2, d]
                                            + 2.0 * (k2[a, b, c2, d] + k3[a, b, c2, d])
                                            + k4[a, b, c2, d])


@njit(cache=True)
def hermiticity_defect(m):
    """max |m[i,j] - conj(m[j,i])|, tiled so the mirrored reads stay in cache."""
    n = m.shape[0]
    block = 64
    worst = 0.0
    for ib in range(0, n, block):
        itop = min(ib + block, n)
        for jb in range(ib, n, block):
            jtop = min(jb + block, n)
            for i in range(ib, itop):
                jlo = jb if jb > i else i
                for j in range(jlo, jtop):
                    d = abs(m[i, j] - np.conj(m[j, i]))
                    if d > worst:
                        worst = d
    return worst


@njit(cache=True)
def scale(y, factor):
    n0, n1, n2, n3 = y.shape
    for a in range(n0):
        for b in range(n1):
            for c2 in range(n2):
                for d in range(n3):
                    y[a, b, c2, d] *= factor


def rk4_step(y, bufs, dt, args):
    """One classical fixed-step RK4 update of the stacked sectors."""
    k1, k2, k3, k4, tmp = bufs
    sector_rhs(y, k1, *args)
    stage(y, k1, 0.5 * dt, tmp)
    sector_rhs(tmp, k2, *args)
    stage(y, k2, 0.5 * dt, tmp)
    sector_rhs(tmp, k3, *args)
    stage(y, k3, dt, tmp)
    sector_rhs(tmp, k4, *args)
    rk4_update(y, k1, k2, k3, k4, dt / 6.0)


def coefficient_vectors(dim_a, dim_b, ndot_a, ndot_b):
    """Truncated ladder coefficients and dissipative diagonal weights."""
    ra = np.sqrt(np.arange(1.0, dim_a + 1))
    ra[dim_a - 1] = 0.0
    rb = np.sqrt(np.arange(1.0, dim_b + 1))
    rb[dim_b - 1] = 0.0
    # Per-side anticommutator weight for L = sqrt(g) a and sqrt(g) a+ (truncated):
    # g*(2n+1)/2 in the bulk, g*n/2 at the top level where a+ is cut.
    levels_a = np.arange(dim_a, dtype=float)
    wa = ndot_a * (levels_a + 0.5)
    wa[dim_a - 1] = ndot_a * levels_a[dim_a - 1] / 2.0
    levels_b = np.arange(dim_b, dtype=float)
    wb = ndot_b * (levels_b + 0.5)
    wb[dim_b - 1] = ndot_b * levels_b[dim_b - 1] / 2.0
    return ra, rb, wa, wb
