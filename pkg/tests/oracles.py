"""Independent oracles used to cross-check the production code.

Nothing here shares an algorithm with the package: membership comes
from support-function halfspaces instead of LP feasibility, transforms
come from boundary integrals and panel quadrature instead of the
zonotopal tiling, and the grid split is re-implemented with per-cell
scalar loops.
"""

from __future__ import annotations

from itertools import combinations, product

import numpy as np


# -- halfspace representation ------------------------------------------------


def zonotope_halfspaces(Z):
    """H-representation {p : A p <= b} from the support function.

    Facet normals of a zonotope are orthogonal to (d-1)-subsets of
    generators; the offset in direction v is <v, c> + sum |<v, u_j>|/2.
    """
    gens = Z.generators
    n, d = gens.shape
    if d == 1:
        normals = np.array([[1.0], [-1.0]])
    else:
        normals = []
        for subset in combinations(range(n), d - 1):
            M = gens[list(subset)]
            _, s, vt = np.linalg.svd(M)
            if s[-1] <= 1e-12 * s[0]:
                continue  # subset does not span a hyperplane
            v = vt[d - 1]
            normals.append(v)
            normals.append(-v)
        normals = np.array(normals)
    offsets = normals @ Z.center + 0.5 * np.sum(np.abs(normals @ gens.T), axis=1)
    return normals, offsets


def membership(Z, points, tol=1e-9):
    """Vectorized membership mask from the halfspace representation."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    A, b = zonotope_halfspaces(Z)
    return np.all(points @ A.T <= b + tol, axis=1)


def mc_volume(Z, samples, rng):
    """Monte-Carlo volume from bounding-box sampling."""
    lo, hi = Z.bounding_box()
    pts = rng.uniform(lo, hi, size=(samples, Z.dim))
    box = float(np.prod(hi - lo))
    return box * np.count_nonzero(membership(Z, pts)) / samples


def brute_force_residual(Z, point, steps=60):
    """Min distance from point to the zonotope over a coefficient grid."""
    gens = Z.generators
    n = gens.shape[0]
    target = np.asarray(point, dtype=float) - Z.center
    axes = [np.linspace(-0.5, 0.5, steps)] * n
    best = np.inf
    for combo in product(*axes):
        cand = np.asarray(combo) @ gens
        best = min(best, float(np.max(np.abs(cand - target))))
    return best


# -- exact polygon transform -------------------------------------------------


def polygon_vertices(Z):
    """Vertices of a 2-D zonotope, counterclockwise."""
    assert Z.dim == 2
    gens = Z.generators
    n = gens.shape[0]
    pts = []
    for signs in product((-0.5, 0.5), repeat=n):
        pts.append(np.asarray(signs) @ gens + Z.center)
    pts = np.unique(np.round(np.array(pts), 12), axis=0)
    hull = _convex_hull(pts)
    return hull


def _convex_hull(pts):
    """Andrew's monotone chain, counterclockwise."""
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]

    def cross2(u, v):
        return u[0] * v[1] - u[1] * v[0]

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and cross2(out[-1] - out[-2], p - out[-2]) <= 1e-12:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


def polygon_ft(vertices, xi):
    """Exact transform of a polygon indicator via the boundary integral.

    For k = 2 pi xi nonzero,
    integral over P of exp(-i<k,x>) dA
      = (i/|k|^2) * sum_edges (k . n_hat) * edge integral,
    with each straight-edge integral in closed form.
    """
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    k = 2.0 * np.pi * xi  # (m, 2)
    ksq = np.sum(k * k, axis=1)
    if np.any(ksq < 1e-18):
        raise ValueError("polygon oracle needs nonzero frequencies")
    out = np.zeros(xi.shape[0], dtype=complex)
    nv = vertices.shape[0]
    for i in range(nv):
        p = vertices[i]
        q = vertices[(i + 1) % nv]
        edge = q - p
        length = float(np.linalg.norm(edge))
        normal = np.array([edge[1], -edge[0]]) / length
        mid = 0.5 * (p + q)
        theta = 0.5 * (k @ edge)
        seg = length * np.exp(-1j * (k @ mid)) * np.sinc(theta / np.pi)
        out += (k @ normal) * seg
    return 1j * out / ksq


# -- tensor quadrature oracles ----------------------------------------------


def _fiber_from_halfspaces(A, b, x, tol=1e-12):
    """y-interval of {A (x, y) <= b} at fixed x (vectorized over x)."""
    x = np.atleast_1d(x)
    lo = np.full(x.shape, -np.inf)
    hi = np.full(x.shape, np.inf)
    for row, off in zip(A, b):
        ay = row[-1]
        rest = off - x * row[0] if row.shape[0] == 2 else off - x @ row[:-1]
        if ay > tol:
            hi = np.minimum(hi, rest / ay)
        elif ay < -tol:
            lo = np.maximum(lo, rest / ay)
    return lo, hi


def _interval_ft(lo, hi, xi_y):
    """Exact integral of exp(-2 pi i xi_y y) over [lo, hi], vectorized."""
    width = hi - lo
    mid = 0.5 * (lo + hi)
    return width * np.exp(-2j * np.pi * xi_y * mid) * np.sinc(xi_y * width)


def ft_quadrature_2d(Z, xi, total_nodes=1024):
    """Tensor quadrature: Gauss panels in x, exact fiber integrals in y.

    Panels are split at the x-coordinates of the vertices, where the
    fiber endpoints kink; inside a panel the integrand is analytic, so
    composite Gauss nodes converge spectrally.
    """
    assert Z.dim == 2
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    A, b = zonotope_halfspaces(Z)
    verts = polygon_vertices(Z)
    cuts = np.unique(np.round(verts[:, 0], 12))
    out = np.zeros(xi.shape[0], dtype=complex)
    panels = len(cuts) - 1
    nodes_per_panel = max(16, int(np.ceil(total_nodes / max(panels, 1))))
    gauss_x, gauss_w = np.polynomial.legendre.leggauss(nodes_per_panel)
    for left, right in zip(cuts[:-1], cuts[1:]):
        halfwidth = 0.5 * (right - left)
        if halfwidth <= 1e-14:
            continue
        x = 0.5 * (left + right) + halfwidth * gauss_x
        w = halfwidth * gauss_w
        lo, hi = _fiber_from_halfspaces(A, b, x)
        lo = np.minimum(lo, hi)  # clip empty slivers at panel edges
        inner = _interval_ft(lo[None, :], hi[None, :], xi[:, 1:2])  # (m, nodes)
        phases = np.exp(-2j * np.pi * np.outer(xi[:, 0], x))
        out += (phases * inner) @ w
    return out


def _clip_halfplane(poly, normal, offset):
    out = []
    n = len(poly)
    for i in range(n):
        p = poly[i]
        q = poly[(i + 1) % n]
        p_in = normal @ p <= offset + 1e-12
        q_in = normal @ q <= offset + 1e-12
        if p_in:
            out.append(p)
        if p_in != q_in:
            t = (offset - normal @ p) / (normal @ (q - p))
            out.append(p + t * (q - p))
    return out


def ft_slice_quadrature_3d(Z, xi, nodes_per_panel=32):
    """3-D transform by Gauss quadrature over exact polygon slices.

    The slice of the zonotope at height z is a convex polygon obtained
    by clipping the bounding square with the restricted halfspaces; its
    transform is exact, and the z-integration uses Gauss panels split
    at the vertex heights where the slice polygon kinks.
    """
    assert Z.dim == 3
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    A, b = zonotope_halfspaces(Z)
    gens = Z.generators
    verts = []
    for signs in product((-0.5, 0.5), repeat=gens.shape[0]):
        verts.append(np.asarray(signs) @ gens + Z.center)
    verts = np.array(verts)
    cuts = np.unique(np.round(verts[:, 2], 12))
    lo, hi = Z.bounding_box()
    square = [
        np.array([lo[0] - 1.0, lo[1] - 1.0]),
        np.array([hi[0] + 1.0, lo[1] - 1.0]),
        np.array([hi[0] + 1.0, hi[1] + 1.0]),
        np.array([lo[0] - 1.0, hi[1] + 1.0]),
    ]
    gauss_x, gauss_w = np.polynomial.legendre.leggauss(nodes_per_panel)
    out = np.zeros(xi.shape[0], dtype=complex)
    for left, right in zip(cuts[:-1], cuts[1:]):
        halfwidth = 0.5 * (right - left)
        if halfwidth <= 1e-14:
            continue
        zs = 0.5 * (left + right) + halfwidth * gauss_x
        ws = halfwidth * gauss_w
        for z, w in zip(zs, ws):
            poly = square
            for row, off in zip(A, b):
                poly = _clip_halfplane(poly, row[:2], off - row[2] * z)
                if not poly:
                    break
            if not poly or len(poly) < 3:
                continue
            slice_ft = polygon_ft(np.array(poly), xi[:, :2])
            out += w * slice_ft * np.exp(-2j * np.pi * xi[:, 2] * z)
    return out


# -- scalar reference for the grid split ------------------------------------


def reference_split(values, y_centers, phi, kmax, half_cells):
    """Per-cell scalar re-implementation of the two-sum split.

    ``values`` has shape (n_columns, n_y); ``phi`` gives the floor per
    column (NaN outside the base).  Returns (g, h) computed cell by
    cell with explicit loops over the shift index k.
    """
    n_cols, n_y = values.shape
    h = np.zeros_like(values)
    for ix in range(n_cols):
        if np.isnan(phi[ix]):
            continue
        for iy in range(n_y):
            y = y_centers[iy]
            if y <= phi[ix] + 1e-12:
                acc = 0.0 + 0.0j
                for k in range(kmax + 1):
                    j = iy - (2 * k + 1) * half_cells
                    if 0 <= j < n_y:
                        acc += values[ix, j]
                h[ix, iy] = 2j * acc
            else:
                acc = 0.0 + 0.0j
                for k in range(kmax + 1):
                    j = iy + (2 * k + 1) * half_cells
                    if 0 <= j < n_y:
                        acc += values[ix, j]
                h[ix, iy] = -2j * acc
    g = np.zeros_like(values)
    for ix in range(n_cols):
        for iy in range(n_y):
            up = h[ix, iy + half_cells] if iy + half_cells < n_y else 0.0
            down = h[ix, iy - half_cells] if iy - half_cells >= 0 else 0.0
            g[ix, iy] = values[ix, iy] - (up - down) / 2j
    return g, h
