"""Recursive construction of exponential-basis frequency sets for zonotopes.

Given a zonotope with generators u_1, ..., u_n spanning R^d, the
recursion produces a frequency set L_n together with a full audit trace:

* n = d: the zonotope is a parallelepiped U Q + c and the dual lattice
  (U^T)^{-1} Z^d gives an orthogonal exponential basis.
* n > d: reorder so the first n-1 generators still span R^d, apply a
  linear map A sending u_n to the last coordinate vector, recurse on
  the base projection (giving G in R^{d-1}) and on the first n-1
  generators (giving L_{n-1} in R^d), then combine

      L_n = A^T [ (G x Z)  union  push(L_{n-1}, eta) ],

  where push moves the last coordinate of every point to the nearest
  value at distance >= eta from the integers.  The cylinder branch
  keeps integer last coordinates, the pushed branch stays eta away
  from them, so the two branches are disjoint in normalized
  coordinates.

Frequency sets are lazily enumerable: they are stored as expression
trees and materialized on demand inside closed windows [-R, R]^d.
``construct`` is a pure function; its two recursive calls are
independent and the result does not depend on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import EtaSearchError, InputError, MathError, RankDeficientError
from .geometry import (
    CylindricSet,
    Zonotope,
    fiber,
    normalize_generators,
    project_base,
    volume,
)

TAG_BASE = "base-lattice"
TAG_CYLINDER = "cylinder-branch"
TAG_PERTURBED = "perturbed-branch"

#: Boundary slack for closed-window enumeration: a point belongs to
#: [-R, R]^d when every |coordinate| <= R + WINDOW_TOL.
WINDOW_TOL = 1e-9

_SINGULAR_TOL = 1e-12


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# Lazy frequency-set nodes
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class _DualLattice:
    """All points W k, k in Z^d, where W = (U^T)^{-1} = inv(generator rows)."""

    dual: np.ndarray  # (d, d)

    def enumerate(self, dim, radius):
        back = np.linalg.inv(self.dual)  # k = back @ point
        reach = int(np.floor(np.max(np.sum(np.abs(back), axis=1)) * radius + WINDOW_TOL)) + 1
        axes = np.arange(-reach, reach + 1)
        grid = np.stack(np.meshgrid(*([axes] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
        pts = grid @ self.dual.T
        keep = np.all(np.abs(pts) <= radius + WINDOW_TOL, axis=1)
        pts = pts[keep]
        return pts, np.full(pts.shape[0], TAG_BASE, dtype="<U16")


@dataclass(frozen=True, eq=False)
class _CylinderCross:
    """Product of a base set in R^{d-1} with the integers in the last axis."""

    base: "FrequencySet"

    def enumerate(self, dim, radius):
        base_pts, _ = self.base.window(radius)
        reach = int(np.floor(radius + WINDOW_TOL))
        ints = np.arange(-reach, reach + 1, dtype=float)
        m, k = base_pts.shape[0], ints.size
        pts = np.empty((m * k, dim))
        pts[:, :-1] = np.repeat(base_pts, k, axis=0)
        pts[:, -1] = np.tile(ints, m)
        return pts, np.full(m * k, TAG_CYLINDER, dtype="<U16")


@dataclass(frozen=True, eq=False)
class _Pushed:
    """Last coordinates pushed out of the eta-neighborhood of the integers."""

    inner: "FrequencySet"
    eta: float

    def enumerate(self, dim, radius):
        pts, _ = self.inner.window(radius + self.eta + WINDOW_TOL)
        pts = pts.copy()
        pts[:, -1] = push_values(pts[:, -1], self.eta)
        keep = np.all(np.abs(pts) <= radius + WINDOW_TOL, axis=1)
        pts = pts[keep]
        return pts, np.full(pts.shape[0], TAG_PERTURBED, dtype="<U16")


@dataclass(frozen=True, eq=False)
class _Retagged:
    """Same points as ``inner`` with a uniform provenance tag.

    Used by the eta = 0 falsification control, where the perturbed
    branch is intentionally left untouched on the integers.
    """

    inner: "FrequencySet"
    tag: str

    def enumerate(self, dim, radius):
        pts, _ = self.inner.window(radius)
        return pts, np.full(pts.shape[0], self.tag, dtype="<U16")


@dataclass(frozen=True, eq=False)
class _Transformed:
    """Image of ``inner`` under an invertible linear map."""

    inner: "FrequencySet"
    matrix: np.ndarray  # (d, d), point -> matrix @ point

    def enumerate(self, dim, radius):
        back = np.linalg.inv(self.matrix)
        inner_radius = float(np.max(np.sum(np.abs(back), axis=1))) * (
            radius + WINDOW_TOL
        ) + WINDOW_TOL
        pts, tags = self.inner.window(inner_radius)
        pts = pts @ self.matrix.T
        keep = np.all(np.abs(pts) <= radius + WINDOW_TOL, axis=1)
        return pts[keep], tags[keep]


@dataclass(frozen=True, eq=False)
class _Union:
    """Disjoint union of frequency sets; duplicates are kept if present."""

    parts: tuple

    def enumerate(self, dim, radius):
        pts = []
        tags = []
        for part in self.parts:
            p, t = part.window(radius)
            pts.append(p)
            tags.append(t)
        return np.concatenate(pts, axis=0), np.concatenate(tags)


@dataclass(frozen=True, eq=False)
class _Explicit:
    """Finite point list, e.g. loaded from a file."""

    points: np.ndarray
    tags: np.ndarray

    def enumerate(self, dim, radius):
        keep = np.all(np.abs(self.points) <= radius + WINDOW_TOL, axis=1)
        return self.points[keep], self.tags[keep]


@dataclass(frozen=True, eq=False)
class FrequencySet:
    """Point set in R^d, enumerable within any closed window [-R, R]^d.

    Points carry a provenance tag naming the branch of the recursion
    that produced them: ``base-lattice``, ``cylinder-branch`` or
    ``perturbed-branch``.  Valid constructions yield pairwise distinct,
    uniformly discrete windows; the certification harness measures the
    actual separation rather than assuming it.
    """

    dim: int
    node: object

    def window(self, radius: float) -> tuple[np.ndarray, np.ndarray]:
        """Points and tags inside ``[-radius, radius]^dim``, sorted
        lexicographically by coordinates (boundary included)."""
        if radius <= 0:
            raise InputError("window radius must be positive")
        pts, tags = self.node.enumerate(self.dim, float(radius))
        if pts.shape[0] == 0:
            return np.empty((0, self.dim)), np.empty(0, dtype="<U16")
        order = np.lexsort(pts.T[::-1])
        return _freeze(pts[order]), _freeze(tags[order])

    def count(self, radius: float) -> int:
        return int(self.window(radius)[0].shape[0])

    @classmethod
    def from_points(cls, points, tags=None) -> "FrequencySet":
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if tags is None:
            tags = np.full(pts.shape[0], TAG_BASE, dtype="<U16")
        else:
            tags = np.asarray(tags, dtype="<U16")
            if tags.shape[0] != pts.shape[0]:
                raise InputError("tags and points must have equal length")
        return cls(pts.shape[1], _Explicit(_freeze(pts.copy()), _freeze(tags.copy())))


# ---------------------------------------------------------------------------
# Construction trace
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ConstructionTrace:
    """Audit record of one recursion node.

    For an inductive step it stores the generator permutation, the
    normalizing map A together with its inverse transpose (the pullback
    that recovers normalized coordinates from final ones), the chosen
    eta, and the two child traces (base projection first, peeled
    zonotope second).  Replaying a trace on the same input reproduces
    the identical frequency set bit for bit.
    """

    kind: str  # "base-case" | "inductive-step"
    permutation: Optional[tuple] = None
    matrix: Optional[np.ndarray] = None
    matrix_inv_t: Optional[np.ndarray] = None
    eta: Optional[float] = None
    dual_matrix: Optional[np.ndarray] = None
    children: tuple = ()

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "base-case":
            out["dual_matrix"] = self.dual_matrix.tolist()
        else:
            out["permutation"] = list(self.permutation)
            out["matrix"] = self.matrix.tolist()
            out["matrix_inv_t"] = self.matrix_inv_t.tolist()
            out["eta"] = self.eta
            out["children"] = [child.to_dict() for child in self.children]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ConstructionTrace":
        kind = data.get("kind")
        if kind == "base-case":
            return cls(kind="base-case", dual_matrix=np.asarray(data["dual_matrix"], dtype=float))
        if kind == "inductive-step":
            return cls(
                kind="inductive-step",
                permutation=tuple(data["permutation"]),
                matrix=np.asarray(data["matrix"], dtype=float),
                matrix_inv_t=np.asarray(data["matrix_inv_t"], dtype=float),
                eta=float(data["eta"]),
                children=tuple(cls.from_dict(c) for c in data["children"]),
            )
        raise InputError(f"unknown trace node kind: {kind!r}")


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def parallelepiped_basis(generators, center=None) -> FrequencySet:
    """Dual lattice of the parallelepiped spanned by d generators.

    For U the matrix with the given generators as columns, returns
    (U^T)^{-1} Z^d.  The exponentials at these frequencies form an
    orthogonal basis on U Q + c with Q the centered unit cube; the
    center only modulates phases and does not enter the set.
    """
    gens = np.atleast_2d(np.asarray(generators, dtype=float))
    n, d = gens.shape
    if n != d:
        raise InputError(f"expected {d} generators in dimension {d}, got {n}")
    det = float(np.linalg.det(gens))
    if abs(det) <= _SINGULAR_TOL:
        raise RankDeficientError("generator matrix is singular")
    dual = np.linalg.inv(gens)  # (U^T)^{-1} with U = gens.T
    return FrequencySet(d, _DualLattice(_freeze(dual)))


def reorder_generators(generators) -> tuple[np.ndarray, tuple]:
    """Permute generators so the first n-1 still span the space.

    Keeps the original order when it is already valid; otherwise the
    first removable generator (smallest index whose removal keeps full
    rank) is moved to the last slot, preserving the relative order of
    the rest.  Deterministic by construction.
    """
    gens = np.atleast_2d(np.asarray(generators, dtype=float))
    n, d = gens.shape
    if np.linalg.matrix_rank(gens) < d:
        raise RankDeficientError("generators do not span the ambient space")
    if n <= d:
        raise InputError("reordering needs more generators than the dimension")
    if np.linalg.matrix_rank(gens[:-1]) == d:
        return gens, tuple(range(n))
    for j in range(n):
        rest = np.delete(np.arange(n), j)
        if np.linalg.matrix_rank(gens[rest]) == d:
            perm = tuple(rest) + (j,)
            return gens[list(perm)], perm
    raise RankDeficientError("no generator can be moved last without losing rank")


def normalize_last(generators) -> tuple[np.ndarray, np.ndarray]:
    """Linear map A with A u_n = e_d, applied to all generators.

    A is the inverse of the basis matrix obtained by completing u_n
    with standard basis vectors, dropping the one whose axis carries
    the largest |u_n| component (ties resolved toward the last axis,
    which keeps A closest to the identity among the pivot choices).
    Returns (transformed generators, A).
    """
    gens = np.atleast_2d(np.asarray(generators, dtype=float))
    d = gens.shape[1]
    u = gens[-1]
    if float(np.linalg.norm(u)) <= 1e-15:
        raise InputError("last generator is zero")
    absu = np.abs(u)
    pivot = d - 1 - int(np.argmax(absu[::-1]))  # last index attaining the max
    cols = [np.eye(d)[:, j] for j in range(d) if j != pivot]
    B = np.column_stack(cols + [u])
    A = np.linalg.inv(B)
    transformed = gens @ A.T
    if np.max(np.abs(transformed[-1] - np.eye(d)[-1])) > 1e-12:
        raise MathError("normalization failed to map the last generator to e_d")
    transformed[-1] = np.eye(d)[-1]  # remove inversion dust; exact by construction
    return transformed, A


def transform_frequencies(freq_set: FrequencySet, matrix) -> FrequencySet:
    """Image A^T L of a frequency set under the transpose of ``matrix``.

    Pairing <A^T l, x> = <l, A x> turns a basis for the mapped domain
    into a basis for the original one.  Tags are preserved.
    """
    A = np.atleast_2d(np.asarray(matrix, dtype=float))
    if A.shape != (freq_set.dim, freq_set.dim):
        raise InputError("transform matrix has wrong shape")
    if abs(float(np.linalg.det(A))) <= _SINGULAR_TOL:
        raise InputError("transform matrix is singular")
    return FrequencySet(freq_set.dim, _Transformed(freq_set, _freeze(A.T.copy())))


def build_cylindric(omega_prev: Zonotope) -> CylindricSet:
    """Unit-height cylindric set riding the lower fiber envelope.

    The base is the projection of ``omega_prev`` to the first d-1
    coordinates and the floor is x -> a(x), the lower endpoint of the
    fiber of ``omega_prev`` over x; slices are [a(x)-1/2, a(x)+1/2].
    With the peeled generator equal to e_d, the set lies inside the
    full zonotope ``omega_prev + [-e_d/2, e_d/2]``.
    """
    if volume(omega_prev) <= 0.0:
        raise RankDeficientError("cylindric set needs a full-dimensional zonotope")
    base = project_base(omega_prev)

    def floor(x):
        return fiber(omega_prev, x).a

    return CylindricSet(base=base, floor=floor)


def cylinder_basis(gamma: FrequencySet) -> FrequencySet:
    """Product set Gamma x Z, tagged as the cylinder branch."""
    return FrequencySet(gamma.dim + 1, _CylinderCross(gamma))


def push_values(values: np.ndarray, eta: float) -> np.ndarray:
    """Nearest points of R minus the eta-neighborhoods of the integers.

    Values already at distance >= eta from every integer are unchanged;
    values inside a forbidden interval snap to its nearer edge, and a
    value exactly at an integer moves up to k + eta.  eta = 0 is the
    identity (empty forbidden set).
    """
    values = np.asarray(values, dtype=float)
    if eta == 0.0:
        return values.copy()
    nearest = np.round(values)
    delta = values - nearest
    out = values.copy()
    inside = np.abs(delta) < eta
    out[inside] = nearest[inside] + np.where(delta[inside] < 0.0, -eta, eta)
    return out


def push_from_integers(freq_set: FrequencySet, eta: float) -> FrequencySet:
    """Push last coordinates out of the eta-neighborhood of the integers.

    Each point (x, y) maps to (x, y') with y' the closest point of
    R minus the union of (k - eta, k + eta); integer ties resolve
    upward.  |y' - y| <= eta and dist(y', Z) >= eta.  All output points
    are tagged as the perturbed branch.
    """
    if not 0.0 < eta <= 0.5:
        raise InputError(f"eta must lie in (0, 1/2], got {eta}")
    return FrequencySet(freq_set.dim, _Pushed(freq_set, float(eta)))


def choose_eta(omega_prev: Zonotope, lambda_prev: FrequencySet, config) -> float:
    """Perturbation radius for the pushed branch.

    Fixed mode passes ``config.eta`` through, clamped to (0, 1/2];
    the explicit value 0 is accepted as the falsification control that
    disables the push.  Adaptive mode starts at 1/4 and halves until
    the finite-section smallest singular value of the pushed set at
    radius ``config.eta_radius`` stays within factor ``config.eta_kappa``
    of the unpushed one, giving up after ``config.eta_max_halvings``.
    """
    mode = getattr(config, "eta_mode", "fixed")
    if mode == "fixed":
        eta = float(config.eta)
        if eta < 0.0:
            raise InputError(f"eta must be nonnegative, got {eta}")
        return min(eta, 0.5)
    if mode != "adaptive":
        raise InputError(f"unknown eta mode: {mode!r}")

    from .certify import gram_section, riesz_estimates  # deferred: certify imports geometry only

    radius = float(config.eta_radius)
    kappa = float(config.eta_kappa)
    base_sigma = riesz_estimates(gram_section(omega_prev, lambda_prev, radius))[0]
    eta = 0.25
    history = []
    for _ in range(int(config.eta_max_halvings)):
        pushed = push_from_integers(lambda_prev, eta)
        sigma = riesz_estimates(gram_section(omega_prev, pushed, radius))[0]
        history.append((eta, sigma))
        if sigma >= base_sigma / kappa:
            return eta
        eta *= 0.5
    raise EtaSearchError(
        f"adaptive eta search failed: unpushed sigma_min={base_sigma:.6e}, "
        f"tried {[(e, float(s)) for e, s in history]}",
        history=history,
    )


def _retag(freq_set: FrequencySet, tag: str) -> FrequencySet:
    return FrequencySet(freq_set.dim, _Retagged(freq_set, tag))


def construct(Z: Zonotope, config=None) -> tuple[FrequencySet, ConstructionTrace]:
    """Frequency set for ``Z`` with a replayable construction trace.

    After merging collinear generators: with n = d the dual lattice of
    the parallelepiped is returned; otherwise the generators are
    reordered and normalized so the peeled one is e_d, the recursion
    produces the base set Gamma and the side set L_{n-1}, and the
    result is A^T [ (Gamma x Z) union push(L_{n-1}, eta) ].  The union
    is disjoint for eta > 0: cylinder points have integer last
    coordinate in normalized coordinates, pushed points stay eta away
    from the integers.
    """
    if config is None:
        from .config import Config

        config = Config()
    gens = normalize_generators(Z.generators)
    Zn = Zonotope(gens, Z.center)
    d = Zn.dim
    if Zn.rank() < d:
        raise RankDeficientError(
            f"generators span only rank {Zn.rank()} in dimension {d}"
        )
    if Zn.n_generators == d:
        freq = parallelepiped_basis(Zn.generators, Zn.center)
        return freq, ConstructionTrace(kind="base-case", dual_matrix=freq.node.dual)

    reordered, perm = reorder_generators(Zn.generators)
    tgens, A = normalize_last(reordered)
    omega_prev = Zonotope(tgens[:-1], A @ Zn.center)
    base_zono = project_base(omega_prev)

    try:
        gamma, trace_base = construct(base_zono, config)
    except MathError as exc:
        raise type(exc)(f"base branch (d={d - 1}): {exc}") from exc
    try:
        lam_prev, trace_side = construct(omega_prev, config)
    except MathError as exc:
        raise type(exc)(f"side branch (n={Zn.n_generators - 1}, d={d}): {exc}") from exc

    eta = choose_eta(omega_prev, lam_prev, config)
    cylinder = cylinder_basis(gamma)
    if eta > 0.0:
        perturbed = push_from_integers(lam_prev, eta)
    else:
        perturbed = _retag(lam_prev, TAG_PERTURBED)  # falsification control
    union = FrequencySet(d, _Union((cylinder, perturbed)))
    freq = transform_frequencies(union, A)
    trace = ConstructionTrace(
        kind="inductive-step",
        permutation=perm,
        matrix=_freeze(A),
        matrix_inv_t=_freeze(np.linalg.inv(A).T),
        eta=eta,
        children=(trace_base, trace_side),
    )
    return freq, trace


def replay(Z: Zonotope, trace: ConstructionTrace) -> FrequencySet:
    """Rebuild the frequency set from a recorded trace.

    Uses the recorded permutation, normalizing map and eta instead of
    recomputing the choices; on the original input this reproduces the
    constructed set bit for bit.
    """
    gens = normalize_generators(Z.generators)
    Zn = Zonotope(gens, Z.center)
    if trace.kind == "base-case":
        return parallelepiped_basis(Zn.generators, Zn.center)
    if Zn.n_generators <= Zn.dim:
        raise InputError("trace shape does not match the zonotope")
    reordered = Zn.generators[list(trace.permutation)]
    A = trace.matrix
    tgens = reordered @ A.T
    tgens = np.vstack([tgens[:-1], np.eye(Zn.dim)[-1]])
    omega_prev = Zonotope(tgens[:-1], A @ Zn.center)
    base_zono = project_base(omega_prev)
    gamma = replay(base_zono, trace.children[0])
    lam_prev = replay(omega_prev, trace.children[1])
    cylinder = cylinder_basis(gamma)
    if trace.eta > 0.0:
        perturbed = push_from_integers(lam_prev, trace.eta)
    else:
        perturbed = _retag(lam_prev, TAG_PERTURBED)
    union = FrequencySet(Zn.dim, _Union((cylinder, perturbed)))
    return transform_frequencies(union, A)


@dataclass(frozen=True, eq=False)
class BranchView:
    """Top-level branches of a constructed set in normalized coordinates."""

    cylinder_points: np.ndarray
    perturbed_points: np.ndarray
    eta: float


def top_branches(freq_set: FrequencySet, radius: float) -> Optional[BranchView]:
    """Cylinder/perturbed points of the outermost inductive node.

    Points are reported in the node's normalized coordinates (before
    the final linear pullback), where the branch structure lives:
    cylinder points have integer last coordinate, pushed points keep
    distance eta from the integers.  Returns None for a base case.
    """
    node = freq_set.node
    if isinstance(node, _Transformed):
        node = node.inner.node
    if isinstance(node, _DualLattice):
        return None
    if not isinstance(node, _Union) or len(node.parts) != 2:
        raise InputError("frequency set does not carry construction structure")
    cyl_fs, pert_fs = node.parts
    cyl_pts, _ = cyl_fs.window(radius)
    pert_pts, _ = pert_fs.window(radius)
    pert_node = pert_fs.node
    eta = pert_node.eta if isinstance(pert_node, _Pushed) else 0.0
    return BranchView(cyl_pts, pert_pts, eta)
