"""Discretized families of based loops on the round unit sphere.

A loop of curfew ``a`` is sampled at the uniform times ``j / S`` (``S``
samples per unit curfew) and starts and ends at the north pole.  A
:class:`LoopFamily` over the parameter cube ``[0, 1]^k`` (grid of ``R + 1``
points per axis) is stored as a sequence of :class:`Segment` objects, each
depending on a subset of the parameter axes and possibly repeated.  The
loop at a grid point is the concatenation of its segments, so loop powers
and products are exact and never resampled.

Distances use the sup-metric on Moore loops: curfew difference plus the
largest great-circle distance between points at equal normalized time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

NORTH = np.array([0.0, 0.0, 1.0])

__all__ = [
    "NORTH",
    "DiscreteLoop",
    "Segment",
    "LoopFamily",
    "VolumeEstimate",
    "great_circle",
    "loop_distance",
    "zeta_points",
    "sweepout_s2",
    "constant_family",
    "loop_family",
    "concat",
    "power",
    "suplength",
    "volume_upper",
    "chen_integral_numeric",
    "area_form",
    "hausdorff_length_mc",
]


def great_circle(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Great-circle distance between unit vectors along the last axis."""
    # atan2 form: accurate for nearby and for near-antipodal points
    cross = np.linalg.norm(np.cross(p, q), axis=-1)
    return np.arctan2(cross, np.einsum("...i,...i->...", p, q))


@dataclass(frozen=True)
class DiscreteLoop:
    curfew: float
    samples: np.ndarray  # (M, 3)

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", s)
        if s.ndim != 2 or s.shape[1] != 3 or len(s) < 2:
            raise ValueError("samples must have shape (M, 3) with M >= 2")
        if np.max(np.abs(np.linalg.norm(s, axis=1) - 1.0)) > 1e-12:
            raise ValueError("samples must lie on the unit sphere")
        if great_circle(s[0], NORTH) > 1e-12 or great_circle(s[-1], NORTH) > 1e-12:
            raise ValueError("loop must start and end at the basepoint")

    def length(self) -> float:
        return float(great_circle(self.samples[1:], self.samples[:-1]).sum())


def loop_distance(l1: DiscreteLoop, l2: DiscreteLoop) -> float:
    """``|a1 - a2| + max_j d(l1[j], l2[j])`` over equal normalized times."""
    if l1.samples.shape != l2.samples.shape:
        raise ValueError("loops must have the same number of samples")
    return abs(l1.curfew - l2.curfew) + float(great_circle(l1.samples, l2.samples).max())


# ---------------------------------------------------------------------------
# the sweepout of S^2

def zeta_points(u: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Loop ``zeta_u`` at times ``t`` (curfew 1), broadcast to ``u.shape + t.shape``.

    ``zeta_u`` is the circle through the north pole of angular radius
    ``pi u`` centred on the longitude-0 meridian; ``zeta_0`` and ``zeta_1``
    are the constant loop, and the family sweeps the sphere once.
    """
    u = np.asarray(u, dtype=float)[..., None]
    t = np.asarray(t, dtype=float)
    r = np.pi * u
    cr, sr = np.cos(r), np.sin(r)
    ang = 2.0 * np.pi * t
    ca, sa = np.cos(ang), np.sin(ang)
    x = cr * sr - sr * cr * ca
    y = sr * sa
    z = cr * cr + sr * sr * ca
    out = np.stack(np.broadcast_arrays(x, y, z), axis=-1)
    out /= np.linalg.norm(out, axis=-1, keepdims=True)
    flat = np.broadcast_to(u % 1.0 == 0.0, out.shape[:-1])
    if np.any(flat):
        out[flat] = NORTH
    return out


@dataclass(eq=False)
class Segment:
    """Samples of a piece of loop over a sub-grid of parameter axes.

    ``data`` has shape ``(R + 1,) * len(axes) + (N + 1, 3)``: ``N + 1``
    samples covering ``curfew`` time units including both endpoints.
    """

    data: np.ndarray
    axes: tuple
    curfew: float
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def nsamples(self) -> int:
        return self.data.shape[-2]

    def edges(self, axis: int) -> np.ndarray:
        """Sup-distance between neighbours along family axis ``axis``.

        The sampled maximum is padded by half the largest change of the
        displacement between consecutive samples, which bounds the excess
        between samples for a displacement of that local slope.
        """
        key = ("edge", axis)
        if key not in self._cache:
            i = self.axes.index(axis)
            d = self.data
            n = d.shape[i]
            lo = np.take(d, range(n - 1), axis=i)
            hi = np.take(d, range(1, n), axis=i)
            d = great_circle(lo, hi)
            pad = 0.5 * np.abs(np.diff(d, axis=-1)).max(axis=-1) if d.shape[-1] > 1 else 0.0
            self._cache[key] = d.max(axis=-1) + pad
        return self._cache[key]

    def lengths(self) -> np.ndarray:
        if "len" not in self._cache:
            d = self.data
            self._cache["len"] = great_circle(d[..., 1:, :], d[..., :-1, :]).sum(axis=-1)
        return self._cache["len"]

    def restrict(self, axis: int, index: int) -> "Segment":
        """Fix ``axis`` at grid ``index`` and renumber the later axes."""
        if axis in self.axes:
            i = self.axes.index(axis)
            data = np.take(self.data, index, axis=i)
            axes = self.axes[:i] + self.axes[i + 1:]
        else:
            data, axes = self.data, self.axes
        axes = tuple(a - 1 if a > axis else a for a in axes)
        return Segment(data, axes, self.curfew)


@dataclass(eq=False)
class LoopFamily:
    """A ``k``-parameter family of loops: ordered ``(segment, repeat)`` pairs."""

    arity: int
    resolution: int
    samples_per_unit: int
    segments: tuple
    weight: float = 1.0
    label: str = ""

    def __post_init__(self):
        for seg, count in self.segments:
            if count < 1:
                raise ValueError("segment repeat counts must be positive")
            if any(a >= self.arity for a in seg.axes):
                raise ValueError("segment axis outside family arity")
            if any(s != self.resolution + 1 for s in seg.data.shape[:len(seg.axes)]):
                raise ValueError("segment grid does not match family resolution")

    @property
    def curfew(self) -> float:
        return float(sum(seg.curfew * c for seg, c in self.segments))

    def scaled(self, w: float) -> "LoopFamily":
        return LoopFamily(self.arity, self.resolution, self.samples_per_unit, self.segments,
                          self.weight * w, self.label)

    def face(self, axis: int, side: int) -> "LoopFamily":
        idx = self.resolution if side else 0
        segs = tuple((s.restrict(axis, idx), c) for s, c in self.segments)
        return LoopFamily(self.arity - 1, self.resolution, self.samples_per_unit, segs,
                          self.weight, self.label)

    def materialize(self) -> np.ndarray:
        """Full samples, shape ``(R + 1,) * arity + (M, 3)``."""
        R1 = self.resolution + 1
        grid = (R1,) * self.arity
        parts = []
        first = True
        for seg, count in self.segments:
            d = seg.data
            shape = [1] * self.arity
            for a in seg.axes:
                shape[a] = R1
            d = d.reshape(tuple(shape) + d.shape[-2:])
            d = np.broadcast_to(d, grid + d.shape[-2:])
            for _ in range(count):
                parts.append(d if first else d[..., 1:, :])
                first = False
        return np.concatenate(parts, axis=-2)

    def loop(self, index: Sequence[int]) -> DiscreteLoop:
        return DiscreteLoop(self.curfew, self.materialize()[tuple(index)])


def constant_family(curfew: int = 1, samples_per_unit: int = 256, arity: int = 0,
                    resolution: int = 8) -> LoopFamily:
    n = int(round(curfew * samples_per_unit))
    seg = Segment(np.broadcast_to(NORTH, (n + 1, 3)).copy(), (), float(curfew))
    return LoopFamily(arity, resolution, samples_per_unit, ((seg, 1),), label="const")


def loop_family(loop: DiscreteLoop, samples_per_unit: int, resolution: int = 8) -> LoopFamily:
    """A single loop as a 0-parameter family."""
    n = loop.samples.shape[0] - 1
    if abs(n - loop.curfew * samples_per_unit) > 1e-9:
        raise ValueError("loop sample count does not match curfew * samples_per_unit")
    seg = Segment(loop.samples.copy(), (), float(loop.curfew))
    return LoopFamily(0, resolution, samples_per_unit, ((seg, 1),), label="loop")


def sweepout_s2(R: int = 64, M: int = 256) -> LoopFamily:
    """The 1-parameter sweepout ``u -> zeta_u`` (curfew 1), ``R`` cells, ``M`` samples."""
    if R < 1 or M < 2:
        raise ValueError("need R >= 1 and M >= 2")
    u = np.arange(R + 1) / R
    t = np.arange(M + 1) / M
    seg = Segment(zeta_points(u, t), (0,), 1.0)
    return LoopFamily(1, R, M, ((seg, 1),), label="zeta")


def _check_compatible(f1: LoopFamily, f2: LoopFamily):
    if f1.samples_per_unit != f2.samples_per_unit:
        raise ValueError("families sampled at different time resolutions")
    if f1.arity and f2.arity and f1.resolution != f2.resolution:
        raise ValueError("families on different parameter grids")


def concat(f1: LoopFamily, f2: LoopFamily) -> LoopFamily:
    """Pontryagin product: parameters of ``f1`` then ``f2``, curfews add."""
    _check_compatible(f1, f2)
    R = f1.resolution if f1.arity else f2.resolution
    segs = tuple(f1.segments) + tuple((_shift(s, f1.arity), c) for s, c in f2.segments)
    return LoopFamily(f1.arity + f2.arity, R, f1.samples_per_unit, segs,
                      f1.weight * f2.weight, f"{f1.label}.{f2.label}")


def _shift(seg: Segment, offset: int) -> Segment:
    if offset == 0:
        return seg
    return Segment(seg.data, tuple(a + offset for a in seg.axes), seg.curfew)


def power(k: int, f: LoopFamily) -> LoopFamily:
    """``{k}``: each loop concatenated with itself ``k`` times."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    if k == 1:
        return f
    segs = tuple(f.segments) * k
    # merge a single repeated segment into one entry
    if len(f.segments) == 1:
        seg, c = f.segments[0]
        segs = ((seg, c * k),)
    return LoopFamily(f.arity, f.resolution, f.samples_per_unit, segs, f.weight,
                      f"{{{k}}}{f.label}")


def _full(arr: np.ndarray, axes: tuple, arity: int) -> np.ndarray:
    shape = [1] * arity
    for i, a in enumerate(axes):
        shape[a] = arr.shape[i]
    return arr.reshape(shape)


def suplength(f: LoopFamily) -> float:
    """Largest polyline length over the loops of the family."""
    R1 = f.resolution + 1
    total = np.zeros((R1,) * f.arity)
    for seg, c in f.segments:
        total = total + c * _full(seg.lengths(), seg.axes, f.arity)
    return float(np.max(total))


@dataclass(frozen=True)
class VolumeEstimate:
    value: float
    level: int
    resolution: int
    max_distortion: float
    converged: bool = True


def _edge_bound(f: LoopFamily, axis: int) -> np.ndarray:
    R = f.resolution
    shape = [R + 1] * f.arity
    shape[axis] = R
    out = np.zeros(shape)
    for seg in {id(s): s for s, _ in f.segments}.values():
        if axis not in seg.axes:
            continue
        e = seg.edges(axis)
        if e.size == 0:
            continue
        out = np.maximum(out, _full(e, seg.axes, f.arity))
    return out


def _volume_once(f: LoopFamily) -> tuple[float, float]:
    if f.arity == 0:
        return abs(f.weight), 0.0
    R = f.resolution
    cell = np.ones((R,) * f.arity)
    worst = 0.0
    for axis in range(f.arity):
        e = _edge_bound(f, axis)
        worst = max(worst, float(e.max()))
        # per cell: max over the 2^(k-1) parallel edges
        for other in range(f.arity):
            if other != axis:
                e = np.maximum(np.take(e, range(R), axis=other), np.take(e, range(1, R + 1), axis=other))
        cell = cell * e
    return abs(f.weight) * float(cell.sum()), worst


def volume_upper(f, refine: int = 0, builder: Callable[[int], "LoopFamily"] | None = None,
                 rtol: float = 1e-2) -> VolumeEstimate:
    """Upper bound for the sup-metric volume of a family or list of families.

    Per parameter cell: product over axes of the largest neighbour
    displacement (padded, see :meth:`Segment.edges`) on that cell.  With
    ``builder`` and ``refine > 0`` the grid is refined dyadically until the
    relative change drops below ``rtol`` or ``refine`` levels are used.
    """
    fams = [f] if isinstance(f, LoopFamily) else list(f)
    value = sum(_volume_once(x)[0] for x in fams)
    worst = max((_volume_once(x)[1] for x in fams), default=0.0)
    R = fams[0].resolution if fams else 0
    if builder is None or refine <= 0:
        return VolumeEstimate(value, 0, R, worst)
    level = 0
    converged = False
    while level < refine:
        level += 1
        R *= 2
        nxt = volume_upper(builder(R))
        change = abs(nxt.value - value) / max(abs(value), 1e-300)
        value, worst = nxt.value, nxt.max_distortion
        if change < rtol:
            converged = True
            break
    return VolumeEstimate(value, level, R, worst, converged)


# ---------------------------------------------------------------------------
# iterated integrals

@dataclass(frozen=True)
class SphereForm:
    """2-form ``density(x) dA`` on the unit sphere."""

    density: Callable[[np.ndarray], np.ndarray]
    label: str = "omega"


def area_form(total: float = 1.0) -> SphereForm:
    """Rotation-invariant area form with total mass ``total``."""
    c = total / (4.0 * np.pi)
    return SphereForm(lambda x: np.full(x.shape[:-1], c), "area")


def _solid_angle(a, b, c):
    num = np.einsum("...i,...i->...", a, np.cross(b, c))
    den = 1.0 + np.einsum("...i,...i->...", a, b) + np.einsum("...i,...i->...", b, c) \
        + np.einsum("...i,...i->...", c, a)
    return 2.0 * np.arctan2(num, den)


def _unit(x):
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def chen_integral_numeric(forms: Sequence[SphereForm], f: LoopFamily) -> float:
    """Quadrature of the iterated integral of ``forms`` over ``f``.

    A single letter is integrated exactly for constant densities: each
    (time step x parameter step) cell contributes the signed solid angle of
    its two geodesic triangles times the density at the centroid.  Longer
    words use a first-order rule on the time-ordered simplex.  Returns 0
    when the word degree differs from the family arity.
    """
    r = len(forms)
    if r != f.arity:
        return 0.0
    if r == 0:
        return abs(f.weight) * 0 + f.weight
    x = f.materialize()
    if r == 1:
        a, b = x[:-1, :-1], x[:-1, 1:]
        c, d = x[1:, 1:], x[1:, :-1]
        w1 = _solid_angle(a, b, c)
        w2 = _solid_angle(a, c, d)
        dens1 = forms[0].density(_unit(a + b + c))
        dens2 = forms[0].density(_unit(a + c + d))
        return f.weight * float(np.sum(w1 * dens1) + np.sum(w2 * dens2))
    return f.weight * _iterated(forms, x)


def _iterated(forms, x) -> float:
    # alpha_i(t)(e_a) ~ rho_i(p) det[p, dp/dt, dp/dx_a] on each cell, then
    # sum over sigma in S_r of sgn(sigma) * ordered products over times
    from itertools import permutations

    r = len(forms)
    R = x.shape[0] - 1
    sl = tuple(slice(0, R) for _ in range(r))
    p = x[sl][..., :-1, :]
    dt = x[sl][..., 1:, :] - p
    dparam = []
    for a in range(r):
        idx = [slice(0, R)] * r
        idx[a] = slice(1, R + 1)
        dparam.append(x[tuple(idx)][..., :-1, :] - p)
    alphas = []
    for i, form in enumerate(forms):
        rho = form.density(p)
        alphas.append([rho * np.einsum("...i,...i->...", p, np.cross(dt, dparam[a]))
                       for a in range(r)])
    total = 0.0
    for perm in permutations(range(r)):
        sign = _perm_sign(perm)
        acc = alphas[0][perm[0]]
        for i in range(1, r):
            prev = np.cumsum(acc, axis=-1)
            prev = np.concatenate([np.zeros_like(prev[..., :1]), prev[..., :-1]], axis=-1)
            acc = prev * alphas[i][perm[i]]
        total += sign * float(acc.sum())
    return total


def _perm_sign(perm) -> int:
    sign, seen = 1, list(perm)
    for i in range(len(seen)):
        while seen[i] != i:
            j = seen[i]
            seen[i], seen[j] = seen[j], seen[i]
            sign = -sign
    return sign


def hausdorff_length_mc(curve: Callable[[np.ndarray], np.ndarray], n: int = 4096,
                        trials: int = 8, seed: int = 0) -> float:
    """Monte-Carlo length of a 1-parameter family in the sup-metric.

    ``curve(s)`` returns loops sampled at common times for parameters ``s``;
    the estimate is the mean polygonal length over random sorted partitions.
    """
    rng = np.random.default_rng(seed)
    est = []
    for _ in range(trials):
        s = np.concatenate([[0.0], np.sort(rng.random(n)), [1.0]])
        pts = curve(s)
        est.append(float(great_circle(pts[1:], pts[:-1]).max(axis=-1).sum()))
    return float(np.mean(est))


# numeric homologies live in their own module; re-exported here
from .numeric_witness import build_P_naive_numeric, build_P_numeric  # noqa: E402

__all__ += ["build_P_numeric", "build_P_naive_numeric"]
