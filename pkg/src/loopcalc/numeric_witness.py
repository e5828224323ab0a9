"""Loop-family realizations of the multiscale and naive homologies on S^2.

Both inputs are the sweepout ``zeta``.  The single-scale homology for
inputs ``{m} zeta`` is assembled from 3-parameter cube families whose loops
are words of four blocks of curfew ``m``:

* ``Y``-pieces push the square ``(s, t) -> (t, t (1 - s))`` forward, which
  deforms the diagonal ``{2} Z`` into the bouquet ``Z * + * Z``;
* move pieces slide a nonconstant block one slot to the left past a
  constant block by interpolating the time warp, cost proportional to
  ``m`` times the speed.

The multiscale chain is ``-sum_i 2^i {2^i}_* P'({m_i} zeta, {m_i} zeta)``
with ``m_i = L / 2^(i+1)``.  The naive comparator replaces each
``{2^i}_*`` move by ``2^i`` moves of one copy at a time, which costs
``2^i`` times as much and gives volume of order ``L^2``.

The boundary of a chain is checked cell by cell: every 2-cell of every
face is reduced to a canonical corner tuple (up to the symmetries of the
square, with orientation sign) and weights are summed.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .loop_geom import NORTH, LoopFamily, Segment, power, zeta_points

__all__ = [
    "DEFAULT_RESOLUTION",
    "DEFAULT_SAMPLES",
    "single_scale_pieces",
    "build_P_numeric",
    "build_P_naive_numeric",
    "target_boundary",
    "boundary_residual",
]

DEFAULT_RESOLUTION = 16
DEFAULT_SAMPLES = 32

# block: ("c", m) constant, or ("z", expr, m) with expr one of
#   ("ax", a)      x_a
#   ("mul", a, b)  x_a (1 - x_b)


def _log2(L: int) -> int:
    if not isinstance(L, int) or L < 1 or L & (L - 1):
        raise ValueError(f"L = {L!r} is not a power of two")
    return L.bit_length() - 1


def _moves(blocks):
    """Bubble nonconstant blocks left; yield ``(word, window)`` before each move."""
    word = list(blocks)
    out = []
    while True:
        for j in range(len(word) - 1):
            if word[j][0] == "c" and word[j + 1][0] == "z":
                out.append((tuple(word), j))
                word[j], word[j + 1] = word[j + 1], word[j]
                break
        else:
            return out


def single_scale_pieces(m: int):
    """Pieces ``(weight, blocks, window)`` of P' for inputs ``{m} zeta``.

    ``window`` is None for product pieces, or the index of the block pair
    swapped by a move piece (the move parameter is axis 2).  The boundary
    is ``2{2}[Z, Z] - [{2}Z, {2}Z]`` with ``Z = {m} zeta``.
    """
    O = ("c", m)

    def Z(*e):
        return ("z", e, m)

    pieces = []
    # P1 = [Y1, Z2* + *Z2] - [{2}Z1, Y2]
    pieces += [
        (1, (Z("ax", 1), Z("mul", 1, 0), Z("ax", 2), O), None),
        (1, (Z("ax", 1), Z("mul", 1, 0), O, Z("ax", 2)), None),
        (-1, (Z("ax", 0), O, Z("ax", 2), Z("mul", 2, 1)), None),
        (-1, (O, Z("ax", 0), Z("ax", 2), Z("mul", 2, 1)), None),
        (-1, (Z("ax", 0), Z("ax", 0), Z("ax", 2), Z("mul", 2, 1)), None),
        (1, (Z("ax", 1), Z("mul", 1, 0), Z("ax", 2), Z("ax", 2)), None),
    ]
    # 2 P3, once for {2}(Z1 Z2) and once for {2}(Z2 Z1)
    for _ in range(2):
        pieces += [
            (-2, (Z("ax", 1), Z("ax", 2), Z("mul", 1, 0), Z("ax", 2)), None),
            (2, (Z("ax", 0), Z("ax", 2), O, Z("mul", 2, 1)), None),
            (2, (O, Z("ax", 2), Z("ax", 0), Z("mul", 2, 1)), None),
        ]
    # P2: reparametrize Q1 and 2 Q2 to normal form
    a, b = Z("ax", 0), Z("ax", 1)
    q1 = [(a, O, b, O), (a, O, O, b), (O, a, b, O), (O, a, O, b)]
    q2 = [(a, b, O, O), (a, O, O, b), (O, b, a, O), (O, O, a, b)]
    for _ in range(2):
        for w in q1:
            pieces += [(1, word, j) for word, j in _moves(w)]
        for w in q2:
            pieces += [(-2, word, j) for word, j in _moves(w)]
    return pieces


class _Builder:
    """Segment factory for one (resolution, samples) pair; shares arrays."""

    def __init__(self, R: int, S: int):
        self.R, self.S = R, S
        self.cache = {}
        self.grid = np.arange(R + 1) / R
        self.unit_t = np.arange(S + 1) / S

    def const(self):
        key = ("c",)
        if key not in self.cache:
            d = np.broadcast_to(NORTH, (self.S + 1, 3)).copy()
            self.cache[key] = Segment(d, (), 1.0)
        return self.cache[key]

    def zeta(self, expr):
        key = ("z", expr)
        if key in self.cache:
            return self.cache[key]
        R = self.R
        if expr[0] == "ax":
            seg = Segment(zeta_points(self.grid, self.unit_t), (expr[1],), 1.0)
        else:
            _, a, b = expr
            i = np.arange(R + 1)
            # exact rationals i (R - j) / R^2 so faces agree bit for bit
            ia, ib = (i[:, None], i[None, :]) if a < b else (i[None, :], i[:, None])
            u = (ia * (R - ib)) / (R * R)
            seg = Segment(zeta_points(u, self.unit_t), tuple(sorted((a, b))), 1.0)
        self.cache[key] = seg
        return seg

    def window(self, m: int, p: int, s_axis: int):
        """Slide ``* X`` to ``X *`` with ``X = {m} zeta_{x_p}``; curfew ``2m``."""
        key = ("w", m, p, s_axis)
        if key in self.cache:
            return self.cache[key]
        S = self.S
        t = np.arange(2 * m * S + 1) / S
        tau = np.where(t <= m, t + m, 2.0 * m)
        s = self.grid[:, None]
        w = (1.0 - s) * t + s * tau                     # (R+1 [s], T)
        local = np.mod(w - m, 1.0)
        pts = zeta_points(self.grid[:, None], local)    # (R+1 [p], R+1 [s], T, 3)
        pts = np.where((w < m)[None, :, :, None], NORTH, pts)
        if p > s_axis:
            pts = np.swapaxes(pts, 0, 1)
        seg = Segment(np.ascontiguousarray(pts), tuple(sorted((p, s_axis))), float(2 * m))
        self.cache[key] = seg
        return seg

    def word(self, blocks, arity: int, window=None, s_axis: int = 2, weight=1.0, label=""):
        segs = []
        j = 0
        while j < len(blocks):
            if window is not None and j == window:
                z = blocks[j + 1]
                segs.append((self.window(z[2], z[1][1], s_axis), 1))
                j += 2
                continue
            blk = blocks[j]
            seg = self.const() if blk[0] == "c" else self.zeta(blk[1])
            segs.append((seg, blk[-1]))
            j += 1
        return LoopFamily(arity, self.R, self.S, tuple(segs), float(weight), label)


def _swap(word, j):
    w = list(word)
    w[j], w[j + 1] = w[j + 1], w[j]
    return tuple(w)


def build_P_numeric(L: int, R: int = DEFAULT_RESOLUTION, S: int = DEFAULT_SAMPLES,
                    naive: bool = False):
    """Multiscale homology as a list of weighted 3-parameter families.

    Boundary ``[{L} zeta, {L} zeta] - L {L}[zeta, zeta]``; empty for L = 1.
    With ``naive=True`` the moves are done one copy at a time.
    """
    k = _log2(L)
    B = _Builder(R, S)
    fams = []
    for i in range(k):
        m, reps = 2 ** (k - 1 - i), 2 ** i
        for w, blocks, window in single_scale_pieces(m):
            weight = -reps * w
            if window is None or not naive:
                f = B.word(blocks, 3, window, weight=weight, label=f"i={i}")
                fams.append(power(reps, f))
                continue
            before = B.word(blocks, 3).segments
            after = B.word(_swap(blocks, window), 3).segments
            moving = B.word(blocks, 3, window).segments
            for c in range(reps):
                segs = after * c + moving + before * (reps - 1 - c)
                fams.append(LoopFamily(3, R, S, segs, float(weight), f"i={i},copy={c}"))
    return fams


def build_P_naive_numeric(L: int, R: int = DEFAULT_RESOLUTION, S: int = DEFAULT_SAMPLES):
    """Unary comparator with the same boundary; volume of order ``L^2``."""
    return build_P_numeric(L, R, S, naive=True)


def target_boundary(L: int, R: int = DEFAULT_RESOLUTION, S: int = DEFAULT_SAMPLES):
    """``[{L}zeta, {L}zeta] - L{L}[zeta, zeta]`` as weighted 2-parameter families."""
    B = _Builder(R, S)
    z0, z1 = ("z", ("ax", 0), L), ("z", ("ax", 1), L)
    first = B.word((z0, z1), 2, weight=2.0)
    pair = B.word((("z", ("ax", 0), 1), ("z", ("ax", 1), 1)), 2)
    second = power(L, pair).scaled(-2.0 * L)
    return [first, second]


# ---------------------------------------------------------------------------
# cell-wise boundary comparison

_SQUARE = []
for _perm in ((0, 1), (1, 0)):
    for _f0 in (0, 1):
        for _f1 in (0, 1):
            _sign = (-1 if _perm == (1, 0) else 1) * (-1) ** (_f0 + _f1)
            _SQUARE.append((_perm, (_f0, _f1), _sign))


def _corner_ids(samples: np.ndarray, table: dict, quantum: float) -> np.ndarray:
    q = np.round(samples / quantum).astype(np.int64)
    shape = q.shape[:2]
    flat = q.reshape(shape[0] * shape[1], -1)
    ids = np.empty(len(flat), dtype=np.int64)
    for n, row in enumerate(flat):
        ids[n] = table.setdefault(row.tobytes(), len(table))
    return ids.reshape(shape)


def _cells(fam: LoopFamily, sign: float, acc: dict, table: dict, quantum: float):
    ids = _corner_ids(fam.materialize(), table, quantum)
    R = fam.resolution
    for i in range(R):
        for j in range(R):
            c = ((ids[i, j], ids[i, j + 1]), (ids[i + 1, j], ids[i + 1, j + 1]))
            if (c[0][0] == c[1][0] and c[0][1] == c[1][1]) or \
                    (c[0][0] == c[0][1] and c[1][0] == c[1][1]):
                continue  # degenerate cell
            best = None
            for perm, flips, sg in _SQUARE:
                key = []
                for b0 in (0, 1):
                    for b1 in (0, 1):
                        bits = [0, 0]
                        bits[perm[0]] = b0 ^ flips[0]
                        bits[perm[1]] = b1 ^ flips[1]
                        key.append(c[bits[0]][bits[1]])
                key = tuple(key)
                if best is None or key < best[0]:
                    best = (key, sg)
            acc[best[0]] = acc.get(best[0], 0.0) + sign * fam.weight * best[1]


def boundary_residual(chain, target, quantum: float = 1e-9) -> tuple[float, int]:
    """Largest leftover cell weight of ``boundary(chain) - target`` and its support.

    Loops are identified after rounding samples to ``quantum``.
    """
    acc: dict = {}
    table: dict = {}
    for fam in chain:
        for axis in range(fam.arity):
            sg = (-1) ** axis
            _cells(fam.face(axis, 1), sg, acc, table, quantum)
            _cells(fam.face(axis, 0), -sg, acc, table, quantum)
    for fam in target:
        _cells(fam, -1.0, acc, table, quantum)
    left = [abs(v) for v in acc.values() if abs(v) > 1e-9]
    return (max(left) if left else 0.0), len(left)
