"""Convex, continuous, piecewise-quadratic functions on a closed interval.

A :class:`PiecewiseQuadratic` is stored as a domain ``[lo, hi]``, strictly
increasing breakpoints inside ``(lo, hi)`` and one :class:`Quadratic` per piece.
Values are immutable; every operation returns a new function in canonical form
(no two adjacent pieces describe the same quadratic), so ``breakpoints`` is the
set of kinks of the function.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, ValidationError

EPS = 1e-9


def _tol(*magnitudes: float) -> float:
    return EPS * max(1.0, *(abs(m) for m in magnitudes))


@dataclass(frozen=True)
class Quadratic:
    """``x -> a*x**2 + b*x + c``."""

    a: float
    b: float
    c: float

    def __call__(self, x):
        return (self.a * x + self.b) * x + self.c

    def slope(self, x: float) -> float:
        return 2.0 * self.a * x + self.b

    def shift(self, delta: float) -> "Quadratic":
        """Return ``x -> self(x + delta)``."""
        a, b, c = self.a, self.b, self.c
        return Quadratic(a, 2.0 * a * delta + b, (a * delta + b) * delta + c)

    def __add__(self, other: "Quadratic") -> "Quadratic":
        return Quadratic(self.a + other.a, self.b + other.b, self.c + other.c)

    def value_scale(self, x: float) -> float:
        # magnitude of the individual terms; bounds the rounding error of __call__
        return abs(self.a * x * x) + abs(self.b * x) + abs(self.c)

    def slope_scale(self, x: float) -> float:
        return abs(2.0 * self.a * x) + abs(self.b)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)


CONSTANT_ZERO = Quadratic(0.0, 0.0, 0.0)


def _same_quadratic(q: Quadratic, r: Quadratic, x: float) -> bool:
    # q and r agree in value at x already; compare curvature and slope there
    if abs(q.a - r.a) > _tol(q.a, r.a):
        return False
    return abs(q.slope(x) - r.slope(x)) <= _tol(q.slope_scale(x), r.slope_scale(x))


@dataclass(frozen=True)
class PiecewiseQuadratic:
    """Convex continuous piecewise-quadratic function on ``[lo, hi]``.

    ``segments[i]`` is active between ``knots[i]`` and ``knots[i + 1]`` where
    ``knots = (lo, *breakpoints, hi)``. The constructor checks continuity and
    convexity (raising :class:`ValidationError`) and merges adjacent pieces
    that are the same quadratic.
    """

    lo: float
    hi: float
    breakpoints: tuple[float, ...]
    segments: tuple[Quadratic, ...]

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        bps = tuple(float(p) for p in self.breakpoints)
        segs = tuple(s if isinstance(s, Quadratic) else Quadratic(*map(float, s)) for s in self.segments)
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
            raise ValidationError(f"invalid domain [{lo}, {hi}]")
        if len(segs) != len(bps) + 1:
            raise ValidationError(f"{len(bps)} breakpoints need {len(bps) + 1} segments, got {len(segs)}")
        prev = lo
        for p in bps:
            if not (prev < p < hi):
                raise ValidationError(f"breakpoints must increase strictly inside ({lo}, {hi}), got {p}")
            prev = p
        for s in segs:
            if not all(math.isfinite(v) for v in s.as_tuple()):
                raise ValidationError(f"non-finite coefficients {s.as_tuple()}")
            if s.a < -_tol(s.a):
                raise ValidationError(f"segment {s.as_tuple()} is concave (a < 0)")

        keep_bps: list[float] = []
        keep_segs = [segs[0]]
        for p, right in zip(bps, segs[1:]):
            left = keep_segs[-1]
            vl, vr = left(p), right(p)
            if abs(vl - vr) > _tol(left.value_scale(p), right.value_scale(p)):
                raise ValidationError(f"discontinuity at {p}: {vl} vs {vr}")
            jump = right.slope(p) - left.slope(p)
            if jump < -_tol(left.slope_scale(p), right.slope_scale(p)):
                raise ValidationError(f"not convex at {p}: slope drops by {-jump}")
            if _same_quadratic(left, right, p):
                continue
            keep_bps.append(p)
            keep_segs.append(right)

        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "breakpoints", tuple(keep_bps))
        object.__setattr__(self, "segments", tuple(keep_segs))

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def quadratic(cls, a: float, b: float, c: float, lo: float, hi: float) -> "PiecewiseQuadratic":
        return cls(lo, hi, (), (Quadratic(a, b, c),))

    @classmethod
    def displacement(cls, target: float, lo: float, hi: float, weight: float = 1.0) -> "PiecewiseQuadratic":
        """``weight * (x - target)**2``."""
        return cls.quadratic(weight, -2.0 * weight * target, weight * target * target, lo, hi)

    @classmethod
    def abs_displacement(cls, target: float, lo: float, hi: float, weight: float = 1.0) -> "PiecewiseQuadratic":
        """``weight * |x - target|`` (one kink at ``target`` if it lies inside the domain)."""
        left = Quadratic(0.0, -weight, weight * target)
        right = Quadratic(0.0, weight, -weight * target)
        if target <= lo:
            return cls(lo, hi, (), (right,))
        if target >= hi:
            return cls(lo, hi, (), (left,))
        return cls(lo, hi, (target,), (left, right))

    @classmethod
    def dead_zone(cls, target: float, radius: float, lo: float, hi: float, weight: float = 1.0) -> "PiecewiseQuadratic":
        """Zero on ``[target - radius, target + radius]``, quadratic growth outside."""
        p, q = target - radius, target + radius
        pieces = [
            (p, Quadratic(weight, -2.0 * weight * p, weight * p * p)),
            (q, CONSTANT_ZERO),
            (math.inf, Quadratic(weight, -2.0 * weight * q, weight * q * q)),
        ]
        return _from_pieces(lo, hi, pieces)

    @classmethod
    def from_dict(cls, data: dict) -> "PiecewiseQuadratic":
        try:
            return cls(data["lo"], data["hi"], tuple(data.get("breakpoints", ())),
                       tuple(Quadratic(*map(float, s)) for s in data["segments"]))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed piecewise quadratic: {exc!r}") from exc

    def to_dict(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "breakpoints": list(self.breakpoints),
            "segments": [list(s.as_tuple()) for s in self.segments],
        }

    # ------------------------------------------------------------------
    # evaluation

    @property
    def knots(self) -> tuple[float, ...]:
        return (self.lo, *self.breakpoints, self.hi)

    @property
    def num_kinks(self) -> int:
        return len(self.breakpoints)

    @cached_property
    def _coef(self) -> np.ndarray:
        return np.array([s.as_tuple() for s in self.segments], dtype=float)

    def _xtol(self) -> float:
        return _tol(self.lo, self.hi)

    def segment_index(self, x: float) -> int:
        return bisect.bisect_right(self.breakpoints, x) if self.breakpoints else 0

    def __call__(self, x):
        """Evaluate at a scalar or an array of coordinates inside the domain."""
        if np.ndim(x) == 0:
            x = float(x)
            tol = self._xtol()
            if not (self.lo - tol <= x <= self.hi + tol):
                raise DomainError(f"{x} outside [{self.lo}, {self.hi}]")
            x = min(max(x, self.lo), self.hi)
            return self.segments[self.segment_index(x)](x)
        xs = np.asarray(x, dtype=float)
        tol = self._xtol()
        if xs.size and (xs.min() < self.lo - tol or xs.max() > self.hi + tol):
            raise DomainError(f"values outside [{self.lo}, {self.hi}]")
        xs = np.clip(xs, self.lo, self.hi)
        idx = np.searchsorted(np.asarray(self.breakpoints), xs, side="right")
        a, b, c = self._coef[idx].T
        return (a * xs + b) * xs + c

    evaluate = __call__

    # ------------------------------------------------------------------
    # algebra

    def __add__(self, other: "PiecewiseQuadratic") -> "PiecewiseQuadratic":
        if not isinstance(other, PiecewiseQuadratic):
            return NotImplemented
        tol = max(self._xtol(), other._xtol())
        if abs(self.lo - other.lo) > tol or abs(self.hi - other.hi) > tol:
            raise DomainError(f"cannot add functions on [{self.lo}, {self.hi}] and [{other.lo}, {other.hi}]")
        cuts = sorted(set(self.breakpoints) | set(other.breakpoints))
        segs = []
        i = j = 0
        for p in cuts + [math.inf]:
            segs.append(self.segments[i] + other.segments[j])
            if i < len(self.breakpoints) and self.breakpoints[i] == p:
                i += 1
            if j < len(other.breakpoints) and other.breakpoints[j] == p:
                j += 1
        return _make(self.lo, self.hi, cuts, segs)

    add = __add__

    def shift(self, delta: float) -> "PiecewiseQuadratic":
        """Return ``x -> self(x + delta)`` on ``[lo - delta, hi - delta]``."""
        if delta == 0:
            return self
        return _make(self.lo - delta, self.hi - delta, [p - delta for p in self.breakpoints],
                     [s.shift(delta) for s in self.segments])

    def clamp_below(self, x0: float) -> "PiecewiseQuadratic":
        """Return ``x -> self(max(x, x0))``; convex when x0 minimizes self on [x0, hi]."""
        x0 = self._check_point(x0)
        if x0 <= self.lo:
            return self
        k = self.segment_index(x0)
        flat = Quadratic(0.0, 0.0, self(x0))
        return _make(self.lo, self.hi, [x0, *self.breakpoints[k:]], [flat, *self.segments[k:]])

    def clamp_above(self, x0: float) -> "PiecewiseQuadratic":
        """Return ``x -> self(min(x, x0))``; convex when x0 minimizes self on [lo, x0]."""
        x0 = self._check_point(x0)
        if x0 >= self.hi:
            return self
        k = bisect.bisect_left(self.breakpoints, x0)
        flat = Quadratic(0.0, 0.0, self(x0))
        return _make(self.lo, self.hi, [*self.breakpoints[:k], x0], [*self.segments[:k + 1], flat])

    def restrict(self, d_lo: float, d_hi: float) -> "PiecewiseQuadratic":
        """The same function on the sub-interval ``[d_lo, d_hi]``."""
        tol = self._xtol()
        if d_lo > d_hi or d_lo < self.lo - tol or d_hi > self.hi + tol:
            raise DomainError(f"[{d_lo}, {d_hi}] is not a sub-interval of [{self.lo}, {self.hi}]")
        d_lo, d_hi = max(d_lo, self.lo), min(d_hi, self.hi)
        if d_lo == self.lo and d_hi == self.hi:
            return self
        i = self.segment_index(d_lo)
        j = max(i, bisect.bisect_left(self.breakpoints, d_hi))
        return _make(d_lo, d_hi, self.breakpoints[i:j], self.segments[i:j + 1])

    def argmin_interval(self, d_lo: float | None = None, d_hi: float | None = None) -> tuple[float, float]:
        """Closed interval of minimizers of the function restricted to ``[d_lo, d_hi]``."""
        d_lo = self.lo if d_lo is None else d_lo
        d_hi = self.hi if d_hi is None else d_hi
        if d_lo > d_hi:
            raise DomainError(f"empty interval [{d_lo}, {d_hi}]")
        f = self.restrict(d_lo, d_hi)
        knots = f.knots
        pieces = list(zip(knots[:-1], knots[1:], f.segments))

        left = f.hi
        for l, r, q in pieces:
            if q.a > 0.0:
                v = -q.b / (2.0 * q.a)
                if v <= r:
                    left = max(l, v)
                    break
            elif q.b >= -EPS:
                left = l
                break
        right = f.lo
        for l, r, q in reversed(pieces):
            if q.a > 0.0:
                v = -q.b / (2.0 * q.a)
                if v >= l:
                    right = min(r, v)
                    break
            elif q.b <= EPS:
                right = r
                break
        return left, max(left, right)

    def minimum(self) -> float:
        return self(self.argmin_interval()[0])

    def _check_point(self, x0: float) -> float:
        tol = self._xtol()
        if not (self.lo - tol <= x0 <= self.hi + tol):
            raise DomainError(f"{x0} outside [{self.lo}, {self.hi}]")
        return min(max(float(x0), self.lo), self.hi)

    def __repr__(self) -> str:
        segs = ", ".join(f"({s.a:g},{s.b:g},{s.c:g})" for s in self.segments)
        return f"PWQ([{self.lo:g},{self.hi:g}] kinks={list(self.breakpoints)} [{segs}])"


def _make(lo: float, hi: float, bps: Sequence[float], segs: Sequence[Quadratic]) -> PiecewiseQuadratic:
    """Build from possibly degenerate data: drops breakpoints outside (lo, hi) or repeated."""
    clean_bps: list[float] = []
    clean_segs = [segs[0]]
    for p, s in zip(bps, segs[1:]):
        if p <= lo:
            clean_segs[-1] = s
            continue
        if p >= hi:
            break
        if clean_bps and p <= clean_bps[-1]:
            clean_segs[-1] = s
            continue
        clean_bps.append(p)
        clean_segs.append(s)
    return PiecewiseQuadratic(lo, hi, tuple(clean_bps), tuple(clean_segs))


def _from_pieces(lo: float, hi: float, pieces: Iterable[tuple[float, Quadratic]]) -> PiecewiseQuadratic:
    # pieces: (right end, quadratic) in increasing order; last right end may be inf
    bps, segs = [], []
    for right, q in pieces:
        segs.append(q)
        bps.append(right)
    return _make(lo, hi, bps[:-1], segs)


def total(functions: Iterable[PiecewiseQuadratic]) -> PiecewiseQuadratic:
    """Pointwise sum of functions that share one domain."""
    it = iter(functions)
    acc = next(it)
    for f in it:
        acc = acc + f
    return acc
