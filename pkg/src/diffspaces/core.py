"""Value types shared by every module: band parameters, lambda sequences,
lazy real sequences, tolerances and three-valued verdicts.

Every sequence accessor returns 0 for negative indices, so formulas that
reference ``x[k-1]``, ``x[k-2]`` or ``lam[k-1]`` can be written literally.
"""

from __future__ import annotations

import cmath
import enum
import os
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

__all__ = [
    "DiffSpacesError",
    "SpecError",
    "NotConvergentError",
    "BandParams",
    "RealSeq",
    "LambdaSeq",
    "Tolerances",
    "Membership",
    "Verdict",
    "validate_lambda",
    "seq_shifted",
    "random_band_params",
]


class DiffSpacesError(Exception):
    """Base class for errors raised by this package."""


class SpecError(DiffSpacesError):
    """A sequence/matrix/lambda spec could not be parsed or validated.

    ``position`` is the 0-based character offset of the problem, when known.
    """

    def __init__(self, message: str, text: str = "", position: Optional[int] = None):
        self.text = text
        self.position = position
        if position is not None and text:
            message = f"{message} (at position {position}: {text!r})"
        super().__init__(message)


class NotConvergentError(DiffSpacesError):
    """A series or sequence needed as a prerequisite did not converge at the
    requested truncation.  ``diagnostic`` carries the supporting evidence."""

    def __init__(self, message: str, diagnostic: Optional[dict] = None):
        self.diagnostic = diagnostic or {}
        super().__init__(message)


# ---------------------------------------------------------------------------
# band parameters


@dataclass(frozen=True)
class BandParams:
    """The triple (r, s, t) of the lower triple-band matrix B(r, s, t)."""

    r: float
    s: float
    t: float
    discriminant: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("r", "s", "t"):
            v = float(getattr(self, name))
            if not np.isfinite(v):
                raise ValueError(f"band parameter {name} must be finite, got {v}")
            object.__setattr__(self, name, v)
        object.__setattr__(self, "discriminant", self.s * self.s - 4.0 * self.t * self.r)

    @property
    def degeneracy(self) -> str:
        """One of ``triple``, ``two-band``, ``scaled-identity``, ``gapped``
        (s = 0, t != 0) or ``singular`` (r = 0, no triangle inverse)."""
        if self.r == 0.0:
            return "singular"
        if self.s == 0.0 and self.t == 0.0:
            return "scaled-identity"
        if self.t == 0.0:
            return "two-band"
        if self.s == 0.0:
            return "gapped"
        return "triple"

    @property
    def roots(self) -> tuple[complex, complex]:
        """Roots (alpha, beta) of r z^2 + s z + t = 0, written as in the
        closed form of the inverse: (-s +/- sqrt(s^2 - 4tr)) / 2r."""
        if self.r == 0.0:
            raise ValueError("roots undefined for r = 0")
        sq = cmath.sqrt(self.discriminant)
        return ((-self.s + sq) / (2 * self.r), (-self.s - sq) / (2 * self.r))

    @property
    def spectral_radius(self) -> float:
        """max(|alpha|, |beta|); the inverse's entries grow like this to the m."""
        return max(abs(z) for z in self.roots)

    @property
    def total(self) -> float:
        """r + s + t."""
        return self.r + self.s + self.t

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.r, self.s, self.t)


def random_band_params(rng: np.random.Generator, max_root: float = 1.2,
                       case: Optional[str] = None) -> BandParams:
    """Random (r, s, t) whose characteristic roots lie in |z| <= max_root.

    ``case`` picks the sign of s^2 - 4tr: ``complex`` (< 0), ``double``
    (= 0) or ``distinct`` (> 0); random when omitted.  Roots are drawn
    away from zero so that s and t are nonzero.
    """
    case = case or ("complex", "double", "distinct")[int(rng.integers(3))]
    r = float(rng.uniform(0.5, 2.0) * rng.choice([-1.0, 1.0]))
    lo = 0.2 * max_root
    if case == "complex":
        rho, theta = rng.uniform(lo, max_root), rng.uniform(0.1, np.pi - 0.1)
        s, t = -r * 2 * rho * np.cos(theta), r * rho * rho
    elif case == "double":
        a = rng.uniform(lo, max_root) * rng.choice([-1.0, 1.0])
        s, t = -2 * r * a, r * a * a
    elif case == "distinct":
        a = rng.uniform(lo, max_root) * rng.choice([-1.0, 1.0])
        b = rng.uniform(lo, max_root) * rng.choice([-1.0, 1.0])
        while abs(a - b) < 0.05:
            b = rng.uniform(lo, max_root) * rng.choice([-1.0, 1.0])
        s, t = -r * (a + b), r * a * b
    else:
        raise ValueError(f"unknown discriminant case {case!r}")
    if case == "double":
        # with r a power of two, t = s^2 / 4r is exact and so is s^2 - 4tr = 0
        r = float(np.ldexp(np.sign(r), int(rng.integers(-1, 2))))
        s = -2 * r * a
        t = s * s / (4.0 * r)
    return BandParams(r, float(s), float(t))


# ---------------------------------------------------------------------------
# sequences

Generator = Callable[[np.ndarray], np.ndarray]


class RealSeq:
    """A lazily evaluated real sequence x_0, x_1, ...

    ``gen`` maps an integer index array (all entries >= 0) to a float array.
    Negative indices evaluate to 0.  A prefix-backed sequence is extended by
    zeros, i.e. it is an element of phi.
    """

    __slots__ = ("_gen", "provenance", "label")

    def __init__(self, gen: Generator, provenance: str = "closed-form", label: str = ""):
        self._gen = gen
        self.provenance = provenance
        self.label = label

    @classmethod
    def from_values(cls, values: Sequence[float], label: str = "") -> "RealSeq":
        data = np.asarray(values, dtype=float).copy()
        data.setflags(write=False)
        n = len(data)

        def gen(k):
            out = np.zeros(k.shape, dtype=float)
            inside = k < n
            out[inside] = data[k[inside]]
            return out

        return cls(gen, provenance="prefix", label=label or f"values[{n}]")

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], label: str = "") -> "RealSeq":
        return cls(lambda k: np.asarray(fn(k), dtype=float) * np.ones(k.shape), label=label)

    @classmethod
    def constant(cls, c: float) -> "RealSeq":
        return cls(lambda k: np.full(k.shape, float(c)), label=f"const:{c!r}")

    @classmethod
    def unit(cls, j: int) -> "RealSeq":
        """e^(j): a single 1 in position j."""
        return cls(lambda k: (k == j).astype(float), label=f"unit:{j}")

    @classmethod
    def zero(cls) -> "RealSeq":
        return cls.constant(0.0)

    def values_at(self, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        out = np.zeros(idx.shape, dtype=float)
        ok = idx >= 0
        if ok.any():
            out[ok] = self._gen(idx[ok])
        return out

    def at(self, k: int) -> float:
        if k < 0:
            return 0.0
        return float(self.values_at(np.array([k]))[0])

    def prefix(self, n: int) -> np.ndarray:
        """x_0 .. x_{n-1} as a fresh array."""
        return self.values_at(np.arange(n))

    def __add__(self, other: "RealSeq") -> "RealSeq":
        return RealSeq(lambda k: self._gen(k) + other._gen(k), label=f"({self.label}+{other.label})")

    def __sub__(self, other: "RealSeq") -> "RealSeq":
        return RealSeq(lambda k: self._gen(k) - other._gen(k), label=f"({self.label}-{other.label})")

    def scaled(self, c: float) -> "RealSeq":
        return RealSeq(lambda k: c * self._gen(k), label=f"{c!r}*{self.label}")

    def __repr__(self):
        return f"RealSeq({self.label or self.provenance})"


def seq_shifted(x: RealSeq, d: int) -> RealSeq:
    """The sequence k -> x_{k-d}; entries with k - d < 0 are zero."""
    return RealSeq(lambda k: x.values_at(k - d), provenance=x.provenance, label=f"shift({x.label},{d})")


class LambdaSeq:
    """A strictly increasing positive sequence lambda with lambda_k -> infinity.

    Only a prefix can ever be checked; see :func:`validate_lambda`.  Prefix
    backed lambdas raise ``IndexError`` past their last stored value.
    """

    __slots__ = ("_gen", "label", "checked_prefix", "_limit")

    def __init__(self, gen: Generator, label: str = "", checked_prefix: int = 0, limit: Optional[int] = None):
        self._gen = gen
        self.label = label
        self.checked_prefix = checked_prefix
        self._limit = limit

    @classmethod
    def arithmetic(cls, a: float = 1.0, b: float = 1.0) -> "LambdaSeq":
        """lambda_k = a k + b."""
        return cls(lambda k: a * k + b, label=f"arithmetic:{a:g},{b:g}")

    @classmethod
    def from_values(cls, values: Sequence[float], label: str = "") -> "LambdaSeq":
        data = np.asarray(values, dtype=float).copy()
        data.setflags(write=False)
        return cls(lambda k: data[k], label=label or f"values[{len(data)}]", limit=len(data))

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], label: str = "") -> "LambdaSeq":
        return cls(lambda k: np.asarray(fn(k), dtype=float) * np.ones(k.shape), label=label)

    @property
    def limit(self) -> Optional[int]:
        return self._limit

    def values_at(self, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        out = np.zeros(idx.shape, dtype=float)
        ok = idx >= 0
        if ok.any():
            if self._limit is not None and idx[ok].max() >= self._limit:
                raise IndexError(
                    f"lambda {self.label!r} is only known for k < {self._limit}, "
                    f"requested k = {int(idx[ok].max())}"
                )
            out[ok] = self._gen(idx[ok])
        return out

    def at(self, k: int) -> float:
        if k < 0:
            return 0.0
        return float(self.values_at(np.array([k]))[0])

    def prefix(self, n: int) -> np.ndarray:
        return self.values_at(np.arange(n))

    def diffs(self, n: int) -> np.ndarray:
        """lambda_k - lambda_{k-1} for k = 0..n-1 (the k = 0 term is lambda_0)."""
        lam = self.prefix(n)
        out = lam.copy()
        out[1:] -= lam[:-1]
        return out

    def __repr__(self):
        return f"LambdaSeq({self.label})"


# ---------------------------------------------------------------------------
# tolerances and verdicts


@dataclass(frozen=True)
class Tolerances:
    eps_exact: float = 1e-10
    eps_tail: float = 1e-3
    window: int = 64
    N_default: int = 4096
    growth_ratio: float = 1.25

    def __post_init__(self):
        for name in ("eps_exact", "eps_tail", "window", "N_default", "growth_ratio"):
            if not getattr(self, name) > 0:
                raise ValueError(f"tolerance {name} must be strictly positive")
        if self.window >= self.N_default:
            raise ValueError("window must be smaller than N_default")
        if self.growth_ratio <= 1.0:
            raise ValueError("growth_ratio must exceed 1")

    @property
    def escape(self) -> float:
        """Magnitude a tail must keep exceeding before it counts as evidence
        against convergence."""
        return 10.0 * self.eps_tail

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None, **overrides) -> "Tolerances":
        """Defaults, overridden by DIFFSPACES_EPS_EXACT, DIFFSPACES_EPS_TAIL,
        DIFFSPACES_WINDOW, DIFFSPACES_N_DEFAULT, DIFFSPACES_GROWTH_RATIO."""
        environ = os.environ if environ is None else environ
        kwargs = {}
        for name, conv in (("eps_exact", float), ("eps_tail", float), ("window", int),
                           ("N_default", int), ("growth_ratio", float)):
            key = "DIFFSPACES_" + name.upper()
            if key in environ:
                kwargs[name] = conv(environ[key])
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kwargs)


class Membership(str, enum.Enum):
    MEMBER = "Member"
    NON_MEMBER = "NonMember"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self):
        return self.value

    @staticmethod
    def conjunction(items) -> "Membership":
        """All Member -> Member; any NonMember -> NonMember; else Inconclusive."""
        items = list(items)
        if any(m is Membership.NON_MEMBER for m in items):
            return Membership.NON_MEMBER
        if all(m is Membership.MEMBER for m in items):
            return Membership.MEMBER
        return Membership.INCONCLUSIVE


@dataclass(frozen=True)
class Verdict:
    status: Membership
    evidence: dict
    truncation: int

    @property
    def is_member(self) -> bool:
        return self.status is Membership.MEMBER

    def to_dict(self) -> dict:
        return {"status": self.status.value, "evidence": dict(self.evidence), "truncation": self.truncation}


def validate_lambda(lam: LambdaSeq, N: int, tol: Optional[Tolerances] = None) -> Verdict:
    """Check positivity and strict monotonicity of lambda_0..lambda_N.

    Divergence cannot be decided from a prefix: slow growth
    (lambda_N < growth_ratio * lambda_{N/2}) yields Inconclusive, never
    NonMember.  A monotonicity or positivity failure yields NonMember.
    """
    if N < 2:
        raise ValueError("validate_lambda needs N >= 2")
    tol = tol or Tolerances()
    n_eff = N + 1
    if lam.limit is not None:
        n_eff = min(n_eff, lam.limit)
    values = lam.prefix(n_eff)
    steps = np.diff(values)
    evidence = {
        "lambda_0": float(values[0]),
        "min_step": float(steps.min()) if len(steps) else float("nan"),
        "first_failure": -1,
        "growth": float("nan"),
    }
    bad = np.flatnonzero(steps <= 0)
    if not np.isfinite(values).all():
        evidence["first_failure"] = int(np.flatnonzero(~np.isfinite(values))[0])
        return Verdict(Membership.NON_MEMBER, evidence, N)
    if values[0] <= 0:
        evidence["first_failure"] = 0
        return Verdict(Membership.NON_MEMBER, evidence, N)
    if len(bad):
        evidence["first_failure"] = int(bad[0]) + 1
        return Verdict(Membership.NON_MEMBER, evidence, N)
    last = n_eff - 1
    growth = values[last] / values[last // 2]
    evidence["growth"] = float(growth)
    if n_eff < N + 1 or growth < tol.growth_ratio:
        return Verdict(Membership.INCONCLUSIVE, evidence, N)
    return Verdict(Membership.MEMBER, evidence, N)
