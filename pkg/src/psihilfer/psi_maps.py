"""Registry of admissible monotone transform functions.

Every fractional operator in this package is taken with respect to a
strictly increasing C1 transform.  A :class:`PsiMap` bundles the
transform, its first derivative and its inverse over a closed interval.
Built-in kinds cover the identity, power, logarithm and exponential
cases; arbitrary user transforms are supported through ``custom``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainViolation, NonMonotone

_MONOTONE_SAMPLES = 64
_BISECT_ATOL = 1e-13


@dataclass(frozen=True)
class PsiMap:
    """A strictly increasing transform with derivative and inverse.

    Instances are immutable and all methods are pure, so a map can be
    shared freely across threads.  ``value``, ``deriv`` and ``inverse``
    accept scalars or numpy arrays.
    """

    kind: str
    domain: tuple[float, float]
    rho: float | None = None
    _eval: Callable = field(repr=False, default=None)
    _deriv: Callable = field(repr=False, default=None)
    _inverse: Callable = field(repr=False, default=None)

    def value(self, t):
        return self._eval(t)

    def __call__(self, t):
        return self._eval(t)

    def deriv(self, t):
        return self._deriv(t)

    def inverse(self, u):
        return self._inverse(u)

    def check_in_domain(self, t: float, what: str = "t") -> None:
        lo, hi = self.domain
        tol = 1e-9 * max(1.0, abs(lo), abs(hi))
        if not (lo - tol <= t <= hi + tol):
            raise DomainViolation(
                f"{what}={t!r} outside map domain [{lo}, {hi}]"
            )

    def to_config(self) -> dict:
        cfg = {"kind": self.kind, "domain": [self.domain[0], self.domain[1]]}
        if self.kind == "power":
            cfg["rho"] = self.rho
        return cfg


def _check_monotone(eval_fn, deriv_fn, domain) -> None:
    # Sample the open interior: the derivative of admissible maps may
    # legitimately vanish at an endpoint (t^rho at t=0 with rho>1).
    lo, hi = domain
    ts = lo + (np.arange(_MONOTONE_SAMPLES) + 0.5) / _MONOTONE_SAMPLES * (hi - lo)
    dvals = np.asarray(deriv_fn(ts), dtype=float)
    if not np.all(np.isfinite(dvals)) or np.any(dvals <= 0.0):
        raise NonMonotone(
            f"derivative must be positive on ({lo}, {hi}); "
            f"min sampled value {np.min(dvals)!r}"
        )
    vals = np.asarray(eval_fn(ts), dtype=float)
    if np.any(np.diff(vals) <= 0.0):
        raise NonMonotone("sampled transform values are not strictly increasing")


def _bisect_inverse(eval_fn, domain):
    lo, hi = domain

    def inverse(u):
        u_arr = np.asarray(u, dtype=float)
        scalar = u_arr.ndim == 0
        u_arr = np.atleast_1d(u_arr)
        out = np.empty_like(u_arr)
        for idx, target in enumerate(u_arr):
            a, b = lo, hi
            fa = eval_fn(a) - target
            if fa > 0 or eval_fn(b) - target < 0:
                raise DomainViolation(f"inverse target {target!r} outside range")
            while b - a > _BISECT_ATOL:
                mid = 0.5 * (a + b)
                if eval_fn(mid) - target <= 0:
                    a = mid
                else:
                    b = mid
            out[idx] = 0.5 * (a + b)
        return float(out[0]) if scalar else out

    return inverse


def make_psi(kind: str, params=(), domain=(0.0, 1.0)) -> PsiMap:
    """Build one of the registered transform kinds.

    Parameters
    ----------
    kind:
        ``identity``, ``power``, ``log`` or ``exp``. ``power`` takes the
        exponent either from ``params[0]`` or a ``rho`` entry.
    params:
        Positional numeric parameters (only ``power`` uses one).
    domain:
        Closed interval ``[a, b]`` on which the map is used.

    Raises
    ------
    DomainViolation
        Empty domain, ``log`` with a nonpositive left endpoint, or a
        nonpositive power exponent.
    NonMonotone
        Derivative fails the positivity spot check.
    """
    lo, hi = float(domain[0]), float(domain[1])
    if not lo < hi:
        raise DomainViolation(f"domain [{lo}, {hi}] is empty")

    if kind == "identity":
        fns = (lambda t: np.asarray(t, dtype=float) + 0.0,
               lambda t: np.ones_like(np.asarray(t, dtype=float)),
               lambda u: np.asarray(u, dtype=float) + 0.0)
        rho = None
    elif kind == "power":
        rho = float(params[0]) if len(params) else None
        if rho is None or rho <= 0:
            raise DomainViolation("power map needs a positive exponent")
        if lo < 0:
            raise DomainViolation("power map requires a nonnegative domain")
        fns = (lambda t, r=rho: np.power(np.asarray(t, dtype=float), r),
               lambda t, r=rho: r * np.power(np.asarray(t, dtype=float), r - 1.0),
               lambda u, r=rho: np.power(np.asarray(u, dtype=float), 1.0 / r))
    elif kind == "log":
        if lo <= 0:
            raise DomainViolation("log map requires domain start > 0")
        fns = (lambda t: np.log(np.asarray(t, dtype=float)),
               lambda t: 1.0 / np.asarray(t, dtype=float),
               lambda u: np.exp(np.asarray(u, dtype=float)))
        rho = None
    elif kind == "exp":
        fns = (lambda t: np.exp(np.asarray(t, dtype=float)),
               lambda t: np.exp(np.asarray(t, dtype=float)),
               lambda u: np.log(np.asarray(u, dtype=float)))
        rho = None
    else:
        raise DomainViolation(f"unknown map kind {kind!r}")

    eval_fn, deriv_fn, inverse_fn = fns
    _check_monotone(eval_fn, deriv_fn, (lo, hi))
    return PsiMap(kind=kind, domain=(lo, hi), rho=rho,
                  _eval=eval_fn, _deriv=deriv_fn, _inverse=inverse_fn)


def make_custom_psi(eval_fn, deriv_fn, domain, inverse_fn=None) -> PsiMap:
    """Wrap user callables as a transform map.

    Monotonicity is spot-checked at 64 interior sample points, not
    proven.  When ``inverse_fn`` is omitted the inverse is computed by
    bisection to 1e-13 absolute tolerance, which is robust for any
    strictly monotone transform.
    """
    lo, hi = float(domain[0]), float(domain[1])
    if not lo < hi:
        raise DomainViolation(f"domain [{lo}, {hi}] is empty")
    _check_monotone(eval_fn, deriv_fn, (lo, hi))
    if inverse_fn is None:
        inverse_fn = _bisect_inverse(eval_fn, (lo, hi))
    return PsiMap(kind="custom", domain=(lo, hi), rho=None,
                  _eval=eval_fn, _deriv=deriv_fn, _inverse=inverse_fn)


def psi_from_config(cfg: dict) -> PsiMap:
    """Build a map from its JSON encoding {kind, rho?, domain}."""
    kind = cfg.get("kind")
    domain = cfg.get("domain")
    if kind is None or domain is None or len(domain) != 2:
        raise DomainViolation("map config needs 'kind' and a 2-element 'domain'")
    params = (cfg["rho"],) if kind == "power" and "rho" in cfg else ()
    return make_psi(kind, params, (domain[0], domain[1]))


def psi_increment(psi: PsiMap, a: float, t: float) -> float:
    """Increment of the transform between two ordered domain points.

    Returns exactly 0.0 when ``t == a``.
    """
    psi.check_in_domain(a, "a")
    psi.check_in_domain(t, "t")
    if t < a:
        raise DomainViolation(f"need a <= t, got a={a!r}, t={t!r}")
    if t == a:
        return 0.0
    return float(psi.value(t) - psi.value(a))


def roundtrip_error(psi: PsiMap, ts) -> float:
    """Max relative error of inverse(value(t)) over the given points."""
    ts = np.asarray(ts, dtype=float)
    back = np.asarray(psi.inverse(psi.value(ts)), dtype=float)
    scale = np.maximum(1.0, np.abs(ts))
    return float(np.max(np.abs(back - ts) / scale))
