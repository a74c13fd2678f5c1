"""Benchmark Lie systems beyond the curved-space family: the planar
limit-cycle system with its local action on the diagonal group, and the
Riccati superposition-rule verifier; plus the stock coefficient set used by
the curved-space experiment."""

import math
from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraBasis, CoefficientSet
from .liesystem import ActionDomainError, GroupAction, LieSystemSpec


def ck_benchmark_coefficients() -> CoefficientSet:
    """b1 = t^2, b2 = sin t, b12 = ln(t+1), with analytic derivatives."""
    return CoefficientSet(
        funcs=(lambda t: t * t, math.sin, lambda t: math.log(t + 1.0)),
        d1=(lambda t: 2.0 * t, math.cos, lambda t: 1.0 / (t + 1.0)),
        d2=(lambda t: 2.0, lambda t: -math.sin(t), lambda t: -1.0 / (t + 1.0) ** 2),
    )


# --- planar limit-cycle system -------------------------------------------


@dataclass(frozen=True)
class DiagonalGroupElement:
    """diag(a, b) with a, b > 0; second-kind coordinates are (ln a, ln b)."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError("diagonal group elements need a, b > 0")

    def matrix(self) -> np.ndarray:
        return np.diag([self.a, self.b])


def rotation_flow(t: float, p) -> np.ndarray:
    """Clockwise rotation (x cos t + y sin t, -x sin t + y cos t)."""
    x, y = np.asarray(p, dtype=float)
    c, s = math.cos(t), math.sin(t)
    return np.array([x * c + y * s, -x * s + y * c])


def radial_flow(t: float, p) -> np.ndarray:
    """(x, y) / sqrt(r^2 - (r^2 - 1) e^{2t}); undefined when the radicand
    is not positive."""
    p = np.asarray(p, dtype=float)
    r2 = float(p @ p)
    denom = r2 - (r2 - 1.0) * math.exp(2.0 * t)
    if denom <= 0.0:
        raise ActionDomainError(
            f"radial flow undefined: r^2 - (r^2-1) e^(2t) = {denom:g} <= 0"
        )
    return p / math.sqrt(denom)


def limit_cycle_action(g: DiagonalGroupElement, p) -> np.ndarray:
    """phi(diag(a,b), (x,y)): rotate by ln a, scale by
    1/sqrt(x^2 + y^2 - (x^2 + y^2 - 1) b^2).  Leaves the unit circle and the
    origin invariant; local in (a, b)."""
    p = np.asarray(p, dtype=float)
    r2 = float(p @ p)
    denom = r2 - (r2 - 1.0) * g.b ** 2
    if denom <= 0.0:
        raise ActionDomainError(
            f"action undefined: denominator {denom:g} <= 0 (image escapes to infinity)"
        )
    return rotation_flow(math.log(g.a), p) / math.sqrt(denom)


def _limit_cycle_extract(g: np.ndarray):
    g = np.asarray(g, dtype=float)
    if g[0, 0] <= 0.0 or g[1, 1] <= 0.0:
        raise ActionDomainError("diagonal entries must be positive")
    return math.log(g[0, 0]), math.log(g[1, 1])


def limit_cycle_system(b1, b2) -> LieSystemSpec:
    """dx/dt = b1 y + b2 (x^2+y^2-1) x, dy/dt = -b1 x + b2 (x^2+y^2-1) y,
    lifted to the abelian group of positive diagonal 2x2 matrices.

    The attached invariant is r^2 = x^2 + y^2; it is conserved exactly only
    on the unit-circle stratum, which is where the drift tests start.
    """
    basis = AlgebraBasis(
        (np.diag([1.0, 0.0]), np.diag([0.0, 1.0])), np.zeros((2, 2, 2))
    )
    coeffs = CoefficientSet(funcs=(b1, b2))
    action = GroupAction.flow_composition(
        flows=(rotation_flow, radial_flow), extract=_limit_cycle_extract
    )

    def rhs(t, p):
        x, y = np.asarray(p, dtype=float)
        u = x * x + y * y - 1.0
        return np.array([b1(t) * y + b2(t) * u * x, -b1(t) * x + b2(t) * u * y])

    return LieSystemSpec(
        basis=basis,
        coeffs=coeffs,
        action=action,
        dim=2,
        rhs=rhs,
        invariant=lambda p: float(p[0] ** 2 + p[1] ** 2),
    )


# --- Riccati superposition rule ------------------------------------------


def riccati_rhs(b1, b2, b12):
    """dx/dt = b1(t) + b2(t) x + b12(t) x^2 as a 1-vector field."""

    def rhs(t, x):
        x0 = float(np.asarray(x).reshape(()) if np.ndim(x) == 0 else np.asarray(x)[0])
        return np.array([b1(t) + b2(t) * x0 + b12(t) * x0 * x0])

    return rhs


def riccati_superposition(
    x1: float, x2: float, x3: float, rho: float = 0.0, *, rho_infinite: bool = False
) -> float:
    """General solution from three particular solutions:
    [x2 (x3-x1) + rho x3 (x1-x2)] / [(x3-x1) + rho (x1-x2)];
    rho_infinite selects the exact rho -> infinity limit, x3."""
    if x1 == x2 or x2 == x3 or x1 == x3:
        raise ValueError("particular solutions must be pairwise distinct")
    if rho_infinite:
        return float(x3)
    denom = (x3 - x1) + rho * (x1 - x2)
    if denom == 0.0:
        raise ZeroDivisionError("superposition denominator vanished")
    return ((x2 * (x3 - x1)) + rho * x3 * (x1 - x2)) / denom


def riccati_rho_from_solution(x1: float, x2: float, x3: float, x: float) -> float:
    """The constant rho that makes the superposition rule reproduce x."""
    if x1 == x2 or x2 == x3 or x1 == x3:
        raise ValueError("particular solutions must be pairwise distinct")
    denom = (x1 - x2) * (x3 - x)
    if denom == 0.0:
        raise ZeroDivisionError("degenerate configuration: cannot solve for rho")
    return (x3 - x1) * (x - x2) / denom
