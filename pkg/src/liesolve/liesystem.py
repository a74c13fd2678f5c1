"""Lie systems and their geometric solver: the group trajectory is pushed to
the manifold through a Lie group action, step by step.

The manifold update is the incremental one, x_{k+1} = phi(exp(W_k), x_k).
That is the reading consistent with the cumulative form x(t) = phi(Y(t), x0)
and with Y_{k+1} = exp(W_k) Y_k; both paths are cross-checked in the tests.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .algebra import AlgebraBasis, CoefficientSet
from .integrators import (
    GroupTrajectory,
    StepperConfig,
    make_increment_fn,
    rk4_direct_step,
)
from .matrixcore import mat_exp


class ActionDomainError(RuntimeError):
    """The group action is local and was asked for a point outside its
    domain.  Carries the failing step index and the partial trajectory when
    raised inside a solve loop."""

    def __init__(self, message, step: Optional[int] = None, partial=None):
        super().__init__(message)
        self.step = step
        self.partial = partial


class GroupAction:
    """Partial map phi: G x N -> N.

    linear variant:           phi(g, x) = g x  (matrix-vector product).
    flow-composition variant: extract second-kind canonical coordinates
    (l_1..l_r) of g, then apply phi = F_1(l_1, F_2(l_2, ... F_r(l_r, x))).
    """

    def __init__(self, variant: str, flows=None, extract=None, guard=None):
        if variant not in ("linear", "flow-composition"):
            raise ValueError(f"unknown action variant {variant!r}")
        if variant == "flow-composition" and (flows is None or extract is None):
            raise ValueError("flow-composition action needs flows and an extractor")
        self.variant = variant
        self.flows = tuple(flows) if flows is not None else ()
        self.extract = extract
        self.guard = guard

    @classmethod
    def linear(cls) -> "GroupAction":
        return cls("linear")

    @classmethod
    def flow_composition(cls, flows, extract, guard=None) -> "GroupAction":
        return cls("flow-composition", flows=flows, extract=extract, guard=guard)

    def act(self, g: np.ndarray, x: np.ndarray) -> np.ndarray:
        g = np.asarray(g, dtype=float)
        x = np.asarray(x, dtype=float)
        if self.variant == "linear":
            return g @ x
        if self.guard is not None and not self.guard(g, x):
            raise ActionDomainError("point outside the action's domain")
        lams = self.extract(g)
        if len(lams) != len(self.flows):
            raise ValueError("extracted coordinate count does not match flow count")
        out = x
        for lam, flow in zip(reversed(lams), reversed(self.flows)):
            out = np.asarray(flow(lam, out), dtype=float)
        return out


@dataclass(frozen=True)
class LieSystemSpec:
    """A Lie system dx/dt = sum_a b_a(t) X_a(x) together with the data that
    lets the group-side solution act on the manifold.

    rhs is the direct vector field (t, x) -> dx/dt, used by the RK4
    baseline and as an oracle; invariant is an optional conserved quantity
    used for drift tracking.
    """

    basis: AlgebraBasis
    coeffs: CoefficientSet
    action: GroupAction
    dim: int
    rhs: Callable[[float, np.ndarray], np.ndarray]
    invariant: Optional[Callable[[np.ndarray], float]] = None

    def __post_init__(self):
        if self.basis.r != self.coeffs.r:
            raise ValueError("basis rank and coefficient arity differ")


@dataclass
class Trajectory:
    """Time-stamped manifold points, plus the group trajectory when the run
    produced one."""

    times: np.ndarray
    points: np.ndarray
    group: Optional[GroupTrajectory] = None


def solve(
    sys: LieSystemSpec,
    x0: Sequence[float],
    t0: float,
    t1: float,
    n_steps: int,
    config: StepperConfig,
) -> Trajectory:
    """Geometric solve: W_k from the configured stepper, then
    x_{k+1} = phi(exp(W_k), x_k), retaining Y_{k+1} = exp(W_k) Y_k."""
    if t1 <= t0:
        raise ValueError("t1 must exceed t0")
    if n_steps < 1:
        raise ValueError("need at least one step")
    x = np.asarray(x0, dtype=float)
    if x.shape != (sys.dim,):
        raise ValueError(f"initial point must have dimension {sys.dim}")
    h = (t1 - t0) / n_steps
    times = t0 + h * np.arange(n_steps + 1)
    increment = make_increment_fn(sys.basis, sys.coeffs, config)
    y = np.eye(sys.basis.n)
    points = [x]
    elements = [y]
    increments = []
    for k in range(n_steps):
        w = increment(times[k], h)
        e = mat_exp(w)
        try:
            x = sys.action.act(e, x)
        except ActionDomainError as err:
            partial = Trajectory(
                times=times[: k + 1],
                points=np.array(points),
                group=GroupTrajectory(times[: k + 1], elements, increments),
            )
            raise ActionDomainError(
                f"group action undefined at step {k} (t={times[k]:g}): {err}",
                step=k,
                partial=partial,
            ) from err
        if not np.all(np.isfinite(x)):
            raise FloatingPointError(f"non-finite state at step {k}")
        y = e @ y
        points.append(x)
        elements.append(y)
        increments.append(w)
    return Trajectory(
        times=times,
        points=np.array(points),
        group=GroupTrajectory(times=times, elements=elements, increments=increments),
    )


def solve_direct_rk4(
    sys: LieSystemSpec, x0: Sequence[float], t0: float, t1: float, n_steps: int
) -> Trajectory:
    """Classical RK4 on the raw coordinates; ignores all the geometry."""
    if t1 <= t0:
        raise ValueError("t1 must exceed t0")
    h = (t1 - t0) / n_steps
    times = t0 + h * np.arange(n_steps + 1)
    x = np.asarray(x0, dtype=float)
    points = [x]
    for k in range(n_steps):
        x = rk4_direct_step(sys.rhs, times[k], h, x)
        points.append(x)
    return Trajectory(times=times, points=np.array(points))


def global_error(traj: Trajectory, reference: Trajectory) -> float:
    """max_k ||x_ref(t_k) - x_k||_2, with the reference subsampled onto the
    trajectory's grid (its step count must be a multiple)."""
    n = len(traj.times) - 1
    n_ref = len(reference.times) - 1
    if n_ref % n != 0:
        raise ValueError("reference grid is not a refinement of the trajectory grid")
    stride = n_ref // n
    ref_times = reference.times[::stride]
    if not np.allclose(ref_times, traj.times, atol=1e-9, rtol=0):
        raise ValueError("time grids disagree after subsampling")
    diff = reference.points[::stride] - traj.points
    return float(np.max(np.linalg.norm(diff, axis=1)))


def estimate_order(hs: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(h)."""
    hs = np.asarray(hs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if len(hs) < 2 or len(hs) != len(errors):
        raise ValueError("need at least two (h, error) pairs")
    if np.any(hs <= 0) or np.any(np.diff(hs) >= 0):
        raise ValueError("h values must be positive and strictly decreasing")
    if np.any(errors <= 0):
        raise ValueError("errors must be positive")
    slope = np.polyfit(np.log(hs), np.log(errors), 1)[0]
    return float(slope)
