"""The four low-regularity time steps and the monitored simulation driver.

Each step treats the linear heat part exactly through the precomputed
propagator and approximates only the polynomial force:

    LRI1a: Q+ = e^{cTL} (Q + tau f(Q))
    LRI1b: Q+ = e^{cTL} Q + tau f(e^{cTL} Q)
    LRI2a: Q+ = e^{cTL} (Q + tau/2 f(Q) + tau^2/2 (df/dQ):f(Q))
                + tau/2 f(e^{cTL} Q)
    LRI2b: Q+ = e^{cTL} (Q + tau/2 f(Q)) + tau/2 f(e^{cTL} Q)
                + tau^2/2 (df/dQ)(e^{cTL} Q):f(e^{cTL} Q)

Propagator applications are fused by linearity: one transform pair per
step for the first-order schemes, two for the second-order ones.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .grid_field import TensorField, field_reduce, lincomb, map_bulk
from .nonlinearity import ModelParams, bulk_force_and_jac_comps, mbp_constants
from .semigroup import Propagator, apply, build_propagator

#: Slack on the squared norm radius before a bound breach is flagged.
MBP_SLACK = 1e-10

#: Slack on the 3D eigenvalue range (-1/3, 2/3) monitor.
EIG_RANGE_SLACK = 1e-10

#: Relative tolerance separating roundoff from a genuine energy rise.
ENERGY_RISE_TOL = 1e-8


class SchemeId(enum.Enum):
    LRI1A = "LRI1a"
    LRI1B = "LRI1b"
    LRI2A = "LRI2a"
    LRI2B = "LRI2b"

    @property
    def order(self) -> int:
        return 1 if self in (SchemeId.LRI1A, SchemeId.LRI1B) else 2


@dataclass
class RunReport:
    """Monitor series sampled during a run, plus the final state."""

    times: np.ndarray
    sup_frob: np.ndarray
    sup_spectral: np.ndarray
    min_eig: np.ndarray
    max_eig: np.ndarray
    energy: np.ndarray
    mbp_radius: float
    violations: list[tuple[float, str]] = dataclass_field(default_factory=list)
    final_field: TensorField | None = None


def _jac_field(qm: TensorField, p: ModelParams) -> tuple[TensorField, TensorField]:
    f, jac = bulk_force_and_jac_comps(qm.data, p)
    return TensorField(qm.grid, f), TensorField(qm.grid, jac)


def step_lri1a(
    qm: TensorField, prop: Propagator, p: ModelParams, tau: float
) -> TensorField:
    fq = map_bulk(qm, p, "force")
    return apply(prop, lincomb((1.0, tau), (qm, fq)))


def step_lri1b(
    qm: TensorField, prop: Propagator, p: ModelParams, tau: float
) -> TensorField:
    qhat = apply(prop, qm)
    return lincomb((1.0, tau), (qhat, map_bulk(qhat, p, "force")))


def step_lri2a(
    qm: TensorField, prop: Propagator, p: ModelParams, tau: float
) -> TensorField:
    fq, jq = _jac_field(qm, p)
    combined = lincomb((1.0, 0.5 * tau, 0.5 * tau * tau), (qm, fq, jq))
    qhat = apply(prop, qm)
    return lincomb((1.0, 0.5 * tau), (apply(prop, combined), map_bulk(qhat, p, "force")))


def step_lri2b(
    qm: TensorField, prop: Propagator, p: ModelParams, tau: float
) -> TensorField:
    fq = map_bulk(qm, p, "force")
    qhat = apply(prop, qm)
    fhat, jhat = _jac_field(qhat, p)
    propagated = apply(prop, lincomb((1.0, 0.5 * tau), (qm, fq)))
    return lincomb((1.0, 0.5 * tau, 0.5 * tau * tau), (propagated, fhat, jhat))


STEPPERS = {
    SchemeId.LRI1A: step_lri1a,
    SchemeId.LRI1B: step_lri1b,
    SchemeId.LRI2A: step_lri2a,
    SchemeId.LRI2B: step_lri2b,
}


def simulate(
    q0: TensorField,
    scheme: SchemeId,
    p: ModelParams,
    tau: float,
    t_end: float,
    monitor_every: int = 1,
    kind: str = "fd_central",
    mbp_radius: float | None = None,
    snapshot_times: tuple[float, ...] = (),
    snapshot_sink=None,
) -> RunReport:
    """Advance q0 to t_end, sampling monitors every ``monitor_every`` steps.

    Flags a violation whenever, at a sample, the squared sup Frobenius
    norm exceeds the radius, a 3D eigenvalue leaves (-1/3, 2/3), or the
    energy rises beyond roundoff since the previous sample.  The final
    step is always sampled.  ``snapshot_sink(t, field)`` is invoked at
    each requested snapshot time (snapshot times must land on steps).
    """
    from .diagnostics import energy as energy_of

    if tau <= 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    if t_end < 0.0:
        raise ValueError(f"t_end must be nonnegative, got {t_end}")
    nsteps = round(t_end / tau) if t_end > 0.0 else 0
    if abs(nsteps * tau - t_end) > 1e-12:
        raise ValueError(
            f"t_end={t_end} is not an integer multiple of tau={tau} within 1e-12"
        )
    if monitor_every < 1:
        raise ValueError(f"monitor_every must be >= 1, got {monitor_every}")

    stats0 = field_reduce(q0)
    consts = mbp_constants(p, stats0.sup_frob) if p.gamma > 0.0 else None
    if mbp_radius is not None:
        radius = mbp_radius
    else:
        radius = consts.a if consts is not None else stats0.sup_frob
    if consts is not None and tau > consts.tau0:
        warnings.warn(
            f"step size tau={tau:g} exceeds the advisory bound tau0={consts.tau0:g}; "
            "norm preservation is no longer guaranteed a priori",
            stacklevel=2,
        )

    prop = build_propagator(q0.grid, p.c, tau, kind)
    stepper = STEPPERS[scheme]
    snap_steps = {}
    for t_snap in snapshot_times:
        k = round(t_snap / tau) if t_snap > 0.0 else 0
        if abs(k * tau - t_snap) > 1e-12 or k > nsteps:
            raise ValueError(f"snapshot time {t_snap} does not land on a step")
        snap_steps[k] = t_snap

    times: list[float] = []
    series: dict[str, list[float]] = {
        k: [] for k in ("sup_frob", "sup_spectral", "min_eig", "max_eig", "energy")
    }
    violations: list[tuple[float, str]] = []

    def sample(t: float, q: TensorField) -> None:
        stats = field_reduce(q)
        e = energy_of(q, p)
        if stats.sup_frob**2 > radius**2 + MBP_SLACK:
            violations.append((t, "mbp"))
        if q.grid.dim == 3 and (
            stats.min_eig < -1.0 / 3.0 - EIG_RANGE_SLACK
            or stats.max_eig > 2.0 / 3.0 + EIG_RANGE_SLACK
        ):
            violations.append((t, "eig_range"))
        if series["energy"]:
            prev = series["energy"][-1]
            if e - prev > ENERGY_RISE_TOL * (1.0 + abs(prev)):
                violations.append((t, "energy_increase"))
        times.append(t)
        series["sup_frob"].append(stats.sup_frob)
        series["sup_spectral"].append(stats.sup_spectral)
        series["min_eig"].append(stats.min_eig)
        series["max_eig"].append(stats.max_eig)
        series["energy"].append(e)

    q = q0
    sample(0.0, q)
    if snapshot_sink is not None and 0 in snap_steps:
        snapshot_sink(snap_steps[0], q)
    for m in range(1, nsteps + 1):
        q = stepper(q, prop, p, tau)
        if m % monitor_every == 0 or m == nsteps:
            sample(m * tau, q)
        if snapshot_sink is not None and m in snap_steps:
            snapshot_sink(snap_steps[m], q)

    return RunReport(
        times=np.array(times),
        sup_frob=np.array(series["sup_frob"]),
        sup_spectral=np.array(series["sup_spectral"]),
        min_eig=np.array(series["min_eig"]),
        max_eig=np.array(series["max_eig"]),
        energy=np.array(series["energy"]),
        mbp_radius=radius,
        violations=violations,
        final_field=q,
    )
