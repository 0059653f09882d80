"""Trajectory checks: the package's theorems as executable pass/fail reports.

Each checker walks a recorded trajectory and returns a :class:`CheckReport`.
A report passes exactly when it has no first violation time.  Margins are
signed "distance to violation" figures: the larger, the safer; a negative
worst margin pinpoints how badly the worst sample failed.

Monotonicity checks ("strictly decreases") require each consecutive pair of
samples to drop by more than a relative slack of 1e-12, so a constant
trajectory fails while genuine decay, which is orders of magnitude above the
slack at any practical sampling stride, passes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import geometry, spectral
from .flows import CoincidentVerticesError, VelocityField
from .geometry import ConvexityTag, Polygon, StarTag
from .simulate import Termination, Trajectory

__all__ = [
    "CheckReport",
    "PreconditionNotStarError",
    "PreconditionNotConvexError",
    "NotSimpleError",
    "perimeter_rate",
    "check_perimeter_monotone",
    "check_star_preservation",
    "check_convexity_preservation",
    "check_area_monotone",
    "ellipse_convergence_series",
    "report_lines",
    "report_json",
]

MONOTONE_SLACK = 1e-12

# A collapsed run must end with less than this fraction of its starting perimeter.
COLLAPSE_PERIMETER_RATIO = 1e-3


class PreconditionNotStarError(ValueError):
    """The initial state is not a star, so star preservation does not apply."""


class PreconditionNotConvexError(ValueError):
    """The initial state is not convex, so convexity preservation does not apply."""


class NotSimpleError(ValueError):
    """A sample is not a simple polygon, so its area is not a region area."""


@dataclass(frozen=True)
class CheckReport:
    check_name: str
    passed: bool
    first_violation_time: float | None
    worst_margin: float
    samples_checked: int

    def __post_init__(self):
        if self.passed != (self.first_violation_time is None):
            raise ValueError("passed must mean exactly: no first violation time")


def perimeter_rate(poly: Polygon, vel) -> float:
    """Instantaneous rate of perimeter change under the velocity field ``vel``.

    Equals ``-sum_i Re{conj(d_i) * v_i}`` with ``d_i`` the sum of the two unit
    edge vectors at vertex ``i``.  For a fixed speed budget per vertex the rate
    is minimized (most negative) by moving along ``d_i``, which is the internal
    angle bisector.  ``vel`` may be a :class:`VelocityField` or a plain complex
    sequence of length n.  Raises :class:`CoincidentVerticesError` on a
    zero-length edge.
    """
    z = poly.z
    u = vel.velocities if isinstance(vel, VelocityField) else np.asarray(vel, dtype=np.complex128)
    if u.shape != z.shape:
        raise ValueError("velocity field length must match the polygon")
    e_prev = np.roll(z, 1) - z
    e_next = np.roll(z, -1) - z
    lp = np.abs(e_prev)
    ln = np.abs(e_next)
    if np.any(lp == 0.0) or np.any(ln == 0.0):
        raise CoincidentVerticesError("zero-length edge")
    d = e_prev / lp + e_next / ln
    return -float(np.sum(d.real * u.real + d.imag * u.imag))


def _monotone_report(name, times, values, slack_ref, extra_violation=None, samples=None):
    # violation at pair (k, k+1) when values drops by no more than slack
    margins = values[:-1] - values[1:]
    slack = MONOTONE_SLACK * slack_ref[:-1]
    bad = np.nonzero(margins <= slack)[0]
    first = float(times[bad[0] + 1]) if bad.size else None
    if first is None and extra_violation is not None:
        first = extra_violation
    worst = float((margins - slack).min()) if margins.size else math.inf
    return CheckReport(
        check_name=name,
        passed=first is None,
        first_violation_time=first,
        worst_margin=worst,
        samples_checked=samples if samples is not None else len(values),
    )


def check_perimeter_monotone(traj: Trajectory) -> CheckReport:
    """Perimeter must strictly decrease between samples.

    When the run ended by collapse, the final perimeter must additionally be
    below ``COLLAPSE_PERIMETER_RATIO`` of the initial one; that failure is
    reported at the final sample time.
    """
    p = traj.perimeter
    extra = None
    if traj.termination is Termination.COLLAPSED and p[-1] >= COLLAPSE_PERIMETER_RATIO * p[0]:
        extra = float(traj.times[-1])
    return _monotone_report("perimeter_monotone", traj.times, p, p, extra_violation=extra)


def check_star_preservation(traj: Trajectory) -> CheckReport:
    """Every sample must keep the initial state's star class.

    The margin per sample is the minimum centroid turning value F_i, signed so
    positive means safely inside the initial class.  Raises
    :class:`PreconditionNotStarError` when the initial state is not a star.
    """
    first_cls = geometry.classify_star(traj.states[0])
    if first_cls.tag is StarTag.NOT_STAR:
        raise PreconditionNotStarError("initial state is not a star")
    sign = 1.0 if first_cls.tag is StarTag.CCW_STAR else -1.0
    first = None
    worst = math.inf
    for t, s in zip(traj.times, traj.states):
        worst = min(worst, float((sign * geometry.star_values(s)).min()))
        if geometry.classify_star(s).tag is not first_cls.tag and first is None:
            first = float(t)
    return CheckReport(
        check_name="star_preservation",
        passed=first is None,
        first_violation_time=first,
        worst_margin=worst,
        samples_checked=len(traj),
    )


def check_convexity_preservation(traj: Trajectory) -> CheckReport:
    """Every sample after the start must be strictly convex.

    The initial state may be merely convex (straight vertices allowed); it
    must immediately become strictly convex.  The margin per checked sample is
    the minimum orientation-corrected H value.  Raises
    :class:`PreconditionNotConvexError` when the initial state is not convex.
    """
    first_tag = geometry.classify_convexity(traj.states[0]).tag
    if first_tag is ConvexityTag.NOT_CONVEX:
        raise PreconditionNotConvexError("initial state is not convex")
    first = None
    worst = math.inf
    checked = 0
    for t, s in zip(traj.times, traj.states):
        if t == 0.0:
            continue
        cls = geometry.classify_convexity(s)
        checked += 1
        worst = min(worst, float(cls.h_values.min()))
        if cls.tag is not ConvexityTag.STRICTLY_CONVEX and first is None:
            first = float(t)
    return CheckReport(
        check_name="convexity_preservation",
        passed=first is None,
        first_violation_time=first,
        worst_margin=worst,
        samples_checked=checked,
    )


def check_area_monotone(traj: Trajectory) -> CheckReport:
    """Unsigned enclosed area must strictly decrease between samples.

    Only meaningful for simple polygons: raises :class:`NotSimpleError` if any
    sample fails :func:`polyshort.geometry.is_simple`.
    """
    for s in traj.states:
        if not geometry.is_simple(s):
            raise NotSimpleError("trajectory contains a non-simple sample")
    mag = np.abs(traj.signed_area)
    return _monotone_report("area_monotone", traj.times, mag, mag)


def ellipse_convergence_series(traj: Trajectory) -> list:
    """Per-sample residual of the normalized shape against the limit ellipse.

    The ellipse comes from the initial state's decomposition; each sample is
    normalized by its own leading-mode magnitude.  Returns ``(time, residual)``
    pairs.  Raises :class:`DegenerateLeadingModeError` when the initial state
    has no leading-mode content.
    """
    ellipse = spectral.limit_ellipse(spectral.decompose(traj.states[0]))
    return [
        (float(t), spectral.ellipse_residual(s, ellipse))
        for t, s in zip(traj.times, traj.states)
    ]


def report_lines(reports) -> list:
    """Fixed-width text table, one line per report."""
    lines = []
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        at = "-" if r.first_violation_time is None else f"{r.first_violation_time:.6g}"
        lines.append(
            f"{status}  {r.check_name:<40s} worst_margin={r.worst_margin: .6e} "
            f"first_violation={at:>12s} samples={r.samples_checked}"
        )
    return lines


def report_json(reports, **meta) -> str:
    """Deterministic JSON document for a list of reports.

    Keyword arguments become top-level metadata (seed, ensemble size, ...).
    """
    doc = dict(meta)
    doc["passed"] = all(r.passed for r in reports)
    doc["checks"] = [
        {
            "check_name": r.check_name,
            "passed": r.passed,
            "first_violation_time": r.first_violation_time,
            "worst_margin": r.worst_margin,
            "samples_checked": r.samples_checked,
        }
        for r in reports
    ]
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"
