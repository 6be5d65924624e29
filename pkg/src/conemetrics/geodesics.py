"""Geodesic lengths between marked points and the football decomposition.

Geodesics of a pulled-back sphere metric are (locally) preimages of great
circles under the developing map F.  When a great circle passes through
the poles of the round sphere - equivalently, when one endpoint's
developing image is 0 or infinity - its preimage is the curve on which
arg F is constant and the length collapses to the closed form

    L(a, b) = 2 | arctan |F(b)| - arctan |F(a)| |.

Everything else (notably the 0-to-1 geodesic of the three-football
family) is computed by shooting the geodesic flow of the conformal
density.  Cone points are honest metric points but the flow degenerates
there, so paths launch from small chart offsets and the missing
cone-approach stubs are integrated radially and added back; the stubs are
recorded on the returned path so the sampled polyline and the total
length can be reconciled exactly.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from . import metric as metric_mod
from .errors import (
    DegenerateTriangle,
    EndpointNotReached,
    EvalAtPole,
    ShootingFailed,
    StepNearPole,
    TraceDiverged,
)
from .families import ThreeFootballParams, three_football_metric
from .forms import INFINITY, coefficient_at, coefficient_derivative_at
from .metric import MetricParams, density_at, developing_modulus

#: chart offset from which paths launch out of a cone point
LAUNCH_OFFSET = 1e-4

#: chart radius around the far endpoint at which a radial trace stops and
#: hands over to the analytic cone stub (also bounds the endpoint defect)
ARRIVAL_RADIUS = 5e-7


@dataclass
class GeodesicPath:
    """A sampled geodesic with its accumulated metric length.

    ``length`` is the full metric length between the requested endpoints,
    including the two cone-approach stubs recorded in ``stub_lengths``;
    ``path_length`` over ``samples`` recovers ``length - sum(stub_lengths)``
    up to quadrature error.  ``endpoint_defect`` is the chart distance from
    the last sample to the requested target (measured in the w = 1/z chart
    when the target is INFINITY).  Shot paths also record their converged
    ``launch_angle`` so later solves nearby can warm-start.
    """

    samples: list[complex]
    length: float
    endpoint_defect: float
    stub_lengths: tuple[float, float] = (0.0, 0.0)
    launch_angle: float | None = None
    source_ray: complex | None = None
    target_ray: complex | None = None

    def to_json(self) -> str:
        return json.dumps({
            "samples": [[z.real, z.imag] for z in self.samples],
            "length": self.length,
            "endpoint_defect": self.endpoint_defect,
        })


@dataclass(frozen=True)
class TriangleReport:
    """Football-decomposition data: two radial legs, the 0-1 side, the apex angle."""

    ell1: float
    ell2: float
    L01: float
    theta: float

    def to_json(self) -> str:
        return json.dumps({
            "ell1": self.ell1,
            "ell2": self.ell2,
            "L01": self.L01,
            "theta": self.theta,
        })


# ---------------------------------------------------------------------------
# closed-form radial lengths

def radial_length(params: MetricParams, a, b) -> float:
    """2 |arctan |F(b)| - arctan |F(a)||, with arctan(inf) = pi/2.

    Valid whenever the geodesic between a and b develops onto a straight
    line through the origin, i.e. when one of the two developing images is
    0 or infinity; the caller vouches for that.
    """
    ma = developing_modulus(params, a)
    mb = developing_modulus(params, b)
    return 2.0 * abs(math.atan(mb) - math.atan(ma))


def three_football_lengths(params: MetricParams) -> tuple[float, float]:
    """The two radial legs (L(1, infinity), L(0, infinity))."""
    ell1 = math.pi - 2.0 * math.atan(developing_modulus(params, 1.0))
    ell2 = math.pi - 2.0 * math.atan(developing_modulus(params, 0.0))
    return ell1, ell2


# ---------------------------------------------------------------------------
# polyline quadrature and cone stubs

def path_length(params: MetricParams, samples) -> float:
    """Composite per-segment midpoint quadrature of sqrt(density) along a polyline."""
    pts = [complex(z) for z in samples]
    if len(pts) < 2:
        return 0.0
    total = 0.0
    for z0, z1 in zip(pts[:-1], pts[1:]):
        mid = 0.5 * (z0 + z1)
        total += math.sqrt(density_at(params, mid)) * abs(z1 - z0)
    return total


def cone_approach_length(params: MetricParams, p, direction: complex, r: float) -> float:
    """Metric length of the straight chart segment from marked point p to p + r*dir."""
    kind, coefficient = metric_mod._classify_singular(params, p)
    u = complex(direction)
    u /= abs(u)
    return metric_mod._radial_metric_length(params, p, u, r, kind, coefficient)


# ---------------------------------------------------------------------------
# radial preimage tracing

def launch_directions(params: MetricParams, a, increasing: bool = False) -> tuple[complex, complex]:
    """The two chart directions in which radial curves leave a simple zero.

    At a simple zero the developing image satisfies
    F(a + t u) ~ F(a) (1 + f'(a) u^2 t^2 / 2), so |F| decreases along the
    two directions with u^2 f'(a) < 0 and increases along the perpendicular
    pair; ``increasing`` selects which pair is returned.
    """
    a = complex(a)
    fp = coefficient_derivative_at(params.form, a)
    ang = cmath.phase(fp)
    u = cmath.exp(1j * (-ang / 2.0)) if increasing else cmath.exp(1j * ((math.pi - ang) / 2.0))
    return u, -u


def _default_launch(params: MetricParams, a, b, increasing: bool) -> complex:
    cands = launch_directions(params, a, increasing)
    if b is INFINITY:
        return max(cands, key=lambda u: (u.real, u.imag))
    hint = complex(b) - complex(a)
    return max(cands, key=lambda u: (u * hint.conjugate()).real)


def trace_radial_preimage(params: MetricParams, a, b, n: int = 400,
                          launch_dir: complex | None = None,
                          clip_radius: float | None = None) -> GeodesicPath:
    """Trace the radial geodesic from zero ``a`` toward pole ``b`` (or INFINITY).

    The preimage of the developing ray through F(a) obeys dz/dtau = 1/f(z)
    with tau = log |F|, so the image modulus is stepped geometrically: the
    samples follow ``n`` tau-uniform steps, bisected wherever a chord would
    exceed four mean spacings (the declared consecutive-distance bound).
    Tracing starts at chart offset ``LAUNCH_OFFSET`` from ``a`` and stops at
    ``ARRIVAL_RADIUS`` from ``b`` (or once ``|z| = clip_radius``, if given,
    for plots running off to infinity); both cone stubs are integrated
    radially and included in ``length``.
    """
    if n < 100:
        raise ValueError(f"need at least 100 samples, got {n}")
    a = complex(a)
    form = params.form

    if b is INFINITY:
        # |F| ~ |z|^(sum of residues) at infinity
        total = sum(p.residue for p in form.poles)
        increasing = total > 0.0
        kappa_b = abs(total)
        if total == 0.0:
            raise TraceDiverged("|F| has a finite limit at infinity; no radial target there")
    else:
        b = complex(b)
        res_b = next(
            (p.residue for p in form.poles if abs(p.position - b) <= 1e-9), None)
        if res_b is None:
            raise TraceDiverged(f"target {b} is not a pole of the form")
        increasing = res_b < 0.0
        kappa_b = abs(res_b)

    u_hat = _default_launch(params, a, b, increasing) if launch_dir is None \
        else complex(launch_dir) / abs(complex(launch_dir))
    z_start = a + LAUNCH_OFFSET * u_hat
    tau0 = math.log(developing_modulus(params, z_start))

    def rhs(tau, y):
        z = complex(y[0], y[1])
        f = coefficient_at(form, z)
        v = 1.0 / f
        lam = math.sqrt(density_at(params, z))
        return [v.real, v.imag, lam * abs(v)]

    span = 200.0
    direction = 1.0 if increasing else -1.0

    def arrival(tau, y):
        z = complex(y[0], y[1])
        if b is INFINITY:
            limit = clip_radius if clip_radius is not None else 2.0e6
            return limit - abs(z)
        return abs(z - b) - ARRIVAL_RADIUS

    arrival.terminal = True

    def escaped(tau, y):
        if b is INFINITY:
            return 1.0
        return 1.0e3 - math.hypot(y[0], y[1])

    escaped.terminal = True

    def hit_other_pole(tau, y):
        z = complex(y[0], y[1])
        dists = [abs(z - p.position) for p in form.poles
                 if b is INFINITY or abs(p.position - b) > 1e-9]
        return (min(dists) if dists else 1.0) - 10.0 * 1e-12

    hit_other_pole.terminal = True

    try:
        sol = solve_ivp(rhs, (tau0, tau0 + direction * span),
                        [z_start.real, z_start.imag, 0.0],
                        method="DOP853", dense_output=True,
                        events=[arrival, escaped, hit_other_pole],
                        rtol=1e-11, atol=1e-13)
    except EvalAtPole as exc:
        raise TraceDiverged(f"trace stepped onto a pole: {exc}") from exc
    if not sol.success:
        raise TraceDiverged(f"radial trace integrator failed: {sol.message}")
    if len(sol.t_events[1]) or len(sol.t_events[2]):
        raise TraceDiverged("radial trace left the admissible region")
    if not len(sol.t_events[0]):
        raise EndpointNotReached(f"trace from {a} never reached {b}")

    tau_end = sol.t_events[0][0]
    taus = np.linspace(tau0, tau_end, n + 1)
    states = sol.sol(taus)
    samples = [complex(x, y) for x, y in zip(states[0], states[1])]

    # the modulus grid crowds samples near the far cone; where the curve
    # sprints through the chart, bisect the grid until every chord stays
    # under four mean spacings of the nominal grid
    chord_total = sum(abs(b - a) for a, b in zip(samples[:-1], samples[1:]))
    bound = 4.0 * chord_total / n
    refined_t = [taus[0]]
    refined_z = [samples[0]]
    for t1, z1_s in zip(taus[1:], samples[1:]):
        stack = [(refined_t[-1], refined_z[-1], t1, z1_s)]
        while stack:
            ta, za, tb, zb = stack.pop()
            if abs(zb - za) <= bound or abs(tb - ta) < 1e-12:
                refined_t.append(tb)
                refined_z.append(zb)
                continue
            tm = 0.5 * (ta + tb)
            sm = sol.sol(tm)
            zm = complex(sm[0], sm[1])
            stack.append((tm, zm, tb, zb))
            stack.append((ta, za, tm, zm))
    samples = refined_z

    # tau may run downward; the arc-length state then accumulates negatively
    arc = abs(float(sol.sol(tau_end)[2]))
    z_end = samples[-1]

    stub_a = cone_approach_length(params, a, u_hat, LAUNCH_OFFSET)
    if b is INFINITY:
        defect = 1.0 / abs(z_end)
        if clip_radius is not None:
            stub_b = 0.0
        else:
            lam_w = math.sqrt(metric_mod.density_inverted_chart(params, 1.0 / z_end))
            stub_b = lam_w * defect / kappa_b
    else:
        v_hat = (z_end - b) / abs(z_end - b)
        stub_b = cone_approach_length(params, b, v_hat, abs(z_end - b))
        defect = abs(z_end - b)

    return GeodesicPath(samples=samples,
                        length=stub_a + arc + stub_b,
                        endpoint_defect=defect,
                        stub_lengths=(stub_a, stub_b))


# ---------------------------------------------------------------------------
# preimages of developed great-circle arcs

def _lift_to_sphere(w: complex) -> tuple[float, float, float]:
    """Inverse stereographic projection onto the unit sphere (0 -> south pole)."""
    d = 1.0 + w.real * w.real + w.imag * w.imag
    return 2.0 * w.real / d, 2.0 * w.imag / d, (d - 2.0) / d


def _arc_preimage(params: MetricParams, z0: complex, phi: float,
                  mod_target: float, stop_center: complex,
                  stop_radius: float, rtol: float = 1e-10):
    """Trace the preimage of the great-circle arc from F(z0) to mod_target e^{i phi}.

    The starting branch is fixed by taking F(z0) positive real; the arc is
    the minor great circle between the two developed images and its preimage
    obeys dz/ds = (w'/w) / f(z).  Integration stops when z enters the
    ``stop_radius`` ball around ``stop_center``.  Returns
    ``(omega, s_end, z_end, reached, sol)`` with ``omega`` the full arc
    angle (so the traced metric length is ``s_end * omega``), or None when
    the arc is degenerate or the trace fails.
    """
    form = params.form
    w_a = complex(developing_modulus(params, z0), 0.0)
    w_b = mod_target * cmath.exp(1j * phi)
    ax, ay, az = _lift_to_sphere(w_a)
    bx, by, bz = _lift_to_sphere(w_b)
    dot = max(-1.0, min(1.0, ax * bx + ay * by + az * bz))
    omega = math.acos(dot)
    if omega < 1e-12 or omega > math.pi - 1e-9:
        return None
    sin_omega = math.sin(omega)

    def log_derivative(s: float) -> complex:
        ca, cb = math.sin((1.0 - s) * omega), math.sin(s * omega)
        da, db = -omega * math.cos((1.0 - s) * omega), omega * math.cos(s * omega)
        wx = (ca * ax + cb * bx) / sin_omega
        wy = (ca * ay + cb * by) / sin_omega
        wz = (ca * az + cb * bz) / sin_omega
        dx = (da * ax + db * bx) / sin_omega
        dy = (da * ay + db * by) / sin_omega
        dz = (da * az + db * bz) / sin_omega
        horizontal = complex(wx, wy)
        vertical = 1.0 - wz
        if abs(horizontal) < 1e-14 or abs(vertical) < 1e-14:
            raise ZeroDivisionError("arc ran over a projection pole")
        return complex(dx, dy) / horizontal + dz / vertical

    def rhs(s, y):
        z = complex(y[0], y[1])
        v = log_derivative(s) / coefficient_at(form, z)
        return [v.real, v.imag]

    def reached(s, y):
        return abs(complex(y[0], y[1]) - stop_center) - stop_radius

    reached.terminal = True

    def escaped(s, y):
        return 1.0e3 - math.hypot(y[0], y[1])

    escaped.terminal = True

    def near_pole(s, y):
        z = complex(y[0], y[1])
        return min(abs(z - p.position) for p in form.poles) - 1e-9

    near_pole.terminal = True

    try:
        launch = rhs(0.0, [z0.real, z0.imag])
        sol = solve_ivp(rhs, (0.0, 1.0), [z0.real, z0.imag],
                        method="DOP853", dense_output=True,
                        events=[reached, escaped, near_pole],
                        rtol=rtol, atol=1e-13)
    except (EvalAtPole, ZeroDivisionError):
        return None
    if not sol.success or len(sol.t_events[1]) or len(sol.t_events[2]):
        return None
    launch_angle = math.atan2(launch[1], launch[0])
    if len(sol.t_events[0]):
        s_end = float(sol.t_events[0][0])
        state = sol.sol(s_end)
        return omega, s_end, complex(state[0], state[1]), True, sol, launch_angle
    s_end = float(sol.t[-1])
    return omega, s_end, complex(sol.y[0][-1], sol.y[1][-1]), False, sol, launch_angle


def _arc_candidates(params: MetricParams, z0: complex, target: complex,
                    stop_radius: float, n_scan: int = 96):
    """Scan the relative developing phase for arcs whose preimage reaches the target.

    Returns a list of ``(length, phi, z_stop, launch_angle)`` sorted by the
    traced metric length (arc angle times the reached fraction), shortest
    first.  The launch angle is the chart direction of the preimage at z0.
    """
    mod_target = developing_modulus(params, target)

    def closest_miss(out):
        if out is None:
            return math.inf
        omega, s_end, z_end, reached, sol, launch = out
        if reached:
            return 0.0
        grid = np.linspace(0.0, s_end, 160)
        states = sol.sol(grid)
        return float(np.min(np.hypot(states[0] - target.real, states[1] - target.imag)))

    def probe(phi: float):
        out = _arc_preimage(params, z0, phi, mod_target, target, stop_radius,
                            rtol=1e-8)
        return out, closest_miss(out)

    scanned = []
    for k in range(n_scan):
        phi = -math.pi + 2.0 * math.pi * k / n_scan
        out = _arc_preimage(params, z0, phi, mod_target, target, stop_radius,
                            rtol=1e-6)
        scanned.append((phi, out, closest_miss(out)))

    candidates = []
    seen_phis: list[float] = []
    order = sorted(range(n_scan), key=lambda k: scanned[k][2])
    for k in order:
        if len(seen_phis) >= 3:
            break
        phi, out, miss = scanned[k]
        if not (miss < 0.4):
            break
        if any(abs(phi - p) < 2.5 * math.pi / n_scan for p in seen_phis):
            continue
        seen_phis.append(phi)
        # golden-section refinement of the closest approach in phase
        lo = phi - 2.0 * math.pi / n_scan
        hi = phi + 2.0 * math.pi / n_scan
        g = (math.sqrt(5.0) - 1.0) / 2.0
        x1 = hi - g * (hi - lo)
        x2 = lo + g * (hi - lo)
        o1, f1 = probe(x1)
        o2, f2 = probe(x2)
        best = (phi, out, miss)
        for _ in range(40):
            if f1 <= f2:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - g * (hi - lo)
                o1, f1 = probe(x1)
                trial = (x1, o1, f1)
            else:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + g * (hi - lo)
                o2, f2 = probe(x2)
                trial = (x2, o2, f2)
            if trial[2] < best[2]:
                best = trial
            if best[2] == 0.0:
                break
        phi_b, out_b, miss_b = best
        if miss_b > 0.0 or out_b is None:
            continue
        omega, s_end, z_stop, reached, sol, launch = out_b
        candidates.append((omega * s_end, phi_b, z_stop, launch, sol, s_end))
    candidates.sort(key=lambda c: c[0])
    return candidates


# ---------------------------------------------------------------------------
# geodesic shooting between regular points

def _geodesic_rhs(params: MetricParams):
    form = params.form

    def rhs(u, y):
        z = complex(y[0], y[1])
        psi = y[2]
        d = cmath.exp(1j * psi)
        g = metric_mod.log_density_gradient(params, z)
        lam = math.sqrt(density_at(params, z))
        turn = -2.0 * (g * d).imag
        return [d.real, d.imag, turn, lam]

    return rhs


def _shoot_once(params: MetricParams, z0: complex, z1: complex, theta: float,
                u_max: float, rtol: float):
    """Integrate one launch angle up to the section through the target.

    The section is the line through ``z1`` perpendicular to ``z1 - z0``; the
    signed miss is the transverse offset at the first crossing, which stays
    continuous in the launch angle (a closest-approach miss would jump
    whenever the nearest lobe of the curve switches).  Returns
    ``(signed miss, u_cross, solution)`` or None when the path never crosses.
    """
    rhs = _geodesic_rhs(params)
    positions = params.form.positions
    w_hat = (z1 - z0) / abs(z1 - z0)

    def section(u, y):
        return ((complex(y[0], y[1]) - z1) * w_hat.conjugate()).real

    section.terminal = True
    section.direction = 1.0

    def escaped(u, y):
        return 12.0 * max(1.0, abs(z1 - z0)) - math.hypot(y[0], y[1])

    escaped.terminal = True

    def near_pole(u, y):
        z = complex(y[0], y[1])
        return min(abs(z - p) for p in positions) - 1e-9

    near_pole.terminal = True

    try:
        sol = solve_ivp(rhs, (0.0, u_max), [z0.real, z0.imag, theta, 0.0],
                        method="DOP853", dense_output=True,
                        events=[section, escaped, near_pole],
                        rtol=rtol, atol=rtol * 1e-2)
    except (EvalAtPole, ZeroDivisionError):
        return None
    if not sol.success or not len(sol.t_events[0]):
        return None

    u_star = sol.t_events[0][0]
    s = sol.sol(u_star)
    miss = ((complex(s[0], s[1]) - z1) * w_hat.conjugate()).imag
    return miss, u_star, sol


def _resolve_candidate(params: MetricParams, z0: complex, z1: complex,
                       th_valid: float, m_valid: float, th_other,
                       m_other, u_cap: float, defect_tol: float, record):
    """Polish one candidate angle interval down to a converged launch angle.

    ``th_other`` may carry an opposite-sign miss (plain Brent bracket) or a
    censored probe (the curve never crossed the section, encoded as
    ``m_other is None``); censored intervals are shrunk by bisection until a
    sign change appears or the valid-side miss drops inside the tolerance.
    Every evaluated miss is passed to ``record`` so the caller can learn the
    best approach even from a failed candidate.  Returns the converged angle
    or None.
    """

    def miss_of(theta: float):
        out = _shoot_once(params, z0, z1, theta, u_cap, rtol=1e-8)
        if out is None:
            return None
        record(theta, out[0], float(out[2].sol(out[1])[2]))
        return out[0]

    def brent_root(th_a: float, th_b: float, censored_sign: float):
        # censored angles inside the bracket count as a huge miss of the
        # given sign, pushing Brent back toward the resolvable side
        def f(t: float) -> float:
            m = miss_of(t)
            return m if m is not None else math.copysign(1e3, censored_sign)

        try:
            return brentq(f, th_a, th_b, xtol=1e-13)
        except ValueError:
            return None

    # probe misses carry loose-tolerance noise; re-evaluate the endpoints at
    # the resolve tolerance before trusting their signs
    m_valid = miss_of(th_valid)
    if m_valid is None:
        return None
    if m_other is not None:
        m_other = miss_of(th_other)

    if abs(m_valid) <= 0.25 * defect_tol:
        return th_valid

    if m_other is not None and m_valid * m_other < 0.0:
        return brent_root(th_valid, th_other, m_other)
    if m_other is not None and abs(m_other) <= 0.25 * defect_tol:
        return th_other

    lo, m_lo = th_valid, m_valid
    hi = th_other
    for _ in range(48):
        if abs(m_lo) <= 0.25 * defect_tol:
            return lo
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        m_mid = miss_of(mid)
        if m_mid is None:
            hi = mid
        elif m_mid * m_lo < 0.0:
            return brent_root(lo, mid, m_mid)
        else:
            lo, m_lo = mid, m_mid
    return lo if abs(m_lo) <= defect_tol else None


def geodesic_between(params: MetricParams, z0, z1, defect_tol: float = 1e-6,
                     n: int = 512, probe_count: int = 64,
                     theta_hint: float | None = None) -> GeodesicPath:
    """Shoot the unit-speed geodesic from z0 to z1 in the conformal metric.

    The flow integrates z'' = -2 (d log lambda / dz) z'^2 in chart-arclength
    form.  Launch angles are probed at ``probe_count`` equispaced directions
    and each sign change of the signed section miss is polished by Brent's
    method; probes whose curve never crosses the section (captured by a cone
    or wandering off) are treated as censored and their boundary intervals
    are shrunk by bisection, which handles strong lensing near 4 pi cones.
    Among the converged angles the metrically shortest path wins.  A
    ``theta_hint`` from a nearby solve restricts probing to a small window
    around it.  Endpoints must be regular points (cone points are approached
    via offset points plus stubs by the callers).

    When no launch angle converges the raised :class:`ShootingFailed` carries
    ``best_theta`` and ``best_crossing`` (the nearest section crossing seen),
    letting callers re-aim their target offset along the actual approach
    direction of the limiting geodesic.
    """
    z0 = complex(z0)
    z1 = complex(z1)
    u_max = 12.0 * max(1.0, abs(z1 - z0))
    window = 0.75 * abs(z1 - z0)
    w_hat = (z1 - z0) / abs(z1 - z0)

    best_seen: list = [math.inf, None, None]  # signed miss, theta, arrival tangent

    def record(theta: float, m: float, psi: float) -> None:
        if abs(m) < abs(best_seen[0]):
            best_seen[0] = m
            best_seen[1] = theta
            best_seen[2] = psi

    if theta_hint is not None:
        angles = [theta_hint + d for d in np.linspace(-0.08, 0.08, 9)]
    else:
        angles = [2.0 * math.pi * j / probe_count for j in range(probe_count)]
    probes = []
    for theta in angles:
        out = _shoot_once(params, z0, z1, theta, u_max, rtol=1e-5)
        if out is None:
            probes.append((theta, None, None))
        else:
            record(theta, out[0], float(out[2].sol(out[1])[2]))
            probes.append((theta, out[0], out[1]))

    def fail(message: str) -> ShootingFailed:
        exc = ShootingFailed(message)
        exc.best_theta = best_seen[1]
        exc.best_crossing = (None if best_seen[1] is None
                             else z1 + 1j * best_seen[0] * w_hat)
        exc.best_arrival = best_seen[2]
        return exc

    # candidate intervals around every promising probe, nearest-miss first
    candidates = []
    count = len(probes)
    wraps = count if theta_hint is None else count - 1
    for j in range(wraps):
        th0, m0, u0 = probes[j]
        k = (j + 1) % count
        th1, m1, u1 = probes[k]
        if k == 0:
            th1 += 2.0 * math.pi
        if m0 is None and m1 is None:
            continue
        if m0 is not None and m1 is not None:
            # plain bracket: keep only genuine sign changes within the window
            if m0 != 0.0 and m0 * m1 > 0.0:
                continue
            if min(abs(m0), abs(m1)) > window:
                continue
            u_ref = max(u0, u1)
            if abs(m0) <= abs(m1):
                candidates.append((abs(m0), th0, m0, th1, m1, u_ref))
            else:
                candidates.append((abs(m1), th1, m1, th0, m0, u_ref))
        else:
            # censored boundary: the crossing family ends inside this interval
            if m0 is not None:
                th_v, m_v, th_o, u_ref = th0, m0, th1, u0
            else:
                th_v, m_v, th_o, u_ref = th1, m1, th0, u1
            if abs(m_v) > window:
                continue
            candidates.append((abs(m_v), th_v, m_v, th_o, None, u_ref))
    if not candidates:
        raise fail(f"no launch angle from {z0} crosses the section at {z1}")

    best = None
    tried = 0
    for _, th_v, m_v, th_o, m_o, u_ref in sorted(candidates, key=lambda c: c[0]):
        if tried >= 4:
            break
        tried += 1
        u_cap = min(u_max, 2.0 * u_ref + 1.0)
        try:
            theta_star = _resolve_candidate(params, z0, z1, th_v, m_v, th_o, m_o,
                                            u_cap, defect_tol, record)
        except StepNearPole:
            continue
        if theta_star is None:
            continue
        final = _shoot_once(params, z0, z1, theta_star, u_cap, rtol=1e-11)
        if final is None:
            continue
        signed, u_star, sol = final
        record(theta_star, signed, float(sol.sol(u_star)[2]))
        if abs(signed) > defect_tol:
            continue
        length = float(sol.sol(u_star)[3])
        if best is None or length < best[0]:
            best = (length, u_star, sol, abs(signed), theta_star)
    if best is None:
        raise fail(
            f"no bracket from {z0} converged within the defect tolerance {defect_tol:.2e}")

    length, u_star, sol, defect, theta_star = best
    grid = np.linspace(0.0, u_star, n + 1)
    states = sol.sol(grid)
    samples = [complex(x, y) for x, y in zip(states[0], states[1])]
    return GeodesicPath(samples=samples, length=length, endpoint_defect=defect,
                        launch_angle=theta_star)


# ---------------------------------------------------------------------------
# spherical trigonometry and the decomposition report

def spherical_angle(a_opposite: float, b: float, c: float) -> float:
    """Angle opposite side ``a`` in a spherical triangle with sides (a, b, c).

    Spherical law of cosines, with the arccos argument clamped when it
    overshoots [-1, 1] by at most 1e-12.
    """
    tol = 1e-9
    for name, v in (("a", a_opposite), ("b", b), ("c", c)):
        if not (0.0 < v < math.pi):
            raise DegenerateTriangle(f"side {name} = {v} outside (0, pi)")
    if (a_opposite > b + c + tol or b > a_opposite + c + tol
            or c > a_opposite + b + tol or a_opposite + b + c > 2.0 * math.pi + tol):
        raise DegenerateTriangle(
            f"sides ({a_opposite}, {b}, {c}) violate the spherical triangle inequality")
    sb, sc = math.sin(b), math.sin(c)
    if sb * sc < 1e-12:
        raise DegenerateTriangle("sin(b) sin(c) too small for a stable angle")
    arg = (math.cos(a_opposite) - math.cos(b) * math.cos(c)) / (sb * sc)
    if abs(arg) > 1.0:
        if abs(arg) > 1.0 + 1e-12:
            raise DegenerateTriangle(f"law-of-cosines argument {arg} outside [-1, 1]")
        arg = math.copysign(1.0, arg)
    return math.acos(arg)


def l01_geodesic(params: ThreeFootballParams, defect_tol: float = 1e-6,
                 hint: GeodesicPath | None = None) -> GeodesicPath:
    """The shot 0-to-1 geodesic between the launch-offset points, stubs included.

    The target offset starts on the ray toward 0 and is re-aimed along the
    limiting approach direction whenever shooting reports that the target
    sits in a cone shadow (a 4 pi cone is a diverging lens, so a badly
    oriented offset ray can be unreachable even from close by).  The
    returned path carries ``launch_angle`` and ``target_ray`` so nearby
    solves (finite-difference sweeps over the family) can warm-start.
    """
    mp = three_football_metric(params)
    z_nominal = complex(LAUNCH_OFFSET, 0.0)
    # The 0 and 1 cones carry angle 4 pi, so the metric radius of a chart
    # disc of radius r around them is O(r^2): working offsets can sit well
    # outside the strong-lensing zone (shooting into a 1e-4 funnel corridor
    # is hopelessly conditioned) while the ray-aligned stub assembly still
    # only costs O(r^3) in length.
    shot_offset = 1e-2

    # Aim the shot with preimages of developed great-circle arcs: each arc
    # candidate pins the departure ray at the 0 cone, the arrival ray at the
    # 1 cone, and the launch angle, so the badly lensed global search
    # reduces to a local polish along a clean corridor between the cones.
    attempts: list[tuple[float | None, complex, complex]] = []
    if (hint is not None and hint.launch_angle is not None
            and hint.source_ray is not None and hint.target_ray is not None):
        attempts.append((hint.launch_angle, hint.source_ray, hint.target_ray))
    else:
        for _, _, z_stop, _, sol, s_stop in _arc_candidates(
                mp, z_nominal, 1.0 + 0.0j, shot_offset)[:3]:
            # where the arc preimage last leaves the launch disc around 0:
            # beyond it the curve runs clear of both cones
            grid = np.linspace(0.0, s_stop, 400)
            states = sol.sol(grid)
            radii = np.hypot(states[0], states[1])
            inside = radii <= shot_offset
            k = 0
            while k + 1 < len(grid) and inside[k + 1]:
                k += 1
            s_lo, s_hi = grid[k], grid[min(k + 1, len(grid) - 1)]
            for _ in range(60):
                s_mid = 0.5 * (s_lo + s_hi)
                st = sol.sol(s_mid)
                if math.hypot(st[0], st[1]) <= shot_offset:
                    s_lo = s_mid
                else:
                    s_hi = s_mid
            st = sol.sol(s_lo)
            z_exit = complex(st[0], st[1])
            ds = 1e-8
            while ds < 0.01:
                st2 = sol.sol(min(s_lo + ds, s_stop))
                step = complex(st2[0] - st[0], st2[1] - st[1])
                if abs(step) > 1e-4:
                    break
                ds *= 4.0
            tangent = cmath.phase(step)
            attempts.append((tangent,
                             z_exit / abs(z_exit),
                             (z_stop - 1.0) / abs(z_stop - 1.0)))
        attempts.append((None, complex(1.0, 0.0), complex(-1.0, 0.0)))

    shot = None
    ray0 = complex(1.0, 0.0)
    ray1 = complex(-1.0, 0.0)
    last_exc: ShootingFailed | None = None
    for theta_hint, r0, r1 in attempts:
        z0 = shot_offset * r0
        z1 = 1.0 + shot_offset * r1
        try:
            shot = geodesic_between(mp, z0, z1, defect_tol=defect_tol,
                                    theta_hint=theta_hint)
            ray0, ray1 = r0, r1
            break
        except ShootingFailed as exc:
            last_exc = exc
    if shot is None:
        raise last_exc if last_exc is not None else ShootingFailed("no 0-1 geodesic found")

    stub0 = cone_approach_length(mp, 0.0, ray0, shot_offset)
    stub1 = cone_approach_length(mp, 1.0, ray1, shot_offset)
    return GeodesicPath(samples=shot.samples,
                        length=stub0 + shot.length + stub1,
                        endpoint_defect=shot.endpoint_defect,
                        stub_lengths=(stub0, stub1),
                        launch_angle=shot.launch_angle,
                        source_ray=ray0,
                        target_ray=ray1)


def decomposition_report(params: ThreeFootballParams,
                         defect_tol: float = 1e-6,
                         hint: GeodesicPath | None = None) -> TriangleReport:
    """Measure (ell1, ell2, L(0,1), theta) for a three-football configuration.

    The radial legs come from the closed form; the 0-1 side is shot between
    offset points next to the two 4 pi cones and completed with the radial
    stubs; theta is the angle at the vertex developing to infinity, opposite
    the L(0,1) side.
    """
    mp = three_football_metric(params)
    ell1, ell2 = three_football_lengths(mp)
    shot = l01_geodesic(params, defect_tol=defect_tol, hint=hint)
    theta = spherical_angle(shot.length, ell1, ell2)
    return TriangleReport(ell1=ell1, ell2=ell2, L01=shot.length, theta=theta)
