"""Pointwise evaluation of the spherical conical metric and its local checks.

The metric attached to a character form ``omega = f dz`` with family
constant ``c`` is conformal,

    ds^2 = lambda^2(z) |dz|^2,
    lambda^2 = Phi (4 - Phi) / 4 * |f|^2,
    Phi = 4 e^s / (1 + e^s),     s = potential(z) + c,

which is exactly the pullback of the round sphere metric under the
(multi-valued) developing map F with |F|^2 = e^s.  Everything in this
module is a plain function of a :class:`MetricParams`; nothing caches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import forms
from .errors import (
    EvalAtPole,
    NotASingularPoint,
    QuadratureNearPole,
    StencilHitsSingularity,
)
from .forms import INFINITY, CharacterForm, coefficient_at, coefficient_derivative_at

#: default finite-difference step for curvature stencils; balances O(h^2)
#: truncation against O(ulp/h^2) rounding in double precision
CURVATURE_STEP = 1e-4

#: beyond this chart radius, quantities "at infinity" switch to the w = 1/z chart
CHART_SWITCH_RADIUS = 10.0


@dataclass(frozen=True)
class MetricParams:
    """A character form together with the additive log-scale constant c."""

    form: CharacterForm
    c_log: float = 0.0


@dataclass(frozen=True)
class DensityField:
    """Callable view of the conformal density z -> lambda^2(z)."""

    params: MetricParams

    def __call__(self, z) -> float:
        return density_at(self.params, z)


def _sigmoid(s: float) -> float:
    """Overflow-free logistic 1 / (1 + e^-s)."""
    if s >= 0.0:
        return 1.0 / (1.0 + math.exp(-s))
    t = math.exp(s)
    return t / (1.0 + t)


def log_scale_at(params: MetricParams, z) -> float:
    """s(z) = potential(z) + c, the log of the squared developing modulus."""
    return forms.potential_at(params.form, z) + params.c_log


def phi_at(params: MetricParams, z) -> float:
    """Phi(z) = 4 e^s / (1 + e^s), always strictly inside (0, 4).

    Evaluated as ``4 * sigmoid(s)`` so that large positive or negative
    ``s`` never exponentiates past the float range.
    """
    return 4.0 * _sigmoid(log_scale_at(params, z))


def density_at(params: MetricParams, z) -> float:
    """Conformal density lambda^2(z) = Phi (4 - Phi) / 4 * |f(z)|^2."""
    s = log_scale_at(params, z)
    f = coefficient_at(params.form, z)
    # Phi (4 - Phi) / 4 = 4 sigmoid(s) sigmoid(-s), computed from e^{-|s|}
    t = math.exp(-abs(s))
    bell = 4.0 * t / (1.0 + t) ** 2
    return bell * (f.real * f.real + f.imag * f.imag)


def developing_modulus(params: MetricParams, z) -> float:
    """|F(z)| = e^{c/2} * prod_k |z - p_k|^{r_k}, single-valued on the sphere.

    Returns 0 or +inf at the poles according to the residue signs, and the
    appropriate limit at INFINITY (governed by the sign of ``sum r_k``).
    """
    if z is INFINITY:
        total = -forms.residue_at_infinity(params.form)
        if total > 0.0:
            return math.inf
        if total < 0.0:
            return 0.0
        # residues cancel: |F| tends to the finite product limit e^{c/2}
        return math.exp(0.5 * params.c_log)
    z = complex(z)
    out = math.exp(0.5 * params.c_log)
    for p in params.form.poles:
        base = abs(z - p.position)
        if base == 0.0:
            return math.inf if p.residue < 0.0 else 0.0
        try:
            out *= base ** p.residue
        except OverflowError:
            return math.inf
    return out


def density_via_developing(params: MetricParams, z) -> float:
    """lambda^2 via the developing route 4 |F'|^2 / (1 + |F|^2)^2.

    Uses |F'| = |F| |f| (logarithmic differentiation), so no branch of F is
    ever differentiated.  Agrees with :func:`density_at` to roundoff; the
    two routes share no arithmetic beyond f itself.
    """
    f = coefficient_at(params.form, z)
    big_f = developing_modulus(params, z)
    u = big_f * big_f
    if math.isinf(u):
        return 0.0
    return 4.0 * u * (f.real * f.real + f.imag * f.imag) / (1.0 + u) ** 2


def density_inverted_chart(params: MetricParams, w) -> float:
    """Density in the w = 1/z chart: lambda^2(1/w) / |w|^4."""
    w = complex(w)
    if w == 0.0:
        raise EvalAtPole("w = 0 is the point at infinity itself")
    return density_at(params, 1.0 / w) / abs(w) ** 4


def log_density_gradient(params: MetricParams, z) -> complex:
    """d/dz of log lambda, the single-valued generator of the geodesic flow.

    From lambda^2 = 4 u |f|^2 / (1+u)^2 with u = e^s and ds/dz = f:

        d(log lambda)/dz = f/2 + f'/(2 f) - u/(1+u) * f.
    """
    z = complex(z)
    f = coefficient_at(params.form, z)
    fp = coefficient_derivative_at(params.form, z)
    sig = _sigmoid(log_scale_at(params, z))
    return 0.5 * f + 0.5 * fp / f - sig * f


def _half_log_density(params: MetricParams, z) -> float:
    d = density_at(params, z)
    if d <= 0.0:
        raise StencilHitsSingularity(f"density vanished at stencil point {z}")
    return 0.5 * math.log(d)


def gauss_curvature_fd(params: MetricParams, z, h: float = CURVATURE_STEP) -> float:
    """Gaussian curvature via K = -laplacian(log lambda) / lambda^2.

    The Laplacian uses the 5-point stencil with spacing ``h``; the result
    should be 1 up to O(h^2) truncation plus rounding wherever the metric
    is honestly spherical.
    """
    if not (1e-6 <= h <= 1e-2):
        raise ValueError(f"stencil step h={h} outside [1e-6, 1e-2]")
    z = complex(z)
    try:
        center = _half_log_density(params, z)
        around = [
            _half_log_density(params, z + h),
            _half_log_density(params, z - h),
            _half_log_density(params, z + 1j * h),
            _half_log_density(params, z - 1j * h),
        ]
    except (EvalAtPole, ValueError) as exc:
        raise StencilHitsSingularity(f"stencil at {z} touched a singular point") from exc
    lap = (math.fsum(around) - 4.0 * center) / (h * h)
    return -lap / density_at(params, z)


def phi_gradient_check(params: MetricParams, z, h: float = 1e-5) -> float:
    """Residual of the defining gradient identity for Phi.

    Checks grad Phi = Phi(4-Phi)/4 * (2 Re f, -2 Im f) with a central
    difference on the left, normalised by max(1, |grad Phi|).
    """
    z = complex(z)
    try:
        dphi_dx = (phi_at(params, z + h) - phi_at(params, z - h)) / (2.0 * h)
        dphi_dy = (phi_at(params, z + 1j * h) - phi_at(params, z - 1j * h)) / (2.0 * h)
        phi = phi_at(params, z)
        f = coefficient_at(params.form, z)
    except EvalAtPole as exc:
        raise StencilHitsSingularity(f"gradient stencil at {z} touched a pole") from exc
    factor = phi * (4.0 - phi) / 4.0
    rx = dphi_dx - factor * 2.0 * f.real
    ry = dphi_dy - factor * (-2.0) * f.imag
    norm = math.hypot(dphi_dx, dphi_dy)
    return math.hypot(rx, ry) / max(1.0, norm)


# ---------------------------------------------------------------------------
# cone angles

def singular_points(params: MetricParams) -> list[tuple[object, str, float]]:
    """All marked points: (position, kind, cone-angle coefficient).

    ``kind`` is "pole", "zero" or "infinity"; the coefficient k gives cone
    angle 2 pi k (poles: |residue|; zeros: order + 1; infinity: |implied
    residue|).  Smooth points (coefficient 1) are still listed.
    """
    out: list[tuple[object, str, float]] = []
    for p in params.form.poles:
        out.append((p.position, "pole", abs(p.residue)))
    for root, order in forms.finite_zeros(params.form):
        out.append((root, "zero", order + 1.0))
    res_inf = forms.residue_at_infinity(params.form)
    if res_inf != 0.0:
        out.append((INFINITY, "infinity", abs(res_inf)))
    return out


def _classify_singular(params: MetricParams, p, match_tol: float = 1e-9):
    if p is INFINITY:
        res_inf = forms.residue_at_infinity(params.form)
        if res_inf == 0.0:
            raise NotASingularPoint("infinity is a regular point of this form")
        return "infinity", abs(res_inf)
    p = complex(p)
    for spec in params.form.poles:
        if abs(p - spec.position) <= match_tol:
            return "pole", abs(spec.residue)
    for root, order in forms.finite_zeros(params.form):
        if abs(p - root) <= max(match_tol, 1e-7):
            return "zero", order + 1.0
    raise NotASingularPoint(f"{p} is neither a pole, a zero, nor infinity")


#: fixed, deliberately generic base ray for radial quadrature; cone-angle
#: estimates average over its four quarter-turns so the first-order drift of
#: the regular potential cancels from the radius integral
_RAY = complex(math.cos(0.37), math.sin(0.37))

#: inner cutoff for radial quadrature toward a pole; below it the metric is
#: pure cone up to O(r) relative corrections
_RADIAL_INNER = 1e-9


def _sqrt_density_on_ray(params: MetricParams, p: complex, direction: complex):
    def integrand(t: float) -> float:
        return math.sqrt(density_at(params, p + t * direction))

    return integrand


def _radial_metric_length(params: MetricParams, p, direction: complex, r: float,
                          kind: str, coefficient: float) -> float:
    """Metric length of the chart segment from the marked point p out to radius r."""
    import warnings

    from scipy.integrate import IntegrationWarning, quad

    if kind == "infinity":
        # same ray integral, run in the w = 1/z chart
        def integrand(t: float) -> float:
            return math.sqrt(density_inverted_chart(params, t * direction))
    else:
        integrand = _sqrt_density_on_ray(params, complex(p), direction)

    # the steep t^{k-1} profile makes QUADPACK report roundoff well before
    # the requested tolerance; the returned values are still far more
    # accurate than the downstream length tolerances need
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        if kind == "pole" or kind == "infinity":
            # singular at 0: integrate the outer part and close with the
            # cone-model tail A t^k / k below the cutoff
            inner = _RADIAL_INNER
            value, _ = quad(integrand, inner, r, limit=400, epsabs=0.0, epsrel=1e-11)
            tail = integrand(inner) * inner / coefficient
            return value + tail
        value, _ = quad(integrand, 0.0, r, limit=400, epsabs=0.0, epsrel=1e-11)
        return value


def cone_angle_estimate(params: MetricParams, p, eps: float = 1e-3, n: int = 1024) -> float:
    """Estimate the cone angle at a marked point from circumference / radius.

    Integrates the metric circumference of the chart circle ``|z - p| = eps``
    (trapezoid over ``n`` nodes, spectrally accurate for the smooth
    integrand) and divides by the metric length of a chart ray from p, giving
    2 pi k + O(eps) for a cone of angle 2 pi k.  For ``p = INFINITY`` both
    integrals run in the w = 1/z chart.
    """
    if not (1e-5 <= eps <= 1e-2):
        raise ValueError(f"eps={eps} outside [1e-5, 1e-2]")
    if n < 256:
        raise ValueError(f"need at least 256 quadrature nodes, got {n}")
    kind, coefficient = _classify_singular(params, p)

    if kind == "infinity":
        others = [q for q, _, _ in singular_points(params) if q is not INFINITY]
        if any(abs(q) > 1.0 / (3.0 * eps) for q in others):
            raise QuadratureNearPole("a finite singular point crowds the contour at infinity")

        def lam(w: complex) -> float:
            return math.sqrt(density_inverted_chart(params, w))

        center = 0.0 + 0.0j
    else:
        center = complex(p)
        others = [
            q for q, _, _ in singular_points(params)
            if q is not INFINITY and abs(q - center) > 1e-9
        ]
        if any(abs(q - center) < 3.0 * eps for q in others):
            raise QuadratureNearPole(f"another singular point within 3*eps of {center}")

        def lam(z: complex) -> float:
            return math.sqrt(density_at(params, z))

    step = 2.0 * math.pi / n
    circumference = eps * step * math.fsum(
        lam(center + eps * complex(math.cos(k * step), math.sin(k * step)))
        for k in range(n)
    )
    radius = math.fsum(
        _radial_metric_length(params, p, _RAY * 1j ** k, eps, kind, coefficient)
        for k in range(4)
    ) / 4.0
    return circumference / radius


# ---------------------------------------------------------------------------
# CSV grid export

def write_density_grid_csv(params: MetricParams, bounds, nx: int, ny: int, fh,
                           h: float = CURVATURE_STEP) -> None:
    """Write the re,im,phi,density,curvature grid as CSV to an open text file.

    Cells whose stencil touches a singular point are written as NaN; rows are
    emitted with x varying fastest, 17 significant digits throughout.
    """
    x0, x1, y0, y1 = bounds
    fh.write("re,im,phi,density,curvature\n")
    for iy in range(ny):
        y = y0 + (y1 - y0) * iy / (ny - 1)
        for ix in range(nx):
            x = x0 + (x1 - x0) * ix / (nx - 1)
            z = complex(x, y)
            try:
                phi = f"{phi_at(params, z):.17g}"
                den = f"{density_at(params, z):.17g}"
            except EvalAtPole:
                phi = den = "nan"
            try:
                cur = f"{gauss_curvature_fd(params, z, h):.17g}"
            except (StencilHitsSingularity, EvalAtPole):
                cur = "nan"
            fh.write(f"{x:.17g},{y:.17g},{phi},{den},{cur}\n")
