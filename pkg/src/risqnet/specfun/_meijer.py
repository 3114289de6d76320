"""The two Meijer-G instances of the composite-gain distribution.

The composite gain h = h_pl * h_a * h_p (deterministic attenuation, unit
mean Gamma-Gamma fading with shapes (alpha, beta), power-law pointing gain
with severity vartheta and ceiling A0) has, in the normalized variable
z = alpha*beta*h / (A0*h_pl):

    pdf kernel  g(z) = (vt/(G(a)G(b))) * G^{3,0}_{1,3}[z | vt; vt-1, a-1, b-1]
    cdf         F(z) = (vt/(G(a)G(b))) * G^{3,1}_{2,4}[z | 1, vt+1; vt, a, b, 0]

Both G-functions collapse to two-Gamma Mellin-Barnes integrands:

    G_pdf:  (1/2pi i) Int Gamma(a-1-s) Gamma(b-1-s) z^s / (vt-1-s) ds
    G_cdf:  (1/2pi i) Int Gamma(a-s) Gamma(b-s) z^s / (s (vt-s)) ds

Fast path: Slater residue series over the right pole set, with term-ratio
recurrences (no per-term Gamma calls) and max-term tracking so the loss
from alternating-series cancellation is *measured*, not assumed.  Fallback
(near-coincident poles, or measured precision loss): direct numerical
contour integration on a vertical line through the real saddle of the
integrand, where the trapezoid rule converges geometrically.  The survival
function additionally owns a complement contour (line left of s = 0) that
evaluates P(h > threshold) directly, keeping full relative precision when
the probability itself is exponentially small.
"""

from __future__ import annotations

import math

import numpy as np

from ._gamma import gammaln, gammaln_signed, lgamma_complex
from ._quad import NumericalFailure

_POLE_SEP_TOL = 1e-6
_SERIES_Z_MAX = 40.0
_SERIES_MAX_TERMS = 400
_TARGET_REL = 1e-9
_LOG_EPS = -745.0  # exp() underflow threshold


def _dist_to_int(x: float) -> float:
    return abs(x - round(x))


def _dist_to_nonneg_int(x: float) -> float:
    if x < -0.5:
        return math.inf
    return abs(x - max(0.0, round(x)))


def _pole_separation(alpha: float, beta: float, vt: float) -> float:
    """Distance to the nearest parameter degeneracy of the residue series."""
    return min(
        _dist_to_int(alpha - beta),
        _dist_to_nonneg_int(vt - alpha),
        _dist_to_nonneg_int(vt - beta),
    )


def _validate_params(alpha: float, beta: float, vt: float) -> None:
    if not (alpha > 0.0 and beta > 0.0 and vt > 0.0):
        raise ValueError(
            f"composite-gain shape parameters must be positive, got "
            f"alpha={alpha}, beta={beta}, vartheta={vt}"
        )


# ----------------------------------------------------------------------
# residue series
# ----------------------------------------------------------------------

def _series_eval(alpha: float, beta: float, vt: float, z: float, kind: str):
    """Sum the Slater series for G_cdf ('cdf') or G_pdf ('pdf').

    Returns (log_abs, sign, est_rel_err) of the bare G value.  All three
    residue families (single pole at s=vt[-1], ladders at s=a[-1]+k and
    s=b[-1]+k) are accumulated in a common exp-scaled frame so that huge
    Gamma prefactors (weak-turbulence alpha, beta in the hundreds) never
    overflow.
    """
    lnz = math.log(z)
    shift = 0.0 if kind == "cdf" else -1.0

    # leading (vartheta) term: Gamma(a-vt) Gamma(b-vt) z^(vt+shift) [/ vt]
    lg_a, s_a = gammaln_signed(alpha - vt)
    lg_b, s_b = gammaln_signed(beta - vt)
    ln_t_vt = lg_a + lg_b + (vt + shift) * lnz
    sign_vt = s_a * s_b
    if kind == "cdf":
        ln_t_vt -= math.log(vt)

    def family_start(p: float, q: float):
        # first term of the ladder rooted at s = p + shift (p is a or b,
        # q is the other shape)
        lg, sg = gammaln_signed(q - p)
        ln_t = lg + (p + shift) * lnz
        if kind == "cdf":
            denom = p * (vt - p)
        else:
            denom = vt - p
        ln_t -= math.log(abs(denom))
        sg *= math.copysign(1.0, denom)
        return ln_t, sg

    ln_t_a, sign_a = family_start(alpha, beta)
    ln_t_b, sign_b = family_start(beta, alpha)

    m = max(ln_t_vt, ln_t_a, ln_t_b)
    if m == -math.inf or m < _LOG_EPS:
        return -math.inf, 1.0, 0.0

    total = sign_vt * math.exp(ln_t_vt - m) if ln_t_vt - m > _LOG_EPS else 0.0
    max_abs = abs(total)
    n_terms = 1

    def family_sum(p: float, q: float, ln_t0: float, sign0: float):
        nonlocal max_abs, n_terms
        if ln_t0 - m <= _LOG_EPS:
            return 0.0
        t = sign0 * math.exp(ln_t0 - m)
        acc = t
        max_abs = max(max_abs, abs(t))
        k_min = 8 + int(2.0 * math.sqrt(z))
        for k in range(_SERIES_MAX_TERMS):
            n_terms += 1
            # ratio t_{k+1}/t_k, all poles reduced to rational factors
            if kind == "cdf":
                ratio = (
                    -z
                    * (p + k)
                    * (vt - p - k)
                    / ((k + 1.0) * (q - p - k - 1.0) * (p + k + 1.0) * (vt - p - k - 1.0))
                )
            else:
                ratio = -z * (vt - p - k) / ((k + 1.0) * (q - p - k - 1.0) * (vt - p - k - 1.0))
            t *= ratio
            acc += t
            a_t = abs(t)
            if a_t > max_abs:
                max_abs = a_t
            if k >= k_min and a_t <= 1e-18 * max(1e-300, abs(acc)):
                return acc
        raise NumericalFailure(
            "residue series failed to converge",
            math.exp(m) * acc if m < 700 else math.inf,
            abs(t) * math.exp(min(m, 700.0)),
        )

    total += family_sum(alpha, beta, ln_t_a, sign_a)
    total += family_sum(beta, alpha, ln_t_b, sign_b)

    if total == 0.0:
        return -math.inf, 1.0, math.inf
    # roundoff accumulates through the term recurrence (~n_terms * eps per
    # surviving term) and is then amplified by whatever cancellation the
    # alternating families produce; measured against exact references the
    # factor below covers the truth with about 2x headroom
    est_rel = max_abs * (20.0 + 3.0 * n_terms) * 1e-16 / abs(total)
    return m + math.log(abs(total)), math.copysign(1.0, total), est_rel


# ----------------------------------------------------------------------
# contour integration
# ----------------------------------------------------------------------

def _ternary_min(g, lo: float, hi: float, iters: int = 200) -> float:
    """Minimum of a strictly convex g on (lo, hi)."""
    a, b = lo, hi
    for _ in range(iters):
        m1 = a + (b - a) / 3.0
        m2 = b - (b - a) / 3.0
        if g(m1) <= g(m2):
            b = m2
        else:
            a = m1
        if b - a <= 1e-12 * max(1.0, abs(a), abs(b)):
            break
    return 0.5 * (a + b)


def _line_integral(log_f, c: float, pole_dist: float) -> tuple[float, float]:
    """(log|I|, sign) of I = (1/2pi) Int_{-inf}^{inf} F(c + i t) dt.

    F must satisfy F(conj s) = conj F(s) so the integral is real and only
    t >= 0 is sampled.  Trapezoid spacing starts at pole_dist/6 (geometric
    convergence in the analyticity strip) and is halved until two
    consecutive refinements agree; the truncation point doubles until the
    integrand magnitude has fallen 10^-18 below its peak.
    """
    dt = min(0.25, pole_dist / 6.0)
    t_max = 40.0

    def evaluate(dt_: float, t_max_: float):
        t = np.arange(0.0, t_max_ + dt_, dt_)
        lf = log_f(c + 1j * t)
        mre = float(np.max(lf.real))
        vals = np.exp(lf - mre)
        s = float(np.sum(vals.real)) - 0.5 * float(vals.real[0])
        tail = float(np.max(np.abs(vals[-4:]))) if len(vals) > 4 else 1.0
        return s, mre, tail

    s, mre, tail = evaluate(dt, t_max)
    while tail > 1e-18 and t_max < 5000.0:
        t_max *= 2.0
        s, mre, tail = evaluate(dt, t_max)
    for _ in range(8):
        s2, mre2, _ = evaluate(dt / 2.0, t_max)
        # compare integrals, not sums: I scales as dt * s * e^mre
        v1 = s * math.exp(mre - mre2)
        v2 = 0.5 * s2
        s, mre = s2, mre2
        dt /= 2.0
        if abs(v1 - v2) <= 1e-13 * abs(v2):
            break
    if s == 0.0:
        return -math.inf, 1.0
    # I = (dt/pi) * Re sum' F  (half weight at t=0), in scaled space
    return mre + math.log(abs(s)) + math.log(dt / math.pi), math.copysign(1.0, s)


def _contour_cdf(
    alpha: float,
    beta: float,
    vt: float,
    z: float,
    complement: bool,
    log_floor: float = -math.inf,
):
    """(log|G_cdf-like value|, sign) by saddle contour.

    complement=False: line inside the fundamental strip (0, min(a, b, vt)),
    producing the bare G value of the CDF.  complement=True: line left of
    zero, producing directly I with survival = -(vt/GG) * I.  When the
    saddle height already proves |I| underflows past log_floor, the line
    integral is skipped.
    """
    lnz = math.log(z)

    def g(c: float) -> float:
        first = -math.log(-c) if complement else -math.log(c)
        return (
            gammaln(alpha - c)
            + gammaln(beta - c)
            + c * lnz
            + first
            - math.log(vt - c)
        )

    if complement:
        hi = -1e-8
        lo = -2.0
        while g(lo) < g(0.5 * lo) and lo > -1e6:
            lo *= 2.0
        c = _ternary_min(g, lo, hi)
        pole_dist = min(-c, vt - c, alpha - c, beta - c)
    else:
        top = min(alpha, beta, vt)
        c = _ternary_min(g, 1e-9 * top, top * (1.0 - 1e-9))
        pole_dist = min(c, top - c)

    # |I| <= max|F| * width / (2 pi); 1e4 over-covers every admitted width
    if g(c) + 10.0 < log_floor:
        return -math.inf, 1.0

    def log_f(s: np.ndarray) -> np.ndarray:
        return (
            lgamma_complex(alpha - s)
            + lgamma_complex(beta - s)
            + s * lnz
            - np.log(s)
            - np.log(vt - s)
        )

    return _line_integral(log_f, c, pole_dist)


def _contour_pdf(alpha: float, beta: float, vt: float, z: float, log_floor: float = -math.inf):
    """(log|G_pdf|, sign) by saddle contour left of every pole."""
    lnz = math.log(z)
    top = min(alpha, beta, vt) - 1.0

    def g(c: float) -> float:
        return (
            gammaln(alpha - 1.0 - c)
            + gammaln(beta - 1.0 - c)
            + c * lnz
            - math.log(vt - 1.0 - c)
        )

    hi = top - 1e-8 * max(1.0, abs(top))
    lo = min(top - 2.0, -2.0)
    while g(lo) < g(lo + 1.0) and lo > -1e6:
        lo = top - 2.0 * (top - lo)
    c = _ternary_min(g, lo, hi)
    pole_dist = min(vt - 1.0 - c, alpha - 1.0 - c, beta - 1.0 - c)

    if g(c) + 10.0 < log_floor:
        return -math.inf, 1.0

    def log_f(s: np.ndarray) -> np.ndarray:
        return (
            lgamma_complex(alpha - 1.0 - s)
            + lgamma_complex(beta - 1.0 - s)
            + s * lnz
            - np.log(vt - 1.0 - s)
        )

    return _line_integral(log_f, c, pole_dist)


# ----------------------------------------------------------------------
# assembled distribution functions (log-safe for large alpha, beta)
# ----------------------------------------------------------------------

def _log_prefactor(alpha: float, beta: float, vt: float) -> float:
    return math.log(vt) - gammaln(alpha) - gammaln(beta)


def gg_cdf(alpha: float, beta: float, vt: float, z: float) -> float:
    """P(Z <= z) of the normalized composite gain, in [0, 1]."""
    _validate_params(alpha, beta, vt)
    if z < 0.0:
        raise ValueError(f"cdf argument must be >= 0, got {z}")
    if z == 0.0:
        return 0.0
    lp = _log_prefactor(alpha, beta, vt)
    if z <= _SERIES_Z_MAX and _pole_separation(alpha, beta, vt) >= _POLE_SEP_TOL:
        lg, sign, est = _series_eval(alpha, beta, vt, z, "cdf")
        if est <= _TARGET_REL:
            if lg == -math.inf:
                return 0.0
            return sign * math.exp(lp + lg) if lp + lg > _LOG_EPS else 0.0
    lg, sign = _contour_cdf(alpha, beta, vt, z, complement=False, log_floor=_LOG_EPS - lp)
    if lg == -math.inf:
        return 0.0
    return sign * math.exp(lp + lg) if lp + lg > _LOG_EPS else 0.0


def gg_sf(alpha: float, beta: float, vt: float, z: float) -> float:
    """P(Z > z), evaluated to full relative precision even deep in the tail."""
    _validate_params(alpha, beta, vt)
    if z < 0.0:
        raise ValueError(f"sf argument must be >= 0, got {z}")
    if z == 0.0:
        return 1.0
    if z <= _SERIES_Z_MAX and _pole_separation(alpha, beta, vt) >= _POLE_SEP_TOL:
        lg, sign, est = _series_eval(alpha, beta, vt, z, "cdf")
        lp = _log_prefactor(alpha, beta, vt)
        cdf = sign * math.exp(lp + lg) if lp + lg > _LOG_EPS else 0.0
        sf = 1.0 - cdf
        # absolute series noise, folded into the complement
        err = est * abs(cdf) + 1e-16
        if sf > 0.0 and err / sf <= _TARGET_REL:
            return sf
    lp = _log_prefactor(alpha, beta, vt)
    lg, sign = _contour_cdf(alpha, beta, vt, z, complement=True, log_floor=_LOG_EPS - lp)
    if lg == -math.inf:
        return 0.0
    val = lp + lg
    return -sign * math.exp(val) if val > _LOG_EPS else 0.0


def gg_pdf_kernel(alpha: float, beta: float, vt: float, z: float) -> float:
    """Density of the normalized composite gain Z at z > 0."""
    _validate_params(alpha, beta, vt)
    if not z > 0.0:
        raise ValueError(f"pdf argument must be > 0, got {z}")
    lp = _log_prefactor(alpha, beta, vt)
    if z <= _SERIES_Z_MAX and _pole_separation(alpha, beta, vt) >= _POLE_SEP_TOL:
        lg, sign, est = _series_eval(alpha, beta, vt, z, "pdf")
        if est <= _TARGET_REL:
            if lg == -math.inf or sign < 0.0:
                # a negative value can only be accumulated roundoff
                return 0.0
            return math.exp(lp + lg) if lp + lg > _LOG_EPS else 0.0
    lg, sign = _contour_pdf(alpha, beta, vt, z, log_floor=_LOG_EPS - lp)
    if lg == -math.inf or sign < 0.0:
        return 0.0
    val = lp + lg
    return math.exp(val) if val > _LOG_EPS else 0.0


# ----------------------------------------------------------------------
# public Meijer-G operations (bare G values, fixed parameter structure)
# ----------------------------------------------------------------------

def _from_log(lg: float, sign: float) -> float:
    if lg == -math.inf:
        return 0.0
    if lg > 709.0:
        return math.copysign(math.inf, sign)
    return sign * math.exp(lg)


def meijer_g_3_1_2_4(a: tuple[float, float], b: tuple[float, float, float, float], x: float) -> float:
    """G^{3,1}_{2,4}[x | a1, a2; b1, b2, b3, b4] for the composite-gain CDF slot.

    Only the composite-gain structure a = (1, vt+1), b = (vt, alpha, beta, 0)
    is supported (general Meijer-G is out of scope).
    """
    a1, a2 = float(a[0]), float(a[1])
    b1, b2, b3, b4 = (float(v) for v in b)
    if abs(a1 - 1.0) > 1e-12 or abs(b4) > 1e-12 or abs(a2 - (b1 + 1.0)) > 1e-12:
        raise ValueError(
            "unsupported parameter structure: expected a=(1, vt+1), b=(vt, alpha, beta, 0)"
        )
    vt, alpha, beta = b1, b2, b3
    _validate_params(alpha, beta, vt)
    if x < 0.0:
        raise ValueError(f"argument must be >= 0, got {x}")
    if x == 0.0:
        return 0.0
    if x <= _SERIES_Z_MAX and _pole_separation(alpha, beta, vt) >= _POLE_SEP_TOL:
        lg, sign, est = _series_eval(alpha, beta, vt, x, "cdf")
        if est <= _TARGET_REL:
            return _from_log(lg, sign)
    lg, sign = _contour_cdf(alpha, beta, vt, x, complement=False, log_floor=_LOG_EPS)
    return _from_log(lg, sign)


def meijer_g_3_0_1_3(a1: float, b: tuple[float, float, float], x: float) -> float:
    """G^{3,0}_{1,3}[x | a1; b1, b2, b3] for the composite-gain PDF slot.

    Only the structure a1 = vt, b = (vt-1, alpha-1, beta-1) is supported.
    """
    a1 = float(a1)
    b1, b2, b3 = (float(v) for v in b)
    if abs(a1 - (b1 + 1.0)) > 1e-12:
        raise ValueError(
            "unsupported parameter structure: expected a1 = vt, b = (vt-1, alpha-1, beta-1)"
        )
    vt, alpha, beta = a1, b2 + 1.0, b3 + 1.0
    _validate_params(alpha, beta, vt)
    if not x > 0.0:
        raise ValueError(f"argument must be > 0, got {x}")
    if x <= _SERIES_Z_MAX and _pole_separation(alpha, beta, vt) >= _POLE_SEP_TOL:
        lg, sign, est = _series_eval(alpha, beta, vt, x, "pdf")
        if est <= _TARGET_REL:
            return _from_log(lg, sign)
    lg, sign = _contour_pdf(alpha, beta, vt, x, log_floor=_LOG_EPS)
    return _from_log(lg, sign)
