"""Independent closed-form oracles, derived by direct integration of the
Euler-Bernoulli ODE (and the three-moment equation for the continuous case)
before the solver was written.  Nothing here touches the implementation's
term machinery; equilibrium sums are recomputed from the raw spec.
"""

from __future__ import annotations


def ss_point_center(P: float, L: float, EI: float) -> dict:
    """Simply supported, point load P at midspan."""
    return {
        "reaction": P / 2,
        "moment_max": P * L / 4,
        "deflection_mid": -P * L ** 3 / (48 * EI),
    }


def ss_udl(w: float, L: float, EI: float) -> dict:
    """Simply supported, uniform load w over the whole span."""
    return {
        "reaction": w * L / 2,
        "moment_max": w * L ** 2 / 8,
        "deflection_mid": -5 * w * L ** 4 / (384 * EI),
    }


def cantilever_tip(P: float, L: float, EI: float) -> dict:
    """Fixed at 0, point load P at the free end."""
    return {
        "reaction": P,
        "fixed_moment": P * L,          # ccw
        "deflection_tip": -P * L ** 3 / (3 * EI),
    }


def propped_cantilever_udl(w: float, L: float) -> dict:
    """Fixed at 0, roller at L, uniform w.  Superposition: the prop force
    cancels the cantilever UDL tip deflection wL^4/8EI via RL^3/3EI."""
    r_prop = 3 * w * L / 8
    return {
        "reaction_prop": r_prop,
        "reaction_fixed": w * L - r_prop,       # 5wL/8
        "fixed_moment": w * L * L / 2 - r_prop * L,  # wL^2/8, ccw
    }


def two_span_udl(w: float, L: float) -> dict:
    """Supports at 0, L, 2L, uniform w everywhere.  Three-moment equation
    with equal spans: 2*M_mid*(2L) = -wL^3/4 - wL^3/4."""
    m_mid = -w * L ** 2 / 8
    r_end = w * L / 2 + m_mid / L       # 3wL/8
    r_mid = 2 * (w * L / 2 - m_mid / L)  # 5wL/4
    return {"reaction_end": r_end, "reaction_mid": r_mid, "support_moment": m_mid}


def ss_moment(M0: float, L: float, a: float) -> dict:
    """Simply supported with a ccw moment M0 at a."""
    return {
        "reaction_left": M0 / L,
        "reaction_right": -M0 / L,
        "moment_before": M0 * a / L,
        "moment_after": M0 * a / L - M0,
    }


# ---------------------------------------------------------------------------
# equilibrium recomputed from the spec, independent of singularity terms


def _dload_resultant(d) -> tuple[float, float]:
    """(total downward force, centroid) of a trapezoidal load."""
    w1, w2 = d.start_intensity, d.end_intensity
    span = d.end - d.start
    total = (w1 + w2) / 2 * span
    if total == 0:
        return 0.0, (d.start + d.end) / 2
    centroid = d.start + span * (w1 + 2 * w2) / (3 * (w1 + w2))
    return total, centroid


def equilibrium_residuals(spec, reactions) -> tuple[float, float]:
    """(sum Fy, sum M about x=0), upward and ccw positive."""
    sum_f = sum(r.force for r in reactions)
    sum_m = sum(r.force * spec.supports[r.support].position for r in reactions)
    sum_m += sum(r.moment for r in reactions if r.moment is not None)
    for p in spec.point_loads:
        sum_f -= p.magnitude
        sum_m -= p.magnitude * p.position
    for d in spec.distributed_loads:
        total, centroid = _dload_resultant(d)
        sum_f -= total
        sum_m -= total * centroid
    for m in spec.moments:
        sum_m += m.magnitude
    return sum_f, sum_m


def load_scale(spec) -> float:
    """Normalizer for the equilibrium tolerance: 1 + sum|F| + sum|M|/L."""
    total = 1.0
    total += sum(abs(p.magnitude) for p in spec.point_loads)
    for d in spec.distributed_loads:
        total += abs(_dload_resultant(d)[0])
    total += sum(abs(m.magnitude) for m in spec.moments) / spec.length
    return total
