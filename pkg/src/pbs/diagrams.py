"""Plottable series from solved beams: sampling, critical points, SVG.

Between element positions every response curve is a plain polynomial, so
extrema and zero crossings are found per piece: derivative roots in closed
form up to cubics, bisection above that.  Jumps are represented by sampling
the abscissa twice (left limit, then value), which renders as a vertical
segment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

from .solver import BeamSolution, SingularityTerm, evaluate_left_limit, evaluate_terms

DEFAULT_SAMPLES = 1000

_TAG_ORDER = {"max": 0, "min": 1, "zero": 2, "jump": 3}


class EmptySeries(ValueError):
    pass


@dataclass(frozen=True)
class CriticalPoint:
    x: float
    value: float
    tag: str  # max | min | zero | jump


@dataclass(frozen=True)
class DiagramSeries:
    kind: str  # shear | moment | deflection
    points: tuple[tuple[float, float], ...]
    critical_points: tuple[CriticalPoint, ...]
    unit_label: str


def _series_terms(solution: BeamSolution, kind: str) -> tuple[tuple[SingularityTerm, ...], float]:
    if kind == "shear":
        return solution.v, 1.0
    if kind == "moment":
        return solution.m, 1.0
    if kind == "deflection":
        return solution.deflection, solution.ei
    raise ValueError(f"unknown diagram kind {kind!r}")


def _default_unit(solution: BeamSolution, kind: str) -> str:
    force, length = solution.units.force, solution.units.length
    if kind == "shear":
        return force
    if kind == "moment":
        return f"{force}·{length}"
    return "EI·y" if solution.ei_normalized else length


# ---------------------------------------------------------------------------
# polynomial pieces


def _piece_coefficients(terms, piece_start: float) -> list[float]:
    """Ascending power-basis coefficients of the active terms on a piece."""
    coeffs = [0.0] * 6
    for t in terms:
        if t.n < 0 or t.a > piece_start:
            continue
        for k in range(t.n + 1):
            coeffs[k] += t.c * math.comb(t.n, k) * (-t.a) ** (t.n - k)
    while len(coeffs) > 1 and coeffs[-1] == 0.0:
        coeffs.pop()
    return coeffs


def _derivative(coeffs: list[float]) -> list[float]:
    return [k * c for k, c in enumerate(coeffs)][1:] or [0.0]


def _cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def _poly_roots(coeffs: list[float]) -> list[float]:
    """Real roots, closed form through cubics."""
    scale = max(abs(c) for c in coeffs)
    if scale == 0.0:
        return []
    cs = list(coeffs)
    while len(cs) > 1 and abs(cs[-1]) <= scale * 1e-14:
        cs.pop()
    degree = len(cs) - 1
    if degree == 0:
        return []
    if degree == 1:
        return [-cs[0] / cs[1]]
    if degree == 2:
        c, b, a = cs[0], cs[1], cs[2]
        disc = b * b - 4 * a * c
        if disc < 0:
            return []
        s = math.sqrt(disc)
        return [(-b - s) / (2 * a), (-b + s) / (2 * a)]
    if degree == 3:
        d, c, b, a = cs[0], cs[1], cs[2], cs[3]
        # depressed cubic t^3 + pt + q with x = t - b/3a
        shift = b / (3 * a)
        p = (3 * a * c - b * b) / (3 * a * a)
        q = (2 * b ** 3 - 9 * a * b * c + 27 * a * a * d) / (27 * a ** 3)
        disc = (q / 2) ** 2 + (p / 3) ** 3
        if disc > 0:
            u = _cbrt(-q / 2 + math.sqrt(disc))
            v = _cbrt(-q / 2 - math.sqrt(disc))
            return [u + v - shift]
        if p == 0:
            return [_cbrt(-q) - shift]
        m = 2 * math.sqrt(-p / 3)
        arg = max(-1.0, min(1.0, 3 * q / (p * m)))
        theta = math.acos(arg) / 3
        return [m * math.cos(theta - 2 * math.pi * k / 3) - shift for k in range(3)]
    return []  # degree > 3 handled by bisection


def _piece_roots(coeffs: list[float], lo: float, hi: float, tol: float) -> list[float]:
    """Roots of the polynomial inside [lo, hi]."""

    def value(x: float) -> float:
        acc = 0.0
        for c in reversed(coeffs):
            acc = acc * x + c
        return acc

    degree = len(coeffs) - 1
    roots: list[float] = []
    if degree <= 3:
        roots = [r for r in _poly_roots(coeffs) if lo - tol <= r <= hi + tol]
    else:
        steps = 64
        xs = [lo + (hi - lo) * i / steps for i in range(steps + 1)]
        vals = [value(x) for x in xs]
        for i in range(steps):
            va, vb = vals[i], vals[i + 1]
            if va == 0.0:
                roots.append(xs[i])
                continue
            if va * vb < 0:
                a, b = xs[i], xs[i + 1]
                fa = va
                while b - a > tol:
                    mid = (a + b) / 2
                    fm = value(mid)
                    if fm == 0.0:
                        a = b = mid
                        break
                    if fa * fm < 0:
                        b = mid
                    else:
                        a, fa = mid, fm
                roots.append((a + b) / 2)
        if vals[-1] == 0.0:
            roots.append(xs[-1])
    out = []
    for r in sorted(min(hi, max(lo, r)) for r in roots):
        if not out or r - out[-1] > tol:
            out.append(r)
    return out


def _breakpoints(terms, length: float) -> list[float]:
    interior = sorted({t.a for t in terms if 0 < t.a < length})
    return [0.0] + interior + [length]


def find_extrema(solution: BeamSolution, kind: str) -> list[CriticalPoint]:
    """Global max and min of a response, tagged, candidates being the piece
    endpoints, both sides of every jump, and all interior derivative roots."""
    terms, divisor = _series_terms(solution, kind)
    length = solution.length
    tol = 1e-12 * length
    bps = _breakpoints(terms, length)

    candidates: list[tuple[float, float]] = []
    for bp in bps:
        candidates.append((bp, evaluate_terms(list(terms), bp) / divisor))
        if 0 < bp:
            candidates.append((bp, evaluate_left_limit(list(terms), bp) / divisor))
    for lo, hi in zip(bps, bps[1:]):
        coeffs = _piece_coefficients(terms, lo)
        for r in _piece_roots(_derivative(coeffs), lo, hi, tol):
            candidates.append((r, evaluate_terms(list(terms), r) / divisor))

    best_max = max(candidates, key=lambda c: (c[1], -c[0]))
    best_min = min(candidates, key=lambda c: (c[1], c[0]))
    points = [CriticalPoint(best_max[0], best_max[1], "max"),
              CriticalPoint(best_min[0], best_min[1], "min")]
    points.sort(key=lambda p: (p.x, _TAG_ORDER[p.tag]))
    return points


def _zero_crossings(terms, length: float) -> list[CriticalPoint]:
    tol = 1e-12 * length
    bps = _breakpoints(terms, length)
    zeros: list[float] = []
    for lo, hi in zip(bps, bps[1:]):
        coeffs = _piece_coefficients(terms, lo)
        zeros.extend(_piece_roots(coeffs, lo, hi, tol))
    out: list[CriticalPoint] = []
    dedupe = 1e-9 * length
    for z in sorted(zeros):
        if 0 < z < length and (not out or z - out[-1].x > dedupe):
            out.append(CriticalPoint(z, 0.0, "zero"))
    return out


def sample_series(solution: BeamSolution, kind: str, n: int = DEFAULT_SAMPLES,
                  *, value_scale: float = 1.0, unit_label: str | None = None) -> DiagramSeries:
    """n uniform samples plus a duplicated point at every jump abscissa.

    Every value is an exact term evaluation at its x; no interpolation.
    value_scale is a display-unit conversion applied to values and critical
    points alike.
    """
    if n < 2:
        raise ValueError("need at least 2 samples")
    terms, divisor = _series_terms(solution, kind)
    term_list = list(terms)
    length = solution.length

    def at(x: float) -> float:
        return evaluate_terms(term_list, x) / divisor * value_scale

    interior = sorted({t.a for t in term_list if 0 < t.a < length})
    interior_set = set(interior)

    entries: list[tuple[float, int, float]] = []  # (x, order, value)
    jumps: list[CriticalPoint] = []
    for a in interior:
        left = evaluate_left_limit(term_list, a) / divisor * value_scale
        val = at(a)
        if left != val:
            entries.append((a, 0, left))
            entries.append((a, 1, val))
            jumps.append(CriticalPoint(a, val, "jump"))
        else:
            entries.append((a, 1, val))
    for i in range(n):
        x = length * (i / (n - 1))
        if x not in interior_set:
            entries.append((x, 1, at(x)))
    entries.sort(key=lambda e: (e[0], e[1]))

    extrema = [CriticalPoint(p.x, p.value * value_scale, p.tag)
               for p in find_extrema(solution, kind)]
    zeros = _zero_crossings(terms, length)
    criticals = sorted(extrema + zeros + jumps, key=lambda p: (p.x, _TAG_ORDER[p.tag]))

    return DiagramSeries(
        kind=kind,
        points=tuple((x, v) for x, _, v in entries),
        critical_points=tuple(criticals),
        unit_label=unit_label if unit_label is not None else _default_unit(solution, kind),
    )


def series_to_dict(series: DiagramSeries) -> dict[str, Any]:
    return {
        "kind": series.kind,
        "unit": series.unit_label,
        "points": [[x, v] for x, v in series.points],
        "critical": [{"x": p.x, "value": p.value, "tag": p.tag}
                     for p in series.critical_points],
    }


# ---------------------------------------------------------------------------
# SVG rendering

_WIDTH, _HEIGHT = 800, 420
_MARGIN_LEFT, _MARGIN_RIGHT, _MARGIN_TOP, _MARGIN_BOTTOM = 70, 20, 40, 40

_FILL = {"shear": "#9ecae1", "moment": "#a1d99b", "deflection": "#fdae6b"}
_STROKE = {"shear": "#3182bd", "moment": "#31a354", "deflection": "#e6550d"}


def _esc(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def render_svg(series: DiagramSeries, *, flip_y: bool = False) -> str:
    """Deterministic standalone SVG for one series.

    flip_y inverts the value axis (used to draw deflection positive-down);
    labels always show the series' own values.
    """
    if not series.points:
        raise EmptySeries("cannot render an empty series")

    sign = -1.0 if flip_y else 1.0
    xs = [x for x, _ in series.points]
    vs = [sign * v for _, v in series.points]
    x0, x1 = min(xs), max(xs)
    v_lo, v_hi = min(min(vs), 0.0), max(max(vs), 0.0)
    if v_hi == v_lo:
        v_lo, v_hi = -1.0, 1.0
    pad = 0.05 * (v_hi - v_lo)
    v_lo, v_hi = v_lo - pad, v_hi + pad
    span_x = x1 - x0 if x1 > x0 else 1.0

    plot_w = _WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = _HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM

    def px(x: float) -> float:
        return _MARGIN_LEFT + (x - x0) / span_x * plot_w

    def py(v: float) -> float:
        return _MARGIN_TOP + (v_hi - v) / (v_hi - v_lo) * plot_h

    fill = _FILL.get(series.kind, "#cccccc")
    stroke = _STROKE.get(series.kind, "#666666")
    zero_y = py(0.0)

    polygon = " ".join(f"{px(x):.2f},{py(v):.2f}" for x, v in zip(xs, vs))
    polygon = f"{px(x0):.2f},{zero_y:.2f} {polygon} {px(x1):.2f},{zero_y:.2f}"
    polyline = " ".join(f"{px(x):.2f},{py(v):.2f}" for x, v in zip(xs, vs))

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH / 2:.2f}" y="22" text-anchor="middle" font-size="15" '
        f'font-family="sans-serif">{_esc(series.kind)} [{_esc(series.unit_label)}]</text>',
        f'<polygon points="{polygon}" fill="{fill}" fill-opacity="0.55" stroke="none"/>',
        f'<polyline points="{polyline}" fill="none" stroke="{stroke}" stroke-width="1.5"/>',
        # beam baseline and value axis
        f'<line x1="{px(x0):.2f}" y1="{zero_y:.2f}" x2="{px(x1):.2f}" y2="{zero_y:.2f}" '
        f'stroke="#222222" stroke-width="2"/>',
        f'<line x1="{_MARGIN_LEFT}" y1="{_MARGIN_TOP}" x2="{_MARGIN_LEFT}" '
        f'y2="{_HEIGHT - _MARGIN_BOTTOM}" stroke="#222222" stroke-width="1"/>',
        f'<text x="{px(x0):.2f}" y="{_HEIGHT - 12}" text-anchor="middle" font-size="11" '
        f'font-family="sans-serif">{x0:.6g}</text>',
        f'<text x="{px(x1):.2f}" y="{_HEIGHT - 12}" text-anchor="middle" font-size="11" '
        f'font-family="sans-serif">{x1:.6g}</text>',
    ]
    for tag, v in (("max", v_hi), ("min", v_lo)):
        lines.append(f'<text x="{_MARGIN_LEFT - 6}" y="{py(v):.2f}" text-anchor="end" '
                     f'font-size="11" font-family="sans-serif">{sign * v:.6g}</text>')
    for p in series.critical_points:
        cx, cy = px(p.x), py(sign * p.value)
        lines.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="3" fill="{stroke}"/>')
        anchor_y = cy - 6 if sign * p.value >= 0 else cy + 14
        lines.append(f'<text x="{cx:.2f}" y="{anchor_y:.2f}" text-anchor="middle" '
                     f'font-size="11" font-family="sans-serif">{p.value:.6g}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# text report


def summary_text(solution: BeamSolution) -> str:
    """Fixed-format report: reactions, constants, per-diagram extrema."""
    lines = [f"length: {solution.length:g} {solution.units.length}"]
    lines.append("reactions:")
    for r in solution.reactions:
        lines.append(f"  R[{r.support}] = {r.force:.6f} (up)")
    for r in solution.reactions:
        if r.moment is not None:
            lines.append(f"  M_r[{r.support}] = {r.moment:.6f} (ccw)")
    lines.append(f"constants: C1 = {solution.c1:.6f}, C2 = {solution.c2:.6f}")
    for kind in ("shear", "moment", "deflection"):
        unit = _default_unit(solution, kind)
        extrema = find_extrema(solution, kind)
        parts = ", ".join(f"{p.tag} {p.value:.6g} at x = {p.x:.6g}" for p in extrema)
        lines.append(f"{kind} [{unit}]: {parts}")
    if solution.ei_normalized:
        lines.append("deflection shown as EI·y")
    else:
        lines.append(f"EI = {solution.ei:.6g}")
    return "\n".join(lines) + "\n"
