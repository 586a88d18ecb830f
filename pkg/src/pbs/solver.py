"""Closed-form beam solver over Macaulay singularity functions.

The load function q(x) is a sum of terms c*<x-a>^n including the unknown
reactions.  Integrating the whole list four times gives shear, moment,
EI*slope and EI*deflection symbolically; equilibrium plus one deflection
condition per support (and one slope condition per fixed support) close the
system, so determinate and indeterminate beams solve through the same path.

Internal sign convention: x runs from the left end, upward forces and
counter-clockwise moments positive.  External loads are given positive
downward and flip sign on entry; reactions are reported positive upward.

Encodings at the q level:

* reaction force R at a         ->  R<x-a>^-1
* point load P (down) at a      -> -P<x-a>^-1
* uniform w (down) on [a, b]    -> -w<x-a>^0 + w<x-b>^0
* linear ramp w1->w2 on [a, b]  ->  the uniform terms plus slope terms
                                    -m<x-a>^1 + m<x-b>^1, m = (w2-w1)/(b-a)
* applied ccw moment M0 at a    -> -M0<x-a>^-2
* fixed-end reaction moment Mr  -> -Mr<x-a>^-2
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any

from .model import BeamSpec, SectionProperties, SupportKind, Units, ValidatedBeam


class SolverError(ValueError):
    """codes: singular_system, unresolved_unknown, out_of_domain"""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


@dataclass(frozen=True)
class Unknown:
    kind: str  # reaction_force | reaction_moment | c1 | c2
    index: int = 0


@dataclass(frozen=True)
class SingularityTerm:
    """One Macaulay bracket term c*<x-a>^n, optionally scaled by an Unknown."""

    c: float
    a: float
    n: int
    unknown: Unknown | None = None


def assemble_load_function(beam: ValidatedBeam) -> list[SingularityTerm]:
    """All q-level terms for the beam: unknown reactions plus external loads."""
    return _reaction_terms(beam.spec) + _load_terms(beam.spec)


def _reaction_terms(spec: BeamSpec) -> list[SingularityTerm]:
    terms = []
    for i, s in enumerate(spec.supports):
        terms.append(SingularityTerm(1.0, s.position, -1, Unknown("reaction_force", i)))
        if s.kind is SupportKind.FIXED:
            terms.append(SingularityTerm(-1.0, s.position, -2, Unknown("reaction_moment", i)))
    return terms


def _load_terms(spec: BeamSpec) -> list[SingularityTerm]:
    terms = []
    for p in spec.point_loads:
        terms.append(SingularityTerm(-p.magnitude, p.position, -1))
    for d in spec.distributed_loads:
        terms.append(SingularityTerm(-d.start_intensity, d.start, 0))
        terms.append(SingularityTerm(d.end_intensity, d.end, 0))
        if d.start_intensity != d.end_intensity:
            slope = (d.end_intensity - d.start_intensity) / (d.end - d.start)
            terms.append(SingularityTerm(-slope, d.start, 1))
            terms.append(SingularityTerm(slope, d.end, 1))
    for m in spec.moments:
        terms.append(SingularityTerm(-m.magnitude, m.position, -2))
    return terms


def integrate_terms(terms: list[SingularityTerm]) -> list[SingularityTerm]:
    """One Macaulay integration: <>^n -> <>^(n+1), dividing by n+1 for n >= 0."""
    out = []
    for t in terms:
        if t.n < 0:
            out.append(replace(t, n=t.n + 1))
        else:
            out.append(replace(t, c=t.c / (t.n + 1), n=t.n + 1))
    return out


def evaluate_terms(terms: list[SingularityTerm], x: float) -> float:
    """Sum of resolved terms at x, with <x-a>^0 = 1 at x = a (left-closed)."""
    total = 0.0
    for t in terms:
        if t.unknown is not None:
            raise SolverError("unresolved_unknown",
                              f"term at a={t.a} still references {t.unknown}")
        if t.n < 0:
            continue
        dx = x - t.a
        if dx < 0:
            continue
        total += t.c * dx ** t.n
    return total


def evaluate_left_limit(terms: list[SingularityTerm], x: float) -> float:
    """Limit from below at x: step terms exactly at x are excluded."""
    total = 0.0
    for t in terms:
        if t.unknown is not None:
            raise SolverError("unresolved_unknown",
                              f"term at a={t.a} still references {t.unknown}")
        if t.n < 0:
            continue
        dx = x - t.a
        if dx < 0 or (dx == 0 and t.n == 0):
            continue
        total += t.c * dx ** t.n
    return total


def _substitute(terms: list[SingularityTerm], values: dict[Unknown, float]) -> list[SingularityTerm]:
    return [t if t.unknown is None else replace(t, c=t.c * values[t.unknown], unknown=None)
            for t in terms]


# ---------------------------------------------------------------------------
# system assembly and solution


@dataclass(frozen=True)
class LinearSystem:
    matrix: list[list[float]]
    rhs: list[float]
    unknowns: list[Unknown]


def _integrals(terms: list[SingularityTerm]) -> tuple[list[SingularityTerm], ...]:
    """q, V, M, EI*slope, EI*deflection term lists by repeated integration."""
    v = integrate_terms(terms)
    m = integrate_terms(v)
    slope = integrate_terms(m)
    deflection = integrate_terms(slope)
    return terms, v, m, slope, deflection


def _unknown_list(spec: BeamSpec) -> list[Unknown]:
    unknowns = [Unknown("reaction_force", i) for i in range(len(spec.supports))]
    unknowns += [Unknown("reaction_moment", i) for i, s in enumerate(spec.supports)
                 if s.kind is SupportKind.FIXED]
    unknowns += [Unknown("c1"), Unknown("c2")]
    return unknowns


def assemble_system(beam: ValidatedBeam) -> LinearSystem:
    """Equilibrium plus boundary-condition rows, one column per unknown.

    Rows: shear balance past the right end, moment balance past the right
    end, EI*y(a) = 0 at every support a, EI*slope(a) = 0 at every fixed
    support.  Row count always equals unknown count: supports + fixed + 2.
    """
    spec = beam.spec
    length = spec.length
    unknowns = _unknown_list(spec)
    columns = {u: i for i, u in enumerate(unknowns)}
    n = len(unknowns)

    # per-unknown basis, integrated like the load terms
    basis: dict[Unknown, tuple[list[SingularityTerm], ...]] = {}
    for t in _reaction_terms(spec):
        basis[t.unknown] = _integrals([replace(t, unknown=None)])
    loads = _integrals(_load_terms(spec))

    matrix = [[0.0] * n for _ in range(n)]
    rhs = [0.0] * n
    LEVEL_V, LEVEL_M, LEVEL_SLOPE, LEVEL_Y = 1, 2, 3, 4

    def fill_row(row: int, level: int, x: float, c1_coeff: float, c2_coeff: float) -> None:
        for u, lists in basis.items():
            matrix[row][columns[u]] = evaluate_terms(lists[level], x)
        matrix[row][columns[Unknown("c1")]] = c1_coeff
        matrix[row][columns[Unknown("c2")]] = c2_coeff
        rhs[row] = -evaluate_terms(loads[level], x)

    fill_row(0, LEVEL_V, length, 0.0, 0.0)
    fill_row(1, LEVEL_M, length, 0.0, 0.0)
    row = 2
    for s in spec.supports:
        fill_row(row, LEVEL_Y, s.position, s.position, 1.0)
        row += 1
    for s in spec.supports:
        if s.kind is SupportKind.FIXED:
            fill_row(row, LEVEL_SLOPE, s.position, 1.0, 0.0)
            row += 1

    return LinearSystem(matrix=matrix, rhs=rhs, unknowns=unknowns)


def _solve_dense(system: LinearSystem) -> dict[Unknown, float]:
    """Gaussian elimination with partial pivoting; a pivot below
    1e-12 * ||A||_inf means the structure (not the arithmetic) is singular."""
    a = [row[:] for row in system.matrix]
    b = list(system.rhs)
    n = len(b)
    norm = max((sum(abs(v) for v in row) for row in a), default=0.0)
    pivot_floor = 1e-12 * max(norm, 1e-300)

    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(a[i][k]))
        if abs(a[p][k]) <= pivot_floor:
            raise SolverError("singular_system",
                              "boundary conditions do not determine the beam "
                              "(unstable structure or coincident supports)")
        if p != k:
            a[k], a[p] = a[p], a[k]
            b[k], b[p] = b[p], b[k]
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            if f == 0.0:
                continue
            for j in range(k, n):
                a[i][j] -= f * a[k][j]
            b[i] -= f * b[k]

    x = [0.0] * n
    for i in range(n - 1, -1, -1):
        acc = b[i]
        for j in range(i + 1, n):
            acc -= a[i][j] * x[j]
        x[i] = acc / a[i][i]
    return dict(zip(system.unknowns, x))


@dataclass(frozen=True)
class Reaction:
    support: int
    force: float            # upward positive
    moment: float | None    # ccw positive, fixed supports only


@dataclass(frozen=True)
class BeamSolution:
    length: float
    units: Units
    reactions: tuple[Reaction, ...]
    c1: float
    c2: float
    q: tuple[SingularityTerm, ...]
    v: tuple[SingularityTerm, ...]
    m: tuple[SingularityTerm, ...]
    slope: tuple[SingularityTerm, ...]        # EI * slope
    deflection: tuple[SingularityTerm, ...]   # EI * deflection
    ei: float
    ei_normalized: bool

    def _check_domain(self, x: float) -> None:
        if not 0 <= x <= self.length:
            raise SolverError("out_of_domain", f"x={x} outside [0, {self.length}]")

    def shear_at(self, x: float) -> float:
        self._check_domain(x)
        return evaluate_terms(list(self.v), x)

    def moment_at(self, x: float) -> float:
        self._check_domain(x)
        return evaluate_terms(list(self.m), x)

    def slope_at(self, x: float) -> float:
        self._check_domain(x)
        return evaluate_terms(list(self.slope), x) / self.ei

    def deflection_at(self, x: float) -> float:
        self._check_domain(x)
        return evaluate_terms(list(self.deflection), x) / self.ei


def solve_beam(beam: ValidatedBeam, section: SectionProperties | None = None,
               *, ei: float | None = None) -> BeamSolution:
    """Assemble, solve and substitute; EI defaults to the beam's section
    properties or, failing that, to 1 with the solution marked ei_normalized."""
    spec = beam.spec
    system = assemble_system(beam)
    values = _solve_dense(system)

    flexural = ei
    if flexural is None and section is not None:
        flexural = section.ei
    if flexural is None:
        flexural = spec.section.ei

    q = _substitute(assemble_load_function(beam), values)
    v = integrate_terms(q)
    m = integrate_terms(v)
    slope = integrate_terms(m) + [SingularityTerm(values[Unknown("c1")], 0.0, 0)]
    deflection = (integrate_terms(integrate_terms(m))
                  + [SingularityTerm(values[Unknown("c1")], 0.0, 1),
                     SingularityTerm(values[Unknown("c2")], 0.0, 0)])

    reactions = []
    for i, s in enumerate(spec.supports):
        moment = values.get(Unknown("reaction_moment", i))
        reactions.append(Reaction(support=i, force=values[Unknown("reaction_force", i)],
                                  moment=moment))

    return BeamSolution(
        length=spec.length,
        units=spec.units,
        reactions=tuple(reactions),
        c1=values[Unknown("c1")],
        c2=values[Unknown("c2")],
        q=tuple(q), v=tuple(v), m=tuple(m),
        slope=tuple(slope), deflection=tuple(deflection),
        ei=flexural if flexural is not None else 1.0,
        ei_normalized=flexural is None,
    )


# ---------------------------------------------------------------------------
# serialization


def _terms_to_list(terms: tuple[SingularityTerm, ...]) -> list[dict[str, Any]]:
    return [{"c": t.c, "a": t.a, "n": t.n} for t in terms]


def solution_to_dict(solution: BeamSolution) -> dict[str, Any]:
    reactions = []
    for r in solution.reactions:
        entry: dict[str, Any] = {"support": r.support, "force": r.force}
        if r.moment is not None:
            entry["moment"] = r.moment
        reactions.append(entry)
    return {
        "reactions": reactions,
        "constants": {"c1": solution.c1, "c2": solution.c2},
        "ei": solution.ei,
        "ei_normalized": solution.ei_normalized,
        "q": _terms_to_list(solution.q),
        "v": _terms_to_list(solution.v),
        "m": _terms_to_list(solution.m),
        "slope": _terms_to_list(solution.slope),
        "deflection": _terms_to_list(solution.deflection),
    }
