"""Exact rational linear programming and integral-polytope decomposition.

A small two-phase simplex over `fractions.Fraction` with Bland's rule (no
cycling, no tolerances).  It is meant for desk-scale programs: the polytopes
used by the scheduling algorithms, the prize-collecting assignment LP, and the
best-lottery LP of the general setting.

`decompose` writes a rational point of a polytope with integral extreme points
as an exact convex combination of integral points, by repeatedly peeling off a
vertex of the minimal face containing the current residual.  The weights feed
lex-truthfulness checks, which is why everything stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import DomainError, StructuralError, UnboundedError

LE, GE, EQ = "<=", ">=", "=="
_SENSES = (LE, GE, EQ)


@dataclass(frozen=True)
class Constraint:
    coeffs: dict
    sense: str
    rhs: Fraction

    def value(self, x: Mapping) -> Fraction:
        return sum((c * x[v] for v, c in self.coeffs.items()), Fraction(0))

    def satisfied(self, x: Mapping) -> bool:
        v = self.value(x)
        return v <= self.rhs if self.sense == LE else v >= self.rhs if self.sense == GE else v == self.rhs

    def tight(self, x: Mapping) -> bool:
        return self.value(x) == self.rhs


@dataclass
class RationalLP:
    """Variables with rational bounds, linear constraints, optional objective."""

    variables: list = field(default_factory=list)
    bounds: dict = field(default_factory=dict)
    constraints: list = field(default_factory=list)
    objective: tuple | None = None  # ("max"|"min", {var: coeff})

    def add_variable(self, name, lo=Fraction(0), hi=None):
        if name in self.bounds:
            raise DomainError(f"duplicate variable {name!r}")
        lo = None if lo is None else Fraction(lo)
        hi = None if hi is None else Fraction(hi)
        if lo is not None and hi is not None and lo > hi:
            raise DomainError(f"bounds for {name!r} are inconsistent: {lo} > {hi}")
        self.variables.append(name)
        self.bounds[name] = (lo, hi)
        return name

    def add_constraint(self, coeffs: Mapping, sense: str, rhs) -> None:
        if sense not in _SENSES:
            raise DomainError(f"unknown sense {sense!r}")
        unknown = [v for v in coeffs if v not in self.bounds]
        if unknown:
            raise DomainError(f"constraint mentions unknown variables {unknown!r}")
        self.constraints.append(
            Constraint({v: Fraction(c) for v, c in coeffs.items() if c}, sense, Fraction(rhs))
        )

    def set_objective(self, sense: str, coeffs: Mapping) -> None:
        if sense not in ("max", "min"):
            raise DomainError(f"objective sense must be 'max' or 'min', got {sense!r}")
        self.objective = (sense, {v: Fraction(c) for v, c in coeffs.items()})

    def is_feasible_point(self, x: Mapping) -> bool:
        for v in self.variables:
            lo, hi = self.bounds[v]
            if lo is not None and x[v] < lo:
                return False
            if hi is not None and x[v] > hi:
                return False
        return all(c.satisfied(x) for c in self.constraints)

    def copy(self) -> "RationalLP":
        clone = RationalLP()
        clone.variables = list(self.variables)
        clone.bounds = dict(self.bounds)
        clone.constraints = list(self.constraints)
        clone.objective = self.objective
        return clone

    def dump(self) -> str:
        """Canonical-form text, for debugging."""
        lines = []
        if self.objective:
            sense, coeffs = self.objective
            body = " + ".join(f"{c}*{v}" for v, c in sorted(coeffs.items(), key=lambda kv: str(kv[0])))
            lines.append(f"{sense} {body or '0'}")
        for c in self.constraints:
            body = " + ".join(f"{co}*{v}" for v, co in sorted(c.coeffs.items(), key=lambda kv: str(kv[0])))
            lines.append(f"  {body or '0'} {c.sense} {c.rhs}")
        for v in self.variables:
            lo, hi = self.bounds[v]
            lines.append(f"  {lo if lo is not None else '-inf'} <= {v} <= {hi if hi is not None else '+inf'}")
        return "\n".join(lines)

    def solve(self) -> "LPSolution":
        return _solve(self)


@dataclass(frozen=True)
class LPSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    values: dict
    objective_value: Fraction | None

    def __getitem__(self, var) -> Fraction:
        return self.values[var]


# ---------------------------------------------------------------------------
# Two-phase simplex on the standard form  min c.x  s.t.  A x = b, x >= 0.
# ---------------------------------------------------------------------------


def _solve(lp: RationalLP) -> LPSolution:
    # Shift/substitute variables so every structural variable is >= 0.
    # col_map[var] = (kind, data): recover original value from standard-form cols.
    cols: list = []  # one entry per standard-form column (owner var or tag)
    col_map: dict = {}
    rows: list[tuple[dict, str, Fraction]] = []

    def new_col(tag) -> int:
        cols.append(tag)
        return len(cols) - 1

    for v in lp.variables:
        lo, hi = lp.bounds[v]
        if lo is not None:
            c = new_col(("shift", v, lo))
            col_map[v] = ("shift", c, lo)
            if hi is not None:
                rows.append(({c: Fraction(1)}, LE, hi - lo))
        elif hi is not None:
            c = new_col(("mirror", v, hi))
            col_map[v] = ("mirror", c, hi)
        else:
            cp, cn = new_col(("free+", v)), new_col(("free-", v))
            col_map[v] = ("free", cp, cn)

    def to_cols(coeffs: Mapping) -> tuple[dict, Fraction]:
        """Rewrite a row over original vars into standard-form columns; returns (row, rhs_shift)."""
        row: dict = {}
        shift = Fraction(0)
        for v, a in coeffs.items():
            kind = col_map[v]
            if kind[0] == "shift":
                _, c, lo = kind
                row[c] = row.get(c, Fraction(0)) + a
                shift += a * lo
            elif kind[0] == "mirror":
                _, c, hi = kind
                row[c] = row.get(c, Fraction(0)) - a
                shift += a * hi
            else:
                _, cp, cn = kind
                row[cp] = row.get(cp, Fraction(0)) + a
                row[cn] = row.get(cn, Fraction(0)) - a
        return row, shift

    for con in lp.constraints:
        row, shift = to_cols(con.coeffs)
        rows.append((row, con.sense, con.rhs - shift))

    n_struct = len(cols)
    tableau: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    basis: list[int] = []
    artificials: list[int] = []

    # Slack / artificial columns, one pass so each row gets a starting basic column.
    aug_cols: list[tuple[int, str]] = []  # (row_index, "slack"|"artificial")
    for row, sense, b in rows:
        if b < 0:
            row = {c: -a for c, a in row.items()}
            b = -b
            sense = LE if sense == GE else GE if sense == LE else EQ
        tableau.append([row.get(c, Fraction(0)) for c in range(n_struct)])
        rhs.append(b)
        if sense == LE:
            aug_cols.append((len(tableau) - 1, "slack+"))
        elif sense == GE:
            aug_cols.append((len(tableau) - 1, "slack-"))
        else:
            aug_cols.append((len(tableau) - 1, "art"))

    n_total = n_struct
    for r, kind in aug_cols:
        if kind == "slack+":
            col = n_total
            n_total += 1
            for i, trow in enumerate(tableau):
                trow.append(Fraction(1) if i == r else Fraction(0))
            basis.append(col)
        elif kind == "slack-":
            scol, acol = n_total, n_total + 1
            n_total += 2
            for i, trow in enumerate(tableau):
                trow.append(Fraction(-1) if i == r else Fraction(0))
                trow.append(Fraction(1) if i == r else Fraction(0))
            basis.append(acol)
            artificials.append(acol)
        else:
            col = n_total
            n_total += 1
            for i, trow in enumerate(tableau):
                trow.append(Fraction(1) if i == r else Fraction(0))
            basis.append(col)
            artificials.append(col)

    art_set = set(artificials)

    def pivot(prow: int, pcol: int) -> None:
        piv = tableau[prow][pcol]
        inv = Fraction(1) / piv
        tableau[prow] = [a * inv for a in tableau[prow]]
        rhs[prow] *= inv
        for i in range(len(tableau)):
            if i == prow:
                continue
            f = tableau[i][pcol]
            if f:
                trow, prow_vec = tableau[i], tableau[prow]
                tableau[i] = [a - f * b for a, b in zip(trow, prow_vec)]
                rhs[i] -= f * rhs[prow]
        basis[prow] = pcol

    def bland(cost: list[Fraction], allowed) -> Fraction:
        """Bland-rule simplex minimizing ``cost`` over the current tableau."""
        while True:
            entering = -1
            basis_pos = {b: i for i, b in enumerate(basis)}
            for j in range(n_total):
                if j in basis_pos or not allowed(j):
                    continue
                red = cost[j] - sum((cost[basis[i]] * tableau[i][j] for i in range(len(tableau))), Fraction(0))
                if red < 0:
                    entering = j
                    break
            if entering < 0:
                return sum((cost[basis[i]] * rhs[i] for i in range(len(tableau))), Fraction(0))
            leaving, best = -1, None
            for i in range(len(tableau)):
                a = tableau[i][entering]
                if a > 0:
                    ratio = rhs[i] / a
                    if best is None or ratio < best or (ratio == best and basis[i] < basis[leaving]):
                        best, leaving = ratio, i
            if leaving < 0:
                raise UnboundedError("objective unbounded")
            pivot(leaving, entering)

    # Phase 1: minimize sum of artificials.
    if artificials:
        cost1 = [Fraction(1) if j in art_set else Fraction(0) for j in range(n_total)]
        opt1 = bland(cost1, lambda j: True)
        if opt1 != 0:
            return LPSolution("infeasible", {}, None)
        # Drive remaining artificials out of the basis (degenerate rows).
        for i in list(range(len(tableau))):
            if basis[i] in art_set:
                repl = next(
                    (j for j in range(n_total) if j not in art_set and tableau[i][j] != 0),
                    None,
                )
                if repl is not None:
                    pivot(i, repl)
        # Any row still basic in an artificial is all-zero: redundant, freeze it.

    # Phase 2.
    cost2 = [Fraction(0)] * n_total
    obj_shift = Fraction(0)
    sense = "min"
    if lp.objective is not None:
        sense, coeffs = lp.objective
        row, shift = to_cols(coeffs)
        obj_shift = shift
        sgn = Fraction(-1) if sense == "max" else Fraction(1)
        for c, a in row.items():
            cost2[c] = sgn * a
    try:
        opt2 = bland(cost2, lambda j: j not in art_set)
    except UnboundedError:
        return LPSolution("unbounded", {}, None)

    col_values = [Fraction(0)] * n_total
    for i, b in enumerate(basis):
        col_values[b] = rhs[i]
    values: dict = {}
    for v in lp.variables:
        kind = col_map[v]
        if kind[0] == "shift":
            values[v] = kind[2] + col_values[kind[1]]
        elif kind[0] == "mirror":
            values[v] = kind[2] - col_values[kind[1]]
        else:
            values[v] = col_values[kind[1]] - col_values[kind[2]]
    objective_value = None
    if lp.objective is not None:
        objective_value = (-opt2 if lp.objective[0] == "max" else opt2) + obj_shift
    return LPSolution("optimal", values, objective_value)


# ---------------------------------------------------------------------------
# Integral convex decomposition.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvexDecomposition:
    """Integral points and positive weights with  sum w_t * y_t == target  exactly."""

    points: tuple[dict, ...]
    weights: tuple[Fraction, ...]

    def recompose(self) -> dict:
        acc = {v: Fraction(0) for v in self.points[0]}
        for w, pt in zip(self.weights, self.points):
            for v, val in pt.items():
                acc[v] += w * val
        return acc


def _is_integral(x: Mapping) -> bool:
    return all(Fraction(val).denominator == 1 for val in x.values())


def _minimal_face(lp: RationalLP, z: Mapping) -> RationalLP:
    """The LP restricted to the smallest face of its polytope containing ``z``."""
    face = RationalLP()
    for v in lp.variables:
        lo, hi = lp.bounds[v]
        if (lo is not None and z[v] == lo) or (hi is not None and z[v] == hi):
            face.add_variable(v, z[v], z[v])
        else:
            face.add_variable(v, lo, hi)
    for c in lp.constraints:
        face.add_constraint(c.coeffs, EQ if c.tight(z) else c.sense, c.rhs)
    return face


def decompose(target: Mapping, polytope: RationalLP) -> ConvexDecomposition:
    """Express ``target`` as an exact convex combination of integral polytope points.

    Requires ``target`` to be feasible and the polytope to have integral extreme
    points (e.g. its tight systems come from two laminar families, cf.
    :func:`verify_tu_laminar`).  Raises :class:`StructuralError` if a peeled
    vertex comes out fractional, which signals that assumption failed.
    """
    z = {v: Fraction(target[v]) for v in polytope.variables}
    if not polytope.is_feasible_point(z):
        raise DomainError("target is not a feasible point of the polytope")

    points: list[dict] = []
    weights: list[Fraction] = []
    remaining = Fraction(1)
    max_rounds = len(polytope.variables) + len(polytope.constraints) + 2

    for _ in range(max_rounds):
        if _is_integral(z):
            points.append(dict(z))
            weights.append(remaining)
            break
        face = _minimal_face(polytope, z)
        steer = {v: z[v] - (z[v].numerator // z[v].denominator) for v in polytope.variables}
        face.set_objective("max", steer)
        sol = face.solve()
        if sol.status != "optimal":
            raise StructuralError(f"face subproblem came back {sol.status}")
        y = sol.values
        if not _is_integral(y):
            raise StructuralError("non-integral vertex: polytope is not integral as assumed")
        d = {v: z[v] - y[v] for v in polytope.variables}
        theta = _max_step(polytope, z, d)
        lam = theta / (1 + theta)
        points.append({v: Fraction(y[v]) for v in polytope.variables})
        weights.append(remaining * lam)
        z = {v: z[v] + theta * d[v] for v in polytope.variables}
        remaining *= 1 - lam
    else:
        raise StructuralError("decomposition failed to terminate")

    deco = ConvexDecomposition(tuple(points), tuple(weights))
    if sum(deco.weights, Fraction(0)) != 1 or any(w <= 0 for w in deco.weights):
        raise StructuralError("decomposition weights are not a convex combination")
    if deco.recompose() != {v: Fraction(target[v]) for v in polytope.variables}:
        raise StructuralError("decomposition does not recompose the target")
    for pt in deco.points:
        if not polytope.is_feasible_point(pt):
            raise StructuralError("decomposition emitted an infeasible point")
    return deco


def _max_step(lp: RationalLP, z: Mapping, d: Mapping) -> Fraction:
    """Largest theta with z + theta*d still feasible (constraints tight at z impose none)."""
    if all(v == 0 for v in d.values()):
        raise StructuralError("zero direction while residual is fractional")
    theta = None
    for v in lp.variables:
        lo, hi = lp.bounds[v]
        dv = d[v]
        if dv > 0 and hi is not None:
            cand = (hi - z[v]) / dv
            theta = cand if theta is None else min(theta, cand)
        elif dv < 0 and lo is not None:
            cand = (z[v] - lo) / -dv
            theta = cand if theta is None else min(theta, cand)
    for c in lp.constraints:
        dv = sum((a * d[v] for v, a in c.coeffs.items()), Fraction(0))
        if c.sense == LE and dv > 0:
            cand = (c.rhs - c.value(z)) / dv
            theta = cand if theta is None else min(theta, cand)
        elif c.sense == GE and dv < 0:
            cand = (c.value(z) - c.rhs) / -dv
            theta = cand if theta is None else min(theta, cand)
    if theta is None:
        raise StructuralError("direction is unbounded: polytope assumption violated")
    if theta <= 0:
        raise StructuralError("zero step in decomposition")
    return theta


# ---------------------------------------------------------------------------
# Laminar-structure check.
# ---------------------------------------------------------------------------


def verify_tu_laminar(lp: RationalLP) -> bool:
    """True iff the constraint supports can be split into two laminar families.

    Two supports *cross* when they overlap but neither contains the other;
    a family is laminar when no two of its members cross.  Splitting into two
    laminar families is exactly 2-coloring the crossing graph, and equality
    systems drawn from two laminar families are totally unimodular, which is
    the structural condition the scheduling polytopes rely on.  Full TU (all
    minors in {0, +-1}) is not tested here.
    """
    supports = [frozenset(c.coeffs) for c in lp.constraints if c.coeffs]
    n = len(supports)
    crossing = [[] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            a, b = supports[i], supports[j]
            if (a & b) and not (a <= b) and not (b <= a):
                crossing[i].append(j)
                crossing[j].append(i)
    color = [None] * n
    for start in range(n):
        if color[start] is not None:
            continue
        color[start] = 0
        queue = [start]
        while queue:
            u = queue.pop()
            for w in crossing[u]:
                if color[w] is None:
                    color[w] = 1 - color[u]
                    queue.append(w)
                elif color[w] == color[u]:
                    return False
    return True
