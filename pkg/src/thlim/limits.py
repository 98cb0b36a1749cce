"""Horizon-relative limsup/liminf of pool-restricted theories along a chain.

A row ``t_1..t_N`` is judged on its tail ``[N-w, N]``: it is cofinally true
when some tail entry is true and eventually true when every tail entry is.
Oracle-backed rows are classified from their declared eventual behaviour
instead, and tagged as exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .evaluate import ORACLE, UNRESOLVED, TruthMatrix
from .families import get_family
from .syntax import negate

IN_LIMINF = "in-liminf"
LIMSUP_ONLY = "in-limsup-only"
OUTSIDE = "outside-limsup"

HORIZON_RELATIVE = "horizon-relative"
ORACLE_EXACT = "oracle-exact"


def default_window(horizon: int) -> int:
    return max(1, math.ceil(horizon / 4))


def _tail(row, w):
    n = len(row)
    if n == 1:
        return row
    return row[max(0, n - w - 1):]


def limsup_member(row: Sequence[bool], w: int) -> bool:
    """Some entry in the observed tail is true."""
    return any(_tail(tuple(row), w))


def liminf_member(row: Sequence[bool], w: int) -> bool:
    """Every entry in the observed tail is true."""
    return all(_tail(tuple(row), w))


def change_points(row: Sequence[bool], labels: Sequence[int]) -> tuple[int, ...]:
    """Labels of the positions where the row differs from its predecessor."""
    return tuple(labels[k] for k in range(1, len(row)) if row[k] != row[k - 1])


@dataclass(frozen=True, eq=False)
class LimitReport:
    matrix: TruthMatrix
    window: int
    classes: tuple[str, ...]
    exactness: tuple[str, ...]
    witnesses: tuple[tuple[int, ...], ...]
    notes: tuple[str, ...] = ()

    @property
    def horizon(self) -> int:
        return self.matrix.horizon

    @property
    def limit_exists(self) -> bool:
        return LIMSUP_ONLY not in self.classes

    def classification(self, f) -> str:
        return self.classes[self.matrix.index_of(f)]

    @property
    def limsup(self) -> frozenset[int]:
        return frozenset(r for r, c in enumerate(self.classes) if c != OUTSIDE)

    @property
    def liminf(self) -> frozenset[int]:
        return frozenset(r for r, c in enumerate(self.classes) if c == IN_LIMINF)

    @property
    def semantics(self) -> str:
        kinds = sorted(set(self.exactness))
        return "+".join(kinds) if kinds else HORIZON_RELATIVE


def _oracle_class(ev) -> str:
    if ev.kind == "true-from":
        return IN_LIMINF
    if ev.kind == "false-from":
        return OUTSIDE
    return LIMSUP_ONLY


def limit_report(matrix: TruthMatrix, window: Optional[int] = None) -> LimitReport:
    """Classify every row.  A one-column matrix ignores the window."""
    n = matrix.horizon
    notes = []
    if n == 1:
        if window not in (None, 1):
            notes.append("single-column matrix: window ignored")
        w = 1
    else:
        w = default_window(n) if window is None else window
        if not 1 <= w < n:
            raise ValueError(f"window must satisfy 1 <= w < N (got w={w}, N={n})")
    classes, exact, wits = [], [], []
    for r in range(len(matrix.sentences)):
        row = matrix.row(r)
        ev = matrix.eventual[r]
        if matrix.is_oracle_row(r) and ev is not None:
            cls = _oracle_class(ev)
            exact.append(ORACLE_EXACT)
        else:
            if liminf_member(row, w):
                cls = IN_LIMINF
            elif limsup_member(row, w):
                cls = LIMSUP_ONLY
            else:
                cls = OUTSIDE
            exact.append(HORIZON_RELATIVE)
        classes.append(cls)
        wits.append(() if cls == IN_LIMINF else change_points(row, matrix.columns))
    if any(p == UNRESOLVED for prow in matrix.provenance for p in prow):
        notes.append("cells marked U name constants not yet interpreted and count as false")
    return LimitReport(matrix, w, tuple(classes), tuple(exact), tuple(wits), tuple(notes))


# -- consistency / completeness relative to a negation-closed pool ----------

@dataclass(frozen=True)
class Clause:
    name: str
    passed: bool
    detail: str = ""
    counterexamples: tuple = ()


@dataclass(frozen=True, eq=False)
class EquivalenceReport:
    report: LimitReport
    clauses: tuple[Clause, ...]
    values: dict = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses)

    def clause(self, name: str) -> Clause:
        for c in self.clauses:
            if c.name == name:
                return c
        raise KeyError(name)


def _inconsistent_rows(rows: frozenset, partner) -> tuple:
    return tuple(sorted(r for r in rows if partner[r] in rows and r < partner[r]))


def _incomplete_rows(rows: frozenset, partner) -> tuple:
    return tuple(sorted(r for r in range(len(partner)) if r not in rows and partner[r] not in rows and r < partner[r]))


def check_limit_equivalences(matrix: TruthMatrix, window: Optional[int] = None) -> EquivalenceReport:
    """Check the consistency/completeness facts for limits of complete
    consistent theories, using pool-relative notions.

    Clauses:
      ``columns``        every column is pool-consistent and pool-complete
      ``liminf-consistent``, ``limsup-complete``
      ``limsup-complete-criterion``  limsup complete iff each pair is hit cofinally
      ``liminf-complete-criterion``  liminf complete iff each pair settles in the tail
      ``three-way``      limsup consistent, liminf complete and limit existence agree
    """
    if not matrix.closed_under_negation:
        raise ValueError("the pool must pair every sentence with its negation")
    rep = limit_report(matrix, window)
    partner = matrix.partner
    label = lambda r: matrix.sentences[r]  # noqa: E731
    clauses = []

    bad_cols = []
    for c in range(matrix.horizon):
        for r in range(len(partner)):
            p = partner[r]
            if r < p and matrix.cells[r][c] == matrix.cells[p][c]:
                if matrix.provenance[r][c] == UNRESOLVED or matrix.provenance[p][c] == UNRESOLVED:
                    continue
                bad_cols.append((matrix.columns[c], label(r)))
    clauses.append(Clause("columns", not bad_cols,
                          "each column decides every pair exactly once", tuple(bad_cols)))

    inc = _inconsistent_rows(rep.liminf, partner)
    clauses.append(Clause("liminf-consistent", not inc, "", tuple(label(r) for r in inc)))
    gaps = _incomplete_rows(rep.limsup, partner)
    clauses.append(Clause("limsup-complete", not gaps, "", tuple(label(r) for r in gaps)))

    sup_complete = not gaps
    crit3 = all(
        any(a or b for a, b in zip(_tail(matrix.row(r), rep.window), _tail(matrix.row(partner[r]), rep.window)))
        for r in range(len(partner))
    ) if not any(e == ORACLE_EXACT for e in rep.exactness) else sup_complete
    clauses.append(Clause("limsup-complete-criterion", crit3 == sup_complete,
                          f"criterion={crit3} direct={sup_complete}"))

    inf_complete = not _incomplete_rows(rep.liminf, partner)
    crit4 = all(rep.classes[r] == IN_LIMINF or rep.classes[partner[r]] == IN_LIMINF for r in range(len(partner)))
    clauses.append(Clause("liminf-complete-criterion", crit4 == inf_complete,
                          f"criterion={crit4} direct={inf_complete}"))

    sup_consistent = not _inconsistent_rows(rep.limsup, partner)
    exists = rep.limit_exists
    vals = {"limsup-consistent": sup_consistent, "liminf-complete": inf_complete, "limit-exists": exists}
    cex = () if len(set(vals.values())) == 1 else tuple(
        label(r) for r in _inconsistent_rows(rep.limsup, partner))
    clauses.append(Clause("three-way", len(set(vals.values())) == 1,
                          " ".join(f"{k}={v}" for k, v in vals.items()), cex))
    notes = (
        "consistency of limsup/liminf via eventual consistency of the columns is only "
        "checked in its degenerate form: every column comes from a structure",
    )
    return EquivalenceReport(rep, tuple(clauses), vals, notes)


def extract_convergent_subchain(matrix: TruthMatrix) -> list[int]:
    """Column labels of a subchain along which every row is constant.

    Rows are processed in pool order; each keeps the larger of its true, false
    and unresolved classes among the surviving columns (ties: true, false,
    unresolved).
    """
    if matrix.horizon < 1:
        raise ValueError("matrix has no columns")
    alive = list(range(matrix.horizon))
    for r in range(len(matrix.sentences)):
        groups = {"T": [], "F": [], "U": []}
        for c in alive:
            groups[matrix.cell_text(r, c)].append(c)
        alive = max(groups.values(), key=len)
        for k in ("T", "F", "U"):
            if len(groups[k]) == len(alive):
                alive = groups[k]
                break
    return [matrix.columns[c] for c in alive]


# -- oracle-backed matrices --------------------------------------------------

def oracle_matrix(family: str, schema: str, params: Sequence[int], horizon: int) -> TruthMatrix:
    """Rows for schema instances and their negations, cells from the oracle."""
    fam = get_family(family)
    sch = fam.schemas[schema]
    sentences, cells, eventual, partner = [], [], [], []
    for m in params:
        f = sch.sentence(m)
        row = tuple(sch.decide(m, n) for n in range(1, horizon + 1))
        ev = sch.eventual(m)
        k = len(sentences)
        sentences.extend([f, negate(f)])
        cells.extend([row, tuple(not v for v in row)])
        eventual.extend([ev, _flip(ev)])
        partner.extend([k + 1, k])
    prov = tuple((ORACLE,) * horizon for _ in sentences)
    return TruthMatrix(tuple(sentences), tuple(range(1, horizon + 1)), tuple(cells), prov,
                       tuple(partner), family, tuple(eventual))


def _flip(ev):
    from .families import Eventually

    kind = {"true-from": "false-from", "false-from": "true-from"}.get(ev.kind, ev.kind)
    return Eventually(kind, ev.start, ev.description)


def first_change(row: Sequence[bool]) -> Optional[int]:
    """1-based position of the first entry differing from the first one."""
    for k in range(1, len(row)):
        if row[k] != row[0]:
            return k + 1
    return None
