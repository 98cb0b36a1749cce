"""Command-line entry point: ``thlim <subcommand> ...``.

Every report starts with a header naming the subcommand, the verdict
semantics and the fully resolved run configuration, so identical
configurations give byte-identical output.  Exit codes: 0 success, 1 domain
failure (bad input data, unknown family, parse errors), 2 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import automorphisms as aut
from . import families as fams
from .evaluate import EvaluationError, evaluate, tabulate
from .games import ef_equivalent
from .io import DocumentError, load_chain, load_structure
from .limits import limit_report, oracle_matrix
from .parser import ParseError, parse_formula
from .pools import DEFAULT_SEED, PoolError, SentencePool, generate_pool, probe_set, type_pool
from .structure import StructureError
from .syntax import to_text


class DomainError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    inputs: dict = field(default_factory=dict)
    horizon: Optional[int] = None
    window: Optional[int] = None
    pool: Optional[str] = None
    budget: int = aut.DEFAULT_BUDGET
    seed: int = DEFAULT_SEED
    outputs: dict = field(default_factory=dict)

    def lines(self) -> list[str]:
        items = {"subcommand": self.subcommand, "budget": self.budget, "seed": self.seed}
        for key in ("horizon", "window", "pool"):
            val = getattr(self, key)
            if val is not None:
                items[key] = val
        items.update({f"input.{k}": v for k, v in self.inputs.items() if v is not None})
        items.update({f"output.{k}": v for k, v in self.outputs.items() if v is not None})
        return [f"{k}={items[k]}" for k in sorted(items)]


def _header(cfg: RunConfig, semantics: str) -> list[str]:
    return [f"# thlim {cfg.subcommand}", f"# semantics: {semantics}"] + [f"# config: {x}" for x in cfg.lines()]


def _ints(text: Optional[str]) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise DomainError(f"expected comma-separated integers, got {text!r}") from None


def _budget(args) -> int:
    if getattr(args, "budget", None) is not None:
        return args.budget
    return aut.default_budget()


def _params(items: Sequence[str]) -> dict:
    out = {}
    for item in items or ():
        key, sep, val = item.partition("=")
        if not sep:
            raise DomainError(f"family parameter {item!r} is not key=value")
        try:
            out[key] = int(val)
        except ValueError:
            raise DomainError(f"family parameter {key} must be an integer") from None
    return out


def _chain(args):
    """Chain from a catalog name or a chain file; returns (chain, family or None)."""
    if Path(args.family).is_file():
        chain = load_chain(args.family)
        if args.horizon is not None:
            if args.horizon > chain.length:
                raise DomainError(f"chain file has only {chain.length} members")
            chain = chain.subchain(range(1, args.horizon + 1))
        return chain, None
    fam = fams.get_family(args.family)
    if args.horizon is None:
        raise DomainError("--horizon is required for catalog families")
    return fams.build_chain(args.family, args.horizon, **_params(args.param)), fam


_POOL = re.compile(r"^rank(\d+)(?:,atoms(\d+))?$")


def _pool(spec: str, chain, fam, seed: int) -> SentencePool:
    m = _POOL.match(spec or "")
    if not m:
        raise DomainError(f"pool spec {spec!r} must look like rank<k> or rank<k>,atoms<b>")
    k = int(m.group(1))
    probes = probe_set(chain.signature, seed, extra=chain.members)
    pinned = fam.landmarks if fam else ()
    if m.group(2):
        return generate_pool(chain.signature, k, int(m.group(2)), probes=probes, pinned=pinned)
    return type_pool(chain.signature, k, probes=probes, pinned=pinned)


def _emit(lines: Sequence[str], out) -> None:
    out.write("\n".join(lines) + "\n")


# -- subcommands -------------------------------------------------------------

def cmd_families(args, out) -> int:
    cfg = RunConfig("families", {"action": args.action}, seed=args.seed, budget=_budget(args))
    lines = _header(cfg, "catalog listing")
    for fam in fams.family_catalog():
        schemas = ",".join(sorted(fam.schemas)) or "-"
        lines.append(f"{fam.name}\t{fam.kind}\t{fam.signature}\tschemas={schemas}\t{fam.description}")
    _emit(lines, out)
    return 0


def cmd_eval(args, out) -> int:
    cfg = RunConfig("eval", {"structure": args.structure, "family": args.family, "index": args.index,
                             "formula": args.formula}, seed=args.seed, budget=_budget(args))
    if args.structure:
        s = load_structure(args.structure)
    elif args.family and args.index:
        s = fams.get_family(args.family).member(args.index, **{**fams.get_family(args.family).defaults,
                                                               **_params(args.param)})
    else:
        raise DomainError("give --structure FILE or --family NAME --index n")
    f = parse_formula(args.formula, s.signature)
    val = evaluate(s, f)
    _emit(_header(cfg, "exact (finite structure)") + [f"formula: {to_text(f)}", f"result: {str(val).lower()}"], out)
    return 0


def _matrix_for(args, cfg):
    chain, fam = _chain(args)
    if args.formula:
        forms = [parse_formula(t, chain.signature) for t in args.formula]
        pool = SentencePool.explicit(chain.signature, forms)
        cfg.pool = "explicit"
    else:
        pool = _pool(args.pool, chain, fam, args.seed)
    matrix = tabulate(chain, pool, unresolved_false=getattr(args, "unresolved_false", False))
    return chain, pool, matrix


def cmd_tabulate(args, out) -> int:
    cfg = RunConfig("tabulate", {"family": args.family, "param": ",".join(args.param or []) or None},
                    horizon=args.horizon, pool=args.pool, seed=args.seed, budget=_budget(args))
    chain, pool, matrix = _matrix_for(args, cfg)
    lines = _header(cfg, "evaluated (finite members)") + [f"# pool: {pool.describe()}"]
    if pool.note:
        lines.append(f"# note: {pool.note}")
    out.write("\n".join(lines) + "\n" + matrix.to_tsv())
    return 0


def _oracle_limit(args, cfg, fam):
    if not fam.schemas:
        raise DomainError(f"{fam.name} has no oracle schemas")
    schema = args.schema or sorted(fam.schemas)[0]
    if schema not in fam.schemas:
        raise DomainError(f"{fam.name} has no schema {schema!r}")
    ms = _ints(args.params) or tuple(range(1, 6))
    cfg.inputs.update({"schema": schema, "params": ",".join(map(str, ms))})
    cfg.pool = f"schema:{schema}"
    return oracle_matrix(fam.name, schema, ms, args.horizon)


def cmd_limit(args, out) -> int:
    cfg = RunConfig("limit", {"family": args.family, "param": ",".join(args.param or []) or None},
                    horizon=args.horizon, window=args.window, pool=args.pool, seed=args.seed,
                    budget=_budget(args), outputs={"report": args.report})
    fam = None if Path(args.family).is_file() else fams.get_family(args.family)
    pool_note = ""
    if fam is not None and not fam.concrete:
        if args.horizon is None:
            raise DomainError("--horizon is required")
        matrix = _oracle_limit(args, cfg, fam)
        pool_desc = f"kind=oracle-schema size={len(matrix.sentences)}"
    else:
        _, pool, matrix = _matrix_for(args, cfg)
        pool_desc = pool.describe()
        pool_note = pool.note
    try:
        rep = limit_report(matrix, args.window)
    except ValueError as exc:
        raise DomainError(str(exc)) from None
    cfg.window = rep.window
    lines = _header(cfg, rep.semantics)
    lines.append(f"# pool: {pool_desc}")
    if pool_note:
        lines.append(f"# note: {pool_note}")
    for note in rep.notes:
        lines.append(f"# note: {note}")
    lines += [f"horizon: {rep.horizon}", f"window: {rep.window}",
              f"limitExists: {str(rep.limit_exists).lower()}",
              "class\texactness\twitnesses\tsentence"]
    for r, f in enumerate(matrix.sentences):
        wit = ",".join(map(str, rep.witnesses[r])) or "-"
        lines.append(f"{rep.classes[r]}\t{rep.exactness[r]}\t{wit}\t{to_text(f)}")
    _emit(lines, out)
    if args.report:
        Path(args.report).write_text(report_document(cfg, rep), encoding="utf-8")
    return 0


def report_document(cfg: RunConfig, rep) -> str:
    """Machine-readable limit report: key/value sections and one table."""
    m = rep.matrix
    lines = ["[config]"] + cfg.lines()
    lines += ["[summary]", f"horizon={rep.horizon}", f"window={rep.window}",
              f"limitExists={str(rep.limit_exists).lower()}", f"semantics={rep.semantics}",
              f"sentences={len(m.sentences)}"]
    lines.append("[matrix]")
    lines.append("sentence\tclass\texactness\t" + "\t".join(map(str, m.columns)))
    for r, f in enumerate(m.sentences):
        cells = "\t".join(m.cell_text(r, c) for c in range(m.horizon))
        lines.append(f"{to_text(f)}\t{rep.classes[r]}\t{rep.exactness[r]}\t{cells}")
    return "\n".join(lines) + "\n"


def _perm(p) -> str:
    return "[" + ",".join(map(str, p)) + "]"


def cmd_aut(args, out) -> int:
    budget = _budget(args)
    cfg = RunConfig("aut", {"structure": args.structure, "fix": args.fix, "carry": args.carry,
                            "target": args.target}, seed=args.seed, budget=budget)
    s = load_structure(args.structure)
    fix = _ints(args.fix)
    lines = _header(cfg, "exhaustive search within budget")
    if args.carry is not None or args.target is not None:
        if args.carry is None or args.target is None:
            raise DomainError("--carry and --target go together")
        res = aut.find_constrained_automorphism(s, fix, _ints(args.carry), _ints(args.target), budget=budget)
        if res.found:
            lines.append(f"result: found {_perm(res.automorphism)}")
        elif res.indeterminate:
            lines.append("result: indeterminate (budget exhausted)")
        else:
            lines.append("result: absent")
        lines.append(f"nodes: {res.nodes}")
    else:
        group = aut.enumerate_automorphisms(s, fix, budget=budget)
        lines += [f"count: {len(group)}", f"complete: {str(group.complete).lower()}", f"nodes: {group.nodes}"]
        lines += [_perm(g) for g in group.elements]
    _emit(lines, out)
    return 0


def _cert_lines(cert, chain, structures) -> list[str]:
    lines = [f"certificate constants={_perm(cert.constants)} member={cert.designated}",
             f"  status: {cert.status}"]
    if cert.chosen is not None:
        lines.append(f"  chosen: {cert.chosen} (size {structures[cert.chosen].size})")
        for key, ev in cert.evidence.items():
            for b, f in ev.items():
                lines.append(f"  evidence {key}: b={_perm(b)} f={_perm(f)}")
    for i, j, b in cert.failures:
        lines.append(f"  failure: i={i} j={j} b={_perm(b)}")
    for i, j in cert.indeterminate:
        lines.append(f"  indeterminate: i={i} j={j}")
    if cert.note:
        lines.append(f"  note: {cert.note}")
    return lines


def cmd_thma(args, out) -> int:
    budget = _budget(args)
    cfg = RunConfig("thma", {"family": args.family, "m": args.m, "cond": args.cond, "ambient": args.ambient,
                             "param": ",".join(args.param or []) or None},
                    horizon=args.horizon, seed=args.seed, budget=budget)
    chain, fam = _chain(args)
    structures = {chain.labels[k]: s for k, s in enumerate(chain.members)}
    if args.cond == 2:
        if args.ambient:
            ambient = load_structure(args.ambient)
        elif fam is not None:
            ambient = fam.member(chain.length + 1, **{**fam.defaults, **_params(args.param)})
            cfg.inputs["ambient"] = f"member {chain.length + 1} of {fam.name}"
        else:
            raise DomainError("--ambient is required for chain files")
        certs = aut.check_ambient_condition(chain, ambient, args.m, budget=budget)
        semantics = "horizon-relative; ambient is a finite stand-in for the limit structure"
    else:
        certs = aut.check_chain_condition(chain, args.m, budget=budget)
        semantics = "horizon-relative"
    lines = _header(cfg, semantics)
    statuses = [c.status for c in certs]
    lines.append(f"summary: {statuses.count('certified')} certified, {statuses.count('failed')} failed, "
                 f"{statuses.count('indeterminate')} indeterminate")
    for cert in certs:
        lines += _cert_lines(cert, chain, structures)
    _emit(lines, out)
    return 0


def cmd_efgame(args, out) -> int:
    cfg = RunConfig("efgame", {"left": args.left, "right": args.right, "rounds": args.rounds},
                    seed=args.seed, budget=_budget(args))
    a, b = load_structure(args.left), load_structure(args.right)
    verdict = "equivalent" if ef_equivalent(a, b, args.rounds) else "inequivalent"
    _emit(_header(cfg, "exact (finite game)") + [f"result: {verdict}"], out)
    return 0


def cmd_oracle(args, out) -> int:
    fam = fams.get_family(args.family)
    if args.schema not in fam.schemas:
        raise DomainError(f"{fam.name} has no schema {args.schema!r}")
    n = args.rank if args.rank is not None else args.n
    if n is None:
        raise DomainError("give --n (chain index) or --rank")
    cfg = RunConfig("oracle", {"family": fam.name, "schema": args.schema, "m": args.m, "n": n},
                    seed=args.seed, budget=_budget(args))
    sch = fam.schemas[args.schema]
    try:
        val = sch.decide(args.m, n)
    except ValueError as exc:
        raise DomainError(str(exc)) from None
    lines = _header(cfg, "oracle-exact")
    lines += [f"sentence: {to_text(sch.sentence(args.m))}", f"result: {str(val).lower()}",
              f"eventual: {sch.eventual(args.m)}", f"note: {sch.note}"]
    if fam.name == "free-abelian":
        alt = fams.weaker_rank_bound(args.m, n)
        lines.append(f"alternative bound rank < m-1: {str(alt).lower()} "
                     f"({'agrees' if alt == val else 'DISAGREES'} with the rank < m criterion)")
    _emit(lines, out)
    return 0


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for probe structures and samples")
    common.add_argument("--budget", type=int, default=None, help="search node budget (default: $THLIM_BUDGET or 10^7)")

    p = argparse.ArgumentParser(prog="thlim", description="Limits of first-order theories along finite chains.")
    sub = p.add_subparsers(dest="command", metavar="<subcommand>")
    sub.required = True

    sp = sub.add_parser("families", parents=[common], help="list the family catalog")
    sp.add_argument("action", choices=["list"])
    sp.set_defaults(func=cmd_families)

    sp = sub.add_parser("eval", parents=[common], help="evaluate a sentence in one structure")
    sp.add_argument("--structure")
    sp.add_argument("--family")
    sp.add_argument("--index", type=int)
    sp.add_argument("--param", action="append", default=[])
    sp.add_argument("--formula", required=True)
    sp.set_defaults(func=cmd_eval)

    def chain_args(sp):
        sp.add_argument("--family", required=True, help="catalog name or chain file")
        sp.add_argument("--horizon", type=int)
        sp.add_argument("--pool", default="rank2")
        sp.add_argument("--formula", action="append", default=[], help="explicit sentence (repeatable)")
        sp.add_argument("--param", action="append", default=[], help="family parameter key=value")
        sp.add_argument("--unresolved-false", action="store_true")

    sp = sub.add_parser("tabulate", parents=[common], help="truth matrix of a pool along a chain")
    chain_args(sp)
    sp.set_defaults(func=cmd_tabulate)

    sp = sub.add_parser("limit", parents=[common], help="limsup/liminf classification")
    chain_args(sp)
    sp.add_argument("--window", type=int)
    sp.add_argument("--report")
    sp.add_argument("--schema")
    sp.add_argument("--params", help="schema parameters for oracle families, e.g. 2,3,5")
    sp.set_defaults(func=cmd_limit)

    sp = sub.add_parser("aut", parents=[common], help="automorphisms of a structure")
    sp.add_argument("--structure", required=True)
    sp.add_argument("--fix")
    sp.add_argument("--carry")
    sp.add_argument("--target")
    sp.set_defaults(func=cmd_aut)

    sp = sub.add_parser("thma", parents=[common], help="check the automorphism conditions on a chain")
    sp.add_argument("--family", required=True)
    sp.add_argument("--horizon", type=int)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--cond", type=int, choices=[1, 2], default=1)
    sp.add_argument("--ambient")
    sp.add_argument("--param", action="append", default=[])
    sp.set_defaults(func=cmd_thma)

    sp = sub.add_parser("efgame", parents=[common], help="Ehrenfeucht-Fraisse game")
    sp.add_argument("--left", required=True)
    sp.add_argument("--right", required=True)
    sp.add_argument("--rounds", type=int, required=True)
    sp.set_defaults(func=cmd_efgame)

    sp = sub.add_parser("oracle", parents=[common], help="closed-form truth for oracle families")
    sp.add_argument("--family", required=True)
    sp.add_argument("--schema", required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--n", type=int)
    sp.add_argument("--rank", type=int)
    sp.set_defaults(func=cmd_oracle)
    return p


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(err):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "budget", None) is not None and args.budget < 1:
        err.write("thlim: --budget must be positive\n")
        return 2
    try:
        return args.func(args, out)
    except (DomainError, DocumentError, StructureError, ParseError, EvaluationError, PoolError,
            fams.UnknownFamilyError, fams.OracleOnlyFamilyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        err.write(f"thlim: error: {msg}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
