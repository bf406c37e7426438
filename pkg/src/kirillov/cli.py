"""Command line front end: algebra input, tables, polarizations, certification.

Algebras come from a builtin spec (``u:n:q``, ``trunc:q:m``,
``pattern:q:1-2,1-3``) or from a text file such as

    # Heisenberg algebra over F_3
    name: heis
    p: 3
    e: 1
    dim: 3
    1 2 -> [(3, 1)]

Product lines read ``i j -> [(k, c), ...]`` meaning e_i e_j = sum c e_k,
indices from 1; omitted products are zero.  ``modulus`` (low degree
first) is optional when e > 1.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import re
import sys
import time
from pathlib import Path

import numpy as np

from .algebra import Algebra, AlgebraError, builtin
from .chars import Engine, InconsistencyError
from .gf import FieldError, FieldSpec, get_field
from .group import DEFAULT_MAX_ORDER, BudgetExceeded
from .polar import (CertificationError, LinearCharacter, certify_irreducible_table,
                    clifford_branching_check, form_on, induce_linear, linear_character, polarize)

SCHEMA_VERSION = 1

log = logging.getLogger(__name__)


class InputError(ValueError):
    pass


# ---------------------------------------------------------------------------
# algebra input


_HEADER = re.compile(r"^(name|p|e|modulus|dim)\s*:\s*(.*)$")
_PRODUCT = re.compile(r"^(\d+)\s+(\d+)\s*->\s*(.*)$")
_TERM = re.compile(r"\(\s*(\d+)\s*,\s*([^()]+?)\s*\)")


def parse_algebra_text(text: str, source: str = "<input>") -> Algebra:
    header: dict[str, tuple[int, str]] = {}
    products: list[tuple[int, int, int, list[tuple[int, str]]]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        m = _HEADER.match(line)
        if m:
            if m.group(1) in header:
                raise InputError(f"{where}: duplicate field {m.group(1)!r}")
            header[m.group(1)] = (lineno, m.group(2).strip())
            continue
        m = _PRODUCT.match(line)
        if not m:
            raise InputError(f"{where}: cannot parse {raw.strip()!r}")
        body = m.group(3).strip()
        if body.startswith("["):
            if not body.endswith("]"):
                raise InputError(f"{where}: unbalanced brackets in {body!r}")
            body = body[1:-1].strip()
        terms = _TERM.findall(body)
        if _TERM.sub("", body).replace(",", "").strip():
            raise InputError(f"{where}: bad term list {m.group(3)!r}")
        products.append((lineno, int(m.group(1)), int(m.group(2)), [(int(k), c) for k, c in terms]))

    def get(name, required=True):
        if name not in header:
            if required:
                raise InputError(f"{source}: missing field {name!r}")
            return None, None
        return header[name]

    def as_int(name, required=True):
        lineno, value = get(name, required)
        if value is None:
            return None
        try:
            return int(value)
        except ValueError:
            raise InputError(f"{source}:{lineno}: {name} must be an integer, got {value!r}") from None

    p = as_int("p")
    e = as_int("e", required=False) or 1
    mod_line, mod_text = get("modulus", required=False)
    modulus = None
    if mod_text is not None:
        try:
            modulus = tuple(int(x) for x in mod_text.strip("[]()").split(",") if x.strip())
        except ValueError:
            raise InputError(f"{source}:{mod_line}: bad modulus {mod_text!r}") from None
    try:
        spec = FieldSpec(p, e, modulus)
    except FieldError as exc:
        raise InputError(f"{source}: invalid field spec: {exc}") from None
    gf = get_field(spec)
    n = as_int("dim")
    if n < 1:
        raise InputError(f"{source}: dim must be at least 1")

    table = np.zeros((n, n, n), dtype=np.int64)
    seen = {}
    for lineno, i, j, terms in products:
        where = f"{source}:{lineno}"
        for idx in (i, j, *(k for k, _ in terms)):
            if not 1 <= idx <= n:
                raise InputError(f"{where}: index {idx} outside 1..{n}")
        if (i, j) in seen:
            raise InputError(f"{where}: product {i} {j} already given on line {seen[i, j]}")
        seen[i, j] = lineno
        for k, c in terms:
            try:
                v = gf.parse(c)
            except FieldError as exc:
                raise InputError(f"{where}: {exc}") from None
            table[i - 1, j - 1, k - 1] = gf.add(int(table[i - 1, j - 1, k - 1]), v)
    name = get("name", required=False)[1]
    try:
        return Algebra(spec, table, name=name or Path(source).stem)
    except AlgebraError as exc:
        raise InputError(f"{source}: {exc}") from None


def parse_algebra(arg: str) -> Algebra:
    """A builtin spec ``family:params`` or a path to an algebra file."""
    path = Path(arg)
    if path.exists():
        return parse_algebra_text(path.read_text(), str(path))
    parts = arg.split(":")
    if len(parts) == 3 and parts[0] in ("u", "trunc", "pattern"):
        try:
            if parts[0] == "pattern":
                pairs = []
                for item in parts[2].split(","):
                    i, j = item.split("-")
                    pairs.append((int(i), int(j)))
                return builtin("pattern", int(parts[1]), pairs)
            return builtin(parts[0], int(parts[1]), int(parts[2]))
        except (ValueError, AlgebraError, FieldError) as exc:
            raise InputError(f"bad builtin spec {arg!r}: {exc}") from None
    raise InputError(f"{arg!r} is neither a file nor a builtin spec (u:n:q, trunc:q:m, pattern:q:i-j,...)")


# ---------------------------------------------------------------------------
# rendering


def fmt_vec(gf, v) -> str:
    return ",".join(gf.format(int(c)) for c in v)


def algebra_summary(alg: Algebra) -> dict:
    d = alg.to_dict()
    d["order"] = alg.q ** alg.n
    return d


def class_rows(engine: Engine) -> list[dict]:
    cl = engine.classes
    return [{"index": i, "rep": fmt_vec(engine.gf, r), "size": int(s)}
            for i, (r, s) in enumerate(zip(cl.reps, cl.sizes))]


def orbit_rows(engine: Engine) -> list[dict]:
    return [{"index": t, "rep": fmt_vec(engine.gf, o.rep), "size": o.size, "rank": o.rank,
             "degree": o.degree} for t, o in enumerate(engine.orbits)]


def table_cells(engine: Engine) -> list[list[str]]:
    return [phi.cells() for phi in engine.phis]


def _grid(rows: list[list[str]]) -> str:
    widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
    return "\n".join("  ".join(cell.rjust(w) for cell, w in zip(r, widths)).rstrip() for r in rows)


def render_table_text(engine: Engine) -> str:
    cells = table_cells(engine)
    k = len(engine.classes)
    rows = [["", "deg"] + [f"c{i}" for i in range(k)]]
    for t, row in enumerate(cells):
        rows.append([f"phi{t}", str(engine.orbits[t].degree)] + row)
    out = [_grid(rows), "", "classes:"]
    for c in class_rows(engine):
        out.append(f"  c{c['index']}: 1+({c['rep']})  size {c['size']}")
    if engine.p > 2:
        out.append(f"z = exp(2 pi i / {engine.p})")
    return "\n".join(out)


def render_table_csv(engine: Engine) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["orbit", "degree"] + [f"c{i}" for i in range(len(engine.classes))])
    for t, row in enumerate(table_cells(engine)):
        w.writerow([t, engine.orbits[t].degree] + row)
    return buf.getvalue().rstrip("\n")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)


# ---------------------------------------------------------------------------
# commands; each returns (text, exit code)


def cmd_orbits(engine: Engine, args) -> tuple[str, int]:
    rows = orbit_rows(engine)
    if args.json:
        return _dump({"schema_version": SCHEMA_VERSION, "command": "orbits",
                      "algebra": algebra_summary(engine.algebra), "orbits": rows}), 0
    lines = [f"{engine.algebra.name}: |G| = {engine.order}, {len(rows)} coadjoint orbits"]
    table = [["orbit", "size", "rank", "degree", "rep"]]
    table += [[str(r["index"]), str(r["size"]), str(r["rank"]), str(r["degree"]), r["rep"]] for r in rows]
    lines.append(_grid(table))
    return "\n".join(lines), 0


def cmd_table(engine: Engine, args) -> tuple[str, int]:
    if args.json:
        return _dump({"schema_version": SCHEMA_VERSION, "command": "table",
                      "algebra": algebra_summary(engine.algebra), "classes": class_rows(engine),
                      "orbits": orbit_rows(engine), "table": table_cells(engine)}), 0
    if args.csv:
        return render_table_csv(engine), 0
    return render_table_text(engine), 0


def parse_functional(gf, text: str, n: int) -> np.ndarray:
    parts = [s for s in text.split(",")]
    if len(parts) != n:
        raise InputError(f"--f needs {n} comma-separated coordinates, got {len(parts)}")
    try:
        return np.array([gf.parse(s) for s in parts], dtype=np.int64)
    except FieldError as exc:
        raise InputError(f"--f: {exc}") from None


def cmd_polarize(engine: Engine, args) -> tuple[str, int]:
    alg, gf = engine.algebra, engine.gf
    f = parse_functional(gf, args.f, alg.n)
    try:
        pol = polarize(alg, f)
    except CertificationError as exc:
        return f"FAIL {exc}", 1
    lam = linear_character(engine, pol, strict=False)
    mult = lam.multiplicativity_check()
    checks = {"dim_identity": 2 * pol.u.dim == alg.n + pol.rad.dim,
              "isotropic": not np.any(form_on(alg, f, pol.u.basis)),
              "mult_closed": alg.is_mult_closed(pol.u),
              "multiplicative": mult}
    if engine.order <= engine.group.max_order:
        t = engine.coadjoint.orbit_number(f)
        checks["induced_equals_phi"] = induce_linear(engine, lam) == engine.phis[t]
    code = 0 if all(checks.values()) else 1
    if args.json:
        d = {"schema_version": SCHEMA_VERSION, "command": "polarize",
             "algebra": algebra_summary(alg), "polarization": pol.to_dict(),
             "chain": [u.basis.tolist() for u in pol.chain], "checks": checks}
        return _dump(d), code
    lines = [f"f = ({fmt_vec(gf, f)})",
             "chain: " + " < ".join(f"<{'; '.join(fmt_vec(gf, v) for v in u.basis)}>" for u in pol.chain),
             "pieces:"]
    for i, r in enumerate(pol.pieces, 1):
        lines.append(f"  R_{i} = <{'; '.join(fmt_vec(gf, v) for v in r.basis)}>")
    lines.append(f"U = <{'; '.join(fmt_vec(gf, v) for v in pol.u.basis)}>")
    lines.append(f"dim U = {pol.u.dim} = ({alg.n} + {pol.rad.dim})/2")
    for name, ok in checks.items():
        lines.append(f"{'PASS' if ok else 'FAIL'} {name}")
    return "\n".join(lines), code


def recheck_witnesses(engine: Engine, report: dict) -> list[tuple[int, bool, str]]:
    """Re-verify witnesses from a saved ``verify --json`` report."""
    alg, gf = engine.algebra, engine.gf
    out = []
    for w in report.get("witnesses", []):
        t = int(w["orbit"])
        f = np.array(w["f"], dtype=np.int64)
        u = alg.subspace(np.array(w["u_basis"], dtype=np.int64).reshape(-1, alg.n))
        problems = []
        if not alg.is_mult_closed(u):
            problems.append("U not closed")
        if np.any(form_on(alg, f, u.basis)):
            problems.append("U not isotropic")
        if 2 * u.dim != alg.n + engine.coadjoint.radical(f).dim:
            problems.append("dimension identity")
        lam = LinearCharacter(engine.subgroup(u), f)
        if lam.table() != list(w["lambda_exponents"]):
            problems.append("lambda table")
        if induce_linear(engine, lam) != engine.phis[engine.coadjoint.orbit_number(f)]:
            problems.append("induced != phi")
        if engine.coadjoint.orbit_number(f) != t:
            problems.append("orbit index")
        out.append((t, not problems, ", ".join(problems)))
    return out


def cmd_verify(engine: Engine, args) -> tuple[str, int]:
    if args.witness:
        report = json.loads(Path(args.witness).read_text())
        res = recheck_witnesses(engine, report)
        code = 0 if res and all(ok for _, ok, _ in res) else 1
        lines = [f"{'PASS' if ok else 'FAIL'} witness orbit {t}{': ' + why if why else ''}"
                 for t, ok, why in res]
        lines.append(f"{sum(ok for _, ok, _ in res)}/{len(res)} witnesses re-verified")
        return "\n".join(lines), code
    cert = certify_irreducible_table(engine, threads=args.threads)
    code = 0 if cert.ok else 1
    if args.json:
        d = {"schema_version": SCHEMA_VERSION, "command": "verify",
             "algebra": algebra_summary(engine.algebra), "ok": cert.ok,
             "degrees": cert.degrees,
             "checks": [c.to_dict() for c in cert.checks],
             "witnesses": [w.to_dict() for w in cert.witnesses]}
        return _dump(d), code
    stages: dict[str, list] = {}
    for c in cert.checks:
        stages.setdefault(c.stage, []).append(c)
    lines = [f"{engine.algebra.name}: |G| = {engine.order}, {len(engine.orbits)} orbits, "
             f"degrees {sorted(cert.degrees)}"]
    for stage, cs in stages.items():
        bad = [c for c in cs if not c.passed]
        lines.append(f"{'PASS' if not bad else 'FAIL'} {stage} ({len(cs) - len(bad)}/{len(cs)})")
        for c in bad:
            where = "" if c.orbit is None else f"orbit {c.orbit}: "
            lines.append(f"    {where}{c.detail}")
    lines.append("certified" if cert.ok else "NOT certified")
    return "\n".join(lines), code


def cmd_branch(engine: Engine, args) -> tuple[str, int]:
    subs = engine.algebra.maximal_mult_closed_subspaces()
    if args.sample is not None:
        subs = subs[:args.sample]
    recs = clifford_branching_check(engine, subs)
    code = 0 if all(r.passed for r in recs) else 1
    if args.json:
        return _dump({"schema_version": SCHEMA_VERSION, "command": "branch",
                      "algebra": algebra_summary(engine.algebra),
                      "records": [r.to_dict() for r in recs]}), code
    gf = engine.gf
    lines = []
    for u in subs:
        key = u.basis.tolist()
        lines.append(f"H = 1 + <{'; '.join(fmt_vec(gf, v) for v in u.basis)}>")
        for r in (r for r in recs if r.u_basis == key):
            what = "irreducible on H" if r.case == "a" else "splits on H" if r.case == "b" else "?"
            lines.append(f"  {'PASS' if r.passed else 'FAIL'} phi{r.orbit}: ({r.case}) {what}, "
                         f"norm {r.norm}, constituents {r.constituents}{' ' + r.detail if r.detail else ''}")
    lines.append(f"{sum(r.passed for r in recs)}/{len(recs)} branching checks passed")
    return "\n".join(lines), code


COMMANDS = {"orbits": cmd_orbits, "table": cmd_table, "polarize": cmd_polarize,
            "verify": cmd_verify, "branch": cmd_branch}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kirillov",
                                 description="Character tables of finite algebra groups 1 + J.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("algebra", help="file path or builtin spec u:n:q, trunc:q:m, pattern:q:i-j,...")
    common.add_argument("--max-group-order", type=int, default=DEFAULT_MAX_ORDER,
                        help="refuse groups larger than this (default 2^20)")
    common.add_argument("--threads", type=int, default=1, help="worker threads for certification")
    common.add_argument("--quiet-timing", action="store_true", help="omit the timing footer")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("-o", "--output", help="write the report to this file instead of stdout")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("orbits", parents=[common], help="list coadjoint orbits")
    t = sub.add_parser("table", parents=[common], help="character table")
    t.add_argument("--csv", action="store_true")
    pz = sub.add_parser("polarize", parents=[common], help="polarization for one functional")
    pz.add_argument("--f", required=True, help="functional coordinates, e.g. 0,0,1")
    v = sub.add_parser("verify", parents=[common], help="certify the table")
    v.add_argument("--witness", help="re-check the witnesses of a saved verify --json report")
    b = sub.add_parser("branch", parents=[common], help="branching to maximal algebra subgroups")
    b.add_argument("--sample", type=int, help="only the first N maximal subgroups")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    start = time.perf_counter()
    try:
        alg = parse_algebra(args.algebra)
        engine = Engine.of(alg, args.max_group_order)
        engine.group.check_budget()
        text, code = COMMANDS[args.command](engine, args)
    except (InputError, BudgetExceeded, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CertificationError, InconsistencyError) as exc:
        print(f"FAIL {exc}", file=sys.stderr)
        return 1
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    if not args.quiet_timing:
        footer = f"-- timing: {time.perf_counter() - start:.2f} s --"
        # keep machine-readable output clean
        print(footer, file=sys.stderr if (args.json or args.output or getattr(args, "csv", False)) else sys.stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
