"""Command-line front end.

Inputs are JSON files (lattice or ring, told apart by their keys) or the
shorthands ``catalog:NAME`` (M3, N5, F2^3, ...) and ``ring:NAME`` (Z4, M2F2,
M3F2, ...).  Exit status: 0 every check passed, 1 a check failed, 2 the
input was rejected.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
import time
from pathlib import Path

import numpy as np

from . import biorder as bo
from . import oplus as op
from . import ring as rg
from .catalog import catalog
from .errors import InputError, NotComplementedModular, ParseError, UnknownElement
from .iso import find_isomorphism
from .lattice import (
    FiniteLattice,
    check_lattice_tables,
    dot_hasse,
    dumps_canonical,
    is_complemented,
    is_modular,
    lattice_from_json,
    lattice_to_json,
)
from .report import RunReport, digest
from .semigroup import DEFAULT_CAP, NVPair, generate_PL, idempotent_pairs

log = logging.getLogger("cmlcoord")

MATRIX_LIMIT = 64  # relation matrices are printed only up to this size


# -- input ---------------------------------------------------------------------


def _ring_shorthand(name, cap):
    m = re.fullmatch(r"Z(\d+)", name)
    if m:
        return rg.zmod(int(m[1]))
    m = re.fullmatch(r"M(\d+)F(\d+)", name)
    if m:
        return rg.matrix_ring(int(m[2]), int(m[1]), cap)
    if name.startswith("F") and name[1:].isdigit():
        return rg.matrix_ring(int(name[1:]), 1, cap)
    raise ParseError(f"unknown ring {name!r} (use Zm, Fq or MkFq)")


def load_input(ref: str, cap=None):
    """Return (kind, object, provenance) with kind "lattice" or "ring"."""
    ring_cap = cap if cap is not None else rg.RING_CAP
    if ref.startswith("catalog:"):
        return "lattice", catalog(ref[8:]), {"source": ref, "sha256": digest(ref)}
    if ref.startswith("ring:"):
        return "ring", _ring_shorthand(ref[5:], ring_cap), {"source": ref, "sha256": digest(ref)}
    path = Path(ref)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {ref}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{ref}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    prov = {"source": path.name, "sha256": digest(text)}
    if isinstance(data, dict) and ("matrix_ring" in data or "add" in data or "mul" in data):
        return "ring", rg.ring_from_json(data, ring_cap), prov
    return "lattice", lattice_from_json(data), prov


def _expect(kind, want, ref):
    if kind != want:
        raise ParseError(f"{ref} is a {kind}, expected a {want}")


def parse_pair(L: FiniteLattice, text: str) -> NVPair:
    """'(n;v)' or 'n;v', each side a label or an index."""
    s = text.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    parts = s.split(";")
    if len(parts) != 2:
        raise ParseError(f"element {text!r} must look like (n;v)")
    return NVPair(L.index(parts[0].strip()), L.index(parts[1].strip()))


def parse_ring_element(R, text: str) -> int:
    text = text.strip()
    if isinstance(R, rg.MatrixRing):
        m = re.fullmatch(r"E(\d)(\d)", text)
        if m:
            r, c = int(m[1]) - 1, int(m[2]) - 1
            if not (0 <= r < R.k and 0 <= c < R.k):
                raise UnknownElement(f"{text} is outside M_{R.k}")
            return R.matrix_unit(r, c)
        if text in ("0", "1"):
            return R.zero if text == "0" else R.one
        if "/" in text:
            rows = text.split("/")
            try:
                m = np.array([[int(ch) for ch in row] for row in rows])
            except ValueError:
                raise UnknownElement(f"bad matrix {text!r}") from None
            if m.shape != (R.k, R.k) or (m >= R.q).any():
                raise UnknownElement(f"bad matrix {text!r}")
            return int(R.encode(m))
    if isinstance(R, rg.TableRing) and text in R.labels:
        return R.labels.index(text)
    try:
        a = int(text)
    except ValueError:
        raise UnknownElement(f"unknown ring element {text!r}") from None
    if not 0 <= a < R.size:
        raise UnknownElement(f"ring element {a} out of range")
    return a


def _write_dot(path, text):
    if path:
        Path(path).write_text(text)


def _matrix(a):
    return [[int(x) for x in row] for row in np.asarray(a)]


# -- commands ------------------------------------------------------------------


def cmd_validate(args, rep: RunReport):
    kind, obj, prov = load_input(args.input, args.cap)
    rep.inputs.append(prov)
    rep.data["kind"] = kind
    if kind == "lattice":
        L = obj
        rep.data.update(n=L.n, covers=len(L.covers), height=max(L.heights))
        ok, w = check_lattice_tables(L)
        rep.add("lattice tables consistent", ok, w)
        ok, w = is_modular(L)
        rep.add("modular", ok, _labels(L, w))
        ok, w = is_complemented(L)
        rep.add("complemented", ok, _labels(L, w))
        _write_dot(args.dot, dot_hasse(L))
    else:
        R = obj
        rep.data.update(n=R.size, idempotents=len(rg.ring_idempotents(R)))
        rep.add("ring axioms", True)
        ok, w = rg.is_regular_ring(R)
        rep.add("regular", ok, None if ok else R.label(w))


def _labels(L, w):
    if w is None:
        return None
    if isinstance(w, (tuple, list)):
        return [L.label(x) for x in w]
    return L.label(w)


def _biorder_for(kind, obj):
    if kind == "lattice":
        return bo.build_biorder(obj)
    return rg.ring_biorder(obj)


def cmd_biorder(args, rep: RunReport):
    kind, obj, prov = load_input(args.input, args.cap)
    rep.inputs.append(prov)
    E = _biorder_for(kind, obj)
    rep.data["elements"] = len(E)
    if len(E) <= MATRIX_LIMIT or args.matrices:
        rep.data["labels"] = [E.label(i) for i in range(len(E))]
        rep.data["omega_l"] = _matrix(E.omega_l.astype(int))
        rep.data["omega_r"] = _matrix(E.omega_r.astype(int))
    _run_axioms(E, rep)
    if args.semigroup and kind == "lattice":
        L = obj
        t = time.perf_counter()
        P = generate_PL(L, args.cap or DEFAULT_CAP)
        rep.timings["semigroup"] = time.perf_counter() - t
        idem = {tuple(int(x) for x in P.tables[i]) for i in P.idempotents}
        want = {tuple(int(x) for x in bo.make_nv(L, p).table) for p in idempotent_pairs(L)}
        rep.data["semigroup_size"] = len(P)
        rep.add("idempotents of P(L) are the (n;v) maps", idem == want,
                None if idem == want else {"extra": len(idem - want), "missing": len(want - idem)})
        ok, w = P.regularity
        rep.add("P(L) regular", ok, None if ok else w)
    _write_dot(args.dot, bo.dot_lr_graph(E))


def _run_axioms(E, rep):
    for r in bo.check_biorder_axioms(E).results:
        rep.add(f"axiom {r.name}", r.passed, r.witness)


def cmd_axioms(args, rep: RunReport):
    kind, obj, prov = load_input(args.input, args.cap)
    rep.inputs.append(prov)
    E = _biorder_for(kind, obj)
    rep.data["elements"] = len(E)
    rep.data["dual_note"] = bo.DUAL_NOTE
    _run_axioms(E, rep)
    _write_dot(args.dot, bo.dot_omega_diagram(E))


def cmd_sandwich(args, rep: RunReport):
    kind, L, prov = load_input(args.input, args.cap)
    _expect(kind, "lattice", args.input)
    rep.inputs.append(prov)
    E = bo.build_biorder(L)
    e, f = parse_pair(L, args.e), parse_pair(L, args.f)
    E.pos(e), E.pos(f)
    direct = bo.sandwich_set(E, e, f)
    via = bo.sandwich_via_complements(E, e, f)
    ms = bo.m_set(E, e, f)
    rep.data["e"], rep.data["f"] = e.label(L), f.label(L)
    rep.data["M"] = [p.label(L) for p in ms.members]
    rep.data["S"] = [p.label(L) for p in direct]
    rep.data["S_via_complements"] = [p.label(L) for p in via]
    path = bo.e_chain(E, e, f)
    rep.data["distance"] = bo.e_distance(E, e, f)
    rep.data["chain"] = None if path is None else [p.label(L) for p in path]
    rep.add("S(e,f) equals relative-complement construction", direct == via,
            None if direct == via else {"direct": rep.data["S"], "via": rep.data["S_via_complements"]})
    rep.add("S(e,f) nonempty", bool(direct))


def cmd_basis_search(args, rep: RunReport):
    kind, L, prov = load_input(args.input, args.cap)
    _expect(kind, "lattice", args.input)
    rep.inputs.append(prov)
    E = bo.build_biorder(L)
    mode = "dle3" if args.dle3 else "exact3"
    fams = op.find_E0_subsets(E, args.N, mode, limit=args.limit)
    rep.data.update(N=args.N, mode=mode, families=len(fams), note=op.DISTANCE_NOTE)
    listed = []
    for k, fam in enumerate(fams[: args.show]):
        entry = {"members": fam.labels(L)}
        ok, w = op.fold_order_independent(L, fam)
        rep.add(f"family {k}: fold order-independent", ok, w)
        ok, w = op.family_independence(L, fam)
        rep.add(f"family {k}: v_i independent", ok, _labels(L, w))
        try:
            basis = op.extract_homogeneous_basis(L, fam)
        except InputError as exc:
            rep.add(f"family {k}: homogeneous basis", False, {"condition": getattr(exc, "condition", None)})
        else:
            rep.add(f"family {k}: homogeneous basis", True)
            entry["basis"] = [L.label(x) for x in basis.elements]
            entry["axes"] = {f"{a},{b}": L.label(x) for (a, b), x in sorted(basis.axes.items())}
        listed.append(entry)
    rep.data["listed"] = listed


def cmd_coordinatize(args, rep: RunReport):
    kind, L, prov = load_input(args.lattice, args.cap)
    _expect(kind, "lattice", args.lattice)
    rep.inputs.append(prov)
    kind, R, prov = load_input(args.ring, args.cap)
    _expect(kind, "ring", args.ring)
    rep.inputs.append(prov)
    ok, w = rg.is_regular_ring(R)
    rep.add("ring regular", ok, None if ok else R.label(w))
    if not ok:
        return
    OL = rg.build_omega_lattice(R)
    rep.extend(rg.omega_lattice_checks(OL))
    rep.data.update(lattice_size=L.n, omega_lattice_size=len(OL))
    iso = find_isomorphism(L, OL.lattice)
    rep.add("lattice isomorphic to Omega_L", iso is not None,
            None if iso is not None else {"sizes": [L.n, len(OL)]})
    if iso is not None:
        rep.data["isomorphism"] = iso.labels(L, OL.lattice)
    rep.extend(rg.verify_epsilon_iso(R, OL))


def cmd_ring_idempotents(args, rep: RunReport):
    kind, R, prov = load_input(args.input, args.cap)
    _expect(kind, "ring", args.input)
    rep.inputs.append(prov)
    es = rg.ring_idempotents(R)
    rep.data["count"] = len(es)
    if len(es) <= MATRIX_LIMIT or args.matrices:
        rep.data["idempotents"] = [R.label(e) for e in es]
    rep.add("0 and 1 idempotent", R.zero in es and R.one in es)
    if isinstance(R, rg.MatrixRing):
        want = matrix_idempotent_count(R.q, R.k)
        rep.add("count matches subspace formula", len(es) == want, None if len(es) == want else want)


def matrix_idempotent_count(q, k):
    """Idempotents of M_k(F_q): sum over r of #r-subspaces * q^(r(k-r))."""
    total = 0
    for r in range(k + 1):
        num = den = 1
        for i in range(r):
            num *= q ** (k - i) - 1
            den *= q ** (i + 1) - 1
        total += num // den * q ** (r * (k - r))
    return total


def cmd_omega_lattice(args, rep: RunReport):
    kind, R, prov = load_input(args.input, args.cap)
    _expect(kind, "ring", args.input)
    rep.inputs.append(prov)
    OL = rg.build_omega_lattice(R)
    L = OL.lattice
    rep.data["lattice"] = lattice_to_json(L)
    rep.extend(rg.omega_lattice_checks(OL))
    if args.basis:
        es = _parse_basis(R, args.basis)
        t6 = rg.verify_theorem6(R, es, OL)
        rep.extend(t6.hypotheses, "hypothesis: ")
        rep.extend(t6.conclusion, "conclusion: ")
        rep.data["basis"] = [L.label(x) for x in t6.basis]
        rep.data["rank"] = t6.rank
        rep.data["axes"] = {f"{a},{b}": L.label(x) for (a, b), x in sorted(t6.axes.items())}
    if args.out:
        Path(args.out).write_text(dumps_canonical(lattice_to_json(L)))
    _write_dot(args.dot, dot_hasse(L, "omega_l"))


def _parse_basis(R, text):
    if text == "diag":
        if not isinstance(R, rg.MatrixRing):
            raise ParseError("'diag' needs a matrix ring")
        return [R.matrix_unit(i, i) for i in range(R.k)]
    return [parse_ring_element(R, t) for t in text.split(",")]


COMMANDS = {
    "validate": cmd_validate,
    "biorder": cmd_biorder,
    "sandwich": cmd_sandwich,
    "basis-search": cmd_basis_search,
    "coordinatize": cmd_coordinatize,
    "ring-idempotents": cmd_ring_idempotents,
    "omega-lattice": cmd_omega_lattice,
    "axioms": cmd_axioms,
}


# -- argument parsing ----------------------------------------------------------


def _add_common(p, defaults):
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--json", action="store_true", default=d(False), help="emit the report as JSON")
    p.add_argument("--dot", metavar="PATH", default=d(None), help="also write a DOT graph here")
    p.add_argument("--cap", type=int, metavar="N", default=d(None),
                   help="scale guard for rings and P(L) (element count)")
    p.add_argument("--dle3", action="store_true", default=d(False),
                   help="basis search: accept 1 <= d <= 3 instead of d = 3")
    p.add_argument("--parallel", type=int, metavar="N", default=d(1),
                   help="accepted for compatibility; work runs in one process")
    p.add_argument("--timings", action="store_true", default=d(False),
                   help="include wall-clock timings (makes output nondeterministic)")
    p.add_argument("-v", "--verbose", action="store_true", default=d(False))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cmlcoord", description=__doc__.split("\n\n")[0])
    _add_common(parser, True)
    common = argparse.ArgumentParser(add_help=False)
    _add_common(common, False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a lattice or ring file")
    p.add_argument("input")

    p = sub.add_parser("biorder", parents=[common], help="build E and run the axiom suite")
    p.add_argument("input")
    p.add_argument("--semigroup", action="store_true", help="also generate P(L) and check it")
    p.add_argument("--matrices", action="store_true", help="print relation matrices at any size")

    p = sub.add_parser("sandwich", parents=[common], help="sandwich set of two idempotents")
    p.add_argument("input")
    p.add_argument("e", help="first element, e.g. '(a1;a2)'")
    p.add_argument("f", help="second element")

    p = sub.add_parser("basis-search", parents=[common], help="search E0 families and bases")
    p.add_argument("input")
    p.add_argument("-N", type=int, default=4, help="family size (default 4)")
    p.add_argument("--limit", type=int, default=None, help="stop after this many families")
    p.add_argument("--show", type=int, default=5, help="families to certify and list")

    p = sub.add_parser("coordinatize", parents=[common], help="match a lattice with Omega_L of a ring")
    p.add_argument("lattice")
    p.add_argument("ring")

    p = sub.add_parser("ring-idempotents", parents=[common], help="list ring idempotents")
    p.add_argument("input")
    p.add_argument("--matrices", action="store_true", help="list idempotents at any size")

    p = sub.add_parser("omega-lattice", parents=[common], help="the lattice of omega^l ideals")
    p.add_argument("input")
    p.add_argument("--basis", help="idempotents to test as a homogeneous basis ('diag' or E11,E22,...)")
    p.add_argument("--out", metavar="PATH", help="write the lattice as JSON")

    p = sub.add_parser("axioms", parents=[common], help="biordered-set axioms for a lattice or ring")
    p.add_argument("input")
    return parser


def run(argv=None) -> tuple[int, str]:
    """Run a command, returning (exit code, report text)."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    rep = RunReport(args.command)
    t = time.perf_counter()
    try:
        COMMANDS[args.command](args, rep)
    except NotComplementedModular as exc:
        w = exc.witness
        return 2, f"error: {exc} (witness {json.dumps(w if not isinstance(w, tuple) else list(w))})\n"
    except InputError as exc:
        return 2, f"error: {exc}\n"
    rep.timings["total"] = time.perf_counter() - t
    text = rep.to_json(args.timings) if args.json else rep.to_text(args.timings)
    return (0 if rep.ok else 1), text


def main(argv=None) -> int:
    code, text = run(argv)
    (sys.stdout if code != 2 else sys.stderr).write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
