"""Command-line front end: parse a description file, run one check, print a report.

Exit status is 0 when every record passes, 1 when some check fails and 2 for
parse or usage errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from . import branes as br
from . import complexes as cx
from .category import StructuralError, check_category_axioms
from .document import (
    Document,
    ParseError,
    block_cochains,
    block_ring,
    build_branes,
    build_category,
    build_complex,
    build_exact,
    build_field,
    build_pndp,
    parse_document,
)
from .exact import ConversionRefused, check_exact_axioms, check_waldhausen_axioms, exact_to_waldhausen
from .gft import GroupSpec, ResolutionError, argument_count_check, gft_decompose, gft_reconstruct
from .kth import EnumerationIncomplete, k0, k_spectrum_level, nerve, s_construct
from .pndp import NonPointlikeError, emerge_brane_points, is_discrete_space, virtual_dimension, zero_manifold_equiv

PASS, FAIL = "PASS", "FAIL"
GFT_TOLERANCE = 1e-12


class UsageError(ValueError):
    pass


@dataclass
class Report:
    command: str
    records: list = field(default_factory=list)  # (check, status, witness)

    def add(self, check: str, ok: bool, witness: object = "") -> None:
        self.records.append((check, PASS if ok else FAIL, str(witness)))

    def extend(self, prefix: str, records) -> None:
        for check, status, witness in records:
            self.records.append((f"{prefix}.{check}", status, witness))

    @property
    def ok(self) -> bool:
        return all(r[1] == PASS for r in self.records)

    @property
    def counts(self) -> tuple[int, int]:
        failed = sum(r[1] == FAIL for r in self.records)
        return len(self.records) - failed, failed

    def render(self, fmt: str = "human") -> str:
        passed, failed = self.counts
        if fmt == "machine":
            lines = [f"command\t{self.command}"]
            lines += ["record\t" + "\t".join(_flat(x) for x in r) for r in self.records]
            lines.append(f"summary\tpassed={passed}\tfailed={failed}")
        else:
            lines = [f"== {self.command} =="]
            for check, status, witness in self.records:
                lines.append(f"[{status}] {check}" + (f": {witness}" if witness else ""))
            lines.append(f"{passed} passed, {failed} failed")
        return "\n".join(lines) + "\n"


def _flat(x: str) -> str:
    return x.replace("\t", " ").replace("\n", " ")


# ---------------------------------------------------------------------------
# Commands


def _blocks(doc: Document, *kinds: str):
    found = [b for b in doc.blocks if b.kind in kinds]
    if not found:
        raise UsageError(f"the document has no {' or '.join(kinds)} block")
    return found


def cmd_check_category(doc, args, rep):
    for b in _blocks(doc, "category"):
        try:
            C = build_category(b)
        except StructuralError as e:
            rep.add(f"{b.name}.build", False, e)
            continue
        rep.extend(b.name, check_category_axioms(C).records())


def cmd_check_exact(doc, args, rep):
    for b in _blocks(doc, "exact"):
        E = build_exact(doc, b)
        rep.add(f"{b.name}.sigma-size", True, len(E.sigma))
        rep.extend(b.name, check_exact_axioms(E).records())


def _waldhausen(doc, b):
    return exact_to_waldhausen(build_exact(doc, doc.block(b.first("host").args[0])))


def cmd_check_waldhausen(doc, args, rep):
    for b in _blocks(doc, "waldhausen"):
        try:
            W = _waldhausen(doc, b)
        except ConversionRefused as e:
            rep.add(f"{b.name}.conversion", False, e)
            continue
        r = check_waldhausen_axioms(W)
        rep.extend(b.name, r.records())
        for note in r.notes:
            rep.add(f"{b.name}.note", True, note)


def cmd_s_construct(doc, args, rep):
    n = 2 if args.level is None else args.level
    for b in _blocks(doc, "waldhausen"):
        try:
            S = s_construct(_waldhausen(doc, b), n)
        except (EnumerationIncomplete, ConversionRefused) as e:
            rep.add(f"{b.name}.S{n}", False, e)
            continue
        rep.add(f"{b.name}.S{n}.staircases", True, len(S.objects))
        rep.add(f"{b.name}.S{n}.commutes", True, "every staircase commutes; horizontals are cofibrations")


def cmd_nerve(doc, args, rep):
    T = 3 if args.truncate is None else args.truncate
    for b in doc.blocks:
        if b.kind == "category":
            X = nerve(build_category(b), T)
            label = f"{b.name}.nerve"
        elif b.kind == "waldhausen":
            m = 1 if args.level is None else args.level
            X = k_spectrum_level(_waldhausen(doc, b), m, T)
            label = f"{b.name}.wS{m}.nerve"
        else:
            continue
        rep.add(f"{label}.sizes", True, " ".join(map(str, X.sizes())))
        rep.add(f"{label}.nondegenerate", True, " ".join(str(len(X.nondegenerate(k))) for k in range(T + 1)))
        rep.extend(label, X.check_identities().records())
    if not rep.records:
        raise UsageError("the document has no category or waldhausen block")


def cmd_k0(doc, args, rep):
    for b in _blocks(doc, "exact"):
        try:
            G = k0(build_exact(doc, b))
        except ValueError as e:
            rep.add(f"{b.name}.k0", False, e)
            continue
        rep.add(f"{b.name}.k0", True, f"{G} ({G.describe()})")


def cmd_cohomology(doc, args, rep):
    for b in _blocks(doc, "complex"):
        C = cx.cochain_from_simplicial(build_complex(b), block_ring(b, args.ring))
        rep.add(f"{b.name}.d2", not C.d_squared_violations(), "d^2 = 0")
        for n, H in enumerate(cx.cohomology(C)):
            rep.add(f"{b.name}.H{n}", True, H)


def cmd_potential(doc, args, rep):
    for b in _blocks(doc, "complex"):
        C = cx.cochain_from_simplicial(build_complex(b), block_ring(b, args.ring))
        for name, deg, values in block_cochains(b):
            label = f"{b.name}.{name}"
            try:
                r = cx.potential_sequence(C, cx.Cochain(deg, values))
            except (cx.NoPotentialDegree, StructuralError) as e:
                rep.add(label, False, e)
                continue
            if r.solvable:
                rep.add(f"{label}.potential", True, "psi = " + " ".join(map(str, r.witness)))
                rep.add(f"{label}.gauge", r.gauge_ok, f"d(phi + d chi) = d phi on {r.gauge_checked} basis chi")
            elif r.obstruction is not None:
                rep.add(f"{label}.potential", False, f"closed but not exact; class {r.obstruction} in {r.obstruction.group}")
            else:
                rep.add(f"{label}.potential", False, "not closed")


def cmd_refine(doc, args, rep):
    k = 1 if args.level is None else args.level
    for b in _blocks(doc, "complex"):
        K = build_complex(b)
        R = K
        for _ in range(k):
            R = cx.barycentric_refine(R)
        rep.add(f"{b.name}.f-vector", True, " ".join(map(str, K.f_vector())))
        rep.add(f"{b.name}.refined{k}.f-vector", True, " ".join(map(str, R.f_vector())))
        rep.add(f"{b.name}.euler", K.euler_characteristic() == R.euler_characteristic(),
                f"{K.euler_characteristic()} -> {R.euler_characteristic()}")


def cmd_theorem_check(doc, args, rep):
    for b in _blocks(doc, "complex"):
        K = build_complex(b)
        ring = block_ring(b, args.ring)
        cmp = b.first("compare")
        if cmp:
            other, label = build_complex(doc.block(cmp.args[0])), f"{b.name}~{cmp.args[0]}"
        else:
            other, label = cx.barycentric_refine(K), f"{b.name}~sd({b.name})"
        r = cx.theorem_check(K, other, ring)
        for name, left, right, ok in r.records:
            rep.add(f"{label}.{name}", ok, f"{left} vs {right}")
        rep.add(f"{label}.preserved", r.preserved, "preserved" if r.preserved else "not preserved")


def cmd_gft_roundtrip(doc, args, rep):
    for b in _blocks(doc, "field"):
        grid, values, G = build_field(b)
        if args.group:
            G = GroupSpec.parse(args.group)
        G = G or GroupSpec("cyclic", 2)
        try:
            f = gft_decompose(values, grid, G)
        except ResolutionError as e:
            rep.add(f"{b.name}.{G}.resolution", False, e)
            continue
        back = gft_reconstruct(f, grid, G)
        err = float(abs(back - values).max()) if values.size else 0.0
        rep.add(f"{b.name}.{G}.roundtrip", err <= GFT_TOLERANCE, f"max error {err:.1e} (tolerance {GFT_TOLERANCE:.0e})")
        ar = argument_count_check(f)
        rep.add(f"{b.name}.arity", ar.conforming, ar.count)
        rep.add(f"{b.name}.regions", True, len(grid.regions))


def cmd_branes_classify(doc, args, rep):
    for b in _blocks(doc, "branes"):
        cfg, strings = build_branes(doc, b)
        g = br.gauge_group(cfg)
        rep.add(f"{b.name}.gauge-group", True, g)
        rep.add(f"{b.name}.rank-bound", g.rank == cfg.total_stack, f"sum n_i = {g.rank}, N = {cfg.total_stack}")
        for s in strings:
            loop = br.loop_nontrivial(s, cfg)
            rep.add(f"{b.name}.string({s.start},{s.end})", True, "nontrivial loop" if loop else "trivial loop")


def cmd_twist_class(doc, args, rep):
    for b in _blocks(doc, "complex"):
        K = build_complex(b)
        for name, deg, values in block_cochains(b):
            if deg != 3:
                continue
            try:
                c = br.twist_class(br.TwistAssignment(K, values))
            except (cx.InvariantViolation, StructuralError) as e:
                rep.add(f"{b.name}.{name}", False, e)
                continue
            rep.add(f"{b.name}.{name}", True, f"class {c} in H3 = {c.group}" + (" (trivial)" if c.is_zero else ""))
    if not rep.records:
        raise UsageError("no degree-3 cochain found")


def cmd_pndp(doc, args, rep):
    for b in _blocks(doc, "pndp"):
        specs = build_pndp(b)
        for s in specs:
            f, m = virtual_dimension(s)
            rep.add(f"{b.name}.{s.name}.dims", True, f"dim F = {f}, dim M = {m}")
        try:
            T = emerge_brane_points(specs)
        except NonPointlikeError as e:
            rep.add(f"{b.name}.emerge", False, e)
            continue
        eq = zero_manifold_equiv(T)
        rep.add(f"{b.name}.emerge", is_discrete_space(T), f"{len(T.points)} point(s), discrete")
        rep.add(f"{b.name}.zero-manifold", eq.agree, "local and discrete predicates agree")


COMMANDS: dict[str, Callable] = {
    "check-category": cmd_check_category,
    "check-exact": cmd_check_exact,
    "check-waldhausen": cmd_check_waldhausen,
    "s-construct": cmd_s_construct,
    "nerve": cmd_nerve,
    "k0": cmd_k0,
    "cohomology": cmd_cohomology,
    "potential": cmd_potential,
    "refine": cmd_refine,
    "theorem-check": cmd_theorem_check,
    "gft-roundtrip": cmd_gft_roundtrip,
    "branes-classify": cmd_branes_classify,
    "twist-class": cmd_twist_class,
    "pndp": cmd_pndp,
}


def run_command(cmd: str, args: argparse.Namespace, doc: Document, echo: str = "") -> Report:
    if cmd not in COMMANDS:
        raise UsageError(f"unknown subcommand {cmd!r}")
    rep = Report(echo or cmd)
    COMMANDS[cmd](doc, args, rep)
    return rep


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kwald", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", required=True, help="description file ('-' for stdin)")
        p.add_argument("--level", type=int, help="S-construction level or number of refinements")
        p.add_argument("--truncate", type=int, help="nerve truncation")
        p.add_argument("--ring", help="coefficient ring: z or zmod:p")
        p.add_argument("--group", help="cyclic:N or circle:N")
        p.add_argument("--format", choices=("human", "machine"), default="human")
    return parser


def _echo(args: argparse.Namespace) -> str:
    parts = [args.command, "--input", args.input]
    for flag in ("level", "truncate", "ring", "group"):
        v = getattr(args, flag)
        if v is not None:
            parts += [f"--{flag}", str(v)]
    return " ".join(parts)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.input == "-":
            text = sys.stdin.read()
        else:
            with open(args.input, encoding="utf-8") as fh:
                text = fh.read()
        doc = parse_document(text)
        report = run_command(args.command, args, doc, _echo(args))
    except (OSError, ParseError, UsageError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (StructuralError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    sys.stdout.write(report.render(args.format))
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
