"""Command-line interface.

    darbouxforms <command> [-n N] [-f FILE | -e TEXT] [--json] [--seed S]

Forms are read from ``-f FILE``, from ``-e TEXT`` or from standard input.
Exit codes: 0 success, 1 invalid input (including parse errors and failed
``verify`` checks), 2 internal consistency failure, 64 unknown command.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time

from . import checks
from .darboux import (
    CONTACT_SUM,
    LINEAR_PULLBACK,
    DarbouxNormalForm,
    certified_normal_form,
    medeiros_decompose,
    random_normal_form_instance,
    reconstruct as reconstruct_normal_form,
    structural_violations,
)
from .errors import AlgorithmFailure, FormsError, InvalidInput, ParseError
from .exterior import (
    DifferentialForm,
    LinearChange,
    class_of_two_form,
    differential,
    exterior_derivative,
    interior_product,
    is_closed,
    radial_field,
    random_form,
    wedge,
)
from .projective import (
    PULLBACK_CASE_I,
    Classification,
    classify,
    pfaff_class,
    random_distribution,
    reconstruct as reconstruct_classification,
    validate,
)
from .textio import (
    form_from_json,
    form_to_json,
    matrix_from_json,
    matrix_to_json,
    parse_form,
    poly_from_json,
    poly_to_json,
    print_form,
    print_polynomial,
)

EXIT_OK, EXIT_INVALID, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2, 64
DEFAULT_SEED = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse would print and exit with status 2, which we reserve
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# JSON encoding of results
# ---------------------------------------------------------------------------


def normal_form_to_json(nf: DarbouxNormalForm) -> dict:
    out = {"variant": nf.variant, "n": nf.n, "k": nf.k, "change": matrix_to_json(nf.change.M)}
    if nf.variant == LINEAR_PULLBACK:
        out["eta"] = form_to_json(nf.eta)
    else:
        out["zeta"] = form_to_json(nf.zeta)
        out["t"] = [poly_to_json(p) for p in nf.t]
        out["h"] = [poly_to_json(p) for p in nf.h]
    return out


def normal_form_from_json(data: dict) -> DarbouxNormalForm:
    n = data["n"]
    change = LinearChange(matrix_from_json(data["change"]))
    if data["variant"] == LINEAR_PULLBACK:
        return DarbouxNormalForm(LINEAR_PULLBACK, n, data["k"], change, eta=form_from_json(data["eta"]))
    return DarbouxNormalForm(
        data["variant"],
        n,
        data["k"],
        change,
        zeta=form_from_json(data["zeta"]),
        t=tuple(poly_from_json(p, n) for p in data["t"]),
        h=tuple(poly_from_json(p, n) for p in data["h"]),
    )


def classification_to_json(c: Classification) -> dict:
    out = {
        "variant": c.variant,
        "n": c.n,
        "k": c.k,
        "change": matrix_to_json(c.change.M),
        "rho": matrix_to_json(c.rho),
    }
    if c.variant == PULLBACK_CASE_I:
        out["theta_block"] = form_to_json(c.theta_block)
    else:
        out["alpha"] = form_to_json(c.alpha)
        out["t"] = [poly_to_json(p) for p in c.t]
        out["h"] = [poly_to_json(p) for p in c.h]
        out["pure_contact"] = c.pure_contact
    return out


def classification_from_json(data: dict) -> Classification:
    N = data["n"] + 1
    common = dict(
        variant=data["variant"],
        n=data["n"],
        k=data["k"],
        change=LinearChange(matrix_from_json(data["change"])),
        rho=tuple(tuple(row) for row in matrix_from_json(data["rho"])),
    )
    if data["variant"] == PULLBACK_CASE_I:
        return Classification(**common, theta_block=form_from_json(data["theta_block"]))
    return Classification(
        **common,
        alpha=form_from_json(data["alpha"]),
        t=tuple(poly_from_json(p, N) for p in data["t"]),
        h=tuple(poly_from_json(p, N) for p in data["h"]),
    )


# ---------------------------------------------------------------------------
# commands; each returns (result, verified, trace, text lines)
# ---------------------------------------------------------------------------


def cmd_degree(form: DifferentialForm, args):
    s = form.homogeneous_degree()
    result = {"r": form.r, "coefficient_degree": s, "homogeneous": s is not None}
    lines = [f"form degree r = {form.r}"]
    if s is None:
        lines.append("coefficients are not homogeneous" if form else "zero form")
    else:
        lines.append(f"coefficient degree s = {s}")
        if form.r == 1 and not interior_product(radial_field(form.n), form):
            result["distribution_degree"] = s - 1
            lines.append(f"d = {s - 1}")
    return result, False, None, lines


def cmd_class(form: DifferentialForm, args):
    if form.r == 1:
        k = pfaff_class(form)
        return {"class": k, "kind": "pfaff"}, False, None, [f"k = {k}"]
    if form.r == 2:
        if not is_closed(form):
            raise InvalidInput("the class of a 2-form is computed for closed forms")
        k = class_of_two_form(form)
        return {"class": k, "kind": "two-form"}, False, None, [f"k = {k}"]
    raise InvalidInput(f"class is defined for 1-forms and closed 2-forms, got a {form.r}-form")


def cmd_closed(form: DifferentialForm, args):
    closed = is_closed(form)
    return {"closed": closed}, False, None, ["closed" if closed else "not closed"]


def cmd_jouanolou(form: DifferentialForm, args):
    if form.r < 1:
        raise InvalidInput("the identity needs a form of degree >= 1")
    s = form.homogeneous_degree()
    if s is None:
        raise InvalidInput("coefficients must be homogeneous")
    R = radial_field(form.n)
    lhs = interior_product(R, exterior_derivative(form)) + exterior_derivative(interior_product(R, form))
    holds = lhs == form * (form.r + s)
    if not holds:
        raise AlgorithmFailure("i_R d eta + d i_R eta != (q + s) eta")
    result = {"q": form.r, "s": s, "holds": True}
    lines = [f"q = {form.r}, s = {s}: i_R d eta + d i_R eta = {form.r + s} eta"]
    if is_closed(form) and form.r + s:
        prim = interior_product(R, form) / (form.r + s)
        result["primitive"] = form_to_json(prim)
        lines.append(f"primitive: {print_form(prim)}")
    return result, True, None, lines


def cmd_darboux(form: DifferentialForm, args):
    nf, trace = certified_normal_form(form)
    if nf.variant == CONTACT_SUM and (bad := structural_violations(nf)):
        raise AlgorithmFailure("; ".join(bad))
    tr = {
        "regular_point": [str(v) for v in trace.p0],
        "swapped": list(trace.swapped),
        "route": trace.route,
    }
    if trace.coupling is not None:
        tr["coupling"] = matrix_to_json(trace.coupling)
    if trace.directions:
        tr["directions"] = matrix_to_json(trace.directions)
    lines = [f"variant: {nf.variant}", f"k = {nf.k}", "change (u = M z):"]
    lines += ["  " + " ".join(str(v) for v in row) for row in nf.change.M]
    if nf.variant == LINEAR_PULLBACK:
        lines.append(f"eta = {print_form(nf.eta)}")
    else:
        lines.append(f"zeta = {print_form(nf.zeta)}")
        for i, (t, h) in enumerate(zip(nf.t, nf.h), 1):
            lines.append(f"t{i} = {print_polynomial(t)}   h{i} = {print_polynomial(h)}")
    lines.append("reconstruction: exact-match")
    return normal_form_to_json(nf), True, tr, lines


def cmd_medeiros(form: DifferentialForm, args):
    q, t = medeiros_decompose(form)
    result = {"q": poly_to_json(q), "t": poly_to_json(t)}
    return result, True, None, [f"q = {print_polynomial(q)}", f"t = {print_polynomial(t)}", "dq ^ dt: exact-match"]


def cmd_classify(form: DifferentialForm, args):
    c = classify(validate(form))
    lines = [f"variant: {c.variant}", f"class k = {c.k}", "rho:"]
    lines += ["  " + " ".join(str(v) for v in row) for row in c.rho]
    if c.variant == PULLBACK_CASE_I:
        lines.append(f"theta_block = {print_form(c.theta_block)}")
    else:
        lines.append(f"alpha = {print_form(c.alpha)}")
        for i, (t, h) in enumerate(zip(c.t, c.h), 1):
            lines.append(f"t{i} = {print_polynomial(t)}   h{i} = {print_polynomial(h)}")
    lines.append("reconstruction: exact-match")
    return classification_to_json(c), True, {"d_theta_variant": c.normal_form.variant}, lines


FORM_COMMANDS = {
    "degree": cmd_degree,
    "class": cmd_class,
    "closed": cmd_closed,
    "jouanolou": cmd_jouanolou,
    "darboux": cmd_darboux,
    "medeiros": cmd_medeiros,
    "classify": cmd_classify,
}
COMMANDS = (*FORM_COMMANDS, "verify", "random", "selfcheck")


def _verify_document(doc: dict) -> tuple[bool, list[str]]:
    if not isinstance(doc, dict) or "command" not in doc or "input" not in doc:
        raise InvalidInput("not a result document")
    command = doc["command"]
    form = form_from_json(doc["input"]["form"])
    result = doc.get("result")
    if command == "darboux":
        nf = normal_form_from_json(result)
        ok = reconstruct_normal_form(nf) == form
        bad = structural_violations(nf) if nf.variant == CONTACT_SUM else []
        return ok and not bad, [f"reconstruction: {'exact-match' if ok else 'mismatch'}", *bad]
    if command == "classify":
        c = classification_from_json(result)
        ok = reconstruct_classification(c) == form
        return ok, [f"reconstruction: {'exact-match' if ok else 'mismatch'}"]
    if command == "medeiros":
        q, t = poly_from_json(result["q"], form.n), poly_from_json(result["t"], form.n)
        ok = wedge(differential(q), differential(t)) == form
        return ok, [f"dq ^ dt: {'exact-match' if ok else 'mismatch'}"]
    if command in FORM_COMMANDS:
        again, *_ = FORM_COMMANDS[command](form, None)
        ok = json.loads(json.dumps(again)) == result
        return ok, ["recomputed result " + ("agrees" if ok else "differs")]
    raise InvalidInput(f"cannot verify a {command!r} document")


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="darbouxforms", description="Exact computations with polynomial differential forms.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, reads_form=True):
        sp.add_argument("-n", type=int, help="number of variables z1..zN")
        sp.add_argument("--json", action="store_true", help="emit one JSON document")
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        if reads_form:
            src = sp.add_mutually_exclusive_group()
            src.add_argument("-f", "--file", help="read the form from FILE ('-' for stdin)")
            src.add_argument("-e", "--expr", help="the form as a command-line string")

    helps = {
        "degree": "form degree and coefficient degree",
        "class": "class of a 1-form or of a closed 2-form",
        "closed": "test d(form) = 0",
        "jouanolou": "check i_R d eta + d i_R eta = (q + s) eta",
        "darboux": "normal form of a degree-one closed 2-form",
        "medeiros": "write a decomposable degree-one closed 2-form as dq ^ dt",
        "classify": "classify a degree-one distribution on projective space",
    }
    for name, text in helps.items():
        common(sub.add_parser(name, help=text))
    sp = sub.add_parser("verify", help="re-check a JSON document produced with --json")
    common(sp)
    sp = sub.add_parser("random", help="print a random form")
    common(sp, reads_form=False)
    sp.add_argument("--kind", choices=["form", "two-form", "distribution"], default="two-form")
    sp.add_argument("-k", type=int, default=1, help="class to build")
    sp.add_argument("-r", type=int, default=1, help="form degree (kind 'form')")
    sp.add_argument("--degree", type=int, default=1, help="coefficient degree (kind 'form')")
    sp.add_argument("--case", choices=["i", "ii"], default="ii", help="distribution case")
    sp = sub.add_parser("selfcheck", help="run the seeded invariant suites")
    common(sp, reads_form=False)
    sp.add_argument("--cases", type=int, default=100)
    sp.add_argument("--only", action="append", choices=list(checks.SUITES))
    return p


def _read_text(args) -> str:
    if args.expr is not None:
        return args.expr
    if args.file in (None, "-"):
        return sys.stdin.read()
    try:
        with open(args.file, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InvalidInput(f"cannot read {args.file}: {exc.strerror}") from exc


def _random_form(args) -> DifferentialForm:
    rng = random.Random(args.seed)
    if args.kind == "form":
        n = args.n or 3
        if not 0 <= args.r <= n:
            raise InvalidInput("need 0 <= r <= n")
        return random_form(rng, n, args.r, args.degree)
    if args.kind == "two-form":
        n = args.n or 2 * args.k + 1
        if args.k < 1 or 2 * args.k > n:
            raise InvalidInput("need 1 <= k and 2k <= n")
        w, _ = random_normal_form_instance(rng, n, args.k)
        return w
    n = args.n or 2 * args.k + 2
    return random_distribution(args.case, args.k, n - 1, args.seed).theta


def _emit(args, doc: dict, lines: list[str], out) -> None:
    if args.json:
        json.dump(doc, out, indent=2)
        out.write("\n")
    else:
        out.write("\n".join(lines) + "\n")


def run_command(argv: list[str], out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    if not argv or argv[0] in ("-h", "--help"):
        build_parser().print_help(out)
        return EXIT_OK if argv else EXIT_USAGE
    if argv[0] not in COMMANDS:
        err.write(f"darbouxforms: unknown command {argv[0]!r} (choose from {', '.join(COMMANDS)})\n")
        return EXIT_USAGE
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        err.write(f"darbouxforms {argv[0]}: {exc}\n")
        return EXIT_INVALID
    except SystemExit as exc:  # --help inside a subcommand
        return EXIT_OK if not exc.code else EXIT_INVALID

    t0 = time.perf_counter()
    doc = {"command": args.command, "n": args.n}
    try:
        if args.command == "selfcheck":
            return _selfcheck(args, out)
        if args.command == "random":
            form = _random_form(args)
            doc.update(n=form.n, input={"seed": args.seed, "kind": args.kind}, result=form_to_json(form))
            doc["verified"] = False
            _emit(args, doc, [print_form(form)], out)
            return EXIT_OK
        text = _read_text(args)
        if args.command == "verify":
            try:
                original = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from exc
            ok, lines = _verify_document(original)
            doc.update(n=original.get("n"), input={"command": original.get("command")}, result={"ok": ok})
            doc["verified"] = ok
            _emit(args, doc, lines, out)
            return EXIT_OK if ok else EXIT_INVALID
        form = parse_form(text, args.n)
        result, verified, trace, lines = FORM_COMMANDS[args.command](form, args)
    except FormsError as exc:
        code = EXIT_FAILURE if isinstance(exc, AlgorithmFailure) else EXIT_INVALID
        if args.json:
            error = {"type": type(exc).__name__, "message": str(exc)}
            if isinstance(exc, ParseError):
                error.update(line=exc.line, column=exc.column)
            json.dump({**doc, "error": error}, out, indent=2)
            out.write("\n")
        err.write(f"darbouxforms {args.command}: {type(exc).__name__}: {exc}\n")
        return code

    doc.update(n=form.n, input={"text": print_form(form), "form": form_to_json(form)}, result=result)
    doc["verified"] = verified
    if trace is not None:
        doc["trace"] = trace
    doc["timing"] = {"seconds": round(time.perf_counter() - t0, 6)}
    _emit(args, doc, lines, out)
    return EXIT_OK


def _selfcheck(args, out) -> int:
    if args.cases < 1:
        raise InvalidInput("--cases must be positive")
    results = checks.run_all(args.seed, args.cases, args.only)
    if args.json:
        doc = {
            "command": "selfcheck",
            "n": None,
            "input": {"seed": args.seed, "cases": args.cases},
            "result": [
                {"suite": r.name, "cases": r.cases, "failures": r.failures, "seconds": round(r.seconds, 3)}
                for r in results
            ],
            "verified": all(r.ok for r in results),
        }
        json.dump(doc, out, indent=2)
        out.write("\n")
    else:
        out.write(f"{'suite':<18}{'cases':>7}{'failed':>8}{'seconds':>10}  status\n")
        for r in results:
            status = "PASS" if r.ok else "FAIL"
            out.write(f"{r.name:<18}{r.cases:>7}{len(r.failures):>8}{r.seconds:>10.2f}  {status}\n")
            for f in r.failures[:3]:
                out.write(f"    {f}\n")
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAILURE


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
