"""Command-line front end: ``cocyclelab <command> <file> [options]``.

Exit status is 0 when every check passes, 1 when a check fails and 2 for
malformed input or violated preconditions.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from fractions import Fraction
from itertools import combinations

from . import mechanics as mech
from .cohomology import (
    basis_element,
    canonical_cocycle,
    is_cocycle,
    jacobi_defect,
    solve_coboundary,
)
from .errors import CocycleLabError, NonConstantDeterminant, ProblemSyntaxError, UnknownVariable
from .exactalg import poly_det
from .formscalc import KForm, SignConvention, df, exterior_derivative, form_determinant, interior_product
from .oracle import (
    all_pass,
    contract_at,
    fd_check_bracket,
    fd_check_d,
    field_at,
    form_matrix_at,
    gradient_at,
    pair_at,
    point_check,
    prop2_pointwise,
)
from .problem import ProblemSpec, load_problem
from .report import SCHEMA_VERSION, Report

COMMANDS = (
    "two-form",
    "decompose",
    "momenta",
    "cocycle",
    "sigma",
    "prop2",
    "residual",
    "reconcile",
    "jacobi",
    "trivial",
    "oracle",
)


def _new_report(command: str, spec: ProblemSpec, path: str, convention: SignConvention) -> Report:
    return Report(
        command,
        conventions={"sign_convention": convention.value},
        inputs={
            "file": os.path.basename(path),
            "mode": spec.mode,
            "variables": list(spec.variables),
            "algebra_dim": spec.algebra.dim,
        },
    )


def _cmd_two_form(spec, opts, rep: Report):
    if spec.mode == "lagrangian":
        L = spec.lagrangian_system().lagrangian
        det = poly_det(mech.fiber_hessian(L))
        rep.check("fiber Hessian nonsingular", bool(det), detail=f"det = {det}")
        if not det:
            return
        w1, w2 = mech.two_form_by_pullback(L), mech.two_form_by_second_derivatives(L)
        rep.check("pullback route = second-derivative route", w1 == w2, witness={"pullback": str(w1), "expanded": str(w2)})
        rep.check("omega_L closed", exterior_derivative(w1).is_zero())
        fl = mech.legendre(L)
        rep.results["legendre"] = {n: str(c) for n, c in zip(fl.target.names, fl.components)}
        rep.results["omega"] = str(w1)
    elif spec.mode == "form":
        rep.check("omega closed", exterior_derivative(spec.omega).is_zero())
        det = form_determinant(spec.omega)
        rep.check("omega nondegenerate", bool(det), detail=f"det = {det}")
        rep.results["omega"] = str(spec.omega)
    else:
        raise CocycleLabError("two-form needs a Lagrangian or a 2-form")


def _cmd_decompose(spec, opts, rep):
    dec = mech.decompose(spec.system(opts.base_point))
    rep.check("omega_i invariant", True)
    rep.check("delta_omega closed", True)
    rep.check("L_X omega = L_X delta_omega", True)
    rep.results["omega"] = str(dec.omega)
    rep.results["omega_i"] = str(dec.omega_i)
    rep.results["delta_omega"] = str(dec.delta_omega)


def _cmd_momenta(spec, opts, rep):
    system = spec.system(opts.base_point)
    dec = mech.decompose(system)
    J = mech.momentum_maps(dec.omega_i, system.action, system.base_point)
    for k, (X, Jk) in enumerate(zip(system.action.generators, J.components)):
        rep.check(f"dJ_e{k + 1} = i_X omega_i", df(Jk) == interior_product(X, dec.omega_i))
    rep.inputs["base_point"] = [str(v) for v in J.base_point]
    rep.results["J"] = {f"J_e{k + 1}": str(Jk) for k, Jk in enumerate(J.components)}


def _cmd_cocycle(spec, opts, rep):
    system = spec.system(opts.base_point)
    Om = canonical_cocycle(system.omega, system.action)
    chk = is_cocycle(Om)
    rep.check(
        "delta Omega = 0",
        chk.is_cocycle,
        witness={"triple": Om.label(chk.witness), "value": str(chk.value)} if not chk.is_cocycle else None,
    )
    rep.results["Omega"] = Om.to_dict()
    for (i, j), v in Om.values.items():
        rep.results[f"Omega(e{i + 1},e{j + 1})"] = str(v)


def _cmd_sigma(spec, opts, rep):
    system = spec.system(opts.base_point)
    dec = mech.decompose(system)
    J = mech.momentum_maps(dec.omega_i, system.action, system.base_point)
    Sig = mech.sigma(dec.omega, J, opts.convention)
    rep.check("Sigma alternating 2-cochain", Sig.degree == 2)
    rep.results["Sigma"] = Sig.to_dict()
    rep.results["Sigma constant-valued"] = Sig.is_constant_valued()


def _cmd_prop2(spec, opts, rep):
    res = mech.verify_prop2(spec.system(opts.base_point), opts.convention)
    rep.conventions.update(res.report.conventions)
    rep.extend(res.report)
    for (i, j) in combinations(range(spec.algebra.dim), 2):
        rep.results[f"Omega(e{i + 1},e{j + 1})"] = str(res.omega_cocycle.value(i, j))
        rep.results[f"{{J_e{i + 1},J_e{j + 1}}}"] = res.report.results["brackets"][f"{{J_e{i + 1},J_e{j + 1}}}"]
    rep.results["deltaJ"] = str(res.delta_J) if res.delta_J.is_zero() else res.delta_J.to_dict()


def _cmd_residual(spec, opts, rep):
    c = mech.remark2_residual(spec.system(opts.base_point), opts.convention)
    wit = next(iter(sorted(c.values)), None)
    nonconst = next((idx for idx in sorted(c.values) if not c.values[idx].is_constant()), None)
    rep.check(
        "residual c(a,b) constant-valued",
        nonconst is None,
        witness={"pair": c.label(nonconst), "value": str(c.values[nonconst])} if nonconst else None,
    )
    rep.check(
        "residual c(a,b) = 0 with h = Omega + delta J",
        c.is_zero(),
        witness={"pair": c.label(wit), "value": str(c.values[wit])} if wit else None,
    )
    rep.results["c"] = c.to_dict()


def _cmd_reconcile(spec, opts, rep):
    res = mech.remark1_reconcile(spec.system(opts.base_point), opts.base_point, opts.convention)
    rep.inputs.update(res.report.inputs)
    rep.extend(res.report)


def _target_cochain(spec: ProblemSpec, opts):
    explicit = spec.explicit_cochain()
    if explicit is not None:
        return explicit, "explicit"
    system = spec.system(opts.base_point)
    return canonical_cocycle(system.omega, system.action), "Omega"


def _cmd_jacobi(spec, opts, rep):
    alpha, which = _target_cochain(spec, opts)
    rep.inputs["cochain"] = which
    dim = spec.algebra.dim
    bad = []
    for i, j, k in combinations(range(dim), 3):
        els = [basis_element(alpha, t) for t in (i, j, k)]
        d = jacobi_defect(alpha, *els)
        if d:
            bad.append(((i, j, k), d))
    if dim < 3:
        rep.skip("Jacobi on basis triples", "algebra has fewer than three basis elements")
    else:
        rep.check(
            "Jacobi on basis triples",
            not bad,
            witness={"triple": alpha.label(bad[0][0]), "defect": str(bad[0][1])} if bad else None,
        )
    chk = is_cocycle(alpha)
    rep.check("Jacobi holds iff cocycle", chk.is_cocycle == (not bad))
    rep.results["cocycle"] = chk.is_cocycle
    rep.results["alpha"] = alpha.to_dict()


def _cmd_trivial(spec, opts, rep):
    alpha, which = _target_cochain(spec, opts)
    rep.inputs["cochain"] = which
    bound = opts.degree_bound
    if bound is None:
        bound = max(alpha.max_degree(), 0) + 2
    rep.inputs["degree_bound"] = bound
    res = solve_coboundary(alpha, bound)
    rep.check("answer verified", res.verify())
    rep.results["trivial"] = res.trivial
    rep.results["unknowns"] = res.unknowns
    rep.results["equations"] = res.equations
    rep.results["alpha"] = alpha.to_dict()
    if res.trivial:
        rep.results["beta"] = res.beta.to_dict()
    else:
        rep.results["certificate"] = {k: str(v) for k, v in res.certificate.items()}


def _cmd_oracle(spec, opts, rep):
    plan = opts.plan
    rep.inputs["plan"] = {"seed": plan.seed, "trials": plan.trials, "fd_step": plan.fd_step, "fd_tol": plan.fd_tol}
    system = spec.system(opts.base_point)
    dec = mech.decompose(system)
    action = system.action
    dim = system.chart.dimension
    J = mech.momentum_maps(dec.omega_i, action, system.base_point)

    def record(name, v):
        rep.check(name, bool(v), witness=v.witness(), detail=f"{v.trials} samples")

    if dec.omega.degree < dim:
        record("fd: d omega", fd_check_d(dec.omega, plan))
    else:
        rep.skip("fd: d omega", "top-degree form, d omega = 0 identically")
    gens = action.generators
    for k, Jk in enumerate(J.components):
        record(f"fd: d J_e{k + 1}", fd_check_d(KForm.function(Jk), plan, salt=k + 1))
    for i, j in combinations(range(len(gens)), 2):
        record(f"fd: [X_e{i + 1}, X_e{j + 1}]", fd_check_bracket(gens[i], gens[j], plan, salt=i * 7 + j))
    for k, Jk in enumerate(J.components):
        record(
            f"points: dJ_e{k + 1} = i_X omega_i",
            all_pass(
                [
                    point_check(
                        (lambda x, c=c, k=k: gradient_at(J.components[k], x)[c]),
                        (lambda x, c=c, k=k: contract_at(field_at(gens[k], x), form_matrix_at(dec.omega_i, x))[c]),
                        plan,
                        dim=dim,
                        salt=500 + k,
                    )
                    for c in range(dim)
                ]
            ),
        )
    Om = canonical_cocycle(dec.omega, action)
    for i, j in combinations(range(len(gens)), 2):
        record(
            f"points: Omega(e{i + 1},e{j + 1}) = omega(X_a, X_b)",
            point_check(
                Om.value(i, j),
                lambda x, i=i, j=j: pair_at(form_matrix_at(dec.omega, x), field_at(gens[i], x), field_at(gens[j], x)),
                plan,
                salt=600 + i * 7 + j,
            ),
        )
    suite = prop2_pointwise(dec.omega, dec.omega_i, action, J, opts.convention, plan)
    for name, v in suite.verdicts.items():
        record(f"points: {name}", v)


HANDLERS = {
    "two-form": _cmd_two_form,
    "decompose": _cmd_decompose,
    "momenta": _cmd_momenta,
    "cocycle": _cmd_cocycle,
    "sigma": _cmd_sigma,
    "prop2": _cmd_prop2,
    "residual": _cmd_residual,
    "reconcile": _cmd_reconcile,
    "jacobi": _cmd_jacobi,
    "trivial": _cmd_trivial,
    "oracle": _cmd_oracle,
}


class RunOptions:
    """Problem-file options overlaid with command-line flags."""

    def __init__(self, spec: ProblemSpec, args: argparse.Namespace):
        merged = spec.options.merged(
            sign_convention=SignConvention.parse(args.sign_convention) if args.sign_convention else None,
            base_point=args.base_point,
            degree_bound=args.degree_bound,
            seed=args.seed,
            trials=args.trials,
            fd_step=args.fd_step,
            fd_tol=args.fd_tol,
        )
        self.convention = merged.convention
        self.base_point = merged.base_point
        self.degree_bound = merged.degree_bound
        self.plan = merged.plan()


def run(command: str, spec: ProblemSpec, args: argparse.Namespace, path: str = "<input>") -> Report:
    opts = RunOptions(spec, args)
    rep = _new_report(command, spec, path, opts.convention)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonConstantDeterminant)
        HANDLERS[command](spec, opts, rep)
    return rep


def _parse_point(values: list[str] | None):
    if not values:
        return None
    parts = [p for v in values for p in v.replace(",", " ").split()]
    try:
        return tuple(Fraction(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad base point {' '.join(values)!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cocyclelab", description="Exact cocycle computations for Lie group actions.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("file", help="problem file")
    p.add_argument("--json", action="store_true", help="emit the report as JSON")
    p.add_argument("--sign-convention", choices=["A", "B", "paper-A", "paper-B"])
    p.add_argument("--base-point", nargs="+", metavar="X", help="rational coordinates, space or comma separated")
    p.add_argument("--degree-bound", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--fd-step", type=float)
    p.add_argument("--fd-tol", type=float)
    return p


def _error_payload(command: str, exc: Exception) -> dict:
    err = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, (ProblemSyntaxError, UnknownVariable)) and exc.line is not None:
        err["line"], err["column"] = exc.line, exc.column
    return {"schema_version": SCHEMA_VERSION, "command": command, "status": "error", "error": err}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.base_point = _parse_point(args.base_point)
        spec = load_problem(args.file)
        rep = run(args.command, spec, args, args.file)
    except (CocycleLabError, OSError, argparse.ArgumentTypeError, ValueError) as exc:
        if args.json:
            print(json.dumps(_error_payload(args.command, exc), indent=2, sort_keys=True))
        print(f"cocyclelab: {type(exc).__name__}: {exc}", file=sys.stderr)
        if isinstance(exc, CocycleLabError) and not exc.input_error:
            return 1
        return 2
    print(rep.to_json() if args.json else rep.render_text())
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
