"""Command-line front end.

Every subcommand reads JSON inputs (a file path or the name of a bundled
category), runs the corresponding certification, and emits a RunReport:
the command echo, sha256 of every input, the tolerance and seed, the
named residuals, and per-check verdicts. Reports are deterministic:
identical inputs and seed produce byte-identical output. Exit codes:
0 ACCEPT, 1 REJECT (with the violated axiom named), 2 input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from importlib import resources

import numpy as np

from . import bundled, deligne, hilb3, hstar1, intalg
from .diagram import Engine
from .fusion import (
    FusionData,
    SchemaError,
    SphericalWeight,
    loop_eval,
    renorm_scalar,
    udf_from_weight,
    validate,
)
from .numcore import Tolerance


class InputError(ValueError):
    pass


def _sha256_bytes(raw: bytes) -> str:
    return hashlib.sha256(raw).hexdigest()


def _read_input(path: str):
    """Returns (parsed json, sha256, display name). Bare names resolve to
    the packaged data files when one exists."""
    if "/" not in path and not path.endswith(".json"):
        packaged = resources.files("hstarcat").joinpath(f"data/{path}.json")
        if packaged.is_file():
            raw = packaged.read_bytes()
            return json.loads(raw), _sha256_bytes(raw), f"bundled:{path}"
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}")
    try:
        return json.loads(raw), _sha256_bytes(raw), path
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}")


def _check_schema(doc, schema_name: str, display: str) -> None:
    import jsonschema

    raw = (
        resources.files("hstarcat")
        .joinpath(f"schema/v1/{schema_name}.schema.json")
        .read_text()
    )
    try:
        jsonschema.validate(doc, json.loads(raw))
    except jsonschema.ValidationError as exc:
        raise InputError(f"{display}: schema violation: {exc.message}")


def _load_fusion(path: str):
    doc, digest, name = _read_input(path)
    _check_schema(doc, "fusion", name)
    try:
        data = FusionData.from_json(doc)
    except (SchemaError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{name}: bad fusion data: {exc}")
    return data, digest, name


def _psi_for(data: FusionData, arg) -> SphericalWeight:
    if arg is None:
        return SphericalWeight(tuple(1.0 for _ in data.units))
    try:
        vals = tuple(float(x) for x in arg.split(","))
    except ValueError:
        raise InputError(f"bad --psi value {arg!r}")
    if len(vals) != len(data.units):
        raise InputError(
            f"--psi needs {len(data.units)} entries, got {len(vals)}"
        )
    if any(v <= 0 for v in vals):
        raise InputError("--psi entries must be positive")
    return SphericalWeight(vals)


def _build_algebra(eng: Engine, doc: dict, name: str):
    _check_schema(doc, "algebra", name)
    kind = doc.get("kind")
    if kind == "trivial":
        return intalg.trivial_algebra(eng, doc["unit"])
    if kind == "group":
        return intalg.group_algebra(eng, tuple(doc["labels"]))
    if kind == "pair":
        return intalg.pair_algebra(eng, eng.obj(dict(doc["object"])))
    raise InputError(f"{name}: unknown algebra kind {kind!r}")


def _round(x, nd=14):
    """Stabilize float formatting for byte-identical reports."""
    if isinstance(x, complex):
        x = x.real if abs(x.imag) < 1e-300 else x
    if isinstance(x, (float, np.floating)):
        return float(f"{float(x):.{nd}e}")
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, dict):
        return {k: _round(v, nd) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v, nd) for v in x]
    return x


class Report:
    def __init__(self, args, inputs):
        self.doc = {
            "command": [args.group, args.cmd] + [
                str(p) for p in getattr(args, "paths", [])
            ],
            "inputs": dict(inputs),
            "tolerance": args.tol,
            "seed": args.seed,
            "residuals": {},
            "verdicts": {},
        }

    def add(self, check: str, cert) -> None:
        self.doc["verdicts"][check] = "ACCEPT" if cert.ok else "REJECT"
        for k, v in cert.residuals.items():
            self.doc["residuals"][f"{check}.{k}"] = v
        if not cert.ok and cert.failed_axiom:
            self.doc.setdefault("violated_axioms", {})[check] = cert.failed_axiom

    def add_values(self, values: dict) -> None:
        self.doc.setdefault("values", {}).update(values)

    def finish(self, out) -> int:
        ok = all(v == "ACCEPT" for v in self.doc["verdicts"].values())
        self.doc["verdict"] = "ACCEPT" if ok else "REJECT"
        text = json.dumps(_round(self.doc), indent=2, sort_keys=True) + "\n"
        if out:
            with open(out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0 if ok else 1


# --- subcommand bodies --------------------------------------------------


def _cmd_fusion_validate(args):
    data, digest, name = _load_fusion(args.paths[0])
    rep = Report(args, {name: digest})
    rep.add("fusion", validate(data, args.tolerance))
    return rep.finish(args.out)


def _cmd_fusion_udf(args):
    data, digest, name = _load_fusion(args.paths[0])
    psi = _psi_for(data, args.psi)
    rep = Report(args, {name: digest})
    cert = validate(data, args.tolerance)
    rep.add("fusion", cert)
    if cert.ok:
        udf = udf_from_weight(data, psi, args.tolerance)
        worst = 0.0
        for c in data.simples:
            worst = max(
                worst,
                abs(loop_eval(udf, c, "L") - udf.d(c) / udf.d(data.s(c))),
                abs(loop_eval(udf, c, "R") - udf.d(c) / udf.d(data.t(c))),
            )
        from .certify import Certificate

        loops_ok = worst <= args.tolerance.bound(max(udf.dims.values()))
        rep.add(
            "loops",
            Certificate(
                ok=loops_ok,
                residuals={"loop_gap": worst},
                failed_axiom=None if loops_ok else "loop normalization",
            ),
        )
        rep.add_values({"dims": {c: udf.d(c) for c in data.simples}})
    return rep.finish(args.out)


def _fusion_engine(args, fusion_path):
    data, digest, name = _load_fusion(fusion_path)
    cert = validate(data, args.tolerance)
    if not cert.ok:
        raise InputError(f"{name}: fusion data fails validation: {cert.failed_axiom}")
    psi = _psi_for(data, args.psi)
    return Engine(data, udf_from_weight(data, psi, args.tolerance)), digest, name


def _cmd_alg_verify(args):
    eng, digest, name = _fusion_engine(args, args.paths[0])
    adoc, adig, aname = _read_input(args.paths[1])
    A = _build_algebra(eng, adoc, aname)
    rep = Report(args, {name: digest, aname: adig})
    rep.add("hstar_algebra", intalg.verify_hstar(A, args.tolerance, args.seed))
    return rep.finish(args.out)


def _cmd_alg_standardize(args):
    eng, digest, name = _fusion_engine(args, args.paths[0])
    adoc, adig, aname = _read_input(args.paths[1])
    A = _build_algebra(eng, adoc, aname)
    rep = Report(args, {name: digest, aname: adig})
    S = intalg.standardize(A, args.tolerance)
    special = eng.residual(
        eng.compose(S.mu, eng.dagger(S.mu)), eng.identity(S.word)
    )
    from .certify import Certificate

    sp_ok = special <= args.tolerance.bound()
    rep.add(
        "specialness",
        Certificate(
            ok=sp_ok,
            residuals={"mu_mu_dag": special},
            failed_axiom=None if sp_ok else "specialness",
        ),
    )
    rep.add("hstar_algebra", intalg.verify_hstar(S, args.tolerance, args.seed))
    return rep.finish(args.out)


def _cmd_alg_modcat(args):
    eng, digest, name = _fusion_engine(args, args.paths[0])
    adoc, adig, aname = _read_input(args.paths[1])
    A = _build_algebra(eng, adoc, aname)
    rep = Report(args, {name: digest, aname: adig})
    cert = intalg.verify_hstar(A, args.tolerance, args.seed)
    rep.add("hstar_algebra", cert)
    if cert.ok:
        mc = intalg.module_category(eng, A, args.tolerance, args.seed)
        rep.add_values(
            {"simple_modules": len(mc.simples), "module_dims": list(mc.dims)}
        )
    return rep.finish(args.out)


def _cmd_alg_intend(args):
    eng, digest, name = _fusion_engine(args, args.paths[0])
    adoc, adig, aname = _read_input(args.paths[1])
    A = _build_algebra(eng, adoc, aname)
    rep = Report(args, {name: digest, aname: adig})
    cert = intalg.verify_hstar(A, args.tolerance, args.seed)
    rep.add("hstar_algebra", cert)
    if cert.ok:
        defect = intalg.internal_end_comparison(A, args.tolerance)
        from .certify import Certificate

        ok = defect <= args.tolerance.bound() * 10
        rep.add(
            "internal_end",
            Certificate(
                ok=ok,
                residuals={"comparison_unitarity": defect},
                failed_axiom=None if ok else "internal-end comparison",
            ),
        )
    return rep.finish(args.out)


def _cmd_deligne_check(args):
    eng, digest, name = _fusion_engine(args, args.paths[0])
    rep = Report(args, {name: digest})
    mside = deligne.RegularRight(eng)
    m_objects = [eng.simple_obj(c) for c in eng.data.simples]
    rep.add(
        "right_action",
        deligne.right_action_isometry(
            mside, eng, m_objects, samples=5, seed=args.seed, tol=args.tolerance
        ),
    )
    # ladder traciality on sampled endomorphisms
    rng = np.random.default_rng(args.seed)
    nside = deligne.RegularLeft(eng)
    worst = 0.0
    for c in eng.data.simples:
        L = deligne.LadderObject(mside, nside, eng.simple_obj(c), eng.simple_obj(c))
        if deligne.ladder_hom_dim(L, L) == 0:
            continue
        for _ in range(5):
            F = deligne.random_ladder(L, L, rng)
            G = deligne.random_ladder(L, L, rng)
            worst = max(
                worst,
                abs(
                    deligne.ladder_trace(deligne.ladder_compose(F, G))
                    - deligne.ladder_trace(deligne.ladder_compose(G, F))
                ),
            )
    from .certify import Certificate

    ok = worst <= args.tolerance.bound(10.0)
    rep.add(
        "ladder_trace",
        Certificate(
            ok=ok,
            residuals={"traciality": worst},
            failed_axiom=None if ok else "traciality",
        ),
    )
    return rep.finish(args.out)


def _cmd_h3_complete(args):
    eng, digest, name = _fusion_engine(args, args.paths[0])
    rep = Report(args, {name: digest})
    X = hilb3.delooping(eng)
    rep.add(
        "sphericality",
        hilb3.presentation_sphericality(X, seed=args.seed, tol=args.tolerance),
    )
    Xs = hilb3.hilbert_sum_completion(X)
    S = hilb3.sum_object(Xs, list(eng.data.units) + [eng.data.units[0]])
    rep.add(
        "hilbert_sum",
        hilb3.certify_hilbert_sum(Xs, S, seed=args.seed, tol=args.tolerance),
    )
    return rep.finish(args.out)


def _cmd_h3_split_monad(args):
    eng, digest, name = _fusion_engine(args, args.paths[0])
    adoc, adig, aname = _read_input(args.paths[1])
    B = _build_algebra(eng, adoc, aname)
    rep = Report(args, {name: digest, aname: adig})
    try:
        split = hilb3.split_monad(B, args.tolerance, args.seed)
    except ValueError as exc:
        raise InputError(str(exc))
    rep.add("split_monad", split.certificate)
    return rep.finish(args.out)


def _cmd_h3_theorem_b(args):
    data, digest, name = _load_fusion(args.paths[0])
    psi = _psi_for(data, args.psi)
    rep = Report(args, {name: digest})
    cert = validate(data, args.tolerance)
    rep.add("fusion", cert)
    if cert.ok:
        rep.add(
            "theorem_b", hilb3.theorem_b_check(data, psi, args.tolerance, args.seed)
        )
    return rep.finish(args.out)


def _cmd_hstar_verify(args):
    doc, digest, name = _read_input(args.paths[0])
    _check_schema(doc, "hstar", name)
    rep = Report(args, {name: digest})
    try:
        blocks = doc["blocks"]
        weights = doc.get("weights")
        functional = doc.get("functional")
        if functional is not None:
            functional = [
                np.array([[complex(e[0], e[1]) for e in row] for row in phi])
                for phi in functional
            ]
    except (KeyError, TypeError, IndexError) as exc:
        raise InputError(f"{name}: bad H*-algebra spec: {exc}")
    rep.add(
        "hstar_trace",
        hstar1.verify_hstar_algebra(
            blocks, weights, functional, args.tolerance, args.seed
        ),
    )
    return rep.finish(args.out)


def _cmd_hstar_gns(args):
    doc, digest, name = _read_input(args.paths[0])
    _check_schema(doc, "hstar", name)
    rep = Report(args, {name: digest})
    try:
        A = hstar1.HStarAlgebra(tuple(doc["blocks"]), tuple(doc["weights"]))
    except (KeyError, ValueError) as exc:
        raise InputError(f"{name}: bad H*-algebra spec: {exc}")
    mod = hstar1.gns(A)
    resid = hstar1.module_trace_law_residual(mod, args.tolerance, args.seed)
    from .certify import Certificate

    ok = resid <= args.tolerance.bound(max(A.weights) * max(A.block_sizes))
    rep.add(
        "module_trace_law",
        Certificate(
            ok=ok,
            residuals={"rank_one_law": resid},
            failed_axiom=None if ok else "module trace law",
        ),
    )
    rep.add_values(
        {"gns_dim": mod.dim, "simple_dims": [d for _, d in hstar1.simple_modules(A)]}
    )
    return rep.finish(args.out)


_COMMANDS = {
    ("fusion", "validate"): (_cmd_fusion_validate, 1, False),
    ("fusion", "udf"): (_cmd_fusion_udf, 1, True),
    ("alg", "verify"): (_cmd_alg_verify, 2, True),
    ("alg", "standardize"): (_cmd_alg_standardize, 2, True),
    ("alg", "modcat"): (_cmd_alg_modcat, 2, True),
    ("alg", "intend"): (_cmd_alg_intend, 2, True),
    ("deligne", "check"): (_cmd_deligne_check, 1, True),
    ("h3", "complete"): (_cmd_h3_complete, 1, True),
    ("h3", "split-monad"): (_cmd_h3_split_monad, 2, True),
    ("h3", "theorem-b"): (_cmd_h3_theorem_b, 1, True),
    ("hstar", "verify"): (_cmd_hstar_verify, 1, False),
    ("hstar", "gns"): (_cmd_hstar_gns, 1, False),
}


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--tol", type=float, default=1e-9, help="absolute and relative tolerance"
    )
    common.add_argument("--seed", type=int, default=0, help="sampler seed")
    common.add_argument(
        "--out", default=None, help="write the JSON report here instead of stdout"
    )
    p = argparse.ArgumentParser(
        prog="hstarcat",
        description="certification toolkit for unitary fusion-categorical data",
    )
    sub = p.add_subparsers(dest="group", required=True)
    groups = {}
    for (g, c), (_, nargs, has_psi) in _COMMANDS.items():
        if g not in groups:
            gp = sub.add_parser(g)
            groups[g] = gp.add_subparsers(dest="cmd", required=True)
        cp = groups[g].add_parser(c, parents=[common])
        cp.add_argument("paths", nargs=nargs)
        if has_psi:
            cp.add_argument("--psi", default=None, help="comma-separated unit weights")
    return p


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    if (args.group, args.cmd) not in _COMMANDS:
        print("unknown subcommand", file=sys.stderr)
        return 2
    args.tolerance = Tolerance(abs_eps=args.tol, rel_eps=args.tol)
    if not hasattr(args, "psi"):
        args.psi = None
    fn, nargs, _ = _COMMANDS[(args.group, args.cmd)]
    if len(args.paths) != nargs:
        print(f"expected {nargs} input path(s)", file=sys.stderr)
        return 2
    try:
        return fn(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except SchemaError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
