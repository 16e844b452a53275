"""Command-line front end: scenario files in, deterministic JSON reports out.

Exit codes: 0 success, 2 property violation found, 1 error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import jsonschema

from . import __version__
from .conditions import CycloClass, SerreWeight, gate_report
from .errors import KisinError, SchemaError
from .ext import SHAPE_TAGS, ExtProblem, check_upper_bound, ext_dim
from .field_core import GlobalParams
from .models import (CharClass, WeightTemplate, c1_sufficient, chars_from_matrix, check_C3,
                     enumerate_models, pls_components)
from .shape import TriangularKisin, shapelemma_verify
from .suites import PROFILES, REGISTRY, SUITE_FUNCS, SuiteContext, run_suites

SCHEMA_VERSION = 1
EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2

_INT = {"type": "integer"}
_INTS = {"type": "array", "items": _INT}
_MATRIX = {"type": "array", "items": _INTS, "minItems": 1}
_UNIT = {"oneOf": [_INT, _INTS]}


def _obj(props: dict, required=()) -> dict:
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


_CHARS = {"type": "array", "items": _obj({"e": _INT, "a": _UNIT}, ["e"])}
_MODULE = _obj({
    "t": _MATRIX,
    "a": {"type": "array", "items": _UNIT},
    "entries": {"type": "array", "items": _obj(
        {"s": _INT, "i": _INT, "j": _INT, "coeffs": {"type": "array", "items": _UNIT}},
        ["s", "i", "j", "coeffs"])},
}, ["t"])

PARAMS_SCHEMA = _obj({"p": _INT, "f": _INT, "m": _INT, "N": _INT, "field_poly": _INTS}, ["p", "f"])

PAYLOAD_SCHEMAS = {
    "models": _obj({"chars": _CHARS, "template": _MATRIX}, ["chars", "template"]),
    "conditions": _obj({"template": _MATRIX, "chars": _CHARS, "serre": _MATRIX, "a_cyc": _UNIT},
                       ["template"]),
    "ext": _obj({"sub": _MODULE, "quot": _MODULE, "r": _INT, "N": _INT,
                 "shape_tag": {"enum": list(SHAPE_TAGS)}, "check_bound": {"type": "boolean"}},
                ["sub", "quot"]),
    "shape-verify": _obj({"t": _INTS, "mode": {"enum": ["exhaustive", "brute", "random"]},
                          "trials": _INT}, ["t"]),
    "pls": _obj({"models": {"type": "array", "items": _MATRIX, "minItems": 1},
                 "chars": _CHARS, "template": _MATRIX}),
    "sweep": _obj({"suites": {"type": "array", "items": {"enum": sorted(SUITE_FUNCS)}},
                   "profile": {"enum": sorted(PROFILES)}}),
}

SCENARIO_SCHEMA = _obj({
    "schema_version": {"const": SCHEMA_VERSION},
    "params": PARAMS_SCHEMA,
    "task": {"enum": sorted(PAYLOAD_SCHEMAS)},
    "payload": {"type": "object"},
}, ["schema_version", "params", "task", "payload"])

# Descriptive anchors for quantities whose meaning comes from the theory.
ANCHORS = {
    "c1": "some model of the character list exists within the weight template",
    "c1_cases": "structural template conditions that force a unique model",
    "c3": "some embedding column has no two weights differing by p - 1",
    "d_nek": "count of (quotient row, embedding) pairs whose weight exceeds the sub weight",
    "ext_dim": "classes of the shaped extension space modulo Frobenius-twisted conjugation",
    "theorem_main_gate": "c1 and (c2a or c2b)",
}


# --- loading ------------------------------------------------------------------------

def _validate(instance, schema, prefix: str):
    errors = sorted(jsonschema.Draft202012Validator(schema).iter_errors(instance),
                    key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = "/".join([prefix] + [str(x) for x in err.absolute_path]) if prefix else \
            "/".join(str(x) for x in err.absolute_path)
        raise SchemaError(err.message, path=path or "/")


def load_scenario(path: str | Path, params_override: str | Path | None = None) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc.msg} (line {exc.lineno})", path="/") from exc
    _validate(raw, SCENARIO_SCHEMA, "")
    _validate(raw["payload"], PAYLOAD_SCHEMAS[raw["task"]], "payload")
    if params_override is not None:
        override = json.loads(Path(params_override).read_text())
        _validate(override, PARAMS_SCHEMA, "params")
        raw["params"] = override
    return raw


def _unit(F, value) -> int:
    return F(value)


def _chars(F, recs) -> list[CharClass]:
    return [CharClass(int(c["e"]), _unit(F, c.get("a", 1))) for c in recs]


def _module(F, N: int, rec) -> TriangularKisin:
    t = rec["t"]
    a = [_unit(F, x) for x in rec.get("a", [1] * len(t))]
    entries = {(e["s"], e["i"], e["j"]): [F(c) for c in e["coeffs"]] for e in rec.get("entries", [])}
    return TriangularKisin.build(F, N, t, a, entries)


# --- tasks ------------------------------------------------------------------------------

def task_models(params: GlobalParams, payload: dict, opts) -> tuple[dict, int]:
    F, p = params.field, params.p
    template = WeightTemplate(payload["template"])
    chars = _chars(F, payload["chars"])
    models = enumerate_models(chars, template, p)
    comps = pls_components(models, p)
    return {
        "models": [[list(r) for r in m] for m in models],
        "c1": bool(models),
        "c1_cases": sorted(c1_sufficient(template, p)),
        "c3": check_C3(template, p),
        "pls_components": comps.to_record(),
        "anchors": {k: ANCHORS[k] for k in ("c1", "c1_cases", "c3")},
    }, EXIT_OK


def task_conditions(params: GlobalParams, payload: dict, opts) -> tuple[dict, int]:
    F, p = params.field, params.p
    template = WeightTemplate(payload["template"])
    chars = _chars(F, payload["chars"]) if "chars" in payload else None
    cyc = CycloClass(p, template.f, _unit(F, payload.get("a_cyc", 1)))
    serre = SerreWeight(payload["serre"]) if "serre" in payload else None
    rep = gate_report(template, p, chars, cyc, F, serre)
    rep["anchors"] = {k: ANCHORS[k] for k in ("c1", "c1_cases", "theorem_main_gate")}
    return rep, EXIT_OK


def task_ext(params: GlobalParams, payload: dict, opts) -> tuple[dict, int]:
    F = params.field
    d = len(payload["sub"]["t"]) + len(payload["quot"]["t"])
    N = payload.get("N") or params.p * d * (params.p + 1)
    pb = ExtProblem(_module(F, N, payload["sub"]), _module(F, N, payload["quot"]), payload.get("r"))
    tag = payload.get("shape_tag", "phi_shape")
    out = {"ext": ext_dim(pb, tag, N, opts.precision_step).to_record(),
           "anchors": {"ext_dim": ANCHORS["ext_dim"]}}
    code = EXIT_OK
    if payload.get("check_bound"):
        rep = check_upper_bound(pb, N, opts.precision_step)
        out["bound"] = rep.to_record()
        out["anchors"]["d_nek"] = ANCHORS["d_nek"]
        if not rep.holds:
            code = EXIT_VIOLATION
    return out, code


def task_shape_verify(params: GlobalParams, payload: dict, opts) -> tuple[dict, int]:
    kwargs = {"trials": payload.get("trials", 10_000), "seed": opts.seed}
    if opts.budget is not None:
        kwargs["budget"] = opts.budget
    rep = shapelemma_verify(params.field, payload["t"], payload.get("mode", "exhaustive"), **kwargs)
    return rep.to_record(), EXIT_OK if rep.ok else EXIT_VIOLATION


def task_pls(params: GlobalParams, payload: dict, opts) -> tuple[dict, int]:
    p = params.p
    given = [tuple(tuple(r) for r in m) for m in payload.get("models", [])]
    if "template" in payload:
        template = WeightTemplate(payload["template"])
    elif given:
        template = WeightTemplate.of_matrix(given[0])
    else:
        raise SchemaError("needs a template or at least one model", path="payload")
    chars = _chars(params.field, payload["chars"]) if "chars" in payload else chars_from_matrix(given[0], p)
    models = enumerate_models(chars, template, p)
    comps = pls_components(models, p)
    out = {"model_count": len(models), "component_count": comps.count, "components": comps.to_record()}
    if given:
        missing = [[list(r) for r in m] for m in given if m not in models]
        if missing:
            raise SchemaError(f"not models of the character list: {missing}", path="payload/models")
        ids = [comps.component_of(m) for m in given]
        out["given_components"] = ids
        out["given_distinct_components"] = len(set(ids))
    return out, EXIT_OK


def task_sweep(params: GlobalParams | None, payload: dict, opts) -> tuple[dict, int]:
    profile = payload.get("profile", opts.profile)
    names = payload["suites"] if "suites" in payload else PROFILES[profile]
    ctx = SuiteContext(seed=opts.seed, budget=opts.budget, scale="quick" if profile == "quick" else "desk")
    results = run_suites(names, ctx)
    failed = [r.name for r in results if r.status == "fail"]
    inconclusive = [r.name for r in results if r.status == "inconclusive"]
    out = {"profile": profile, "suites": [r.to_record() for r in results],
           "passed": not failed, "failed": failed, "inconclusive": inconclusive}
    return out, EXIT_VIOLATION if failed else EXIT_OK


TASKS = {
    "models": task_models,
    "conditions": task_conditions,
    "ext": task_ext,
    "shape-verify": task_shape_verify,
    "pls": task_pls,
    "sweep": task_sweep,
}


# --- reports ------------------------------------------------------------------------

def make_report(task: str, params: dict | None, results: dict, opts) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "task": task,
        "params": params,
        "results": results,
        "provenance": {"tool": "kisinshape", "version": __version__, "seed": opts.seed,
                       "precision_step": opts.precision_step, "budget": opts.budget},
    }


def dump(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _emit(report: dict, out: str | None):
    text = dump(report)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def run_scenario(path, opts) -> tuple[dict, int]:
    raw = load_scenario(path, opts.params)
    params = GlobalParams.from_record(raw["params"])
    results, code = TASKS[raw["task"]](params, raw["payload"], opts)
    return make_report(raw["task"], params.to_record(), results, opts), code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kisinshape", description=__doc__.splitlines()[0],
                                 formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    ap.add_argument("--version", action="version", version=f"kisinshape {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="write the report here instead of standard output")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized modes")
        p.add_argument("--precision-step", type=int, default=None,
                       help="extra precision for stability certificates; doubles N when omitted")
        p.add_argument("--budget", type=int, default=None,
                       help="maximum checks per suite or search; unlimited when omitted")

    run = sub.add_parser("run", help="run one scenario file",
                         formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    run.add_argument("scenario", help="JSON scenario file")
    run.add_argument("--params", help="JSON params record overriding the scenario params")
    run.add_argument("--profile", default="desk", choices=sorted(PROFILES),
                     help="suite profile for sweep scenarios without a suite list")
    common(run)

    sw = sub.add_parser("sweep", help="run registered property suites",
                        formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sw.add_argument("--profile", default="desk", choices=sorted(PROFILES))
    sw.add_argument("--suite", action="append", choices=sorted(SUITE_FUNCS),
                    help="run only these suites (repeatable)")
    sw.add_argument("--params", help="accepted for symmetry with run; suites fix their own parameters")
    common(sw)

    sub.add_parser("suites", help="list registered suites and profiles")
    return ap


def main(argv=None) -> int:
    opts = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        if opts.command == "suites":
            sys.stdout.write(dump({"suites": list(REGISTRY), "profiles": PROFILES}))
            return EXIT_OK
        if opts.command == "run":
            report, code = run_scenario(opts.scenario, opts)
        else:
            payload = {"suites": opts.suite} if opts.suite else {}
            results, code = task_sweep(None, payload, opts)
            report = make_report("sweep", None, results, opts)
        _emit(report, opts.out)
    except SchemaError as exc:
        print(f"kisinshape: schema error at {exc.path}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (KisinError, OSError, json.JSONDecodeError) as exc:
        print(f"kisinshape: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(f"kisinshape: wall time {time.perf_counter() - start:.2f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
