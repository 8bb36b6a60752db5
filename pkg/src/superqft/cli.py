"""Command-line front end: acceptance suites, Green's operators, transforms and a quantization demo."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import dynamics as dyn
from . import model11 as m11
from . import model32 as m32
from . import quantize as qz
from .enriched import RelMorphism
from .errors import SuperQFTError
from .superfield import GrassmannSection
from .suites import SUITES, SuiteConfig, run_suite


def _dump(obj: Any, path: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load(path: str) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _parse_tols(items: Sequence[str]) -> dict[str, float]:
    out = {}
    for item in items or ():
        key, sep, val = item.partition("=")
        if not sep:
            raise ValueError(f"--tol expects NAME=VALUE, got {item!r}")
        out[key] = float(val)
    return out


def cmd_check(args) -> int:
    data = _load(args.config) if args.config else {}
    data["suite"] = args.suite
    if args.seed is not None:
        data["seed"] = args.seed
    if args.report:
        data["report"] = args.report
    data["tols"] = {**data.get("tols", {}), **_parse_tols(args.tol)}
    cfg = SuiteConfig.from_dict(data)
    report = run_suite(cfg)
    for name, suite in report["suites"].items():
        for c in suite["checks"]:
            status = "PASS" if c["passed"] else "FAIL"
            tol = "" if c["tol"] is None else f" (tol {c['tol']:.1e})"
            print(f"{status}  [{name}] {c['name']}: {c['value']:.3e}{tol}", file=sys.stderr)
    _dump(report, cfg.report)
    return 0 if report["pass"] else 1


def cmd_green(args) -> int:
    data = _load(args.input)
    side = {"retarded": "retarded", "advanced": "advanced", "causal": "causal"}[args.side]
    if args.model == "1|1":
        F = m11.Section11.from_json(data)
        th = dyn.theory11(F.grid)
    else:
        F = m32.Section32.from_json(data)
        th = dyn.theory32(F.grid)
    out = dyn.causal_propagator(th, F) if side == "causal" else th.green(F, side)
    _dump(out.to_json(), args.output)
    return 0


def cmd_transform(args) -> int:
    H = GrassmannSection.from_json(_load(args.section))
    m = RelMorphism.from_json(_load(args.morphism))
    model = "3|2" if H.k == 2 else "1|1"
    if model != m.model:
        raise ValueError(f"section is a {model} section but the morphism belongs to {m.model}")
    out = m.pushforward(H) if args.push else m.pullback(H)
    _dump(out.to_json(), args.output)
    return 0


def cmd_quantize_demo(args) -> int:
    """Register a few 1|1 bumps and print products, commutators and Q̂ images."""
    rng = np.random.default_rng(args.seed)
    th = dyn.theory11()
    reg = qz.GeneratorRegistry(th)
    secs = dyn.random_sections11(th.grid, rng, args.count)
    gens = [qz.field(F, reg) for F in secs]
    pairs = []
    for i in range(len(gens)):
        for j in range(i, len(gens)):
            pairs.append({"ids": [i, j],
                          "product": qz.alg_mul(gens[j], gens[i]).to_json(),
                          "graded_commutator": qz.graded_commutator(gens[i], gens[j]).to_json()})
    report = {"parities": reg.parities, "beta": str(th.beta), "pairs": pairs,
              "susy_images": [qz.susy_hat(a, m11.susy_Q, reg).to_json() for a in gens]}
    _dump(report, args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="superqft", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="run an acceptance suite")
    c.add_argument("suite", choices=[*SUITES, "all"])
    c.add_argument("--config", help="JSON file with SuiteConfig fields")
    c.add_argument("--seed", type=int)
    c.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a named tolerance")
    c.add_argument("--report", help="write the JSON report here instead of stdout")
    c.set_defaults(func=cmd_check)

    g = sub.add_parser("green", help="apply a Green's operator to a section file")
    g.add_argument("model", choices=["1|1", "3|2"])
    g.add_argument("side", choices=["retarded", "advanced", "causal"])
    g.add_argument("--input", required=True)
    g.add_argument("--output")
    g.set_defaults(func=cmd_green)

    t = sub.add_parser("transform", help="pull back (or push forward) a Grassmann section along a morphism")
    t.add_argument("--section", required=True)
    t.add_argument("--morphism", required=True)
    t.add_argument("--push", action="store_true", help="push forward instead of pulling back")
    t.add_argument("--output")
    t.set_defaults(func=cmd_transform)

    q = sub.add_parser("quantize-demo", help="small worked example of the field algebra")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--count", type=int, default=3)
    q.add_argument("--output")
    q.set_defaults(func=cmd_quantize_demo)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SuperQFTError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
