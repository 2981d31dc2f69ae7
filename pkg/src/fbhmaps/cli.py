"""Command-line front end.

Every command prints one line of JSON to stdout. Exit status is 0 on
success, 2 when the input is rejected on mathematical or schema grounds
(the JSON then carries a ``reason``), and 1 for anything unexpected.
JSON arguments may be given inline, as ``@path`` or as a path to a file.
"""

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import ballgeo, fbhaut, jsonio, mapsys, normalizer, transfer
from .domain import DomainParams, classify, fbh_defining
from .errors import FBHError, SchemaError


class StrategyDisagreement(FBHError):
    reason = "StrategyDisagreement"


def load_json(arg):
    if arg == "-":
        text = sys.stdin.read()
    elif arg.startswith("@"):
        text = Path(arg[1:]).read_text()
    elif not arg.lstrip().startswith(("{", "[")) and Path(arg).is_file():
        text = Path(arg).read_text()
    else:
        text = arg
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None


def _params_for_point(p, mu):
    return DomainParams(p.z.shape[-1], p.w.shape[-1], mu)


def cmd_member(args):
    p = jsonio.dec_point(load_json(args.point))
    params = _params_for_point(p, args.mu)
    region = classify(params, p, args.tol)
    return {"region": region.value, "defining": float(fbh_defining(params, p))}


def _aut(arg, mu, what):
    return jsonio.dec_aut(load_json(arg), mu, what)


def cmd_aut(args):
    mu = args.mu
    if args.op == "compose":
        g, h = _aut(args.g, mu, "g"), _aut(args.h, mu, "h")
        return {"aut": jsonio.enc_aut(fbhaut.compose(g, h))}
    if args.op == "invert":
        return {"aut": jsonio.enc_aut(fbhaut.inverse(_aut(args.g, mu, "g")))}
    if args.op == "apply":
        g = _aut(args.g, mu, "g")
        p = jsonio.dec_point(load_json(args.point))
        return {"point": jsonio.enc_point(fbhaut.apply(g, p))}
    p = jsonio.dec_point(load_json(args.point))
    g = fbhaut.to_base(_params_for_point(p, mu), p, args.tol)
    return {"aut": jsonio.enc_aut(g)}


CHART_SCHEMA = {
    "type": "object",
    "properties": {"stage": {"enum": [s.value for s in transfer.Stage]}, "coords": jsonio.VECTOR},
    "required": ["stage", "coords"],
}


def cmd_transfer(args):
    obj = load_json(args.point)
    if args.op == "to-ball":
        if "stage" in obj and obj["stage"] != transfer.Stage.FBH.value:
            raise SchemaError(f"to-ball needs an FBH point, got stage {obj['stage']!r}")
        p = jsonio.dec_point({k: v for k, v in obj.items() if k != "stage"})
        x = transfer.to_ball(p, args.mu)
        return {"stage": x.stage.value, "coords": jsonio.enc_vector(x.coords)}
    jsonio.validate(obj, CHART_SCHEMA, "point")
    if obj["stage"] != transfer.Stage.BALL.value:
        raise SchemaError(f"from-ball needs a Ball point, got stage {obj['stage']!r}")
    p = transfer.from_ball(transfer.ball_point(jsonio.dec_vector(obj["coords"])), args.mu)
    return {"stage": transfer.Stage.FBH.value, **jsonio.enc_point(p)}


PAIRS_SCHEMA = {
    "type": "object",
    "properties": {"x": {"type": "array", "items": jsonio.VECTOR},
                   "y": {"type": "array", "items": jsonio.VECTOR}},
    "required": ["x", "y"],
}


def cmd_ball(args):
    obj = load_json(args.input)
    if args.op == "fit":
        jsonio.validate(obj, PAIRS_SCHEMA, "pairs")
        xs = np.array([jsonio.dec_vector(v) for v in obj["x"]])
        ys = np.array([jsonio.dec_vector(v) for v in obj["y"]])
        T = ballgeo.fit_projective(xs, ys, xs.shape[1], ys.shape[1], unitarity_tol=args.unitarity_tol)
        return {"M": jsonio.enc_matrix(T.normalized().M), "fit_residual": T.fit_residual,
                "form_residual": T.h_residual()}
    jsonio.validate(obj, {"type": "object", "properties": {"M": jsonio.MATRIX}, "required": ["M"]}, "input")
    cp = ballgeo.canonical_form(ballgeo.ProjectiveAut(jsonio.dec_matrix(obj["M"])))
    diag = {k: (jsonio.enc_complex(v) if isinstance(v, complex) else v) for k, v in cp.diagnostics.items()}
    return {"A": jsonio.enc_matrix(cp.A), "a0": jsonio.enc_complex(cp.a0), "a": jsonio.enc_vector(cp.a),
            "lambda": jsonio.enc_complex(cp.lam), "diagnostics": diag}


def _direct(F, args):
    if F.in_params.m != 1 or F.out_params.m != 1:
        raise normalizer.HypothesisViolated("only m = 1 domains are classified")
    kw = dict(seed=args.seed, count=args.count, jobs=args.jobs)
    if F.out_params.n == F.in_params.n:
        return normalizer.normalize_self(F, F.in_params, **kw)
    return normalizer.normalize_nonequidim(F, F.in_params.n, F.out_params.n, F.in_params, **kw)


def _ballfit_json(b):
    return {"k": b.k, "kappa": jsonio.enc_complex(b.kappa), "lambda": jsonio.enc_complex(b.lam),
            "a0": jsonio.enc_complex(b.a0), "a": jsonio.enc_vector(b.a_vec), "strategy": "BallFit",
            "diagnostics": b.diagnostics}


def cmd_normalize(args):
    F = mapsys.parse(load_json(args.map))
    if args.strategy == "ballfit":
        rep = normalizer.verify_proper(F, F.in_params, F.out_params, args.seed, args.count, jobs=args.jobs)
        if not rep.passed:
            raise normalizer.NotProper("sampled properness check failed")
        return _ballfit_json(normalizer.normalize_ballfit(F, F.in_params, F.out_params, seed=args.seed))
    r = _direct(F, args)
    out = {"k": r.k, "sigma": jsonio.enc_aut(r.sigma), "tau": jsonio.enc_aut(r.tau),
           "residual_sup": r.residual_sup, "strategy": r.strategy}
    if args.strategy == "both":
        b = normalizer.normalize_ballfit(F, F.in_params, F.out_params, seed=args.seed)
        if b.k != r.k:
            raise StrategyDisagreement(f"direct k = {r.k}, ball-fit k = {b.k}")
        out["strategy"] = "Both"
        out["ballfit"] = _ballfit_json(b)
    return out


def cmd_verify_proper(args):
    F = mapsys.parse(load_json(args.map))
    rep = normalizer.verify_proper(F, F.in_params, F.out_params, args.seed, args.count, jobs=args.jobs)
    out = rep.as_dict()
    if not rep.passed:
        out["reason"] = "NotProper"
        return out, 2
    return out


def cmd_fiber_count(args):
    F = mapsys.parse(load_json(args.map))
    target = jsonio.dec_point(load_json(args.target))
    return {"count": normalizer.fiber_count(F, target)}


def default_seed():
    try:
        return int(os.environ.get("FBH_SEED", "0"))
    except ValueError:
        return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=default_seed(), help="master seed (env FBH_SEED)")
    common.add_argument("--jobs", type=int, default=1, help="threads for sample evaluation")
    parser = argparse.ArgumentParser(prog="fbhmaps", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("member", help="classify a point of D_{n,m}(mu)", parents=[common])
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--point", required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("aut", help="automorphism group operations", parents=[common])
    p.add_argument("op", choices=["compose", "invert", "apply", "to-base"])
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--g")
    p.add_argument("--h")
    p.add_argument("--point")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_aut)

    p = sub.add_parser("transfer", help="log/Cayley charts to and from the ball", parents=[common])
    p.add_argument("op", choices=["to-ball", "from-ball"])
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--point", required=True)
    p.set_defaults(func=cmd_transfer)

    p = sub.add_parser("ball", help="fit or decompose ball automorphisms", parents=[common])
    p.add_argument("op", choices=["fit", "canonical"])
    p.add_argument("--input", required=True)
    p.add_argument("--unitarity-tol", type=float, default=ballgeo.BALL_AUT_TOL)
    p.set_defaults(func=cmd_ball)

    for name, func, helptext in [
        ("normalize", cmd_normalize, "recover k and normalizing automorphisms"),
        ("verify-proper", cmd_verify_proper, "sampled properness check"),
    ]:
        p = sub.add_parser(name, help=helptext, parents=[common])
        p.add_argument("map")
        p.add_argument("--count", type=int, default=200)
        p.set_defaults(func=func)
        if name == "normalize":
            p.add_argument("--strategy", choices=["direct", "ballfit", "both"], default="direct")

    p = sub.add_parser("fiber-count", help="count preimages of a target point", parents=[common])
    p.add_argument("map")
    p.add_argument("--target", required=True)
    p.set_defaults(func=cmd_fiber_count)
    return parser


AUT_REQUIRES = {"compose": ("g", "h"), "invert": ("g",), "apply": ("g", "point"), "to-base": ("point",)}


def _emit(obj):
    sys.stdout.write(jsonio.dumps(obj) + "\n")


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "aut":
        for name in AUT_REQUIRES[args.op]:
            if getattr(args, name) is None:
                _emit({"reason": "SchemaError", "message": f"--{name} is required for aut {args.op}"})
                return 2
    try:
        result = args.func(args)
    except FBHError as exc:
        print(f"{exc.reason}: {exc}", file=sys.stderr)
        _emit({"reason": exc.reason, "message": str(exc)})
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 1
    code = 0
    if isinstance(result, tuple):
        result, code = result
    _emit(result)
    return code


if __name__ == "__main__":
    sys.exit(main())
