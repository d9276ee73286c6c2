"""Command-line front end.

Every command prints one JSON report per line (``--pretty`` for a
human-readable rendering).  Exit status: 0 when every verification in the
trail passed, 1 on a failed check or a domain error, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import atiyah as AT
from . import forms as F
from . import hconn as HC
from . import suite as S
from . import sympgeo as SG
from . import weyl as W
from .errors import ParseError, RQuantError
from .expr import parse_one_form, parse_poly, parse_weyl
from .groebner import IdealPresentation
from .polyring import PolyRing
from .scalars import is_prime

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class SessionConfig:
    p: int
    n: int
    N: int
    seed: int

    @classmethod
    def from_args(cls, args):
        p = args.p
        if p <= 2 or not is_prime(p):
            raise UsageError(f"--p must be an odd prime, got {p}")
        if args.n < 1:
            raise UsageError("--n must be at least 1")
        N = p + 2 if args.trunc is None else args.trunc
        if N < p + 2:
            raise UsageError(f"--trunc must be at least p + 2 = {p + 2}")
        return cls(p, args.n, N, args.seed)

    def base(self, kind="poly", N=None, prefix="x"):
        return PolyRing.make(self.p, [f"{prefix}{i + 1}" for i in range(self.n)], kind,
                             N=self.N if N is None else N)


class Report:
    def __init__(self, command, args):
        self.command = command
        self.args = args
        self.result = {}
        self.trail = []
        self.error = None

    def check(self, label, ok):
        self.trail.append({"check": label, "ok": bool(ok)})
        return ok

    @property
    def ok(self):
        return self.error is None and all(t["ok"] for t in self.trail)

    def to_json(self):
        out = {"command": self.command, "args": self.args, "result": self.result,
               "trail": self.trail, "status": "ok" if self.ok else "failed"}
        if self.error:
            out["error"] = self.error
        return out


def _echo(args):
    skip = {"func", "pretty", "json", "command"}
    return {k: v for k, v in vars(args).items() if k not in skip and v is not None}


def _load_json(text):
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.pos) from None


# commands

def cmd_p_op(cfg, args, rep):
    alg = W.WeylAlgebra(cfg.p, cfg.n, cfg.N)
    a = parse_weyl(args.elem, alg)
    ap = W.p_operation(a)
    rep.result = {"element": str(a), "p_operation": str(ap)}
    model = SG.RestrictedSymplecticModel(cfg.p, cfg.n)
    eta_side = SG.p_operation_from_eta(a.mod_h(), model)
    rep.check("p-operation mod h equals i^[p]_{H_f} eta", ap.mod_h() == eta_side)
    if len(alg.basis()) <= 1000:
        power = a
        for _ in range(cfg.p - 1):
            power = W.matrix_product_oracle(power, a)
        rep.check("a^p agrees with the left-regular matrix oracle", power == a ** cfg.p)


def cmd_bracket(cfg, args, rep):
    alg = W.WeylAlgebra(cfg.p, cfg.n, cfg.N)
    a, b = parse_weyl(args.a, alg), parse_weyl(args.b, alg)
    br = W.poisson_bracket(a, b)
    rep.result = {"bracket": str(br)}
    rep.check("h{a,b} = ab - ba", br * alg.h() == W.commutator(a, b))
    model = SG.RestrictedSymplecticModel(cfg.p, cfg.n)
    rep.check("bracket mod h equals H_a(b)",
              br.mod_h() == SG.poisson_bracket_A0(a.mod_h(), b.mod_h(), model))


def _connection(cfg, args):
    base = cfg.base(args.base)
    return HC.HConnection(parse_one_form(args.alpha, base))


def cmd_p_curvature(cfg, args, rep):
    conn = _connection(cfg, args)
    fields = range(cfg.n) if args.field is None else [args.field - 1]
    out = {}
    for i in fields:
        kappa = HC.p_curvature(conn, i)
        out[f"d/dx{i + 1}"] = str(kappa)
        rep.check(f"closed formula = {cfg.p}-fold composition for d/dx{i + 1}", True)
        rep.check(f"divisible by h^{cfg.p} for d/dx{i + 1}", True)
    rep.result = {"alpha": str(conn.alpha), "p_curvature": out}


def cmd_p_support(cfg, args, rep):
    conn = _connection(cfg, args)
    psup = HC.p_support(conn)
    theta = HC.extract_theta(psup)
    rep.result = {"alpha": str(conn.alpha), "generators": psup.generator_strings(),
                  "trivial_mod_hp": psup.trivial_mod_hp, "theta": str(theta)}
    rep.check("p-curvature routes agree on every coordinate field", True)


def _graph(cfg, args, fiber):
    model = SG.RestrictedSymplecticModel(cfg.p, cfg.n, fiber=fiber)
    phis = args.phi or []
    if len(phis) != cfg.n:
        raise UsageError(f"need exactly {cfg.n} --phi arguments")
    B = model.base_ring
    return model, SG.SubvarietyPresentation.graph([parse_poly(t, B) for t in phis], model)


def cmd_check_lagrangian(cfg, args, rep):
    _, Y = _graph(cfg, args, "poly")
    rep.result = {"form": str(SG.graph_form(Y)), "lagrangian": SG.is_lagrangian(Y)}


def cmd_check_restricted(cfg, args, rep):
    model, Y = _graph(cfg, args, "poly")
    v = SG.is_restricted_subvariety(Y, model)
    rep.result = {"restricted": v.restricted, "witness": v.witness}
    rep.check("membership route agrees with exactness route", v.via_membership == v.via_exactness)


def cmd_check_coisotropic(cfg, args, rep):
    base = cfg.base("poly")
    if args.alpha:
        psup = HC.p_support(HC.HConnection(parse_one_form(args.alpha, base)))
        ring, gens, labels = psup.ring, psup.generators, psup.generator_strings()
    else:
        ring = HC.support_ring(base)
        if not args.gen:
            raise UsageError("give --gen generators or --alpha")
        gens = [parse_poly(t, ring) for t in args.gen]
        labels = [str(g) for g in gens]
    v = SG.is_coisotropic_ideal(IdealPresentation(gens, ring))
    rep.result = {"generators": labels, "coisotropic": v.coisotropic}
    if not v.coisotropic:
        rep.result.update({"pair": list(v.pair), "bracket": str(v.bracket),
                           "h_valuation": v.h_valuation,
                           "unit_multiple_of_h_power": v.unit_multiple_of_h_power})


def cmd_classify(cfg, args, rep):
    base = cfg.base(args.base or "nil", N=1)
    conn = HC.HConnection(parse_one_form(args.alpha, base))
    cls = HC.classify_quantization(conn)
    rep.result = {"alpha": str(conn.alpha), "logarithmic": cls.logarithmic,
                  "log_defect": [str(x) for x in cls.log_defect]}
    if cls.logarithmic:
        rep.result["witness"] = str(cls.witness)
        rep.result["isomorphism_to_standard"] = f"1 -> ({cls.isomorphism_to_standard})*1"
        rep.check("dlog(witness) = alpha", F.dlog(cls.witness) == conn.alpha)
    if args.against:
        other = HC.HConnection(parse_one_form(args.against, base))
        iso, g = HC.isomorphic(conn, other)
        rep.result["isomorphic_to_other"] = iso
        if iso:
            rep.result["gauge"] = str(g)
            rep.check("alpha - beta = dlog(gauge)", F.dlog(g) == conn.alpha - other.alpha)


def cmd_normal_form(cfg, args, rep):
    B = cfg.base("nil", N=1, prefix="z")
    if not args.image or len(args.image) != 2 * cfg.n:
        raise UsageError(f"need exactly {2 * cfg.n} --image arguments (x's then y's)")
    images = [parse_poly(t, B) for t in args.image]
    res = SG.normal_form(images, cfg.N)
    rep.result = {
        "chain": [{"step": label, "images": [str(g) for g in phi.images]}
                  for label, phi in res.chain],
        "g": [str(g) for g in res.g], "primitive": str(res.primitive),
        "final_images": [str(g) for g in res.final_images], "kernel_is_J": res.verified}
    for label, ok in res.trail:
        rep.check(label, ok)


def _cover(cfg, data):
    names = data.get("vars") or [f"x{i + 1}" for i in range(cfg.n)]
    opens = [[names.index(v) if isinstance(v, str) else v for v in o]
             for o in data.get("opens", [[]])]
    return AT.CechCover(cfg.p, names, opens, data.get("lo"), data.get("hi"),
                        data.get("base_kind", "poly"))


def _pair_key(key):
    i, j = (int(t) for t in key.split(","))
    return i, j


def _cls(cover, data):
    z = AT.CechClass.zero(cover)
    if not data:
        return z
    alpha = dict(z.alpha)
    for key, text in (data.get("alpha") or {}).items():
        i, j = _pair_key(key)
        alpha[(i, j)] = parse_one_form(text, cover.overlap_ring(i, j))
    gamma = [parse_one_form(t, cover.twisted_ring(i)) if t else z.gamma[i]
             for i, t in enumerate(data.get("gamma") or [None] * len(cover.opens))]
    return AT.CechClass(cover, alpha, gamma)


def cmd_cech_class(cfg, args, rep):
    data = _load_json(args.input)
    cover = _cover(cfg, data)
    trans = AT.trivial_transitions(cover)
    for key, text in (data.get("transitions") or {}).items():
        i, j = _pair_key(key)
        trans[(i, j)] = parse_poly(text, cover.overlap_ring(i, j))
    forms_ = [parse_one_form(t, cover.open_ring(i)) for i, t in
              enumerate(data.get("forms") or ["0"] * len(cover.opens))]
    twists = data.get("twists")
    if twists is not None:
        twists = [parse_one_form(t, cover.twisted_ring(i)) for i, t in enumerate(twists)]
    local = AT.RestrictedAtiyahLocalData(cover, trans, forms_, twists).flatten()
    cls = AT.cech_class(local)
    rep.result = {"class": cls.to_json(),
                  "corrections": [str(c) for c in local.corrections]}
    rep.check("splittings are flat after correction", all(not F.d(a) for a in local.forms))
    rep.check("cocycle laws hold", not cls.violations())


def cmd_coboundary(cfg, args, rep):
    data = _load_json(args.input)
    cover = _cover(cfg, data)
    cls = _cls(cover, data)
    v = AT.is_coboundary(cls)
    rep.result = {"class": cls.to_json(), "coboundary": v.coboundary}
    if v.coboundary:
        rep.result["witness"] = [str(b) for b in v.witness]
        rep.check("delta(witness) = class", AT.coboundary(cover, v.witness) == cls)


def cmd_chern_check(cfg, args, rep):
    sign = 1 if args.sign_theta == "plus" else -1
    if args.input is None:
        verdict, (cL, rho, cK, theta) = S.standard_model_chern(cfg.p, sign)
        rep.result["model"] = "standard local model: trivial quantization, zero section, trivial L"
        rep.check("c_r(L) computed zero", not cL)
        rep.check("rho computed zero", not rho)
        rep.check("c_r(K) computed zero", not cK)
        rep.check("theta computed zero", not theta)
    else:
        data = _load_json(args.input)
        cover = _cover(cfg, data)
        cL, rho, cK = (_cls(cover, data.get(k)) for k in ("cL", "rho", "cK"))
        for c in (cL, rho, cK):
            c.verify()
        tw = cover.twisted_ring(0)
        theta = parse_one_form(data.get("theta", "0"), tw)
        verdict = AT.chern_condition(cL, rho, cK, theta, sign)
    rep.result.update({"sign_theta": args.sign_theta, "holds": verdict.holds,
                       "difference": verdict.difference.to_json()})


def cmd_suite(cfg, args, rep, emit):
    only = None if not args.only else {int(t) for t in args.only.split(",")}
    results = []
    for cid, *_ in S.CRITERIA:
        if only is not None and cid not in only:
            continue
        r = S.run_case(cid, cfg.seed)
        results.append(r)
        emit({"case": r.to_json()}, r.line())
        rep.check(f"criterion {cid}", r.ok)
    passed = sum(r.ok for r in results)
    rep.result = {"seed": cfg.seed, "passed": passed, "failed": len(results) - passed,
                  "total": len(results)}


COMMANDS = {
    "p-op": (cmd_p_op, "p-operation of a Weyl algebra element"),
    "bracket": (cmd_bracket, "Poisson bracket (ab - ba)/h"),
    "p-curvature": (cmd_p_curvature, "p-curvature of h d + h alpha, two routes"),
    "p-support": (cmd_p_support, "p-support generators and normal field"),
    "check-lagrangian": (cmd_check_lagrangian, "is the graph of sum phi_i dx_i Lagrangian"),
    "check-restricted": (cmd_check_restricted, "is the graph restricted (two routes)"),
    "check-coisotropic": (cmd_check_coisotropic, "coisotropy of an ideal in k[x', xi'][h]"),
    "classify-quantization": (cmd_classify, "classify h d + h alpha up to isomorphism"),
    "normal-form": (cmd_normal_form, "normal form of a surjection A_h -> B"),
    "cech-class": (cmd_cech_class, "Cech class of restricted Atiyah local data"),
    "coboundary": (cmd_coboundary, "decide whether a Cech cocycle is a coboundary"),
    "chern-check": (cmd_chern_check, "test the Chern-class condition"),
    "suite": (cmd_suite, "run the acceptance battery"),
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=3, help="odd prime (default 3)")
    common.add_argument("--n", type=int, default=1, help="half-dimension (default 1)")
    common.add_argument("--trunc", type=int, default=None, help="h-truncation N (default p+2)")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled suites")
    out = common.add_mutually_exclusive_group()
    out.add_argument("--json", action="store_true", help="line-delimited JSON (default)")
    out.add_argument("--pretty", action="store_true", help="human-readable output")
    common.add_argument("--sign-theta", choices=["plus", "minus"], default="minus",
                        help="sign of the [i_theta omega'] term (default minus)")

    parser = argparse.ArgumentParser(prog="rquant", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    cmds = {}
    for name, (fn, help_) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        cmds[name] = sp
    cmds["p-op"].add_argument("--elem", required=True)
    cmds["bracket"].add_argument("--a", required=True)
    cmds["bracket"].add_argument("--b", required=True)
    for name in ("p-curvature", "p-support"):
        cmds[name].add_argument("--alpha", required=True)
        cmds[name].add_argument("--base", choices=["poly", "nil", "laurent"], default="poly")
    cmds["p-curvature"].add_argument("--field", type=int, help="coordinate index (1-based)")
    for name in ("check-lagrangian", "check-restricted"):
        cmds[name].add_argument("--phi", action="append", help="graph function, once per i")
    cmds["check-coisotropic"].add_argument("--gen", action="append")
    cmds["check-coisotropic"].add_argument("--alpha", help="use the p-support of h d + h alpha")
    cmds["classify-quantization"].add_argument("--alpha", required=True)
    cmds["classify-quantization"].add_argument("--against", help="second alpha to compare")
    cmds["classify-quantization"].add_argument("--base", choices=["poly", "nil", "laurent"])
    cmds["normal-form"].add_argument("--image", action="append",
                                     help="image of x_1..x_n then y_1..y_n in z-variables")
    for name in ("cech-class", "coboundary"):
        cmds[name].add_argument("--input", required=True, help="JSON text or @file")
    cmds["chern-check"].add_argument("--input", help="JSON text or @file (default: standard model)")
    cmds["suite"].add_argument("--only", help="comma-separated criterion ids")
    return parser


def _render(obj, indent=0):
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_render(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}-")
                lines.extend(_render(v, indent + 1))
            else:
                lines.append(f"{pad}- {v}")
    else:
        lines.append(f"{pad}{obj}")
    return lines


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    def emit(obj, text=None):
        if args.pretty:
            print(text if text is not None else "\n".join(_render(obj)), file=out)
        else:
            print(json.dumps(obj, ensure_ascii=False), file=out)

    rep = Report(args.command, _echo(args))
    code = EXIT_OK
    try:
        cfg = SessionConfig.from_args(args)
        if args.func is cmd_suite:
            cmd_suite(cfg, args, rep, emit)
        else:
            args.func(cfg, args, rep)
    except (UsageError, ParseError, ValueError) as exc:
        rep.error = {"name": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, ParseError):
            rep.error["position"] = exc.position
        code = EXIT_USAGE
    except RQuantError as exc:
        rep.error = {"name": type(exc).__name__, "message": str(exc)}
        code = EXIT_FAIL
    if code == EXIT_OK and not rep.ok:
        code = EXIT_FAIL
    emit(rep.to_json())
    return code


if __name__ == "__main__":
    sys.exit(main())
