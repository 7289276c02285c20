"""Command-line front end.

    plk kernel eval  --kind released-bm --alpha0 1 --beta 1 --x 0.3 --y 0.7
    plk verify green --kind general --alpha0 1 --alpha1 1 --alpha2 0 --beta 1
    plk rates --function sin_pi --scheme uniform --levels 8:256 --r 2
    plk quad  --function quadratic --bound cu_d --p inf --levels 2:64

Output is CSV with ``#``-prefixed metadata lines. Exit codes: 0 success,
1 a check failed, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .errors import DegenerateFitError, PLKError, SingularGramError
from .function_bank import INF, Holder, Sobolev, get_function
from .kernel_core import ROBIN_KINDS, Kind, KernelModel, evaluate_kernel, forced_zero_residual, green_bc_residuals, green_jump_residual
from .quadrature import apply, check_trapezoid_bound, trapezoid_rule
from .interpolation import NodeSet
from .rates import UNIFORM, RandomScheme, rate_spec, run_study

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2
SEED_ENV = "PLK_SEED"


class UsageError(Exception):
    pass


def fmt(v) -> str:
    """Shortest round-trip repr of a float (at most 17 significant digits)."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)


def parse_real(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "infinity", "+inf"):
        return INF
    try:
        return float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def parse_levels(text: str) -> list[int]:
    """``a:b`` doubles from a up to b; ``a,b,c`` is an explicit list."""
    try:
        if ":" in text:
            lo, hi = (int(v) for v in text.split(":"))
            if lo < 1 or hi < lo:
                raise ValueError
            out = [lo]
            while out[-1] * 2 <= hi:
                out.append(out[-1] * 2)
            return out
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad levels {text!r}; use a:b (doubling) or a,b,c") from None


@dataclass
class RunConfig:
    command: str
    kind: Optional[str] = None
    alpha0: Optional[float] = None
    alpha1: Optional[float] = None
    alpha2: Optional[float] = None
    beta: Optional[float] = None
    epsilon: Optional[float] = None
    function: Optional[str] = None
    scheme: str = UNIFORM
    seed: int = 0
    rho: float = 3.0
    r: float = 2.0
    levels: list = field(default_factory=list)
    output: Optional[str] = None
    fmt: str = "csv"
    tol: float = 1e-10
    band: float = 0.15
    extra: dict = field(default_factory=dict)

    def echo(self) -> list[str]:
        keys = ["command", "kind", "alpha0", "alpha1", "alpha2", "beta", "epsilon", "function",
                "scheme", "seed", "rho", "r", "levels", "tol", "band"]
        items = [(k, getattr(self, k)) for k in keys] + sorted(self.extra.items())
        parts = []
        for k, v in items:
            if v is None or v == [] or v is False:
                continue
            text = ",".join(fmt(x) for x in v) if isinstance(v, list) else fmt(v) if isinstance(v, float) else str(v)
            parts.append(f"{k}={text}")
        return ["# " + " ".join(parts)]


def build_model(cfg: RunConfig) -> KernelModel:
    kind = Kind(cfg.kind)

    def need(*names):
        missing = [n for n in names if getattr(cfg, n) is None]
        if missing:
            raise UsageError(f"kind {kind.value!r} needs --" + ", --".join(missing))
        return [getattr(cfg, n) for n in names]

    if kind is Kind.GENERAL:
        return KernelModel.general(*need("alpha0", "alpha1", "alpha2", "beta"))
    if kind is Kind.RELEASED_BM:
        return KernelModel.released_brownian(*need("alpha0", "beta"))
    if kind is Kind.RELEASED_REVERSE_BM:
        return KernelModel.released_reverse_brownian(*need("alpha1", "beta"))
    if kind is Kind.WENDLAND:
        return KernelModel.wendland(*need("epsilon"))
    beta = 1.0 if cfg.beta is None else cfg.beta
    return {Kind.BM: KernelModel.brownian_motion, Kind.REVERSE_BM: KernelModel.reverse_brownian_motion,
            Kind.BRIDGE: KernelModel.brownian_bridge}[kind](beta)


class Table:
    def __init__(self, columns, cfg: RunConfig):
        self.columns = list(columns)
        self.rows = []
        self.meta = cfg.echo()
        self.trailer = []
        self.fmt = cfg.fmt

    def add(self, *vals):
        self.rows.append([fmt(v) for v in vals])

    def render(self) -> str:
        lines = list(self.meta)
        if self.fmt == "plain":
            cells = [self.columns] + self.rows
            widths = [max(len(r[i]) for r in cells) for i in range(len(self.columns))]
            lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
        else:
            lines.append(",".join(self.columns))
            lines += [",".join(r) for r in self.rows]
        lines += self.trailer
        return "\n".join(lines) + "\n"


def emit(table: Table, cfg: RunConfig):
    text = table.render()
    if cfg.output:
        with open(cfg.output, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------------


def cmd_kernel_eval(cfg: RunConfig) -> int:
    m = build_model(cfg)
    xs = cfg.extra.get("x") or []
    ys = cfg.extra.get("y") or []
    grid = cfg.extra.get("grid")
    if grid:
        g = np.linspace(0.0, 1.0, grid).tolist()
        xs, ys = xs or g, ys or g
    if not xs or not ys:
        raise UsageError("give --x and --y (repeatable) or --grid N")
    t = Table(["x", "y", "K"], cfg)
    for x in xs:
        for y in ys:
            t.add(x, y, evaluate_kernel(m, x, y))
    emit(t, cfg)
    return EXIT_OK


def cmd_verify_green(cfg: RunConfig) -> int:
    m = build_model(cfg)
    npts = int(cfg.extra.get("points") or 99)
    xs = (np.arange(1, npts + 1) / (npts + 1)).tolist()
    dirichlet = bool(cfg.extra.get("dirichlet"))
    if dirichlet:
        if not m.forced_zeros:
            raise UsageError(f"--dirichlet needs a kind with forced zeros, {m.kind.value!r} has none")
        t = Table(["x", "jump_residual", "K_x0", "K_x1"], cfg)
        worst_jump = worst_zero = 0.0
        for x in xs:
            jump = green_jump_residual(m, x)
            k0, k1 = evaluate_kernel(m, x, 0.0), evaluate_kernel(m, x, 1.0)
            worst_jump = max(worst_jump, abs(jump))
            worst_zero = max(worst_zero, forced_zero_residual(m, x))
            t.add(x, jump, k0, k1)
        ok = worst_jump <= cfg.tol and worst_zero <= cfg.tol
        t.trailer.append(f"# max_jump={fmt(worst_jump)} max_forced_zero={fmt(worst_zero)} ok={fmt(ok)}")
    else:
        if m.kind not in ROBIN_KINDS:
            raise UsageError(
                f"kind {m.kind.value!r} has no Robin boundary conditions; "
                "Dirichlet kinds are verified with --dirichlet"
            )
        t = Table(["x", "jump_residual", "bc_left", "bc_right"], cfg)
        worst = [0.0, 0.0, 0.0]
        for x in xs:
            jump = green_jump_residual(m, x)
            bl, br = green_bc_residuals(m, x)
            worst = [max(a, abs(b)) for a, b in zip(worst, (jump, bl, br))]
            t.add(x, jump, bl, br)
        ok = max(worst) <= cfg.tol
        t.trailer.append(
            f"# max_jump={fmt(worst[0])} max_bc_left={fmt(worst[1])} max_bc_right={fmt(worst[2])} ok={fmt(ok)}"
        )
    emit(t, cfg)
    return EXIT_OK if ok else EXIT_CHECK


def cmd_rates(cfg: RunConfig) -> int:
    f = get_function(cfg.function)
    spec = rate_spec(f, cfg.r)
    model = build_model(cfg) if cfg.kind else None
    scheme = UNIFORM if cfg.scheme == UNIFORM else RandomScheme(cfg.seed, cfg.rho)
    levels = cfg.levels or [16, 32, 64, 128, 256, 512]
    study = run_study(spec, model, scheme, levels, f=f, strict=False)
    t = Table(["n", "h", "error"], cfg)
    for n, h, e in study.rows:
        t.add(n, h, e)
    t.meta.append("# fit: log(error) vs log(h); two coarsest levels dropped when >= 5 usable; floor 1e-13")
    if study.fit_error:
        t.trailer.append(f"# degenerate fit: {study.fit_error}")
        t.trailer.append(f"# slope= r2= expected={fmt(spec.expected_exponent)} source={spec.source}")
        emit(t, cfg)
        print(f"plk: degenerate fit: {study.fit_error}", file=sys.stderr)
        return EXIT_CHECK
    t.trailer.append(
        f"# slope={fmt(study.fitted_slope)} r2={fmt(study.r_squared)} "
        f"expected={fmt(spec.expected_exponent)} source={spec.source}"
    )
    emit(t, cfg)
    return EXIT_OK if abs(study.deviation) <= cfg.band else EXIT_CHECK


_BOUND_SPACES = {
    "cu_a": lambda a, p: Holder(0, a),
    "cu_b": lambda a, p: Sobolev(p, 1),
    "cu_c_rate_only": lambda a, p: Holder(1, a),
    "cu_d": lambda a, p: Sobolev(p, 2),
}


def cmd_quad(cfg: RunConfig) -> int:
    f = get_function(cfg.function)
    bound = cfg.extra.get("bound") or "cu_d"
    p = cfg.extra.get("p")
    alpha = cfg.extra.get("alpha")
    if bound not in _BOUND_SPACES:
        raise UsageError(f"unknown bound {bound!r}; use one of {', '.join(_BOUND_SPACES)}")
    if bound in ("cu_b", "cu_d"):
        p = INF if p is None else p
        if not 1 <= p <= INF:
            raise UsageError(f"--p must lie in [1, inf], got {p!r}")
    else:
        alpha = 1.0 if alpha is None else alpha
    space = _BOUND_SPACES[bound](alpha, p)
    if not f.belongs_to(space):
        raise UsageError(f"{f.id} is not in {space}; the {bound} bound does not apply")
    levels = cfg.levels or [2, 4, 8, 16, 32, 64]
    t = Table(["n", "Tn", "I", "abs_err", "bound", "satisfied"], cfg)
    exact = f.exact_integral()
    failed = False
    for n in levels:
        ns = NodeSet.uniform(n)
        tn = apply(trapezoid_rule(ns), f)
        rep = check_trapezoid_bound(f, ns, bound, alpha=alpha, p=p)
        failed |= rep.satisfied is False
        t.add(n, tn, exact, rep.lhs, rep.rhs, rep.satisfied)
    emit(t, cfg)
    return EXIT_CHECK if failed else EXIT_OK


# ----------------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------------


def _add_kernel_args(p, required=True):
    p.add_argument("--kind", required=required, choices=[k.value for k in Kind])
    for name in ("alpha0", "alpha1", "alpha2", "beta", "epsilon"):
        p.add_argument(f"--{name}", type=parse_real)


def _add_common(p):
    p.add_argument("--output", "-o")
    p.add_argument("--format", dest="fmt", choices=["csv", "plain"], default="csv")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plk", description="Piecewise linear kernels on [0, 1].")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="group", required=True)

    kern = sub.add_parser("kernel", help="kernel evaluation")
    ksub = kern.add_subparsers(dest="action", required=True)
    ev = ksub.add_parser("eval", help="tabulate K(x, y)")
    _add_kernel_args(ev)
    ev.add_argument("--x", type=parse_real, action="append")
    ev.add_argument("--y", type=parse_real, action="append")
    ev.add_argument("--grid", type=int, help="use N equispaced points for x and/or y")
    _add_common(ev)

    ver = sub.add_parser("verify", help="Green-kernel checks")
    vsub = ver.add_subparsers(dest="action", required=True)
    gr = vsub.add_parser("green", help="slope jump and boundary-condition residuals")
    _add_kernel_args(gr)
    gr.add_argument("--points", type=int, default=99)
    gr.add_argument("--tol", type=float, default=1e-10)
    gr.add_argument("--dirichlet", action="store_true", help="check forced zeros of the Dirichlet kinds")
    _add_common(gr)

    ra = sub.add_parser("rates", help="refinement study with fitted slope")
    ra.add_argument("--function", required=True)
    _add_kernel_args(ra, required=False)
    ra.add_argument("--scheme", choices=["uniform", "random"], default="uniform")
    ra.add_argument("--seed", type=int, default=0)
    ra.add_argument("--rho", type=float, default=3.0)
    ra.add_argument("--levels", type=parse_levels)
    ra.add_argument("--r", type=parse_real, default=2.0)
    ra.add_argument("--band", type=float, default=0.15)
    _add_common(ra)

    qu = sub.add_parser("quad", help="trapezoid errors against sharp bounds")
    qu.add_argument("--function", required=True)
    qu.add_argument("--bound", choices=list(_BOUND_SPACES), default="cu_d")
    qu.add_argument("--p", type=parse_real)
    qu.add_argument("--alpha", type=parse_real)
    qu.add_argument("--levels", type=parse_levels)
    _add_common(qu)
    return ap


_COMMON = {"kind", "alpha0", "alpha1", "alpha2", "beta", "epsilon", "function", "scheme", "seed", "rho", "r",
           "levels", "output", "fmt", "tol", "band"}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    args = vars(ns).copy()
    group, action = args.pop("group"), args.pop("action", None)
    command = f"{group} {action}" if action else group
    known = {k: v for k, v in args.items() if k in _COMMON}
    extra = {k: v for k, v in args.items() if k not in _COMMON}
    cfg = RunConfig(command=command, **known)
    if cfg.levels is None:
        cfg.levels = []
    cfg.extra = extra
    env_seed = os.environ.get(SEED_ENV)
    if env_seed is not None and env_seed.strip():
        try:
            cfg.seed = int(env_seed)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env_seed!r}") from None
    return cfg


COMMANDS = {
    "kernel eval": cmd_kernel_eval,
    "verify green": cmd_verify_green,
    "rates": cmd_rates,
    "quad": cmd_quad,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except SingularGramError as exc:
        print(f"plk: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except DegenerateFitError as exc:
        print(f"plk: degenerate fit: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except KeyError as exc:
        print(f"plk: error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, PLKError, ValueError) as exc:
        print(f"plk: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
