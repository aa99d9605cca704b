"""Command-line entry point: data tables as CSV/JSON and self-tests.

Exit codes: 0 success, 2 configuration error, 3 numerical or convergence
error, 4 double-precision budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import asymptotics as asy
from . import elliptic as ell
from . import equilibrium as eqm
from . import kernels, toda
from .errors import (ConvergenceError, DomainError, NumericalBreakdownError, PoleError,
                     PrecisionError, RegimeError)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_PRECISION = 0, 2, 3, 4


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    eta: float = math.log(5)
    xs: list[float] = field(default_factory=list)
    ts: list[float] = field(default_factory=list)
    s: int | None = None
    mode: str = kernels.FERMI
    tol: float = 1e-10
    output_format: str = "csv"
    output_path: str | None = None
    seed: int = 0
    suite: str = "all"
    h: float = 0.02
    mus: list[float] = field(default_factory=list)

    def validate(self) -> None:
        if not (self.eta > 0 and math.isfinite(self.eta)):
            raise ConfigError("--eta must be positive")
        if not self.tol > 0:
            raise ConfigError("--tol must be positive")
        if self.output_format not in ("csv", "json"):
            raise ConfigError("--format must be csv or json")
        if self.mode not in kernels.MODES:
            raise ConfigError(f"--mode must be one of {kernels.MODES}")


def _grid(values, lo, hi, step, name: str) -> list[float]:
    if values:
        return list(values)
    if lo is None and hi is None:
        return []
    if lo is None or hi is None or step is None or step <= 0 or hi < lo:
        raise ConfigError(f"--{name}-min/--{name}-max/--{name}-step must describe a nonempty grid")
    n = int(math.floor((hi - lo) / step + 1e-9))
    return [round(lo + k * step, 12) for k in range(n + 1)]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def _jsonable(v):
    if v is None or isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    v = float(v)
    return v if math.isfinite(v) else str(v)


def emit(columns: Sequence[str], rows: list[Sequence], cfg: RunConfig) -> None:
    if cfg.output_format == "json":
        text = json.dumps([{c: _jsonable(v) for c, v in zip(columns, r)} for r in rows], indent=1) + "\n"
    else:
        lines = [",".join(columns)] + [",".join(_fmt(v) for v in r) for r in rows]
        text = "\n".join(lines) + "\n"
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_rate_table(cfg: RunConfig) -> int:
    if not cfg.xs:
        raise ConfigError("rate-table needs an x grid")
    rows = []
    for x in cfg.xs:
        p = eqm.profile(cfg.eta, x)
        ends = p.endpoints or (None,) * 4
        rows.append([x, p.regime, p.K, p.L, p.F, p.dF, p.d2F, *ends])
    emit(["x", "regime", "K", "L", "F", "dF", "d2F", "a", "b", "c", "d"], rows, cfg)
    return EXIT_OK


def _predicted_logq(eta: float, t: float, s: int) -> float | None:
    if t == 0:
        return None
    x = s / t
    pr = asy.predict(eta, x, t, delta=0.0)
    return pr.log_Q


def cmd_logq(cfg: RunConfig) -> int:
    if not cfg.ts:
        raise ConfigError("logq needs a t grid")
    if cfg.s is None and len(cfg.xs) != 1:
        raise ConfigError("logq needs --s or a single --x")
    rows = []
    for t in cfg.ts:
        if t < 0:
            raise ConfigError("t must be nonnegative")
        s = cfg.s if cfg.s is not None else int(round(cfg.xs[0] * t))
        if t == 0:
            rows.append([t, s, kernels.log_Q_closed_t0(s, cfg.eta), 0.0, None, None])
            continue
        res = kernels.log_Q(t, s, cfg.eta, cfg.mode, cfg.tol)
        pred = _predicted_logq(cfg.eta, t, s)
        rows.append([t, s, res.logQ, res.tail_bound, pred, res.logQ - pred])
    emit(["t", "s", "logQ", "tail_bound", "predicted", "difference"], rows, cfg)
    return EXIT_OK


def cmd_density(cfg: RunConfig) -> int:
    if len(cfg.xs) != 1 or not cfg.mus:
        raise ConfigError("density needs a single --x and a --mu grid")
    rows = []
    for mu in cfg.mus:
        d = eqm.density(cfg.eta, cfg.xs[0], mu)
        rows.append([mu, d.rho, d.h])
    emit(["mu", "rho", "h"], rows, cfg)
    return EXIT_OK


def cmd_endpoints(cfg: RunConfig) -> int:
    if not cfg.xs:
        raise ConfigError("endpoints needs an x grid")
    rows = [[x, *eqm.endpoints(cfg.eta, x)] for x in cfg.xs]
    emit(["x", "a", "b", "c", "d"], rows, cfg)
    return EXIT_OK


def cmd_compare_observables(cfg: RunConfig) -> int:
    if len(cfg.xs) != 1 or not cfg.ts:
        raise ConfigError("compare-observables needs a single --x and a t grid")
    rows = []
    for t in cfg.ts:
        o = kernels.observables(t, cfg.xs[0], cfg.eta, mode=cfg.mode)
        pr = asy.predict(cfg.eta, o.x_realized, t, delta=0.0)
        rows.append([t, o.s, o.alphaHat, pr.predicted_alpha, math.log(o.betaHat), pr.predicted_log_beta])
    emit(["t", "s", "alphaHat", "predicted_alpha", "log_betaHat", "predicted_log_beta"], rows, cfg)
    return EXIT_OK


def cmd_toda_residual(cfg: RunConfig) -> int:
    if cfg.s is None or not cfg.ts:
        raise ConfigError("toda-residual needs --s and --t")
    rows = []
    for t in cfg.ts:
        r = toda.toda_residual(t, cfg.s, cfg.eta, cfg.h)
        rows.append([r.t, r.s, r.h, r.residual])
    emit(["t", "s", "h", "residual"], rows, cfg)
    return EXIT_OK


def cmd_phi_minus(cfg: RunConfig) -> int:
    if not cfg.mus:
        raise ConfigError("phi-minus needs a --mu grid")
    q = math.exp(-cfg.eta)
    rows = []
    for mu in cfg.mus:
        r = asy.phi_minus(q, mu)
        rows.append([mu, r.value, r.argmax_y])
    emit(["mu", "phi_minus", "argmax_y"], rows, cfg)
    return EXIT_OK


def cmd_acoef(cfg: RunConfig) -> int:
    emit(["eta", "A"], [[cfg.eta, asy.a_coefficient(cfg.eta)]], cfg)
    return EXIT_OK


# ---------------------------------------------------------------------------
# self-test
# ---------------------------------------------------------------------------

def _suite_elliptic(rng: np.random.Generator) -> bool:
    ok = True
    for K in (0.8, math.pi, 5.0):
        lat = ell.RectLattice(K)
        zK = ell.weier("zeta", K, lat).real
        zi = ell.weier("zeta", 1j * math.pi, lat)
        ok &= abs(zK * 1j * math.pi - zi * K - 1j * math.pi / 2) < 1e-10
        z = complex(rng.uniform(0.1, K - 0.1), rng.uniform(0.1, 3.0))
        wp, wpp = ell.weier("wp", z, lat), ell.weier("wp_prime", z, lat)
        ok &= abs(wpp**2 - (4 * wp**3 - lat.g2 * wp - lat.g3)) < 1e-8 * max(1, abs(wp) ** 3)
    return bool(ok)


def _suite_equilibrium(rng: np.random.Generator) -> bool:
    eta = math.log(5)
    x = float(rng.uniform(-0.5, 1.5))
    closed = eqm.rate_function(eta, x)
    integral = eqm.rate_function_integral(eta, x)
    return abs(closed - integral) < 1e-8 and abs(eqm.x_star(eta) + 0.994136) < 1e-6


def _suite_kernels(rng: np.random.Generator) -> bool:
    eta = math.log(5)
    fred = kernels.log_Q(1.0, 0, eta).logQ
    brute = kernels.log_Q_partition_sum(1.0, 0, eta, 20)
    pos = kernels.log_Q(1.0, 0, eta, kernels.POS_TEMP).logQ
    return abs(fred - brute) < 1e-10 and abs(fred - pos) < 1e-9 * abs(fred)


def _suite_asymptotics(rng: np.random.Generator) -> bool:
    eta, x = math.log(5), 0.6
    st = eqm._TwoCutData.build(eta, x)
    period = 1 / abs(st.L)
    u, w = np.polynomial.legendre.leggauss(48)
    ts = period * (u + 1) / 2
    p = np.array([asy.p_amplitudes(eta, x, t) for t in ts])
    mean_p0 = float(np.dot(w, p[:, 0])) / 2
    mean_lp = float(np.dot(w, np.log(p[:, 1]))) / 2
    t0 = float(rng.uniform(1, 5))
    X0, X1 = asy.X_of(eta, x, t0), asy.X_of(eta, x, t0 + period)
    return (abs(mean_p0) < 1e-8 and abs(mean_lp - eta / 2 * (eta / (2 * st.K) - 1)) < 1e-8
            and abs(X0 - X1) < 1e-9)


def _suite_toda(rng: np.random.Generator) -> bool:
    return toda.toda_residual(3.0, 1, math.log(5), 0.02).residual < 1e-3


SUITES: dict[str, Callable[[np.random.Generator], bool]] = {
    "elliptic": _suite_elliptic,
    "equilibrium": _suite_equilibrium,
    "kernels": _suite_kernels,
    "asymptotics": _suite_asymptotics,
    "toda": _suite_toda,
}


def cmd_selftest(cfg: RunConfig) -> int:
    names = list(SUITES) if cfg.suite == "all" else [cfg.suite]
    if any(n not in SUITES for n in names):
        raise ConfigError(f"unknown suite {cfg.suite!r}; choose from {['all', *SUITES]}")
    rng = np.random.default_rng(cfg.seed)
    failed = 0
    for n in names:
        ok = SUITES[n](rng)
        failed += not ok
        print(f"{n}: {'pass' if ok else 'FAIL'}")
    return EXIT_OK if failed == 0 else EXIT_NUMERIC


COMMANDS = {
    "rate-table": cmd_rate_table,
    "logq": cmd_logq,
    "selftest": cmd_selftest,
    "density": cmd_density,
    "endpoints": cmd_endpoints,
    "compare-observables": cmd_compare_observables,
    "toda-residual": cmd_toda_residual,
    "phi-minus": cmd_phi_minus,
    "acoef": cmd_acoef,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--eta", type=float, default=math.log(5))
    common.add_argument("--x", type=float, nargs="+")
    common.add_argument("--x-min", type=float)
    common.add_argument("--x-max", type=float)
    common.add_argument("--x-step", type=float)
    common.add_argument("--t", type=float, nargs="+")
    common.add_argument("--t-min", type=float)
    common.add_argument("--t-max", type=float)
    common.add_argument("--t-step", type=float)
    common.add_argument("--s", type=int)
    common.add_argument("--mu", type=float, nargs="+")
    common.add_argument("--mu-min", type=float)
    common.add_argument("--mu-max", type=float)
    common.add_argument("--mu-step", type=float)
    common.add_argument("--h", type=float, default=0.02)
    common.add_argument("--mode", default=kernels.FERMI, choices=kernels.MODES)
    common.add_argument("--format", dest="output_format", default="csv", choices=("csv", "json"))
    common.add_argument("--out")
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--suite", default="all")
    parser = argparse.ArgumentParser(prog="artifact", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(
        command=ns.command, eta=ns.eta,
        xs=_grid(ns.x, ns.x_min, ns.x_max, ns.x_step, "x"),
        ts=_grid(ns.t, ns.t_min, ns.t_max, ns.t_step, "t"),
        s=ns.s, mode=ns.mode, tol=ns.tol, output_format=ns.output_format,
        output_path=ns.out, seed=ns.seed, suite=ns.suite, h=ns.h,
        mus=_grid(ns.mu, ns.mu_min, ns.mu_max, ns.mu_step, "mu"),
    )
    cfg.validate()
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except (ConfigError, DomainError, RegimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PrecisionError as exc:
        hint = f" (safe t up to about {exc.safe_limit:.4g})" if exc.safe_limit is not None else ""
        print(f"precision: {exc}{hint}", file=sys.stderr)
        return EXIT_PRECISION
    except (ConvergenceError, NumericalBreakdownError, PoleError) as exc:
        print(f"numerical: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
