"""Command-line front end: reference tables, distances, verification, sweeps.

Subcommands
  table1    first-moment approximation error, 10 reference configurations
  table2    second and tenth scaled moments with n = 500
  table3    second-moment error scaling as the load approaches capacity
  distance  Wasserstein/Kolmogorov distance report for one parameter set
  verify    run every bound-verification suite; exit 2 on any violation
  sweep     staffing-regime sweep of distance reports

Output is CSV (default) or a single JSON document; numbers are emitted with
shortest round-trip precision so repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .ctmc import (
    moment as chain_moment,
    moment_bound_report,
    stationary_pmf,
    stein_identity_residual,
)
from .diffusion import build_density, density_sup_check
from .metrics import distance_report, mean_error, moment_error, universality_sweep
from .model import ModelParams, ValidationError
from .poisson import TestFunction, build_solution, gradient_bound_report
from .stein_verify import kolmogorov_decomposition, wasserstein_decomposition

__all__ = [
    "RunConfig",
    "run_table1",
    "run_table2",
    "run_table3",
    "run_distance",
    "run_verify",
    "run_sweep",
    "main",
]

TABLE1_CASES = [
    (3.0, 5),
    (4.0, 5),
    (4.9, 5),
    (4.95, 5),
    (4.99, 5),
    (300.0, 500),
    (400.0, 500),
    (490.0, 500),
    (495.0, 500),
    (499.0, 500),
]
TABLE2_LOADS = [300.0, 400.0, 490.0, 495.0, 499.0, 499.9]
TABLE3_LOADS = [499.0, 499.9, 499.95, 499.99]

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_VIOLATION = 2


@dataclass
class RunConfig:
    command: str
    lam: float | None = None
    mu: float = 1.0
    n: int | None = None
    alpha: float = 0.0
    tail_tol: float = 1e-14
    fmt: str = "csv"
    out: str | None = None
    regime: str | None = None
    beta: float = 1.0
    sizes: list = field(default_factory=list)
    alpha_over_mu: float = 0.0


def _round_like_paper(value: float, decimals: int = 2) -> str:
    if value != 0.0 and abs(value) < 10.0 ** (-decimals) / 2.0:
        return f"{value:.0e}"
    return f"{value:.{decimals}f}"


def run_table1(tail_tol: float = 1e-14) -> list[dict]:
    """First-moment table: E X and |E X - (R + sqrt(R) E Y)| per row."""
    rows = []
    for lam, n in TABLE1_CASES:
        params = ModelParams(lam=lam, mu=1.0, n=n, alpha=0.0)
        dist = stationary_pmf(params, tail_tol, moment_order=1)
        d = build_density(dist.derived)
        mean_scaled = chain_moment(dist, 1, absolute=False)
        mean_x = dist.derived.x_inf + math.sqrt(dist.derived.R) * mean_scaled
        err = mean_error(dist, d)
        rows.append(
            {
                "R": lam,
                "n": n,
                "mean_customers": mean_x,
                "mean_printed": _round_like_paper(mean_x),
                "abs_error": err,
                "abs_error_printed": _round_like_paper(err),
            }
        )
    return rows


def run_table2(tail_tol: float = 1e-14) -> list[dict]:
    """Second/tenth scaled moments and their diffusion errors, n = 500."""
    rows = []
    for lam in TABLE2_LOADS:
        params = ModelParams(lam=lam, mu=1.0, n=500, alpha=0.0)
        dist = stationary_pmf(params, tail_tol, moment_order=10)
        d = build_density(dist.derived)
        r2 = moment_error(dist, d, 2)
        r10 = moment_error(dist, d, 10)
        rows.append(
            {
                "R": lam,
                "n": 500,
                "m2": r2["exact_m"],
                "m2_printed": f"{r2['exact_m']:.4g}",
                "m2_err": r2["diff_m"],
                "m2_err_printed": f"{r2['diff_m']:.3g}",
                "m10": r10["exact_m"],
                "m10_printed": f"{r10['exact_m']:.3g}",
                "m10_err": r10["diff_m"],
                "m10_err_printed": f"{r10['diff_m']:.3g}",
            }
        )
    return rows


def run_table3(tail_tol: float = 1e-14) -> list[dict]:
    """Second-moment error against powers of |zeta| near critical load."""
    rows = []
    for lam in TABLE3_LOADS:
        params = ModelParams(lam=lam, mu=1.0, n=500, alpha=0.0)
        dist = stationary_pmf(params, tail_tol, moment_order=2)
        d = build_density(dist.derived)
        r2 = moment_error(dist, d, 2)
        az = abs(dist.derived.zeta)
        err = r2["diff_m"]
        rows.append(
            {
                "R": lam,
                "n": 500,
                "abs_zeta": az,
                "abs_zeta_printed": f"{az:.3g}",
                "m2": r2["exact_m"],
                "m2_printed": f"{r2['exact_m']:.3g}",
                "err": err,
                "err_printed": f"{err:.4g}",
                "zeta_err": az * err,
                "zeta_err_printed": f"{az * err:.3g}",
                "zeta_half_err": math.sqrt(az) * err,
                "zeta_three_half_err": az**1.5 * err,
            }
        )
    return rows


def run_distance(params: ModelParams, tail_tol: float = 1e-14) -> list[dict]:
    dist = stationary_pmf(params, tail_tol, moment_order=1)
    rep = distance_report(dist, build_density(dist.derived))
    return [
        {
            "lam": params.lam,
            "mu": params.mu,
            "n": params.n,
            "alpha": params.alpha,
            "delta": rep.delta,
            "d_w": rep.d_w,
            "d_k": rep.d_k,
            "dw_over_delta": rep.dw_over_delta,
            "dk_over_delta": rep.dk_over_delta,
            "bound_w": rep.bound_w,
            "bound_k": rep.bound_k,
            "dwdk_ok": rep.dwdk_ok,
            "mean_error": mean_error(dist, build_density(dist.derived)),
        }
    ]


def _residual_rows(dist, d) -> list[dict]:
    rows = []
    checks = [
        ("f_linear", lambda x: x),
        ("f_quadratic", lambda x: np.asarray(x) ** 2),
    ]
    sol_id = build_solution(d, TestFunction.identity())
    checks.append(("f_poisson_identity", sol_id.antiderivative))
    sol_ind = build_solution(d, TestFunction.indicator(-dist.derived.zeta))
    checks.append(("f_poisson_indicator", sol_ind.antiderivative))
    for name, f in checks:
        res = stein_identity_residual(dist, f)
        rows.append(
            {
                "name": name,
                "lhs": res.residual,
                "rhs": 1e-8,
                "satisfied": bool(res.residual <= 1e-8),
            }
        )
    return rows


def _generator_identity_rows(dist, d) -> list[dict]:
    """|E h(X~) - E h(Y)| against |E G_Y f_h(X~)| for the anchor functions."""
    from .ctmc import _exact_sum
    from .model import drift

    rows = []
    zeta = dist.derived.zeta
    hs = [TestFunction.identity()] + [
        TestFunction.indicator(a) for a in (-zeta - 1.0, -zeta, 0.0, -zeta + 1.0)
    ]
    x = dist.x
    b = drift(dist.derived, x)
    for h in hs:
        sol = build_solution(d, h)
        fp = sol.f_prime(x)
        fpp = sol.f_second(x)
        gen_y = _exact_sum(dist.pmf * (b * fp + d.mu * fpp))
        lhs = abs(_exact_sum(dist.pmf * h.value(x)) - sol.h_mean)
        gap = abs(lhs - abs(gen_y))
        rows.append(
            {
                "name": f"generator_identity[{h.kind}@{h.parameter:+.3g}]",
                "lhs": gap,
                "rhs": 1e-8,
                "satisfied": bool(gap <= 1e-8),
            }
        )
    return rows


def _decomposition_rows(dist, d) -> list[dict]:
    rows = []
    der = dist.derived
    delta = der.delta
    sol = build_solution(d, TestFunction.identity())
    dec = wasserstein_decomposition(dist, sol)
    rows.append(
        {
            "name": "wasserstein_lhs_le_total",
            "lhs": dec.lhs,
            "rhs": dec.total + 1e-8,
            "satisfied": bool(dec.lhs <= dec.total + 1e-8),
        }
    )
    if der.is_erlang_c and der.R >= 1.0:
        rows.append(
            {
                "name": "wasserstein_total_le_205delta",
                "lhs": dec.total,
                "rhs": 205.0 * delta,
                "satisfied": bool(dec.total <= 205.0 * delta),
            }
        )
        rows.append(
            {
                "name": "wasserstein_f2b_le_111",
                "lhs": dec.extras["mean_abs_f2b"],
                "rhs": 111.0,
                "satisfied": bool(dec.extras["mean_abs_f2b"] <= 111.0),
            }
        )
    zeta = der.zeta
    for a in (-zeta - 1.0, -zeta, 0.0, -zeta + 1.0):
        deck = kolmogorov_decomposition(dist, build_solution(d, TestFunction.indicator(a)))
        rows.append(
            {
                "name": f"kolmogorov_lhs_le_total[a={a:+.3g}]",
                "lhs": deck.lhs,
                "rhs": deck.total + 1e-8,
                "satisfied": bool(deck.lhs <= deck.total + 1e-8),
            }
        )
        rows.append(
            {
                "name": f"kolmogorov_straddle_majorant[a={a:+.3g}]",
                "lhs": deck.extras["straddle"],
                "rhs": deck.extras["straddle_majorant"],
                "satisfied": bool(deck.extras["straddle_ok"]),
            }
        )
        if der.is_erlang_c and der.R >= 1.0:
            rows.append(
                {
                    "name": f"kolmogorov_interm[a={a:+.3g}]",
                    "lhs": deck.lhs,
                    "rhs": deck.extras["interm_rhs"],
                    "satisfied": bool(deck.lhs <= deck.extras["interm_rhs"]),
                }
            )
    return rows


def run_verify(params: ModelParams, tail_tol: float = 1e-14) -> dict:
    """All desk-checkable suites for one parameter set."""
    dist = stationary_pmf(params, tail_tol, moment_order=2)
    der = dist.derived
    d = build_density(der)
    suites = []
    suites.append({"suite": "moment_bounds", "rows": moment_bound_report(dist)})
    grad_suites = (
        ["wasserstein_C", "kolmogorov_C"]
        if der.is_erlang_c
        else ["wasserstein_A", "kolmogorov_A"]
    )
    for name in grad_suites:
        rows = gradient_bound_report(der, name)
        suites.append({"suite": name, "rows": rows})
    sup = density_sup_check(d)
    suites.append(
        {
            "suite": "density_sup",
            "rows": [
                {
                    "name": "density_sup",
                    "lhs": sup["sup"],
                    "rhs": sup["bound"],
                    "satisfied": sup["satisfied"],
                }
            ],
        }
    )
    suites.append({"suite": "stein_identity", "rows": _residual_rows(dist, d)})
    suites.append(
        {"suite": "generator_identity", "rows": _generator_identity_rows(dist, d)}
    )
    suites.append({"suite": "decompositions", "rows": _decomposition_rows(dist, d)})
    all_passed = all(
        row.get("satisfied") is not False
        for suite in suites
        for row in suite["rows"]
    )
    return {"suites": suites, "all_passed": all_passed}


def run_sweep(config: RunConfig) -> list[dict]:
    return universality_sweep(
        config.regime,
        config.sizes,
        config.beta,
        alpha_over_mu=config.alpha_over_mu,
        mu=config.mu,
        tail_tol=config.tail_tol,
    )


# ---------------------------------------------------------------------------
# Serialization.
# ---------------------------------------------------------------------------


def _emit_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_cell(v) for k, v in row.items()})
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, float) and (math.isnan(v) or math.isinf(v)):
        return repr(v)
    return v


def _flatten_verify(report: dict) -> list[dict]:
    rows = []
    for suite in report["suites"]:
        for row in suite["rows"]:
            flat = {"suite": suite["suite"]}
            flat["name"] = row.get("name", row.get("bound_id", ""))
            if "lhs" in row:
                flat["observed"] = row["lhs"]
                flat["bound"] = row["rhs"]
            else:
                flat["observed"] = row["max_observed"]
                flat["bound"] = row["bound"]
            flat["satisfied"] = row.get("satisfied")
            flat["mode"] = row.get("mode", "strict")
            rows.append(flat)
    return rows


def _json_default(obj):
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    raise TypeError(f"not serializable: {type(obj)}")


def _emit(config: RunConfig, rows: list[dict], suites: list | None = None) -> str:
    if config.fmt == "json":
        doc = {
            "schema_version": 1,
            "command": config.command,
            "config": {
                "lam": config.lam,
                "mu": config.mu,
                "n": config.n,
                "alpha": config.alpha,
                "tail_tol": config.tail_tol,
                "regime": config.regime,
                "beta": config.beta,
                "sizes": config.sizes,
                "alpha_over_mu": config.alpha_over_mu,
            },
            "rows": rows,
            "suites": suites if suites is not None else [],
            "tolerances": {
                "tail_tol": config.tail_tol,
                "stein_residual": 1e-8,
                "generator_identity": 1e-8,
            },
        }
        return json.dumps(doc, indent=2, default=_json_default) + "\n"
    return _emit_csv(rows)


def _write(config: RunConfig, text: str) -> None:
    if config.out:
        with open(config.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="erlangdiff",
        description="Exact Erlang-A/C steady-state analysis against the "
        "piecewise-OU diffusion model",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_params: bool):
        p.add_argument("--tail-tol", type=float, default=1e-14)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default=None)
        if with_params:
            p.add_argument("--lambda", dest="lam", type=float, required=True)
            p.add_argument("--mu", type=float, default=1.0)
            p.add_argument("--n", type=int, required=True)
            p.add_argument("--alpha", type=float, default=0.0)

    for name in ("table1", "table2", "table3"):
        add_common(sub.add_parser(name), with_params=False)
    add_common(sub.add_parser("distance"), with_params=True)
    add_common(sub.add_parser("verify"), with_params=True)
    sweep = sub.add_parser("sweep")
    add_common(sweep, with_params=False)
    sweep.add_argument("--regime", choices=("qd", "qed", "nds"), required=True)
    sweep.add_argument("--beta", type=float, default=1.0)
    sweep.add_argument(
        "--sizes", type=lambda s: [float(v) for v in s.split(",")], required=True
    )
    sweep.add_argument("--alpha-over-mu", type=float, default=0.0)
    sweep.add_argument("--mu", type=float, default=1.0)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    config = RunConfig(
        command=args.command,
        lam=getattr(args, "lam", None),
        mu=getattr(args, "mu", 1.0),
        n=getattr(args, "n", None),
        alpha=getattr(args, "alpha", 0.0),
        tail_tol=args.tail_tol,
        fmt=args.format,
        out=args.out,
        regime=getattr(args, "regime", None),
        beta=getattr(args, "beta", 1.0),
        sizes=getattr(args, "sizes", []),
        alpha_over_mu=getattr(args, "alpha_over_mu", 0.0),
    )
    try:
        if config.command == "table1":
            rows = run_table1(config.tail_tol)
        elif config.command == "table2":
            rows = run_table2(config.tail_tol)
        elif config.command == "table3":
            rows = run_table3(config.tail_tol)
        elif config.command == "distance":
            params = ModelParams(
                lam=config.lam, mu=config.mu, n=config.n, alpha=config.alpha
            )
            rows = run_distance(params, config.tail_tol)
        elif config.command == "verify":
            params = ModelParams(
                lam=config.lam, mu=config.mu, n=config.n, alpha=config.alpha
            )
            report = run_verify(params, config.tail_tol)
            rows = _flatten_verify(report)
            _write(config, _emit(config, rows, suites=report["suites"]))
            return EXIT_OK if report["all_passed"] else EXIT_VIOLATION
        elif config.command == "sweep":
            rows = run_sweep(config)
        else:  # pragma: no cover - argparse guards this
            raise ValidationError(f"unknown command {config.command}")
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    _write(config, _emit(config, rows))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
