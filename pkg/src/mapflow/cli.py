"""Command-line front end.

Subcommands: matrix, iterate, chart, field, integrate, lyapunov, verify.
Outputs are deterministic CSV (or JSON where noted) intended for plotting;
complex values in CSV grids are always split into re/im columns.  Every flag
can also be given in a key=value config file (``--config``); explicit flags
win over file entries.

Exit codes: 0 success (verify: all checks passed), 1 generic error or failed
verification, 2 usage error, 3 restrictive-condition violations (zero /
root-of-unity multiplier, resonant eigenvalues), 4 out-of-chart or chart
escape, 5 non-convergent series sum.  Errors print a single machine-parsable
line ``error: <Type>: <message>`` on stderr.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import dataclass, field

from . import verify as verify_mod
from .carleman import (
    build_matrix,
    build_matrix_quadrature,
    scaled_deviation,
    write_matrix_csv,
)
from .errors import (
    ChartEscape,
    MapflowError,
    NonConvergent,
    OutOfChart,
    RestrictiveConditionViolated,
)
from .flow import build_field, integrate_flow, lyapunov_logistic
from .iterate import (
    build_chart,
    build_expansion,
    chart_pipeline,
    evaluate_iterate_chart,
    evaluate_iterate_matrix,
)
from .logistic import (
    logistic2_iterate,
    logistic4_iterate,
    logistic4_iterate_second,
    logistic_series,
)
from .series import PowerSeries, find_fixed_point
from .spectral import diagonalize, matrix_log

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_RESTRICTIVE = 3
EXIT_OUT_OF_CHART = 4
EXIT_NONCONVERGENT = 5

DEFAULT_DIM = 32
DEFAULT_LYAPUNOV_N = 100_000


@dataclass
class RunConfig:
    """Validated bundle of everything a subcommand needs.

    Fields left as None fall back to per-command defaults, which lets a
    config file supply them and explicit flags override the file.
    """

    command: str
    coeffs: list | None = None
    preset: str | None = None
    dim: int | None = None
    guess: complex = 0j
    t_values: list = field(default_factory=list)
    x_values: list = field(default_factory=list)
    route: str = "both"
    r_eval: float | None = None
    tol: float | None = None
    output: str | None = None
    format: str | None = None
    check_quadrature: bool = False
    quadrature_nodes: int | None = None
    x0: complex | None = None
    t_end: float = 1.0
    dt: float = 1e-3
    n: int | None = None
    suite: str = "all"

    def validate(self):
        needs_map = self.command in {
            "matrix",
            "iterate",
            "chart",
            "field",
            "integrate",
        }
        if needs_map:
            if (self.coeffs is None) == (self.preset is None):
                raise ValueError("exactly one of --coeffs / --preset must be given")
            if self.dim is None:
                self.dim = DEFAULT_DIM
            if self.dim < 4:
                raise ValueError("--dim must be at least 4")
        if self.command == "iterate" and (not self.t_values or not self.x_values):
            raise ValueError("iterate needs non-empty --t and --x grids")

    def map_series(self) -> PowerSeries:
        if self.preset is not None:
            name, _, param = self.preset.partition(":")
            if name != "logistic":
                raise ValueError(f"unknown preset {self.preset!r}")
            mu = complex(param) if param else complex(4.0)
            return logistic_series(mu, self.dim)
        return PowerSeries.from_coefficients(self.coeffs, 0j, order=self.dim)

    def preset_mu(self) -> complex | None:
        if self.preset is None:
            return None
        _, _, param = self.preset.partition(":")
        return complex(param) if param else complex(4.0)


def _parse_complex_list(text: str) -> list:
    return [complex(item) for item in text.split(",") if item.strip()]


def _parse_float_list(text: str) -> list:
    return [float(item) for item in text.split(",") if item.strip()]


def load_config_file(path: str) -> dict:
    """key=value lines; blank lines and # comments ignored."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"bad config line (need key=value): {line!r}")
            key, _, val = line.partition("=")
            values[key.strip().replace("-", "_")] = val.strip()
    return values


_CONVERTERS = {
    "coeffs": _parse_complex_list,
    "preset": str,
    "dim": int,
    "guess": complex,
    "fixed_point": complex,
    "t": _parse_float_list,
    "x": _parse_complex_list,
    "route": str,
    "r_eval": float,
    "tol": float,
    "output": str,
    "format": str,
    "check_quadrature": lambda s: s.lower() in {"1", "true", "yes"},
    "quadrature_nodes": int,
    "x0": complex,
    "t_end": float,
    "dt": float,
    "n": int,
    "suite": str,
}

_FIELD_FOR_KEY = {
    "coeffs": "coeffs",
    "preset": "preset",
    "dim": "dim",
    "guess": "guess",
    "t": "t_values",
    "x": "x_values",
    "route": "route",
    "r_eval": "r_eval",
    "tol": "tol",
    "output": "output",
    "format": "format",
    "check_quadrature": "check_quadrature",
    "quadrature_nodes": "quadrature_nodes",
    "x0": "x0",
    "t_end": "t_end",
    "dt": "dt",
    "n": "n",
    "suite": "suite",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mapflow",
        description="continuous iterates and flows of analytic 1-D maps",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grids=False):
        p.add_argument("--coeffs", type=_parse_complex_list, default=None,
                       help="map coefficients, lowest degree first, e.g. 0,4,-4")
        p.add_argument("--preset", default=None, help="named map, e.g. logistic:4")
        p.add_argument("--dim", type=int, default=None,
                       help=f"truncation order (default {DEFAULT_DIM})")
        p.add_argument("--guess", type=complex, default=None,
                       help="fixed-point search start (default 0)")
        p.add_argument("--tol", type=float, default=None,
                       help="fixed-point residual tolerance override")
        p.add_argument("--r-eval", type=float, default=None, dest="r_eval",
                       help="chart evaluation radius override")
        p.add_argument("--output", default=None, help="output path (default stdout)")
        p.add_argument("--format", default=None, choices=("csv", "json"),
                       help="output format where supported")
        p.add_argument("--config", default=None,
                       help="key=value file mirroring these flags")
        if grids:
            p.add_argument("--t", type=_parse_float_list, default=None,
                           help="comma list of times")
            p.add_argument("--x", type=_parse_complex_list, default=None,
                           help="comma list of evaluation points")

    p = sub.add_parser("matrix", help="dump the embedding matrix")
    common(p)
    p.add_argument("--check-quadrature", action="store_true", default=None,
                   help="also report the builder-agreement deviation")
    p.add_argument("--quadrature-nodes", type=int, default=None)

    p = sub.add_parser("iterate", help="evaluate f^t over a (t, x) grid")
    common(p, grids=True)
    p.add_argument("--route", default=None, choices=("chart", "matrix", "both"))
    p.add_argument("--fixed-point", type=complex, default=None, dest="fixed_point",
                   help="which fixed point's chart to use (overrides --guess)")

    p = sub.add_parser("chart", help="dump the linearizing chart series")
    common(p)

    p = sub.add_parser("field", help="dump the flow field coefficients")
    common(p)

    p = sub.add_parser("integrate", help="integrate dx/dt = G(x)")
    common(p)
    p.add_argument("--x0", type=complex, default=None, help="initial state")
    p.add_argument("--t-end", type=float, default=None, dest="t_end")
    p.add_argument("--dt", type=float, default=None)

    p = sub.add_parser("lyapunov", help="chain-rule Lyapunov estimate (mu=4)")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--x0", type=complex, default=None)
    p.add_argument("--output", default=None)
    p.add_argument("--config", default=None)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", default=None, choices=sorted(verify_mod.SUITES))
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--output", default=None)
    p.add_argument("--format", default=None, choices=("csv", "json"))
    p.add_argument("--config", default=None)

    return parser


def make_config(ns: argparse.Namespace) -> RunConfig:
    file_values = {}
    if getattr(ns, "config", None):
        raw = load_config_file(ns.config)
        for key, text in raw.items():
            if key not in _CONVERTERS:
                raise ValueError(f"unknown config key {key!r}")
            file_values[key] = _CONVERTERS[key](text)
    cfg = RunConfig(command=ns.command)
    for key, attr in _FIELD_FOR_KEY.items():
        value = getattr(ns, key, None)
        if value is None:
            value = file_values.get(key)
        if value is not None:
            setattr(cfg, attr, value)
    fixed_point = getattr(ns, "fixed_point", None)
    if fixed_point is None:
        fixed_point = file_values.get("fixed_point")
    if fixed_point is not None:
        cfg.guess = fixed_point
    cfg.validate()
    return cfg


def _emit(cfg: RunConfig, text: str):
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_matrix(cfg: RunConfig) -> int:
    f = cfg.map_series()
    M = build_matrix(f, cfg.dim)
    buf = io.StringIO()
    write_matrix_csv(M, buf)
    _emit(cfg, buf.getvalue())
    if cfg.check_quadrature:
        Q = build_matrix_quadrature(f, cfg.dim, nodes=cfg.quadrature_nodes)
        dev = scaled_deviation(M.entries, Q.entries)
        sys.stdout.write(f"quadrature_deviation={dev:.17g}\n")
    return EXIT_OK


def _reference_fn(cfg: RunConfig, x_star: complex):
    mu = cfg.preset_mu()
    if mu is None or mu.imag != 0:
        return None
    if abs(mu - 4.0) < 1e-12:
        if abs(x_star) < 1e-6:
            return logistic4_iterate
        if abs(x_star - 0.75) < 1e-6:
            return logistic4_iterate_second
    if abs(mu - 2.0) < 1e-12 and abs(x_star) < 1e-6:
        return logistic2_iterate
    return None


def cmd_iterate(cfg: RunConfig) -> int:
    f = cfg.map_series()
    kwargs = {} if cfg.tol is None else {"tol_fix": cfg.tol}
    frame = find_fixed_point(f, cfg.guess, **kwargs)
    mg = build_matrix(frame.shifted_map, cfg.dim)
    fact = diagonalize(mg, frame)
    chart = build_chart(fact, frame, r_eval=cfg.r_eval)
    expansion = build_expansion(fact, frame)
    reference = _reference_fn(cfg, frame.x_star)

    routes = []
    if cfg.route in ("chart", "both"):
        routes.append(("chart", lambda t, x: evaluate_iterate_chart(chart, t, x)))
    if cfg.route in ("matrix", "both"):
        routes.append(
            ("matrix", lambda t, x: evaluate_iterate_matrix(expansion, t, x))
        )

    rows = []
    for t in cfg.t_values:
        for x in cfg.x_values:
            for name, fn in routes:
                try:
                    value = fn(t, x)
                    converged = True
                except (OutOfChart, NonConvergent):
                    value = None
                    converged = False
                ref = reference(t, x) if reference is not None else None
                rows.append((t, complex(x), value, name, converged, ref))

    if cfg.format == "json":
        payload = [
            {
                "t": t,
                "x_re": x.real,
                "x_im": x.imag,
                "ft_re": None if v is None else v.real,
                "ft_im": None if v is None else v.imag,
                "route": name,
                "converged": converged,
                "ref_re": None if r is None else r.real,
                "ref_im": None if r is None else r.imag,
            }
            for (t, x, v, name, converged, r) in rows
        ]
        _emit(cfg, json.dumps(payload, indent=2) + "\n")
        return EXIT_OK

    lines = ["t,x_re,x_im,ft_re,ft_im,route,converged,ref_re,ref_im"]
    for t, x, v, name, converged, r in rows:
        vre = "" if v is None else f"{v.real:.17g}"
        vim = "" if v is None else f"{v.imag:.17g}"
        rre = "" if r is None else f"{r.real:.17g}"
        rim = "" if r is None else f"{r.imag:.17g}"
        lines.append(
            f"{t:.17g},{x.real:.17g},{x.imag:.17g},{vre},{vim},{name},"
            f"{str(converged).lower()},{rre},{rim}"
        )
    _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_chart(cfg: RunConfig) -> int:
    f = cfg.map_series()
    _, _, chart = chart_pipeline(
        f, cfg.guess, cfg.dim, r_eval=cfg.r_eval, tol_fix=cfg.tol
    )
    lines = [
        f"chart x_star={chart.x_star.real:.17g}{chart.x_star.imag:+.17g}i "
        f"lambda={chart.multiplier.real:.17g}{chart.multiplier.imag:+.17g}i "
        f"dim={chart.forward.order} r_eval={chart.r_eval:.17g}",
        "k,u_re,u_im,uinv_re,uinv_im",
    ]
    for k in range(chart.forward.order):
        u = chart.forward.coeffs[k]
        v = chart.inverse.coeffs[k]
        lines.append(f"{k},{u.real:.17g},{u.imag:.17g},{v.real:.17g},{v.imag:.17g}")
    _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_field(cfg: RunConfig) -> int:
    f = cfg.map_series()
    _, fact, chart = chart_pipeline(
        f, cfg.guess, cfg.dim, r_eval=cfg.r_eval, tol_fix=cfg.tol
    )
    field_ = build_field(matrix_log(fact), chart)
    lines = [
        f"field x_star={field_.x_star.real:.17g}{field_.x_star.imag:+.17g}i "
        f"lambda={field_.multiplier.real:.17g}{field_.multiplier.imag:+.17g}i "
        f"dim={field_.series.order}",
        "k,g_re,g_im",
    ]
    for k, c in enumerate(field_.series.coeffs):
        lines.append(f"{k},{c.real:.17g},{c.imag:.17g}")
    _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_integrate(cfg: RunConfig) -> int:
    f = cfg.map_series()
    frame, fact, chart = chart_pipeline(
        f, cfg.guess, cfg.dim, r_eval=cfg.r_eval, tol_fix=cfg.tol
    )
    field_ = build_field(matrix_log(fact), chart)
    x0 = cfg.x0 if cfg.x0 is not None else frame.x_star
    trajectory = integrate_flow(field_, x0, cfg.t_end, dt=cfg.dt)
    lines = ["t,x_re,x_im"]
    for t, x in trajectory:
        lines.append(f"{t:.17g},{x.real:.17g},{x.imag:.17g}")
    _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_lyapunov(cfg: RunConfig) -> int:
    x0 = cfg.x0.real if cfg.x0 is not None else 0.123456
    n = cfg.n if cfg.n is not None else DEFAULT_LYAPUNOV_N
    sigma = lyapunov_logistic(n, x0)
    payload = {
        "n": n,
        "x0": x0,
        "sigma_hat": sigma,
        "reference": 0.6931471805599453,
    }
    _emit(cfg, json.dumps(payload, indent=2) + "\n")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    suite = cfg.suite
    results = verify_mod.run_suite(suite, dim=cfg.dim, n=cfg.n)
    all_passed = all(r.passed for r in results)
    if cfg.format == "csv":
        lines = ["name,passed,deviation,tolerance"]
        for r in results:
            lines.append(
                f"{r.name},{str(r.passed).lower()},{r.deviation:.17g},"
                f"{r.tolerance:.17g}"
            )
        _emit(cfg, "\n".join(lines) + "\n")
    else:
        payload = {
            "suite": suite,
            "results": [
                {
                    "name": r.name,
                    "passed": r.passed,
                    "deviation": r.deviation,
                    "tolerance": r.tolerance,
                    "detail": r.detail,
                }
                for r in results
            ],
            "all_passed": all_passed,
        }
        _emit(cfg, json.dumps(payload, indent=2) + "\n")
    for r in results:
        sys.stderr.write(r.line() + "\n")
    return EXIT_OK if all_passed else EXIT_ERROR


_COMMANDS = {
    "matrix": cmd_matrix,
    "iterate": cmd_iterate,
    "chart": cmd_chart,
    "field": cmd_field,
    "integrate": cmd_integrate,
    "lyapunov": cmd_lyapunov,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = make_config(ns)
        return _COMMANDS[ns.command](cfg)
    except RestrictiveConditionViolated as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_RESTRICTIVE
    except (OutOfChart, ChartEscape) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_OUT_OF_CHART
    except NonConvergent as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_NONCONVERGENT
    except (MapflowError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
