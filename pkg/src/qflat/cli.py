"""Command-line front end.

Subcommands::

    qflat list                  catalog of spaces with derived parameters
    qflat qtable                q_n(tau) table with error and (log q)''
    qflat curvature             qtable plus the prefactor residual column
    qflat centrality            exact centrality certificates
    qflat scan                  full flatness scan with verdicts
    qflat verify-asymptotics    small- and large-tau oracle deviations

Output is a single CSV or JSON document on stdout or to ``--out``.  All
numerics are deterministic and the documents carry no timestamps unless
``--timestamps`` is given, so identical invocations produce byte-identical
output; ``--threads k`` only distributes independent cells over a pool and
never changes the result.

Exit status: 0 on success, 1 on configuration errors, 2 when any cell
failed numerically or when ``--expect-theorem`` verdicts do not match.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Callable, Sequence

from .asymptotics import log_qp_large_tau, watson2
from .flatness import (
    FlatnessReport,
    Mode,
    describe_exact,
    theorem_expected_verdict,
    theorem_scan,
)
from .hypergeom import hypergeom_poly
from .quadrature import (
    DEFAULT_TOL,
    MAX_TAU,
    TOL_MAX,
    TOL_MIN,
    QuadratureError,
    q_chi,
    q_chi_derivs,
)
from .spaces import DEFAULT_SCAN_SELECTORS, chi_params, parse_space

__all__ = ["RunConfig", "parse_args", "run", "main"]

_SMALL_TAUS = (1e-3, 1e-2)
_LARGE_TAUS = (100.0, 400.0)

_CSV_COLUMNS = {
    "list": ["space", "family", "size", "m", "m_beta", "m_half", "B",
             "A", "c", "mu", "kappa", "nu"],
    "qtable": ["space", "n", "tau", "q", "abs_err", "dlogq2"],
    "curvature": ["space", "n", "tau", "q", "abs_err", "dlogq2",
                  "prefactor_residual"],
    "centrality": ["space", "n", "lhs", "rhs", "pass"],
    "scan": ["space", "verdict", "max_chi_deviation", "prefactor_residual",
             "witness_n", "witness_lhs", "witness_rhs"],
    "verify-asymptotics": ["space", "n", "regime", "tau", "deviation"],
}


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    spaces: tuple[str, ...] = ()
    n_values: tuple[int, ...] = ()
    tau_values: tuple[float, ...] = ()
    n_max: int = 5
    tol: float = DEFAULT_TOL
    fmt: str = "csv"
    out: str | None = None
    mode: Mode = Mode.PREFACTOR_CORRECTED
    threads: int = 1
    expect_theorem: bool = False
    timestamps: bool = False


class _Parser(argparse.ArgumentParser):
    # configuration errors exit 1 (argparse defaults to 2)
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_int_set(text: str) -> tuple[int, ...]:
    out: set[int] = set()
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.update(range(int(lo), int(hi) + 1))
        elif part:
            out.add(int(part))
    if not out:
        raise ValueError("empty integer set")
    return tuple(sorted(out))


def _parse_floats(text: str) -> tuple[float, ...]:
    vals = tuple(float(p) for p in text.split(",") if p.strip())
    if not vals:
        raise ValueError("empty list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qflat",
                     description="Curvature data of rank-1 symmetric space "
                                 "quantizations.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, with_threads=True):
        p.add_argument("--format", choices=("csv", "json"), default=None,
                       dest="fmt")
        p.add_argument("--out", default=None, metavar="PATH")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL)
        p.add_argument("--timestamps", action="store_true")
        if with_threads:
            p.add_argument("--threads", type=int, default=None)

    p = sub.add_parser("list", help="catalog listing")
    common(p, with_threads=False)

    for name, hlp in (("qtable", "q_n(tau) table"),
                      ("curvature", "curvature grid")):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("--space", required=True,
                       help="comma-separated selectors, e.g. S3,CP2")
        p.add_argument("--n", default="0..3", help="e.g. 0..3 or 1,2,5")
        p.add_argument("--tau", default="0.25,0.5,1,2,4")
        common(p)

    p = sub.add_parser("centrality", help="exact certificates")
    p.add_argument("--space", required=True)
    p.add_argument("--n", default="1..5")
    common(p, with_threads=False)

    p = sub.add_parser("scan", help="full flatness scan")
    p.add_argument("--spaces", default="all")
    p.add_argument("--n-max", type=int, default=5, dest="n_max")
    p.add_argument("--tau", default="0.25,0.5,1,2,4")
    p.add_argument("--mode", choices=tuple(m.value for m in Mode),
                   default=Mode.PREFACTOR_CORRECTED.value)
    p.add_argument("--expect-theorem", action="store_true")
    common(p)

    p = sub.add_parser("verify-asymptotics",
                       help="small/large tau oracle deviations")
    p.add_argument("--space", default="all")
    p.add_argument("--n", default="0..3")
    common(p)

    return parser


def parse_args(argv: Sequence[str] | None = None) -> RunConfig:
    parser = build_parser()
    ns = parser.parse_args(argv)

    def fail(msg: str) -> None:
        parser.error(msg)

    spaces: tuple[str, ...] = ()
    raw = getattr(ns, "spaces", None)
    if raw is None:
        raw = getattr(ns, "space", None)
    if ns.subcommand == "list":
        spaces = DEFAULT_SCAN_SELECTORS
    elif raw is not None:
        if raw.strip() == "all":
            spaces = DEFAULT_SCAN_SELECTORS
        else:
            labels = tuple(s.strip() for s in raw.split(",") if s.strip())
            if not labels:
                fail("no spaces selected")
            for lbl in labels:
                try:
                    parse_space(lbl)
                except ValueError as exc:
                    fail(str(exc))
            spaces = labels

    n_values: tuple[int, ...] = ()
    if hasattr(ns, "n"):
        try:
            n_values = _parse_int_set(ns.n)
        except ValueError as exc:
            fail(f"bad --n value {ns.n!r}: {exc}")
        for n in n_values:
            if n < 0:
                fail(f"n must be nonnegative, got {n}")
            if n > 16:
                fail(f"n must be at most 16, got {n}")

    tau_values: tuple[float, ...] = ()
    if hasattr(ns, "tau"):
        try:
            tau_values = _parse_floats(ns.tau)
        except ValueError as exc:
            fail(f"bad --tau value {ns.tau!r}: {exc}")
        for t in tau_values:
            if not (t > 0.0):
                fail("tau must be positive")
            if t > MAX_TAU:
                fail(f"tau must be at most {MAX_TAU:g}, got {t:g}")

    n_max = getattr(ns, "n_max", 5)
    if not (1 <= n_max <= 16):
        fail(f"--n-max must lie in [1, 16], got {n_max}")

    if not (TOL_MIN <= ns.tol <= TOL_MAX):
        fail(f"--tol must lie in [{TOL_MIN:g}, {TOL_MAX:g}], got {ns.tol:g}")

    threads = getattr(ns, "threads", None)
    if threads is None:
        env = os.environ.get("QFLAT_THREADS", "").strip()
        threads = int(env) if env else 1
    if threads < 1:
        fail(f"--threads must be at least 1, got {threads}")

    fmt = ns.fmt or ("json" if ns.subcommand == "scan" else "csv")

    return RunConfig(
        subcommand=ns.subcommand,
        spaces=spaces,
        n_values=n_values,
        tau_values=tau_values,
        n_max=n_max,
        tol=ns.tol,
        fmt=fmt,
        out=ns.out,
        mode=Mode(getattr(ns, "mode", Mode.PREFACTOR_CORRECTED.value)),
        threads=threads,
        expect_theorem=getattr(ns, "expect_theorem", False),
        timestamps=ns.timestamps,
    )


# ---------------------------------------------------------------------------
# formatting


def _fmt_sci(x: float) -> str:
    # lowercase scientific, 9 significant digits
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.8e}"


def _jf(x: float):
    # JSON has no inf/nan literals; fall back to strings for those
    return x if math.isfinite(x) else _fmt_sci(x)


def _csv_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _fmt_sci(v)
    return "" if v is None else str(v)


def _render_csv(kind: str, rows: list[dict]) -> str:
    cols = _CSV_COLUMNS[kind]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for row in rows:
        writer.writerow([_csv_cell(_csv_value(row.get(c), c)) for c in cols])
    return buf.getvalue()


def _csv_value(v, col: str):
    if col == "tau" and isinstance(v, float):
        return repr(v)
    return v


def _sanitize(obj):
    # JSON has no inf/nan literals; stringify them wherever they appear
    if isinstance(obj, float):
        return _jf(obj)
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


def _render_json(kind: str, payload: dict, cfg: RunConfig) -> str:
    doc: dict = {"schema": "qflat.v1", "kind": kind}
    if cfg.timestamps:
        doc["generated_at"] = datetime.now(timezone.utc).isoformat()
    doc.update(_sanitize(payload))
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _map_cells(work: Callable, cells: list, threads: int) -> list:
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(work, cells))
    return [work(c) for c in cells]


# ---------------------------------------------------------------------------
# subcommands


def _rows_list(cfg: RunConfig) -> list[dict]:
    rows = []
    for lbl in cfg.spaces:
        sp = parse_space(lbl)
        ch = chi_params(sp, 0)
        rows.append({
            "space": sp.label, "family": sp.family.value, "size": sp.size,
            "m": sp.m, "m_beta": sp.m_beta, "m_half": sp.m_half, "B": sp.B,
            "A": str(ch.A), "c": str(ch.c), "mu": str(ch.mu),
            "kappa": str(ch.kappa), "nu": str(ch.nu),
        })
    return rows


def _rows_table(cfg: RunConfig, with_residual: bool) -> tuple[list[dict], bool]:
    cells = [(lbl, n, tau) for lbl in cfg.spaces for n in cfg.n_values
             for tau in cfg.tau_values]

    def work(cell):
        lbl, n, tau = cell
        sp = parse_space(lbl)
        row = {"space": lbl, "n": n, "tau": tau}
        try:
            res, _, d2 = q_chi_derivs(sp, n, tau, cfg.tol)
            row.update(q=res.value, log_q=res.log_value,
                       abs_err=res.abs_error, dlogq2=d2, status="ok")
            if with_residual:
                row["prefactor_residual"] = abs(d2 + 0.5 * sp.m / (tau * tau))
        except QuadratureError as exc:
            row.update(q=math.nan, log_q=math.nan, abs_err=math.nan,
                       dlogq2=math.nan, status=f"error: {exc}")
            if with_residual:
                row["prefactor_residual"] = math.nan
        return row

    rows = _map_cells(work, cells, cfg.threads)
    return rows, all(r["status"] == "ok" for r in rows)


def _rows_centrality(cfg: RunConfig) -> list[dict]:
    from .flatness import centrality_check

    rows = []
    for lbl in cfg.spaces:
        sp = parse_space(lbl)
        for chk in centrality_check(sp, [n for n in cfg.n_values if n >= 1]):
            rows.append({
                "space": lbl, "n": chk.n,
                "lhs": describe_exact(chk.lhs),
                "rhs": describe_exact(chk.rhs),
                "pass": chk.passed,
                # the lhs/rhs strings are exact certificates, never rounded
                "exact": True,
            })
    return rows


def _rows_asymptotics(cfg: RunConfig) -> tuple[list[dict], bool]:
    cells = [(lbl, n) for lbl in cfg.spaces for n in cfg.n_values]

    def work(cell):
        lbl, n = cell
        sp = parse_space(lbl)
        ch = chi_params(sp, n)
        poly = hypergeom_poly(ch.A, n, ch.c)
        out = []
        for tau in _SMALL_TAUS:
            row = {"space": lbl, "n": n, "regime": "small_tau", "tau": tau}
            try:
                q = q_chi(sp, n, tau, cfg.tol).value
                w = watson2(poly, ch.mu, ch.kappa, ch.nu, tau)
                row.update(deviation=abs(q - w) / q, status="ok")
            except QuadratureError as exc:
                row.update(deviation=math.nan, status=f"error: {exc}")
            out.append(row)
        for tau in _LARGE_TAUS:
            row = {"space": lbl, "n": n, "regime": "large_tau", "tau": tau}
            try:
                res = q_chi(sp, n, tau, cfg.tol)
                logasym, _ = log_qp_large_tau(
                    poly, float(ch.mu), float(ch.kappa), float(ch.nu), tau
                )
                row.update(deviation=abs(math.expm1(res.log_value - logasym)),
                           status="ok")
            except QuadratureError as exc:
                row.update(deviation=math.nan, status=f"error: {exc}")
            out.append(row)
        return out

    nested = _map_cells(work, cells, cfg.threads)
    rows = [r for chunk in nested for r in chunk]
    return rows, all(r["status"] == "ok" for r in rows)


def _witness_fields(rep: FlatnessReport) -> tuple:
    w = rep.exact_witness
    if w is None:
        return None, None, None
    return w.n, describe_exact(w.lhs), describe_exact(w.rhs)


def _scan_rows(reports: list[FlatnessReport]) -> list[dict]:
    rows = []
    for rep in reports:
        wn, wl, wr = _witness_fields(rep)
        rows.append({
            "space": rep.space.label,
            "verdict": rep.verdict.value,
            "max_chi_deviation": rep.max_chi_deviation,
            "prefactor_residual": rep.prefactor_residual,
            "witness_n": wn, "witness_lhs": wl, "witness_rhs": wr,
        })
    return rows


def _scan_payload(reports: list[FlatnessReport], cfg: RunConfig) -> dict:
    reps = []
    for rep in reports:
        wn, wl, wr = _witness_fields(rep)
        entry = {
            "space": rep.space.label,
            "family": rep.space.family.value,
            "m": rep.space.m,
            "m_beta": rep.space.m_beta,
            "m_half": rep.space.m_half,
            "B": rep.space.B,
            "verdict": rep.verdict.value,
            "max_chi_deviation": _jf(rep.max_chi_deviation),
            "prefactor_residual": _jf(rep.prefactor_residual),
            "exact_witness": None if wn is None else
                {"n": wn, "lhs": wl, "rhs": wr, "pass": False},
            "centrality": [
                {"n": c.n, "lhs": describe_exact(c.lhs),
                 "rhs": describe_exact(c.rhs), "pass": c.passed}
                for c in rep.centrality
            ],
            "rationality": None if rep.rationality is None else {
                "n_used": rep.rationality.n_used,
                "lhs": describe_exact(rep.rationality.lhs),
                "rhs": describe_exact(rep.rationality.rhs),
                "rhs_rational": rep.rationality.rhs_rational,
                "conclusion": rep.rationality.conclusion,
            },
            "tau_grid": list(rep.tau_grid),
            "curvature": [[_jf(v) for v in row] for row in rep.curvature],
            "failures": [
                {"n": n, "tau_index": i, "message": msg}
                for n, i, msg in rep.failures
            ],
        }
        reps.append(entry)
    return {
        "mode": cfg.mode.value,
        "n_max": cfg.n_max,
        "tau_grid": list(cfg.tau_values),
        "tol": cfg.tol,
        "reports": reps,
    }


def run(cfg: RunConfig) -> int:
    """Execute a parsed configuration; returns the process exit code."""
    ok = True
    if cfg.subcommand == "list":
        rows = _rows_list(cfg)
        payload = {"rows": rows}
    elif cfg.subcommand in ("qtable", "curvature"):
        rows, ok = _rows_table(cfg, with_residual=cfg.subcommand == "curvature")
        payload = {"tol": cfg.tol, "rows": rows}
    elif cfg.subcommand == "centrality":
        rows = _rows_centrality(cfg)
        payload = {"rows": rows}
    elif cfg.subcommand == "verify-asymptotics":
        rows, ok = _rows_asymptotics(cfg)
        payload = {"tol": cfg.tol, "rows": rows}
    elif cfg.subcommand == "scan":
        reports = theorem_scan(
            [parse_space(lbl) for lbl in cfg.spaces],
            n_max=cfg.n_max, tau_grid=cfg.tau_values, tol=cfg.tol,
            mode=cfg.mode, threads=cfg.threads,
        )
        ok = all(not rep.failures for rep in reports)
        if cfg.expect_theorem:
            ok = ok and all(
                rep.verdict is theorem_expected_verdict(rep.space)
                for rep in reports
            )
        rows = _scan_rows(reports)
        payload = _scan_payload(reports, cfg)
    else:  # unreachable behind argparse
        raise ValueError(f"unknown subcommand {cfg.subcommand!r}")

    if cfg.fmt == "csv":
        text = _render_csv(cfg.subcommand, rows)
    else:
        text = _render_json(cfg.subcommand, payload, cfg)
    _emit(text, cfg.out)
    return 0 if ok else 2


def main(argv: Sequence[str] | None = None) -> int:
    return run(parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
