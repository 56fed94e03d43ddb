"""Command-line front end.

Subcommands: ``eig``, ``sv``, ``scan``, ``verify``, ``ikramov``, ``selftest``.
Families enter either as the built-in ``kato`` family or as affine-family
JSON files; matrices and reports use the package's JSON wire formats.

Exit codes: 0 success, 1 mathematical error (non-Hermitian input, sigma at
zero, convergence failure, failed verification), 2 success with warnings
(near-degenerate clusters), 3 file/parse/usage errors.  Output files are
written atomically (temp file plus rename), so no partial reports are left
behind on error.  For a fixed seed the output bytes are reproducible.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .cluster import locate_cluster
from .deriv_eig import eig_directional_derivatives
from .deriv_sv import sv_decomposition, sv_derivative_pair
from .directions import normalize_direction, sphere_directions
from .errors import InputFormatError, SpectralSensError
from .families import AffineFamily, MatrixFamily, kato_family
from .fd import fd_directional
from .ikramov import (
    build_q,
    classify_critical_point,
    coarse_maximize,
    forward_backward,
    is_decisive,
    level_function_report,
)
from .linalg import ComplexMatrix, hermitian_eig

EXIT_OK = 0
EXIT_MATH = 1
EXIT_WARNINGS = 2
EXIT_INPUT = 3

#: Pass threshold for `verify`: |analytic - fd| <= VERIFY_RTOL * max(1, |analytic|).
VERIFY_RTOL = 1e-5

DEFAULT_SEED = 42
IKRAMOV_DEFAULT_DIRECTIONS = 64

log = logging.getLogger(__name__)

_LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped onto the input-error exit code."""

    def error(self, message):
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    family: MatrixFamily | None = None
    builtin: str | None = None
    x0: np.ndarray | None = None
    ms: tuple[int, ...] = ()
    ks: tuple[int, ...] = ()
    directions: np.ndarray | None = None
    seed: int = DEFAULT_SEED
    n_directions: int | None = None
    cluster_tol: float | None = None
    h0: float | None = None
    fmt: str = "json"
    out: Path | None = None
    matrix: ComplexMatrix | None = None
    find_max: bool = False
    max_radius: float = 1.0
    max_grid: int = 5
    warnings_seen: bool = field(default=False, init=False)


def _parse_float_list(text: str, what: str) -> np.ndarray:
    try:
        values = [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise InputFormatError(f"could not parse {what} '{text}': {exc}") from None
    if not values:
        raise InputFormatError(f"{what} must contain at least one number")
    return np.asarray(values, dtype=np.float64)


def _parse_int_list(text: str, what: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip() != "")
    except ValueError as exc:
        raise InputFormatError(f"could not parse {what} '{text}': {exc}") from None
    if not values:
        raise InputFormatError(f"{what} must contain at least one integer")
    return values


def _load_json_file(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise InputFormatError(f"cannot read '{path}': {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"malformed JSON in '{path}': {exc}") from None


def _resolve_family(args) -> tuple[MatrixFamily, str | None]:
    if getattr(args, "builtin", None):
        if args.builtin == "kato":
            return kato_family(), "kato"
        raise InputFormatError(f"unknown builtin family '{args.builtin}'")
    if getattr(args, "family", None):
        payload = AffineFamily.from_json(_load_json_file(args.family))
        return payload.to_family(), None
    raise InputFormatError("a family is required: pass --family FILE or --builtin kato")


def _resolve_directions(args, param_dim: int, default_count: int | None = None) -> np.ndarray:
    explicit = getattr(args, "d", None)
    n_directions = getattr(args, "n_directions", None)
    axes = getattr(args, "axes", False)
    sources = sum((bool(explicit), n_directions is not None, bool(axes)))
    if sources > 1:
        raise InputFormatError("pass only one of --d, --n-directions, --axes")
    if sources == 0:
        if default_count is None:
            raise InputFormatError(
                "directions are required: pass --d, --n-directions or --axes"
            )
        n_directions = default_count
    if explicit:
        rows = []
        for text in explicit:
            vec = _parse_float_list(text, "direction")
            if vec.size != param_dim:
                raise InputFormatError(
                    f"direction '{text}' has {vec.size} coordinates, family has {param_dim}"
                )
            if getattr(args, "normalize", False):
                vec = normalize_direction(vec)
            elif abs(float(np.linalg.norm(vec)) - 1.0) > 1e-12:
                raise InputFormatError(
                    f"direction '{text}' is not unit norm; pass --normalize to rescale"
                )
            rows.append(vec)
        return np.array(rows)
    if axes:
        return np.eye(param_dim)
    if n_directions < 1:
        raise InputFormatError("--n-directions must be at least 1")
    return sphere_directions(param_dim, n_directions, seed=args.seed)


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
        return
    tmp = cfg.out.with_name(cfg.out.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, cfg.out)


def _emit_json(cfg: RunConfig, payload: dict) -> None:
    _emit(cfg, json.dumps(payload, indent=2) + "\n")


def _emit_csv(cfg: RunConfig, header: list[str], rows: list[list[str]]) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(header)
    writer.writerows(rows)
    _emit(cfg, buffer.getvalue())


def _exit_code(cfg: RunConfig) -> int:
    return EXIT_WARNINGS if cfg.warnings_seen else EXIT_OK


def _report_rows(index_name: str, reports) -> tuple[list[str], list[list[str]]]:
    p = len(reports[0].direction)
    header = [index_name, *(f"d_{i + 1}" for i in range(p)), "selected_index", "derivative", "mu", "warnings"]
    rows = []
    for rep in reports:
        rows.append(
            [
                str(rep.cluster.m),
                *(_fmt(v) for v in rep.direction),
                str(rep.selected_index),
                _fmt(rep.derivative),
                ";".join(_fmt(v) for v in rep.mu),
                str(len(rep.warnings)),
            ]
        )
    return header, rows


def _cmd_eig(cfg: RunConfig) -> int:
    reports = eig_directional_derivatives(cfg.family, cfg.x0, cfg.ms, cfg.directions, cfg.cluster_tol)
    cfg.warnings_seen = any(rep.warnings for rep in reports)
    if cfg.fmt == "csv":
        header, rows = _report_rows("m", reports)
        _emit_csv(cfg, header, rows)
    else:
        payload = {
            "command": "eig",
            "x0": [float(v) for v in cfg.x0],
            "cluster_tol": cfg.cluster_tol,
            "reports": [rep.to_json() for rep in reports],
        }
        _emit_json(cfg, payload)
    return _exit_code(cfg)


def _cmd_sv(cfg: RunConfig) -> int:
    entries = []
    any_warning = False
    for k in cfg.ks:
        for d in cfg.directions:
            reduced, embedding = sv_derivative_pair(cfg.family, cfg.x0, k, d, cfg.cluster_tol)
            any_warning = any_warning or bool(reduced.warnings)
            entry = reduced.to_json()
            entry["embedding_derivative"] = embedding.derivative
            entry["path_delta"] = abs(embedding.derivative - reduced.derivative)
            entries.append((reduced, entry))
    cfg.warnings_seen = any_warning
    if cfg.fmt == "csv":
        header, rows = _report_rows("k", [rep for rep, _ in entries])
        header.append("path_delta")
        for row, (_, entry) in zip(rows, entries):
            row.append(_fmt(entry["path_delta"]))
        _emit_csv(cfg, header, rows)
    else:
        payload = {
            "command": "sv",
            "x0": [float(v) for v in cfg.x0],
            "cluster_tol": cfg.cluster_tol,
            "reports": [entry for _, entry in entries],
        }
        _emit_json(cfg, payload)
    return _exit_code(cfg)


def _cmd_scan(cfg: RunConfig) -> int:
    if cfg.ms and cfg.ks:
        raise InputFormatError("scan takes either --m or --k, not both")
    if cfg.ms:
        if len(cfg.ms) != 1:
            raise InputFormatError("scan takes exactly one --m index")
        reports = eig_directional_derivatives(
            cfg.family, cfg.x0, [cfg.ms[0]], cfg.directions, cfg.cluster_tol
        )
    elif cfg.ks:
        if len(cfg.ks) != 1:
            raise InputFormatError("scan takes exactly one --k index")
        reports = [
            sv_derivative_pair(cfg.family, cfg.x0, cfg.ks[0], d, cfg.cluster_tol)[0]
            for d in cfg.directions
        ]
    else:
        raise InputFormatError("scan requires an index: pass --m or --k")
    cfg.warnings_seen = any(rep.warnings for rep in reports)
    p = len(reports[0].direction)
    r = len(reports[0].mu)
    header = [*(f"d_{i + 1}" for i in range(p)), *(f"mu_{i + 1}" for i in range(r)), "derivative"]
    rows = [
        [*(_fmt(v) for v in rep.direction), *(_fmt(v) for v in rep.mu), _fmt(rep.derivative)]
        for rep in reports
    ]
    _emit_csv(cfg, header, rows)
    return _exit_code(cfg)


def _cmd_verify(cfg: RunConfig) -> int:
    if bool(cfg.ms) == bool(cfg.ks):
        raise InputFormatError("verify takes exactly one of --m (eigenvalues) or --k (singular values)")
    entries = []
    any_warning = False
    if cfg.ms:
        reports = eig_directional_derivatives(cfg.family, cfg.x0, cfg.ms, cfg.directions, cfg.cluster_tol)
        by_pair = {
            (m, tuple(d)): rep
            for rep, (m, d) in zip(reports, [(m, d) for m in cfg.ms for d in cfg.directions])
        }
        kind = "eig"

        def phi_for(index):
            def phi(x):
                return float(hermitian_eig(cfg.family.evaluate(x)).eigenvalues[index - 1])

            return phi

        pairs = [(m, d) for m in cfg.ms for d in cfg.directions]
    else:
        kind = "sv"
        by_pair = {}
        pairs = [(k, d) for k in cfg.ks for d in cfg.directions]
        for k, d in pairs:
            by_pair[(k, tuple(d))] = sv_derivative_pair(cfg.family, cfg.x0, k, d, cfg.cluster_tol)[0]

        def phi_for(index):
            def phi(x):
                return float(sv_decomposition(cfg.family.evaluate(x)).sigma[index - 1])

            return phi

    for index, d in pairs:
        rep = by_pair[(index, tuple(d))]
        any_warning = any_warning or bool(rep.warnings)
        estimate = fd_directional(phi_for(index), cfg.x0, d, h0=cfg.h0)
        abs_delta = abs(rep.derivative - estimate.extrapolated)
        rel_delta = abs_delta / max(1.0, abs(rep.derivative))
        if not estimate.trusted:
            status = "inconclusive"
        elif rel_delta <= VERIFY_RTOL:
            status = "pass"
        else:
            status = "fail"
        entries.append(
            {
                "kind": kind,
                "index": index,
                "direction": [float(v) for v in d],
                "analytic": rep.derivative,
                "fd": estimate.extrapolated,
                "fd_stability": estimate.stability_indicator,
                "abs_delta": abs_delta,
                "rel_delta": rel_delta,
                "status": status,
            }
        )
    cfg.warnings_seen = any_warning
    aggregate = all(entry["status"] != "fail" for entry in entries)
    payload = {
        "command": "verify",
        "x0": [float(v) for v in cfg.x0],
        "tolerance": VERIFY_RTOL,
        "entries": entries,
        "pass": aggregate,
    }
    _emit_json(cfg, payload)
    if not aggregate:
        return EXIT_MATH
    return _exit_code(cfg)


def _cmd_ikramov(cfg: RunConfig) -> int:
    xi0 = cfg.x0
    if xi0 is None:
        if not cfg.find_max:
            raise InputFormatError("ikramov needs --x0 XI or --find-max")
        xi0 = coarse_maximize(cfg.matrix, radius=cfg.max_radius, grid_points=cfg.max_grid)
    analysis = classify_critical_point(cfg.matrix, xi0, cfg.directions, cfg.cluster_tol)
    level = level_function_report(cfg.matrix, xi0, cfg.cluster_tol)
    payload = analysis.to_json()
    payload["command"] = "ikramov"
    payload["level"] = level.to_json()
    max_delta = max((rec.reflection_delta for rec in analysis.per_direction), default=0.0)
    payload["max_reflection_delta"] = max_delta
    _emit_json(cfg, payload)
    return EXIT_OK


def _selftest_checks():
    fam = kato_family()
    origin = np.zeros(2)
    dirs = sphere_directions(2, 16, seed=DEFAULT_SEED)
    reports_1 = eig_directional_derivatives(fam, origin, [1], dirs)
    reports_2 = eig_directional_derivatives(fam, origin, [2], dirs)
    yield (
        "kato origin derivatives are +1/-1 for every direction",
        max(abs(r.derivative - 1.0) for r in reports_1) <= 1e-9
        and max(abs(r.derivative + 1.0) for r in reports_2) <= 1e-9,
    )
    simple = eig_directional_derivatives(fam, [3.0, 4.0], [1], [[1.0, 0.0]])[0]
    yield ("kato simple point derivative equals 0.6", abs(simple.derivative - 0.6) <= 1e-9)

    one = AffineFamily(
        base=ComplexMatrix.zeros(1, 1),
        coefficients=(ComplexMatrix(np.array([[1.0 + 0.0j]])),),
        hermitian=True,
    ).to_family()
    reduced, embedding = sv_derivative_pair(one, [1.0], 1, [1.0])
    yield (
        "1x1 singular-value derivative: both paths give 1",
        abs(reduced.derivative - 1.0) <= 1e-9 and abs(embedding.derivative - 1.0) <= 1e-9,
    )

    a = ComplexMatrix(
        np.array(
            [[0.0, 0.0, 1.0], [3.0, 0.0, 0.0], [0.0, 2.0, 0.0]], dtype=np.complex128
        )
    )
    analysis = classify_critical_point(a, np.zeros(4), sphere_directions(4, 8, seed=DEFAULT_SEED))
    yield (
        "flat anchor point: decisive case with vanishing derivatives",
        analysis.case.value == "decisive"
        and max(abs(r.f_forward) for r in analysis.per_direction) <= 1e-9
        and max(r.reflection_delta for r in analysis.per_direction) <= 1e-9,
    )
    spectrum = sv_decomposition(build_q(a, np.zeros(4))).eigenvalues
    cluster = locate_cluster(spectrum, 7, 1e-8)
    yield ("flat anchor point cluster is (i=1, j=2)", (cluster.i, cluster.j) == (1, 2))

    f_fwd, f_bwd = forward_backward([3.0, 1.0, -2.0], 2)
    yield (
        "index arithmetic on the synthetic spectrum (3, 1, -2) with p=2",
        is_decisive(2, 3) and f_fwd == 1.0 and f_bwd == -1.0,
    )


def _cmd_selftest(cfg: RunConfig) -> int:
    lines = []
    ok = True
    for name, passed in _selftest_checks():
        ok = ok and passed
        lines.append(f"{'ok  ' if passed else 'FAIL'} {name}")
    lines.append(f"selftest: {'pass' if ok else 'fail'}")
    _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_MATH


def _add_common(parser: argparse.ArgumentParser, *, family: bool = True) -> None:
    if family:
        group = parser.add_mutually_exclusive_group()
        group.add_argument("--family", metavar="FILE", help="affine family JSON file")
        group.add_argument("--builtin", choices=["kato"], help="built-in family")
        parser.add_argument("--x0", metavar="CSV", help="evaluation point, comma-separated")
    parser.add_argument("--d", metavar="CSV", action="append", help="explicit unit direction (repeatable)")
    parser.add_argument("--n-directions", type=int, metavar="N", help="number of seeded directions")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="direction sampling seed")
    parser.add_argument("--axes", action="store_true", help="use the coordinate axes as directions")
    parser.add_argument("--normalize", action="store_true", help="rescale explicit directions to unit norm")
    parser.add_argument("--cluster-tol", type=float, metavar="TOL", help="eigenvalue clustering tolerance")
    parser.add_argument("--h0", type=float, metavar="H", help="initial finite-difference step")
    parser.add_argument("--format", choices=["json", "csv"], default="json", help="report format")
    parser.add_argument("--out", metavar="PATH", help="output file (default: stdout)")


def _build_parser() -> _Parser:
    parser = _Parser(prog="spectral-sens", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eig = sub.add_parser("eig", help="eigenvalue directional derivatives", parents=[])
    _add_common(p_eig)
    p_eig.add_argument("--m", metavar="LIST", help="eigenvalue indices (1-based, comma-separated)")

    p_sv = sub.add_parser("sv", help="singular-value directional derivatives (both paths)")
    _add_common(p_sv)
    p_sv.add_argument("--k", metavar="LIST", help="singular-value indices (1-based, comma-separated)")

    p_scan = sub.add_parser("scan", help="derivative as a function of direction, CSV output")
    _add_common(p_scan)
    p_scan.add_argument("--m", metavar="INT", help="eigenvalue index")
    p_scan.add_argument("--k", metavar="INT", help="singular-value index")

    p_verify = sub.add_parser("verify", help="cross-check derivatives against the FD oracle")
    _add_common(p_verify)
    p_verify.add_argument("--m", metavar="LIST", help="eigenvalue indices")
    p_verify.add_argument("--k", metavar="LIST", help="singular-value indices")

    p_ik = sub.add_parser("ikramov", help="block-perturbation critical-point analysis")
    p_ik.add_argument("--matrix", metavar="FILE", required=True, help="square matrix JSON (n >= 3)")
    p_ik.add_argument("--x0", metavar="CSV", help="candidate maximizer xi0 (4 components)")
    p_ik.add_argument("--find-max", action="store_true", help="locate a candidate via coarse maximization")
    p_ik.add_argument("--max-radius", type=float, default=1.0, help="search radius for --find-max")
    p_ik.add_argument("--max-grid", type=int, default=5, help="grid points per axis for --find-max")
    _add_common(p_ik, family=False)

    p_self = sub.add_parser("selftest", help="run the built-in golden checks")
    p_self.add_argument("--out", metavar="PATH", help="output file (default: stdout)")

    return parser


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig(command=args.command)
    if getattr(args, "out", None):
        cfg.out = Path(args.out)
    if getattr(args, "format", None):
        cfg.fmt = args.format
    if getattr(args, "cluster_tol", None) is not None:
        if args.cluster_tol < 0:
            raise InputFormatError("--cluster-tol must be nonnegative")
        cfg.cluster_tol = args.cluster_tol
    if getattr(args, "h0", None) is not None:
        if args.h0 <= 0:
            raise InputFormatError("--h0 must be positive")
        cfg.h0 = args.h0
    cfg.seed = getattr(args, "seed", DEFAULT_SEED)

    if args.command == "selftest":
        return cfg

    if args.command == "ikramov":
        cfg.matrix = ComplexMatrix.from_json(_load_json_file(args.matrix))
        if not cfg.matrix.is_square or cfg.matrix.rows < 3:
            raise InputFormatError(
                f"ikramov needs a square matrix with n >= 3, "
                f"got {cfg.matrix.rows}x{cfg.matrix.cols}"
            )
        if getattr(args, "x0", None):
            xi = _parse_float_list(args.x0, "--x0")
            if xi.size != 4:
                raise InputFormatError("--x0 for ikramov must have 4 components")
            cfg.x0 = xi
        cfg.find_max = args.find_max
        cfg.max_radius = args.max_radius
        cfg.max_grid = args.max_grid
        cfg.directions = _resolve_directions(args, 4, default_count=IKRAMOV_DEFAULT_DIRECTIONS)
        return cfg

    cfg.family, cfg.builtin = _resolve_family(args)
    if not getattr(args, "x0", None):
        raise InputFormatError("--x0 is required")
    cfg.x0 = _parse_float_list(args.x0, "--x0")
    if cfg.x0.size != cfg.family.param_dim:
        raise InputFormatError(
            f"--x0 has {cfg.x0.size} coordinates, family has {cfg.family.param_dim}"
        )
    if getattr(args, "m", None):
        cfg.ms = _parse_int_list(args.m, "--m")
    if getattr(args, "k", None):
        cfg.ks = _parse_int_list(args.k, "--k")
    if args.command == "eig" and not cfg.ms:
        raise InputFormatError("eig requires --m")
    if args.command == "sv" and not cfg.ks:
        raise InputFormatError("sv requires --k")
    cfg.directions = _resolve_directions(args, cfg.family.param_dim)
    return cfg


_COMMANDS = {
    "eig": _cmd_eig,
    "sv": _cmd_sv,
    "scan": _cmd_scan,
    "verify": _cmd_verify,
    "ikramov": _cmd_ikramov,
    "selftest": _cmd_selftest,
}


def main(argv=None) -> int:
    level = _LOG_LEVELS.get(os.environ.get("SPECTRAL_SENS_LOG", "warn"), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        return _COMMANDS[args.command](cfg)
    except InputFormatError as exc:
        print(f"spectral-sens: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"spectral-sens: i/o error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SpectralSensError, ValueError) as exc:
        print(f"spectral-sens: error: {exc}", file=sys.stderr)
        return EXIT_MATH


if __name__ == "__main__":
    sys.exit(main())
