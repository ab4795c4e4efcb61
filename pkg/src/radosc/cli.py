"""Command-line interface: ``radosc eigen | deform | verify``.

Exit codes: 0 success (and, for ``verify``, every entry passed), 1 failed
verification or aborted deformation, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .canonical import EigenLabel, phi_closed_form
from .config import RunConfig, format_complex, load_config, parse_complex
from .darboux import (
    ComplexFactorization,
    DeformedOperators,
    psi_from_phi,
    peak_im_radius,
    v_eval,
    zone_radius,
)
from .errors import BetaPoleError, ConfigError, RadoscError
from .report import ReportEntry, VerificationReport
from .verify import verify_section2, verify_section3

__all__ = ["main", "cmd_eigen", "cmd_deform", "cmd_verify", "write_csv", "atomic_write_text"]

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def atomic_write_text(path: Path, text: str) -> None:
    """Write ``text`` to a temporary file next to ``path`` and rename it into place."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def write_csv(path: Path, header: Sequence[str], columns: Iterable) -> None:
    """Comma-separated file with a header row, LF endings and 17 significant digits."""
    cols = [np.asarray(c) if not isinstance(c, (list, tuple)) else c for c in columns]
    n = len(cols[0]) if cols else 0
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for i in range(n):
        buf.write(",".join(_cell(c[i]) for c in cols) + "\n")
    atomic_write_text(path, buf.getvalue())


def _eps_dir(e: complex) -> str:
    return "eps_" + format_complex(e)


def cmd_eigen(cfg: RunConfig) -> int:
    """Tabulate ``phi^{(l)}_s`` for ``l <= l_max``, ``s <= s_max`` and write ``spectrum.csv``."""
    out = Path(cfg.out)
    grid = cfg.grid
    rows = []
    for l in range(cfg.l_max + 1):
        for s in range(cfg.s_max + 1):
            lab = EigenLabel(l, s)
            phi = phi_closed_form(lab, grid)
            write_csv(out / f"phi_l{l}_s{s}.csv", ("r", "phi"), (grid.r, phi.values.real))
            rows.append((l, s, lab.n, lab.energy))
    write_csv(out / "spectrum.csv", ("l", "s", "n", "E"), list(zip(*rows)))
    return EXIT_OK


def cmd_deform(cfg: RunConfig) -> int:
    """Potential curves, deformed states and zone radii for each configured ``epsilon``.

    Writes ``eps_<re+imi>/potential.csv``, ``eps_<re+imi>/psi_s<s>.csv``,
    ``zones.csv`` and ``deform_status.json``. A pole of the superpotential
    aborts that ``epsilon`` only; the status file records it and the exit
    code becomes 1.
    """
    cfg.require_deformation()
    out = Path(cfg.out)
    grid, window = cfg.grid, cfg.window
    zones = {k: [] for k in ("l", "re_epsilon", "im_epsilon", "r0", "im_v_peak_r", "im_v_origin",
                             "im_v_origin_limit")}
    status = []
    for e in cfg.epsilon:
        cf = ComplexFactorization(cfg.l, e)
        sub = out / _eps_dir(e)
        try:
            ops = DeformedOperators(cf, grid, cfg.z_max)
        except BetaPoleError as exc:
            status.append({"epsilon": [e.real, e.imag], "status": "beta-pole", "message": str(exc)})
            continue
        v = ops.v
        write_csv(sub / "potential.csv", ("r", "re_v", "im_v"), (grid.r, v.real, v.imag))
        for s in range(cfg.deformed_s_max + 1):
            st = psi_from_phi(cf, s, grid, window, cfg.z_max, ops=ops)
            psi = st.values.values
            phi = phi_closed_form(EigenLabel(cfg.l, s), grid).values.real
            write_csv(sub / f"psi_s{s}.csv", ("r", "re_psi", "im_psi", "abs2_psi", "phi", "abs2_phi"),
                      (grid.r, psi.real, psi.imag, np.abs(psi) ** 2, phi, phi ** 2))
        zones["l"].append(cfg.l)
        zones["re_epsilon"].append(e.real)
        zones["im_epsilon"].append(e.imag)
        zones["r0"].append(zone_radius(cf, grid, z_max=cfg.z_max))
        zones["im_v_peak_r"].append(peak_im_radius(cf, grid, window, cfg.z_max))
        zones["im_v_origin"].append(complex(v_eval(cf, grid.r_min, cfg.z_max)).imag)
        zones["im_v_origin_limit"].append(4 * e.imag / (4 * cfg.l + 6))
        status.append({"epsilon": [e.real, e.imag], "status": "ok", "message": ""})
    write_csv(out / "zones.csv", tuple(zones), tuple(zones.values()))
    atomic_write_text(out / "deform_status.json",
                      json.dumps({"schema": 1, "config": cfg.to_dict(), "runs": status}, sort_keys=True,
                                 indent=2) + "\n")
    return EXIT_OK if all(s["status"] == "ok" for s in status) else EXIT_FAIL


def run_verification(cfg: RunConfig) -> VerificationReport:
    """Canonical suite plus one deformed suite per ``epsilon``, with ``cfg.tol`` applied."""
    cfg.require_deformation()
    report = verify_section2(cfg.grid, cfg.window, cfg.l_max, cfg.s_max, cfg.seed, cfg.n_test)
    for e in cfg.epsilon:
        cf = ComplexFactorization(cfg.l, e)
        try:
            report = report + verify_section3(cf, cfg.grid, cfg.window, cfg.deformed_s_max, cfg.seed,
                                              cfg.n_test, cfg.z_max)
        except BetaPoleError as exc:
            bad = ReportEntry("beta-pole", "complex-factorization", cfg.l, "grid", float("inf"), 0.0,
                              metric="pole", epsilon=cf.epsilon)
            report = report + VerificationReport((bad,), (str(exc),))
    if cfg.tol is not None:
        report = report.with_tolerance(cfg.tol)
    return report.with_config(cfg.to_dict())


def cmd_verify(cfg: RunConfig) -> int:
    """Write ``report.json``; exit code 0 iff every entry passes."""
    report = run_verification(cfg)
    atomic_write_text(Path(cfg.out) / "report.json", report.to_json())
    s = report.summary()
    print(f"verify: {s['passed']}/{s['total']} entries passed -> {Path(cfg.out) / 'report.json'}")
    for e in report.failures()[:20]:
        print(f"  FAIL {e.name} l={e.l} {e.subject}: {e.residual:.3e} (tol {e.tolerance:.1e})")
    if len(report.failures()) > 20:
        print(f"  ... {len(report.failures()) - 20} more failures")
    return EXIT_OK if report.passed else EXIT_FAIL


def _epsilon_arg(text: str) -> complex:
    try:
        return parse_complex(text)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="radosc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--l", type=int, help="angular momentum of the deformation")
    common.add_argument("--l-max", type=int, help="largest l of the canonical tabulation and suite")
    common.add_argument("--s-max", type=int, help="largest radial quantum number s")
    common.add_argument("--epsilon", action="append", type=_epsilon_arg, metavar="RE,IM",
                        help="deformation constant; repeat for several (replaces the configured list)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="seed of the test bumps")
    common.add_argument("--tol", type=float, help="replace every residual tolerance")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override any configuration key")
    sub.add_parser("eigen", parents=[common], help="tabulate the canonical eigenfunctions")
    sub.add_parser("deform", parents=[common], help="deformed potentials and states")
    sub.add_parser("verify", parents=[common], help="run the identity suites and write report.json")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    extra = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        extra[k.strip()] = v
    cfg = cfg.override(**extra)
    eps = tuple(args.epsilon) if args.epsilon else None
    return cfg.override(l=args.l, l_max=args.l_max, s_max=args.s_max, epsilon=eps, out=args.out,
                        seed=args.seed, tol=args.tol)


_COMMANDS = {"eigen": cmd_eigen, "deform": cmd_deform, "verify": cmd_verify}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"radosc: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RadoscError as exc:
        print(f"radosc: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"radosc: I/O error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
