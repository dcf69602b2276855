"""Command-line driver: key=value configs in, CSV tables, gnuplot scripts and a JSON-lines summary out.

Usage::

    deepwave <command> [--config path] [--set key=value ...]

Each command writes ``<outdir>/<command>-<tag>.csv`` and a matching ``.plt``
script, where ``tag`` is a digest of the resolved configuration, and appends
one line to ``<outdir>/summary.jsonl``.  The exit status is nonzero when any
check of the command fails.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Callable

import numpy as np

from . import hnls
from . import normal_form as nf
from . import verify
from . import wavepacket as wp
from .field import Grid
from .hilbert_expansion import Packet, h0_truncation_error

log = logging.getLogger("deepwave")

COMMANDS = (
    "run-hnls", "build-packet", "verify-dispersion", "verify-expansion",
    "verify-normal-form", "sweep-residual", "check-ledger",
)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str = ""
    k: float = 1.0
    eps: float = 0.1
    eps_list: tuple[float, ...] = (0.2, 0.1, 0.05)
    slow_n: int = 64
    fast_n: int = 256
    slow_length: float = 3.2          # slow period in units of 2 pi
    s: float = 2.0
    dt: float = 1e-3
    T_final: float = 1.0
    seed: int = 0
    outdir: str = "out"
    amp: float = 1.0
    width: float = 1.5
    orders: int = 3
    bands: int = 5
    omega: float = float("nan")     # nan: use the dispersion relation
    samples: int = 100_000

    @property
    def slow_grid(self) -> Grid:
        L = 2 * math.pi * self.slow_length
        return Grid(self.slow_n, self.slow_n, L, L)

    def digest(self) -> str:
        d = {k: v for k, v in asdict(self).items() if k != "outdir"}
        text = json.dumps(d, sort_keys=True, default=str)
        return hashlib.sha256(text.encode()).hexdigest()[:12]


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _convert(key: str, raw: str):
    t = _TYPES[key]
    if t == "str":
        return raw
    if t == "int":
        return int(raw)
    if t == "float":
        return float(raw)
    if t.startswith("tuple"):
        vals = tuple(float(x) for x in raw.replace(",", " ").split())
        if not vals:
            raise ValueError("empty list")
        return vals
    raise TypeError(t)


def _on_lattice(x: float, tol: float = 1e-9) -> bool:
    return abs(x - round(x)) < tol


def validate(cfg: RunConfig) -> RunConfig:
    if not cfg.command:
        raise ConfigError("field 'command': a command is required")
    if cfg.command not in COMMANDS:
        raise ConfigError(f"field 'command': unknown command {cfg.command!r}")
    for name in ("slow_n", "fast_n"):
        n = getattr(cfg, name)
        if n < 2 or n & (n - 1):
            raise ConfigError(f"field {name!r}: grid size must be a power of two, got {n}")
    if cfg.k <= 0 or cfg.slow_length <= 0:
        raise ConfigError("fields 'k', 'slow_length' must be positive")
    if any(b >= a for a, b in zip(cfg.eps_list, cfg.eps_list[1:])):
        raise ConfigError("field 'eps_list': must be strictly decreasing")
    if cfg.orders not in (1, 2, 3):
        raise ConfigError("field 'orders': must be 1, 2 or 3")
    # the carrier must be a frequency of the fast period slow_length / eps
    for name, vals in (("eps", (cfg.eps,)), ("eps_list", cfg.eps_list)):
        for e in vals:
            if not (0 < e < 1):
                raise ConfigError(f"field {name!r}: eps = {e} outside (0, 1)")
            if not _on_lattice(cfg.k * cfg.slow_length / e):
                raise ConfigError(
                    f"field {name!r}: k = {cfg.k} is not a frequency of the fast period "
                    f"2pi*{cfg.slow_length / e:g} (eps = {e})"
                )
    return cfg


def parse_config(text: str, overrides: dict[str, str] | None = None) -> RunConfig:
    """Parse key = value lines.

    ``#`` starts a comment.  A ``[command]`` header starts a section whose keys
    apply only when that command runs.  ``overrides`` win over the file.
    """
    entries: list[tuple[str | None, str, str, str]] = []   # (section, key, value, where)
    section: str | None = None
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in COMMANDS:
                raise ConfigError(f"line {n}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key = value, got {line!r}")
        key, val = (x.strip() for x in line.split("=", 1))
        entries.append((section, key, val, f"line {n}"))
    sets = [("--set", key.strip(), val.strip(), f"--set {key}") for key, val in (overrides or {}).items()]
    for _, key, _, loc in entries + sets:
        if key not in _TYPES:
            raise ConfigError(f"{loc}: unknown key {key!r}")

    command = ""
    for sec, key, val, _ in entries + sets:
        if key == "command" and sec in (None, "--set"):
            command = val
    # precedence: file globals < the command's own section < --set
    values: dict[str, str] = {}
    where: dict[str, str] = {}
    for wanted in (None, command, "--set"):
        for sec, key, val, loc in entries + sets:
            if sec == wanted:
                values[key], where[key] = val, loc

    cfg = RunConfig()
    for key, val in values.items():
        try:
            setattr(cfg, key, _convert(key, val))
        except ValueError as exc:
            raise ConfigError(f"{where[key]}: bad value for {key!r}: {exc}") from None
    return validate(cfg)


# output ------------------------------------------------------------------------------

@dataclass
class Table:
    anchor: str
    columns: list[str]
    rows: list[list] = field(default_factory=list)

    def render(self) -> str:
        buf = io.StringIO()
        buf.write(f"# anchor: {self.anchor}\n")
        buf.write(",".join(self.columns) + "\n")
        for r in self.rows:
            buf.write(",".join(_fmt(x) for x in r) + "\n")
        return buf.getvalue()


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".12g")
    return str(x)


@dataclass
class Outcome:
    table: Table
    checks: dict[str, bool]
    summary: dict = field(default_factory=dict)
    plot: Callable[[str], str] | None = None

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def _plot_xy(xcol: int, ycols: list[int], logscale: bool, title: str) -> Callable[[str], str]:
    def script(csv: str) -> str:
        lines = [
            "set datafile separator ','",
            f"set title '{title}'",
            "set key top left",
        ]
        if logscale:
            lines.append("set logscale xy")
        plots = [f"'{csv}' skip 1 using {xcol}:{y} with linespoints title columnhead({y})" for y in ycols]
        lines.append("plot " + ", \\\n     ".join(plots))
        return "\n".join(lines) + "\n"
    return script


# commands ----------------------------------------------------------------------------

def _envelope(cfg: RunConfig) -> np.ndarray:
    return hnls.gaussian(cfg.slow_grid, cfg.amp, cfg.width)


def cmd_run_hnls(cfg: RunConfig) -> Outcome:
    p = hnls.PacketParams(cfg.k, cfg.eps)
    A = hnls.Envelope(_envelope(cfg), cfg.slow_grid)
    m0, h0 = hnls.mass(A), hnls.hamiltonian(A, p)
    t = Table("hnls-conservation", ["T", "mass", "hamiltonian", "mass_drift", "hamiltonian_drift"])
    t.rows.append([0.0, m0, h0, 0.0, 0.0])
    n_out = 10
    for j in range(1, n_out + 1):
        A = hnls.evolve_A(A, p, cfg.T_final * j / n_out, cfg.dt)
        m, h = hnls.mass(A), hnls.hamiltonian(A, p)
        t.rows.append([A.T, m, h, abs(m - m0) / m0, abs(h - h0) / abs(h0)])
    md = max(r[3] for r in t.rows)
    hd = max(r[4] for r in t.rows)
    return Outcome(t, {"mass_drift<=1e-8": md <= 1e-8, "hamiltonian_drift<=1e-6": hd <= 1e-6},
                   {"mass_drift": md, "hamiltonian_drift": hd}, _plot_xy(1, [4, 5], False, "conservation"))


def cmd_build_packet(cfg: RunConfig) -> Outcome:
    p = hnls.PacketParams(cfg.k, cfg.eps)
    grid = cfg.slow_grid
    A = _envelope(cfg)
    sol = wp.build_solution(A, None, grid, p)
    t = Table("packet-correctors", ["order", "lambda_L2", "z_L2", "eps_power_L2"])
    for j in range(3):
        lam_j = sol.lambda_orders[j] * p.eps ** (j + 1)
        z_j = sol.z_orders[j] * p.eps ** (j + 1)
        t.rows.append([j + 1, lam_j.l2(), z_j.l2(), p.eps ** (j + 1)])
    rep = wp.ledger_check()
    return Outcome(t, {"ledger": rep.ok}, {"ledger_terms": rep.checked},
                   _plot_xy(1, [2, 3], True, "corrector sizes"))


def cmd_verify_dispersion(cfg: RunConfig) -> Outcome:
    p = hnls.PacketParams(cfg.k, cfg.eps)
    omega = p.omega if math.isnan(cfg.omega) else cfg.omega
    grid = cfg.slow_grid
    A = np.ones(grid.shape, dtype=complex) * cfg.amp
    r = verify.dispersion_residual(A, grid, p, omega)
    g = verify.group_velocity_residual(_envelope(cfg), grid, p)
    t = Table("dispersion-relation", ["k", "omega", "dispersion_residual", "group_velocity_residual"])
    t.rows.append([cfg.k, omega, r, g])
    return Outcome(t, {"dispersion<=1e-10": r <= 1e-10, "group_velocity<=1e-11": g <= 1e-11},
                   {"dispersion_residual": r, "group_velocity_residual": g},
                   _plot_xy(2, [3, 4], False, "leading-order residuals"))


def cmd_verify_expansion(cfg: RunConfig) -> Outcome:
    grid = cfg.slow_grid
    F = _envelope(cfg)
    t = Table("flat-hilbert-truncation", ["eps", f"H{cfg.s:g}_error"])
    for e in cfg.eps_list:
        pk = Packet(F, grid, cfg.k, e)
        t.rows.append([e, h0_truncation_error(pk, cfg.s, cfg.fast_n)])
    slope = verify.fit_slope(cfg.eps_list, [r[1] for r in t.rows])
    return Outcome(t, {"slope>=2.7": slope >= 2.7}, {"slope": slope}, _plot_xy(1, [2], True, "truncation error"))


def cmd_verify_normal_form(cfg: RunConfig) -> Outcome:
    rng = np.random.default_rng(cfg.seed)
    xi, xp = nf.sample_frequencies(rng, cfg.samples)
    c0 = nf.fit_comparability_constant(xi, xp)
    printed = nf.denominator_inequalities(xi, xp)
    corrected = nf.denominator_inequalities(xi, xp, prime_factor=2.0)
    gain = nf.derivative_gain_check(cfg.k, rng, cfg.samples)
    t = Table("normal-form-denominator", ["check", "samples", "violations", "constant", "bound"])
    t.rows.append(["comparability", len(xi), int(c0 > 16), c0, 16])
    t.rows.append(["triangle-as-stated", printed[0].samples, printed[0].violations, 1.0, 0])
    t.rows.append(["triangle-factor-2", corrected[0].samples, corrected[0].violations, 2.0, 0])
    t.rows.append(["three-term", printed[1].samples, printed[1].violations, printed[1].constant, 0])
    t.rows.append(["derivative-gain", gain.samples, gain.violations, gain.constant, 6 * cfg.k])
    worst = 0.0
    xs = rng.normal(size=(cfg.samples, 2)) * 10.0 ** rng.uniform(-1, 2, (cfg.samples, 1))
    generic = {"F0": lambda x: np.cos(x[..., 0]) + 1j * np.sin(x[..., 1]),
               "F1": lambda x: x[..., 0] / (1 + np.hypot(x[..., 0], x[..., 1])) + 0j}
    for variant, extra in (("generic", generic), ("particular1", {}), ("particular7", {"l": 1}),
                           ("particular7", {"l": 2})):
        K = nf.NormalFormKernel(cfg.k, variant, **extra)
        ok = K.admissible(xs)
        q0, q1 = K.values(xs[ok])
        res = float(np.max(np.abs(nf.system_residual(K, xs[ok], q0, q1))))
        worst = max(worst, res)
        t.rows.append(["backsubstitution-" + variant + (f"-l{extra['l']}" if variant == "particular7" else ""), int(ok.sum()), int(res > 1e-12), res, 1e-12])
    checks = {
        "comparability<=16": c0 <= 16,
        "triangle-as-stated": printed[0].ok,
        "three-term": printed[1].ok,
        "derivative-gain": gain.ok,
        "backsubstitution<=1e-12": worst <= 1e-12,
    }
    return Outcome(t, checks, {"c0": c0, "triangle_factor2_violations": corrected[0].violations},
                   _plot_xy(0, [3, 4], False, "normal-form checks"))


def cmd_sweep_residual(cfg: RunConfig) -> Outcome:
    grid = cfg.slow_grid
    aux = verify.AUX_EPS if cfg.orders == 3 else None
    st = verify.residual_sweep(_envelope(cfg), grid, cfg.k, cfg.eps_list, cfg.s, cfg.orders, cfg.bands,
                               aux_eps=aux)
    cols = list(st.norms)
    t = Table("packet-residual-order", ["eps"] + [f"{c}_residual" for c in cols])
    t.rows = st.rows()
    slopes = {c: st.slope(c) for c in cols}
    if cfg.orders == 3:
        checks = {
            "decreasing": st.decreasing("Hs"),
            "full_Hs_slope>=3.0": slopes["Hs"] >= 3.0,
            "projected_Hs_slope>=3.5": slopes["projected_Hs"] >= 3.5,
        }
    else:
        checks = {"decreasing": st.decreasing("L2")}
    return Outcome(t, checks, {"slopes": slopes, "orders": cfg.orders},
                   _plot_xy(1, list(range(2, len(cols) + 2)), True, "residual"))


def cmd_check_ledger(cfg: RunConfig) -> Outcome:
    t = Table("order-phase-ledger", ["term", "eps_power", "order", "phase_expected", "phase"])
    for e in wp.REGISTRY:
        t.rows.append([e.name.replace(",", ";"), e.eps_power, wp.term_order(e.signature),
                       e.phase, wp.term_phase(e.signature)])
    rep = wp.ledger_check()
    return Outcome(t, {"ledger": rep.ok}, {"violations": rep.violations},
                   _plot_xy(3, [5], False, "order and phase"))


HANDLERS: dict[str, Callable[[RunConfig], Outcome]] = {
    "run-hnls": cmd_run_hnls,
    "build-packet": cmd_build_packet,
    "verify-dispersion": cmd_verify_dispersion,
    "verify-expansion": cmd_verify_expansion,
    "verify-normal-form": cmd_verify_normal_form,
    "sweep-residual": cmd_sweep_residual,
    "check-ledger": cmd_check_ledger,
}


def run(cfg: RunConfig) -> tuple[int, Outcome]:
    out = HANDLERS[cfg.command](cfg)
    outdir = Path(cfg.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    stem = f"{cfg.command}-{cfg.digest()}"
    csv = outdir / f"{stem}.csv"
    csv.write_text(out.table.render())
    if out.plot is not None:
        (outdir / f"{stem}.plt").write_text(out.plot(csv.name))
    record = {
        "command": cfg.command,
        "csv": csv.name,
        "status": "pass" if out.ok else "fail",
        "failed": sorted(k for k, v in out.checks.items() if not v),
        "summary": out.summary,
    }
    with open(outdir / "summary.jsonl", "a") as fh:
        fh.write(json.dumps(record, sort_keys=True, default=float) + "\n")
    return (0 if out.ok else 1), out


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="deepwave", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", type=Path)
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")

    overrides = {"command": args.command}
    for item in args.set:
        if "=" not in item:
            ap.error(f"--set expects key=value, got {item!r}")
        key, val = item.split("=", 1)
        overrides[key] = val
    text = args.config.read_text() if args.config else ""
    try:
        cfg = parse_config(text, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    status, out = run(cfg)
    for name, ok in out.checks.items():
        log.info("%s %s", "PASS" if ok else "FAIL", name)
    print(json.dumps({"command": cfg.command, "status": "pass" if status == 0 else "fail",
                      "failed": sorted(k for k, v in out.checks.items() if not v)}))
    return status


if __name__ == "__main__":
    sys.exit(main())
