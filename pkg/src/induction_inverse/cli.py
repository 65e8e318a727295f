"""Command line front end.

Subcommands: ``forward``, ``invert``, ``resonance``, ``diophantine``,
``roundtrip`` and ``transport``. Exit codes: 0 success, 2 configuration or
hypothesis violation, 3 I/O, 4 resonant obstruction, 5 expectation
mismatch, 6 round-trip acceptance failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import arithmetic, fieldio
from .errors import (
    ConfigError,
    FieldFileError,
    InductionError,
    UnsolvableModeError,
)
from .fields import (
    BackgroundField,
    SpectralVectorField,
    curl_cross,
    random_solenoidal,
    spectral_norm,
    to_grid,
    to_spectral,
)
from .forward import (
    check_solenoidal,
    divergence_residual,
    duhamel_snapshot,
    evolve_series,
    relative_divergence,
    EvolutionSeries,
)
from .inverse import (
    reconstruct_velocity,
    source_from_series,
    source_from_snapshot,
    stability_rhs,
)
from .lattice import TorusLattice
from .profiles import make_profile
from .transport_rd import (
    HyperplaneChart,
    SlabGrid,
    SlabSpec,
    divergence_residual_slab,
    make_chart,
    slab_points,
    solve_slab,
    transport_residual_slab,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_RESONANT = 4
EXIT_EXPECTATION = 5
EXIT_ACCEPTANCE = 6

OUTPUT_ENV = "INDUCTION_OUTPUT_DIR"
MANIFEST = "manifest.txt"


class ExpectationMismatch(InductionError):
    pass


class AcceptanceFailure(InductionError):
    pass


# ---------------------------------------------------------------- parsing

_SQRT = re.compile(r"^sqrt\((.+)\)$")


def parse_number(tok: str) -> float:
    tok = tok.strip()
    m = _SQRT.match(tok)
    try:
        if m:
            return math.sqrt(parse_number(m.group(1)))
        if "/" in tok:
            return float(Fraction(tok))
        return float(tok)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse number {tok!r}") from exc


def parse_vector(text: str) -> list:
    return [parse_number(t) for t in text.split(",") if t.strip()]


def parse_exact(text: str) -> list:
    return [arithmetic.as_exact(t) for t in text.split(",") if t.strip()]


def parse_ints(text: str) -> list:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"expected integers, got {text!r}") from exc


@dataclass
class RunConfig:
    F: Optional[list] = None
    F_exact: Optional[list] = None
    L: Optional[list] = None
    N: Optional[list] = None
    eta: float = 1.0
    times: Optional[list] = None
    tau: Optional[float] = None
    kmax: Optional[int] = None
    resonance_mode: str = "float-threshold"
    tolerance: Optional[float] = None
    policy: str = "strict"
    seed: Optional[int] = None
    output: str = "out"
    extra: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return len(self.F)

    def lattice(self) -> TorusLattice:
        return TorusLattice(self.L, self.N)

    def tol(self) -> float:
        if self.tolerance is not None:
            if not self.tolerance > 0:
                raise ConfigError(f"tolerance must be positive, got {self.tolerance}")
            return self.tolerance
        return arithmetic.default_tolerance(self.F, self.L)


def build_config(args) -> RunConfig:
    cfg = RunConfig()
    F_text = getattr(args, "F", None)
    if F_text is not None:
        cfg.F = parse_vector(F_text)
        if getattr(args, "resonance_mode", None) == "exact":
            cfg.F_exact = parse_exact(F_text)
    if getattr(args, "L", None):
        cfg.L = parse_vector(args.L)
    elif cfg.F is not None:
        cfg.L = [1.0] * len(cfg.F)
    if getattr(args, "N", None):
        cfg.N = parse_ints(args.N)
    for name in ("eta", "tau", "kmax", "seed", "policy"):
        if getattr(args, name, None) is not None:
            setattr(cfg, name, getattr(args, name))
    if getattr(args, "tol", None) is not None:
        cfg.tolerance = args.tol
    mode = getattr(args, "resonance_mode", None)
    if mode is not None:
        cfg.resonance_mode = "exact-rational" if mode == "exact" else "float-threshold"
    if getattr(args, "times", None):
        cfg.times = parse_vector(args.times)
    cfg.output = args.out or os.environ.get(OUTPUT_ENV) or "out"

    if cfg.F is not None:
        if cfg.L is not None and len(cfg.L) != len(cfg.F):
            raise ConfigError(f"F has {len(cfg.F)} components but L has {len(cfg.L)}")
        if cfg.N is not None and len(cfg.N) != len(cfg.F):
            raise ConfigError(f"F has {len(cfg.F)} components but N has {len(cfg.N)}")
        BackgroundField(cfg.F)
    if not cfg.eta > 0:
        raise ConfigError(f"magnetic diffusivity must be positive, got {cfg.eta}")
    if cfg.kmax is not None and cfg.kmax < 1:
        raise ConfigError(f"kmax must be >= 1, got {cfg.kmax}")
    return cfg


def _require(cfg: RunConfig, *names):
    for name in names:
        if getattr(cfg, name) is None:
            raise ConfigError(f"missing required option --{name}")


def _outdir(cfg: RunConfig) -> str:
    try:
        os.makedirs(cfg.output, exist_ok=True)
    except OSError as exc:
        raise FieldFileError(f"cannot create output directory {cfg.output}: {exc}") from exc
    return cfg.output


def _fmt_vec(v) -> str:
    return ",".join(repr(float(x)) for x in v)


def _fmt_k(k) -> str:
    return "(" + ",".join(str(int(c)) for c in k) + ")"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _write_spectral(path, s: SpectralVectorField):
    fieldio.write_grid_field(path, to_grid(s))


def _read_spectral(path) -> SpectralVectorField:
    return to_spectral(fieldio.read_grid_field(path))


def _band_of(s: SpectralVectorField) -> int:
    """Largest |k_i| carrying nonzero coefficients (at least 1)."""
    support = np.any(s.coeffs != 0, axis=0)
    if not np.any(support):
        return 1
    return max(1, int(np.max(np.abs(s.lattice.k_grid[:, support]))))


# ---------------------------------------------------------------- manifest


def write_manifest(path, series: EvolutionSeries, F, files, residuals):
    lat = series.lattice
    lines = [
        "format = induction-series 1",
        f"d = {lat.d}",
        f"L = {_fmt_vec(lat.L)}",
        f"N = {','.join(str(n) for n in lat.N)}",
        f"eta = {series.eta!r}",
        f"F = {_fmt_vec(F)}",
        f"count = {len(series)}",
    ]
    for j, (t, name, r) in enumerate(zip(series.times, files, residuals)):
        lines.append(f"snapshot {j} {float(t)!r} {name} {r:.6e}")
    lines.append(f"divergence_residual_max = {max(residuals, default=0.0):.6e}")
    fieldio.atomic_write_text(path, "\n".join(lines) + "\n")


def read_manifest(directory) -> dict:
    path = os.path.join(directory, MANIFEST)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise FieldFileError(f"cannot read manifest {path}: {exc}") from exc
    info = {"snapshots": []}
    for line in text.splitlines():
        if line.startswith("snapshot "):
            _, j, t, name, _res = line.split()
            info["snapshots"].append((float(t), os.path.join(directory, name)))
        elif " = " in line:
            key, val = line.split(" = ", 1)
            info[key.strip()] = val.strip()
    if "eta" not in info or "F" not in info:
        raise FieldFileError(f"manifest {path} lacks eta or F")
    return info


# ---------------------------------------------------------------- commands


def cmd_forward(cfg: RunConfig, args) -> int:
    _require(cfg, "F")
    if args.velocity:
        v = _read_spectral(args.velocity)
        lat = v.lattice
        if cfg.N is not None and tuple(cfg.N) != lat.N:
            raise ConfigError(f"--N {cfg.N} disagrees with velocity file grid {lat.N}")
        check_solenoidal(v, "velocity file")
    else:
        _require(cfg, "N", "seed")
        lat = cfg.lattice()
        v = random_solenoidal(lat, cfg.seed, args.band, args.amplitude)
    if len(cfg.F) != lat.d:
        raise ConfigError(f"F has {len(cfg.F)} components, velocity has {lat.d}")
    times = cfg.times or [args.T * (j + 1) / args.count for j in range(args.count)]

    series = evolve_series(lat, cfg.eta, cfg.F, v, None, times)
    out = _outdir(cfg)
    _write_spectral(os.path.join(out, "velocity.vfld"), v)
    files, residuals = [], []
    for j, b in enumerate(series.snapshots):
        name = f"snap_{j:04d}.vfld"
        _write_spectral(os.path.join(out, name), b)
        files.append(name)
        residuals.append(relative_divergence(b))
    write_manifest(os.path.join(out, MANIFEST), series, cfg.F, files, residuals)
    print(f"wrote {len(files)} snapshots to {out}; divergence residual {max(residuals):.3e}")
    return EXIT_OK


def _stability_text(h, v, tau, C):
    rhs = stability_rhs(h, tau, C)
    lhs = spectral_norm(v)
    return rhs, lhs, [
        f"tau = {tau!r}",
        f"C = {C!r}",
        f"v_norm = {lhs:.17g}",
        f"stability_rhs = {rhs:.17g}",
        f"stability_holds = {str(lhs <= rhs).lower()}",
    ]


def _resonance_for(cfg: RunConfig, lat: TorusLattice):
    kmax = cfg.kmax or lat.kmax_full
    if cfg.resonance_mode == "exact-rational":
        return arithmetic.resonant_set(cfg.F_exact, lat, kmax, "exact-rational")
    return arithmetic.resonant_set(cfg.F, lat, kmax, "float-threshold", cfg.tol())


def cmd_invert(cfg: RunConfig, args) -> int:
    if args.series:
        info = read_manifest(args.series)
        cfg.eta = args.eta if args.eta is not None else float(info["eta"])
        if cfg.F is None:
            cfg.F = parse_vector(info["F"])
        snaps = [(t, _read_spectral(p)) for t, p in info["snapshots"]]
        series = EvolutionSeries([t for t, _ in snaps], [s for _, s in snaps], cfg.eta)
        sources = source_from_series(series)
        times = list(series.times)
        path_name = "series"
    elif args.snapshot:
        if args.snapshot_time is None:
            raise ConfigError("--snapshot needs --snapshot-time")
        _require(cfg, "F")
        b = _read_spectral(args.snapshot)
        sources = [source_from_snapshot(b, args.snapshot_time, cfg.eta)]
        times = [args.snapshot_time]
        path_name = "snapshot"
    else:
        raise ConfigError("give --series DIR or --snapshot FILE")

    lat = sources[0].lattice
    if len(cfg.F) != lat.d:
        raise ConfigError(f"F has {len(cfg.F)} components, data has {lat.d}")
    cfg.L = list(lat.L)
    if cfg.resonance_mode == "exact-rational" and cfg.F_exact is None:
        raise ConfigError("exact resonance mode needs --F given as rationals")
    report = _resonance_for(cfg, lat)
    out = _outdir(cfg)

    lines = [
        f"path = {path_name}",
        f"policy = {cfg.policy}",
        f"F = {_fmt_vec(cfg.F)}",
        f"eta = {cfg.eta!r}",
        f"resonance_mode = {report.mode}",
        f"resonance_kmax = {report.kmax}",
        f"resonant_count = {len(report.resonant_modes)}",
        f"min_abs_pairing = {report.min_abs_pairing:.17g}",
    ]
    status = EXIT_OK
    for j, (t, h) in enumerate(zip(times, sources)):
        tag = "" if len(sources) == 1 else f"_{j:04d}"
        try:
            res = reconstruct_velocity(h, cfg.F, report, cfg.policy)
        except UnsolvableModeError as exc:
            lines.append(f"sample{tag} t = {float(t)!r} status = resonant-obstruction")
            lines += [f"obstructed {_fmt_k(k)}" for k in exc.modes]
            lines.append(f"error = {exc}")
            status = EXIT_RESONANT
            break
        _write_spectral(os.path.join(out, f"velocity{tag}.vfld"), res.v)
        lines += [
            f"sample{tag} t = {float(t)!r} status = ok",
            f"residual{tag} = {res.residual:.6e}",
            f"zeroed_modes{tag} = {len(res.resonant_policy_applied.zeroed_modes)}",
            f"dropped_energy{tag} = {res.resonant_policy_applied.dropped_energy:.6e}",
        ]
        if cfg.tau is not None:
            C = args.C
            if C is None:
                C = arithmetic.diophantine_estimate(cfg.F, lat, cfg.tau, _band_of(h)).C_est
            if C > 0:
                _, _, extra = _stability_text(h, res.v, cfg.tau, C)
                lines += [f"{x.split(' = ')[0]}{tag} = {x.split(' = ')[1]}" for x in extra]
            else:
                lines.append(f"stability{tag} = unavailable (C = 0: commensurable in window)")
    fieldio.atomic_write_text(os.path.join(out, "report.txt"), "\n".join(lines) + "\n")
    if status == EXIT_RESONANT:
        print("resonant obstruction: incommensurability violated; see report.txt", file=sys.stderr)
    return status


def cmd_resonance(cfg: RunConfig, args) -> int:
    _require(cfg, "F")
    kmax = cfg.kmax or 8
    if cfg.resonance_mode == "exact-rational":
        report = arithmetic.resonant_set(cfg.F_exact, cfg.L, kmax, "exact-rational")
    else:
        report = arithmetic.resonant_set(cfg.F, cfg.L, kmax, "float-threshold", cfg.tol())
    text = report.to_text()
    if cfg.F_exact is not None:
        ratios = [f / Fraction(l) for f, l in zip(cfg.F_exact, cfg.L)]
        flag, witness = arithmetic.is_incommensurable(ratios)
        text += f"exact_incommensurable = {str(flag).lower()}\n"
        if witness is not None:
            text += f"exact_witness = {_fmt_k(witness)}\n"
    env = arithmetic.diophantine_estimate(cfg.F, cfg.L, cfg.d - 1, kmax).envelope
    out = _outdir(cfg)
    fieldio.atomic_write_text(os.path.join(out, "resonance.txt"), text)
    fieldio.atomic_write_text(
        os.path.join(out, "resonance.csv"),
        _csv_text(["knorm", "min_abs_pairing", "running_min"], [[repr(float(x)) for x in r] for r in env]),
    )
    sys.stdout.write(text)
    if args.expect_incommensurable and report.resonant_modes:
        raise ExpectationMismatch(
            f"incommensurability expected but {len(report.resonant_modes)} resonant modes found"
        )
    return EXIT_OK


def cmd_diophantine(cfg: RunConfig, args) -> int:
    _require(cfg, "F")
    if cfg.tau is None:
        raise ConfigError("diophantine scan needs --tau (exponent of the Diophantine condition)")
    kmax = cfg.kmax or 8
    est = arithmetic.diophantine_estimate(cfg.F, cfg.L, cfg.tau, kmax)
    report = arithmetic.resonant_set(cfg.F, cfg.L, kmax, "float-threshold", cfg.tol())
    text = est.to_text() + f"resonant_count = {len(report.resonant_modes)}\n"
    out = _outdir(cfg)
    fieldio.atomic_write_text(os.path.join(out, "diophantine.txt"), text)
    fieldio.atomic_write_text(
        os.path.join(out, "diophantine.csv"),
        _csv_text(["knorm", "min_abs_pairing", "running_min"], [[repr(float(x)) for x in r] for r in est.envelope]),
    )
    sys.stdout.write(text)
    if args.expect_incommensurable and report.resonant_modes:
        raise ExpectationMismatch("incommensurability expected but resonant modes found")
    return EXIT_OK


def run_roundtrip(cfg: RunConfig, args) -> tuple:
    """Forward + inverse round trip; returns (rows, failures)."""
    _require(cfg, "F", "N", "seed")
    lat = cfg.lattice()
    d = lat.d
    tau = cfg.tau if cfg.tau is not None else float(d - 1)
    v = random_solenoidal(lat, cfg.seed, args.band, args.amplitude)
    vnorm = spectral_norm(v)
    h_true = curl_cross(cfg.F, v)
    report = _resonance_for(cfg, lat)
    C = arithmetic.diophantine_estimate(cfg.F, lat, tau, args.band).C_est

    rows, failures = [], []

    def record(path, dt, recon_v, h):
        err = spectral_norm(recon_v - v) / vnorm if vnorm > 0 else spectral_norm(recon_v)
        lhs = spectral_norm(recon_v)
        rows.append([path, repr(dt), f"{err:.6e}"] + _stability_cells(h, lhs))
        return err, C > 0 and lhs <= stability_rhs(h, tau, C)

    def _stability_cells(h, lhs):
        if not C > 0:
            return [f"{lhs:.6e}", "n/a", f"{C:.6e}", "n/a"]
        rhs = stability_rhs(h, tau, C)
        return [f"{lhs:.6e}", f"{rhs:.6e}", f"{C:.6e}", str(lhs <= rhs).lower()]

    t_snap = args.snapshot_time
    b = duhamel_snapshot(lat, cfg.eta, h_true, t_snap)
    h = source_from_snapshot(b, t_snap, cfg.eta)
    res = reconstruct_velocity(h, cfg.F, report, cfg.policy)
    err, holds = record("snapshot", 0.0, res.v, h)
    if err > 1e-8:
        reason = f"snapshot path error {err:.3e} > 1e-8"
        if report.resonant_modes:
            reason += f"; flagged commensurable ({len(report.resonant_modes)} resonant modes)"
        failures.append(("snapshot", reason))
    if not holds:
        if C > 0:
            failures.append(("snapshot", "stability inequality violated"))
        else:
            failures.append(("snapshot", "stability not assessable: C_window = 0, F commensurable in window"))

    series_errs = []
    for level in range(args.levels):
        dt = args.dt / 2**level
        half = args.count // 2
        times = args.series_center + dt * np.arange(-half, args.count - half)
        series = evolve_series(lat, cfg.eta, cfg.F, v, None, times)
        sources = source_from_series(series)
        sq = []
        for hj in sources:
            rj = reconstruct_velocity(hj, cfg.F, report, "zero-fill")
            sq.append(spectral_norm(rj.v - v) ** 2)
        err = math.sqrt(sum(sq) / len(sq)) / vnorm if vnorm > 0 else 0.0
        mid = sources[len(sources) // 2]
        rmid = reconstruct_velocity(mid, cfg.F, report, "zero-fill")
        rows.append(["series", repr(dt), f"{err:.6e}"] + _stability_cells(mid, spectral_norm(rmid.v)))
        series_errs.append(err)
    for a, b_ in zip(series_errs, series_errs[1:]):
        ratio = a / b_ if b_ > 0 else float("inf")
        rows.append(["series_ratio", "", f"{ratio:.6e}", "", "", "", ""])
    return rows, failures


def cmd_roundtrip(cfg: RunConfig, args) -> int:
    rows, failures = run_roundtrip(cfg, args)
    out = _outdir(cfg)
    header = ["path", "dt", "rel_error", "v_norm", "stability_rhs", "C_window", "stability_holds"]
    fieldio.atomic_write_text(os.path.join(out, "roundtrip.csv"), _csv_text(header, rows))
    sys.stdout.write(_csv_text(header, rows))
    if failures:
        row, reason = failures[0]
        raise AcceptanceFailure(f"round trip failed on row '{row}': {reason}")
    return EXIT_OK


def _parse_params(items) -> dict:
    params = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"profile parameter {item!r} must look like key=value")
        key, val = item.split("=", 1)
        vec = parse_vector(val)
        params[key.strip()] = vec[0] if len(vec) == 1 and "," not in val else np.array(vec)
    return params


def cmd_transport(cfg: RunConfig, args) -> int:
    _require(cfg, "F")
    d = cfg.d
    n = parse_vector(args.normal)
    chart = make_chart(n, cfg.F)
    W = parse_vector(args.W)
    M = parse_ints(args.M)
    if len(W) == 1:
        W = W * (d - 1)
    if len(M) == 1:
        M = M * (d - 1)
    spec = SlabSpec.from_extent(W, M, args.S, args.Ms)
    pts = slab_points(chart, spec)
    profile = make_profile(args.h_profile, d, cfg.F, _parse_params(args.h_param))

    if args.h_file:
        ff = fieldio.read_field(args.h_file)
        if not ff.slab or ff.data.shape != (d,) + spec.shape:
            raise ConfigError(f"{args.h_file} does not match the slab grid {spec.shape}")
        hs = ff.data
    else:
        hs = profile.source(pts)

    exact = None
    if args.trace_file:
        ff = fieldio.read_field(args.trace_file)
        if ff.data.shape != (d,) + spec.M + (1,):
            raise ConfigError(f"{args.trace_file} does not match the surface grid {spec.M}")
        vs = ff.data[..., 0]
    else:
        trace_name = args.trace_profile or args.h_profile
        trace = make_profile(trace_name, d, cfg.F, _parse_params(args.h_param))
        vs = trace.velocity(pts[..., spec.m])
        if trace_name == args.h_profile and not args.h_file:
            exact = profile.velocity(pts) if args.h_profile != "constant" else None

    slab = solve_slab(chart, hs, vs, spec)
    t_res = transport_residual_slab(slab, hs)
    lines = [
        f"normal = {_fmt_vec(chart.n)}",
        f"F = {_fmt_vec(chart.F)}",
        f"W = {_fmt_vec(spec.W)}",
        f"M = {','.join(str(c) for c in spec.M)}",
        f"S = {spec.S!r}",
        f"Ms = {spec.Ms}",
        f"ds = {spec.ds!r}",
        f"h_source = {args.h_file or args.h_profile}",
        f"transport_residual = {t_res:.6e}",
    ]
    if min(spec.M + (spec.Ms,)) >= 5:
        lines.append(f"divergence_residual = {divergence_residual_slab(slab):.6e}")
    if exact is not None:
        lines.append(f"max_error_vs_exact = {float(np.max(np.abs(slab.values - exact))):.6e}")
    out = _outdir(cfg)
    fieldio.write_field(
        os.path.join(out, "slab.vfld"),
        fieldio.FieldFile(
            spec.shape,
            tuple(spec.W) + (spec.S,),
            slab.values,
            slab=True,
            normal=chart.n,
            background=chart.F,
            basis=chart.surface_basis,
        ),
    )
    fieldio.atomic_write_text(os.path.join(out, "transport_report.txt"), "\n".join(lines) + "\n")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def read_slab(path) -> SlabGrid:
    """Load a slab VFLD written by the transport command."""
    ff = fieldio.read_field(path)
    if not ff.slab:
        raise FieldFileError(f"{path} holds a torus field, expected a slab")
    d = ff.d
    chart = HyperplaneChart(n=ff.normal, F=ff.background, surface_basis=ff.basis)
    Ms = ff.counts[-1]
    spec = SlabSpec.from_extent(ff.extents[: d - 1], ff.counts[:-1], ff.extents[-1], Ms)
    return SlabGrid(chart, spec, ff.data)


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="induction-inverse", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, lattice=True):
        sp.add_argument("--F", help="background field, e.g. '1,sqrt(2)' or '1/1,1/1'")
        sp.add_argument("--L", help="periods, default all ones")
        if lattice:
            sp.add_argument("--N", help="grid counts, e.g. '64,64'")
        sp.add_argument("--out", help=f"output directory (default ${OUTPUT_ENV} or ./out)")

    def resonance_opts(sp):
        sp.add_argument("--resonance-mode", choices=["float", "exact"], default="float")
        sp.add_argument("--tol", type=float)
        sp.add_argument("--kmax", type=int)

    sp = sub.add_parser("forward", help="evolve b for a given velocity")
    common(sp)
    sp.add_argument("--eta", type=float, default=1.0)
    sp.add_argument("--times", help="comma-separated output times")
    sp.add_argument("--T", type=float, default=0.5)
    sp.add_argument("--count", type=int, default=5)
    sp.add_argument("--velocity", help="velocity VFLD file")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--band", type=int, default=8)
    sp.add_argument("--amplitude", type=float, default=1.0)
    sp.set_defaults(func=cmd_forward)

    sp = sub.add_parser("invert", help="reconstruct v from magnetic data")
    common(sp, lattice=False)
    resonance_opts(sp)
    sp.add_argument("--eta", type=float)
    sp.add_argument("--series", help="directory written by 'forward'")
    sp.add_argument("--snapshot", help="single snapshot VFLD (zero initial data, constant v)")
    sp.add_argument("--snapshot-time", type=float)
    sp.add_argument("--policy", choices=["strict", "zero-fill"], default="strict")
    sp.add_argument("--tau", type=float)
    sp.add_argument("--C", type=float)
    sp.set_defaults(func=cmd_invert)

    for name, func in (("resonance", cmd_resonance), ("diophantine", cmd_diophantine)):
        sp = sub.add_parser(name, help=f"{name} scan of F against the lattice")
        common(sp, lattice=False)
        resonance_opts(sp)
        if name == "diophantine":
            sp.add_argument("--tau", type=float)
        sp.add_argument("--expect-incommensurable", action="store_true")
        sp.set_defaults(func=func)

    sp = sub.add_parser("roundtrip", help="seeded forward/inverse round trip")
    common(sp)
    resonance_opts(sp)
    sp.add_argument("--eta", type=float, default=1.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--band", type=int, default=8)
    sp.add_argument("--amplitude", type=float, default=1.0)
    sp.add_argument("--snapshot-time", type=float, default=0.5)
    sp.add_argument("--series-center", type=float, default=0.05)
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--count", type=int, default=11)
    sp.add_argument("--levels", type=int, default=2)
    sp.add_argument("--tau", type=float)
    sp.add_argument("--policy", choices=["strict", "zero-fill"], default="strict")
    sp.set_defaults(func=cmd_roundtrip)

    sp = sub.add_parser("transport", help="whole-space transport along characteristics")
    common(sp, lattice=False)
    sp.add_argument("--normal", required=True)
    sp.add_argument("--W", default="1.0")
    sp.add_argument("--M", default="21")
    sp.add_argument("--S", type=float, default=1.0)
    sp.add_argument("--Ms", type=int, default=41)
    sp.add_argument("--h-profile", default="zero", choices=["zero", "constant", "gaussian"])
    sp.add_argument("--h-param", action="append", help="key=value, repeatable")
    sp.add_argument("--h-file")
    sp.add_argument("--trace-profile", choices=["zero", "constant", "gaussian"])
    sp.add_argument("--trace-file")
    sp.set_defaults(func=cmd_transport)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        return args.func(cfg, args)
    except UnsolvableModeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESONANT
    except ExpectationMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EXPECTATION
    except AcceptanceFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ACCEPTANCE
    except (FieldFileError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InductionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
