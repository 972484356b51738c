"""Batch command-line front end.

`csquant run --config cfg.json [--out DIR] [--seed N]` executes one named
experiment deterministically and writes a JSON table of checks (value,
tolerance, pass) plus CSV sweeps; `csquant list` dumps the registry.

Exit codes: 0 all checks pass, 1 some check failed, 2 unknown experiment,
3 config validation error (printed with the offending field).  Reruns with
the same config and seed reproduce the output files byte for byte: every
check is seeded, outputs carry no timestamps, and files are written via
temp-file + rename.  TOOL_THREADS caps the numba thread pool.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import __version__, classical, coherent, correlators, projector, spin, wiener
from .fock import make_space
from .coherent import coherent_vector

DEFAULT_SEED = 20260810


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"config field '{field}': {message}")
        self.field = field


def _get(cfg: dict, field: str, default, kind, low=None, high=None):
    value = cfg.get(field, default)
    try:
        value = kind(value)
    except (TypeError, ValueError):
        raise ConfigError(field, f"expected {kind.__name__}") from None
    if low is not None and value < low:
        raise ConfigError(field, f"must be >= {low}")
    if high is not None and value > high:
        raise ConfigError(field, f"must be <= {high}")
    return value


@dataclass(frozen=True)
class CheckRow:
    name: str
    value: float  # residual-style: passing means value <= tolerance
    tolerance: float
    observed: float | None = None  # the measured quantity itself, when useful

    @property
    def passed(self) -> bool:
        return self.value <= self.tolerance


# ---------------------------------------------------------------------------
# experiments


def _exp_resolution(cfg, seed):
    nmax = _get(cfg, "nmax", 40, int, 1)
    radius = _get(cfg, "radius", 8.0, float, 0.5)
    space = make_space(1, nmax)
    report = coherent.resolution_of_unity_check(space, radius)
    rows = [
        CheckRow("identity_block_residual", report.max_residual_block, 1e-6),
        CheckRow("offdiagonal_max", report.max_offdiag, 1e-8),
    ]
    sweep = [
        (n, float(np.real(report.matrix[n, n])), float(report.diag_expected[n]))
        for n in range(nmax + 1)
    ]
    return rows, {"diagonal": (["n", "diag", "expected"], sweep)}


def _exp_project_single(cfg, seed):
    nmax = _get(cfg, "nmax", 40, int, 1)
    mprime = _get(cfg, "mprime", 3, int, 0, nmax)
    eps = _get(cfg, "epsilon", 0.1, float, 1e-6, 0.499)
    alpha = complex(_get(cfg, "alpha_re", 1.0, float), _get(cfg, "alpha_im", 0.0, float))
    space = make_space(1, nmax)
    spec = projector.ProjectorSpec(projector.single_constraint(space, float(mprime)), epsilon=eps)
    state = projector.project(spec, coherent_vector(space, alpha))
    expected = np.zeros(space.dim, dtype=np.complex128)
    expected[mprime] = (
        math.exp(-0.5 * abs(alpha) ** 2) * alpha**mprime / math.sqrt(math.factorial(mprime))
    )
    resid = float(np.max(np.abs(state.vec.amps - expected))) if state.vec is not None else math.inf
    norm_err = abs(state.norm_in_full_space - abs(expected[mprime]))
    null_norms = []
    for frac in (0.3, 0.5, 1.5):
        frac_spec = projector.ProjectorSpec(
            projector.single_constraint(space, frac), epsilon=eps
        )
        null_norms.append(projector.project(frac_spec, coherent_vector(space, alpha)).norm_in_full_space)
    rows = [
        CheckRow("projected_component_residual", resid, 1e-12),
        CheckRow("physical_norm_error", norm_err, 1e-12, observed=state.norm_in_full_space),
        CheckRow("null_norm_fractional_targets", max(null_norms), 1e-12),
    ]
    return rows, {}


def _exp_project_double(cfg, seed):
    nmax = _get(cfg, "nmax", 16, int, 1)
    mprime = _get(cfg, "mprime", 4, int, 1, nmax)
    eps = _get(cfg, "epsilon", 0.1, float, 1e-6, 0.499)
    alpha = complex(_get(cfg, "alpha_re", 0.6, float), _get(cfg, "alpha_im", 0.3, float))
    beta = complex(_get(cfg, "beta_re", 0.9, float), _get(cfg, "beta_im", -0.2, float))
    space = make_space(2, nmax)
    spec = projector.ProjectorSpec(projector.double_constraint(space, float(mprime)), epsilon=eps)
    state = projector.normalize_physical(
        projector.project(spec, coherent_vector(space, [alpha, beta]))
    )
    sector = spin.basis_map(space, mprime)
    mapped = sector.restrict_vector(state.vec.amps)
    reference = spin.su2_coherent(sector.j, alpha / beta).amps
    phase = state.gauge_phase
    resid = float(np.max(np.abs(mapped - phase * reference)))
    rows = [CheckRow("su2_state_match_residual", resid, 1e-10)]
    return rows, {}


def _exp_spin_overlap(cfg, seed):
    nmax = _get(cfg, "nmax", 12, int, 2)
    mprime = _get(cfg, "mprime", 6, int, 1, nmax)
    n_pairs = _get(cfg, "n_pairs", 10, int, 1)
    space = make_space(2, nmax)
    spec = projector.ProjectorSpec(projector.double_constraint(space, float(mprime)))
    rng = wiener.rng_stream(seed, 1)
    j = mprime / 2.0
    worst = 0.0
    for _ in range(n_pairs):
        re = rng.uniform(0.3, 1.2, size=4)
        ph = rng.uniform(0.0, 2.0 * math.pi, size=4)
        a1, b1, a2, b2 = (r * np.exp(1j * p) for r, p in zip(re, ph))
        labels_bra = tuple(
            coherent.CoherentLabel.from_alpha(z) for z in (a1, b1)
        )
        labels_ket = tuple(
            coherent.CoherentLabel.from_alpha(z) for z in (a2, b2)
        )
        prop = projector.projected_propagator(spec, labels_bra, labels_ket)
        norm_bra = projector.project(spec, coherent_vector(space, [a1, b1])).norm_in_full_space
        norm_ket = projector.project(spec, coherent_vector(space, [a2, b2])).norm_in_full_space
        normalized = prop.value / (norm_bra * norm_ket)
        g_bra = (b1 / abs(b1)) ** mprime
        g_ket = (b2 / abs(b2)) ** mprime
        gaugefree = normalized * g_bra * np.conj(g_ket)
        worst = max(worst, abs(gaugefree - spin.su2_overlap(j, a1 / b1, a2 / b2)))
    resolution = spin.su2_resolution_check(j)
    rows = [
        CheckRow("projected_vs_su2_overlap", worst, 1e-10),
        CheckRow("su2_resolution_residual", resolution, 1e-8),
    ]
    return rows, {}


def _exp_correlations(cfg, seed):
    nmax = _get(cfg, "nmax", 40, int, 4)
    mprime = _get(cfg, "mprime", 6, int, 0, nmax - 8)
    offsets = (0.0, 0.35, 0.8)
    h_err = 0.0
    bracket_err = 0.0
    sweep = []
    for off in offsets:
        a_eval = math.sqrt(max(mprime, 1)) * np.exp(1j * off)
        a_ket = math.sqrt(max(mprime, 1))
        for op in ("H", "Q", "P"):
            rep = correlators.correlation("single", op, a_ket, a_eval, mprime, nmax)
            if op == "H":
                h_err = max(h_err, abs(rep.ratio_to_overlap - (mprime + 0.5)))
            else:
                bracket_err = max(bracket_err, abs(rep.ratio_to_overlap - rep.oracle))
            sweep.append((off, op, float(np.real(rep.ratio_to_overlap)), float(np.imag(rep.ratio_to_overlap))))
    rows = [
        CheckRow("h_ratio_error", h_err, 1e-10),
        CheckRow("qp_bracket_vs_matrix", bracket_err, 1e-10),
    ]
    return rows, {"ratios": (["offset", "operator", "ratio_re", "ratio_im"], sweep)}


def _exp_classical_limit(cfg, seed):
    model = cfg.get("model", "single")
    if model not in ("single", "double"):
        raise ConfigError("model", "must be 'single' or 'double'")
    m_values = cfg.get("m_values", [4, 16, 64])
    if not isinstance(m_values, list) or not all(isinstance(m, int) and m > 0 for m in m_values):
        raise ConfigError("m_values", "must be a list of positive integers")
    rows_data = correlators.classical_limit_check(model, tuple(m_values))
    devs = [r.dev_abs for r in rows_data]
    monotone_gap = max(b - a for a, b in zip(devs[1:], devs[:-1])) if len(devs) > 1 else 0.0
    exponent = correlators.deviation_scaling_exponent(rows_data)
    rows = [
        CheckRow("deviation_monotone_decrease", max(0.0, -monotone_gap), 0.0),
        CheckRow("scaling_exponent_offset_from_-0.5", abs(exponent + 0.5), 0.2),
        CheckRow("h_ratio_error", max(r.h_ratio_error for r in rows_data), 1e-10),
    ]
    sweep = [(r.m, r.dev_abs, r.dev_rel) for r in rows_data]
    return rows, {"deviation": (["m", "dev_abs", "dev_rel"], sweep)}


def _exp_geometry(cfg, seed):
    n = _get(cfg, "n", 1, int, 1)
    quant = classical.area_quantization(n)
    s2 = quant.s_squared
    r1 = 0.5 * math.sqrt(s2)
    curv_err = abs(classical.scalar_curvature_fd(s2, r1) - 2.0 / s2)
    pull_err = 0.0
    for frac in np.linspace(0.05, 0.9, 10):
        r = frac * math.sqrt(s2)
        g_rr, g_thth = classical.reduced_metric_eval(s2, r)
        g_num = classical.embedding_pullback_metric(s2, r, 0.7)
        pull_err = max(
            pull_err,
            abs(g_num[0, 0] - g_rr),
            abs(g_num[1, 1] - g_thth),
            abs(g_num[0, 1]),
        )
    rows = [
        CheckRow("curvature_residual", curv_err, 1e-4),
        CheckRow("pullback_metric_residual", pull_err, 1e-8),
        CheckRow("symplectic_area_vs_pi_s2", abs(quant.symplectic_area - math.pi * s2), 1e-4),
        CheckRow("energy_quantization_residual", abs(quant.energy - n), 1e-12),
    ]
    return rows, {}


def _exp_wiener(cfg, seed):
    nmax = _get(cfg, "nmax", 12, int, 2)
    mprime = _get(cfg, "mprime", 1, int, 0, nmax)
    eps = _get(cfg, "epsilon", 0.45, float, 1e-3, 0.499)
    n_paths = _get(cfg, "n_paths", 100_000, int, 100)
    semi = wiener.semigroup_residual(0.7, 0.0, 0.4, 1.0, [0.1, -0.2], [0.5, 0.3])
    bridge = wiener.sample_pinned_paths(1.0, [0.0], [0.0], 1.0, 16, n_paths, seed, stream=3)
    mid = bridge[:, 8, 0]
    var_expected = 1.0 * 0.5 * 0.5  # nu t (T - t) / T at the midpoint
    var_err = abs(float(np.var(mid)) - var_expected)
    var_band = 3.0 * var_expected * math.sqrt(2.0 / (n_paths - 1))
    space = make_space(1, nmax)
    spec = projector.ProjectorSpec(
        projector.single_constraint(space, float(mprime)), epsilon=eps
    )
    label = coherent.CoherentLabel.from_alpha(1.0)
    est = wiener.lambda_average_propagator(
        spec, label, label, n_paths=n_paths, seed=seed, stream=4
    )
    est_wide = wiener.lambda_average_propagator(
        spec, label, label, n_paths=n_paths, window=4000.0, seed=seed, stream=5
    )
    nu_errors = []
    for k, nu in enumerate((0.5, 2.0)):
        e = wiener.lambda_average_propagator(
            spec, label, label, n_paths=n_paths, nu=nu, seed=seed, stream=6 + k
        )
        nu_errors.append(e.mc_error - 3.0 * e.mc_se)
    rows = [
        CheckRow("semigroup_residual", semi, 1e-8),
        CheckRow("bridge_midpoint_variance_error", var_err, var_band),
        CheckRow("quadrature_vs_spectral", est.quadrature_error, 1e-4),
        CheckRow("mc_vs_spectral_minus_3se", est.mc_error - 3.0 * est.mc_se, 0.0),
        CheckRow("mc_window_doubled_minus_3se", est_wide.mc_error - 3.0 * est_wide.mc_se, 0.0),
        CheckRow("mc_nu_sweep_minus_3se", max(nu_errors), 0.0),
    ]
    return rows, {}


@dataclass(frozen=True)
class Experiment:
    runner: object
    topic: str
    description: str


EXPERIMENTS = {
    "resolution": Experiment(
        _exp_resolution,
        "overlap kernel / closure",
        "coherent-state resolution-of-unity quadrature on the truncated Fock space",
    ),
    "project-single": Experiment(
        _exp_project_single,
        "single-oscillator projection",
        "spectral projection of a coherent state onto one number level, null off-integer",
    ),
    "project-double": Experiment(
        _exp_project_double,
        "two-oscillator projection",
        "projected two-mode coherent state against the mapped SU(2) coherent state",
    ),
    "spin-overlap": Experiment(
        _exp_spin_overlap,
        "SU(2) reduced dynamics",
        "projected propagator vs the SU(2) overlap kernel plus spin closure quadrature",
    ),
    "correlations": Experiment(
        _exp_correlations,
        "correlation functions",
        "matrix-element correlation ratios against the ladder-operator brackets",
    ),
    "classical-limit": Experiment(
        _exp_classical_limit,
        "classical limit",
        "correlation ratios vs the classical trajectory over an m sweep",
    ),
    "geometry": Experiment(
        _exp_geometry,
        "reduced-phase-space geometry",
        "induced metric, curvature, areas, and the quantized constraint radius",
    ),
    "wiener": Experiment(
        _exp_wiener,
        "Wiener-measure machinery",
        "heat-kernel semigroup, bridge sampling, and lapse-averaged propagator estimators",
    ),
}


def list_experiments() -> str:
    lines = [f"{len(EXPERIMENTS)} experiments:"]
    for name, exp in EXPERIMENTS.items():
        lines.append(f"  {name:16s} [{exp.topic}] {exp.description}")
    return "\n".join(lines)


def _atomic_write(path: str, data: bytes):
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-csquant-")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_outputs(out_dir: str, experiment: str, rows, sweeps, cfg_bytes: bytes, seed: int):
    os.makedirs(out_dir, exist_ok=True)
    table = {
        "experiment": experiment,
        "checks": [
            {
                "name": r.name,
                "value": float(r.value),
                "tolerance": float(r.tolerance),
                "passed": bool(r.passed),
                **({"observed": float(r.observed)} if r.observed is not None else {}),
            }
            for r in rows
        ],
        "provenance": {
            "config_sha256": hashlib.sha256(cfg_bytes).hexdigest(),
            "seed": seed,
            "version": __version__,
        },
    }
    payload = json.dumps(table, sort_keys=True, indent=2).encode() + b"\n"
    _atomic_write(os.path.join(out_dir, f"{experiment}.json"), payload)
    for sweep_name, (header, data) in sweeps.items():
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in data:
            writer.writerow(
                [f"{v:.17g}" if isinstance(v, float) else v for v in row]
            )
        _atomic_write(
            os.path.join(out_dir, f"{experiment}_{sweep_name}.csv"),
            buf.getvalue().encode("utf-8"),
        )


def run_experiment(config_path: str, out_dir: str | None, seed_override: int | None) -> int:
    try:
        with open(config_path, "rb") as handle:
            cfg_bytes = handle.read()
        cfg = json.loads(cfg_bytes)
        if not isinstance(cfg, dict):
            raise ConfigError("<root>", "config must be a JSON object")
        name = cfg.get("experiment")
        if not isinstance(name, str):
            raise ConfigError("experiment", "required string")
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    if name not in EXPERIMENTS:
        print(f"unknown experiment {name!r}", file=sys.stderr)
        print(list_experiments(), file=sys.stderr)
        return 2
    seed = seed_override if seed_override is not None else cfg.get("seed", DEFAULT_SEED)
    if not isinstance(seed, int) or seed < 0:
        print("config error: config field 'seed': must be a non-negative integer", file=sys.stderr)
        return 3
    out = out_dir if out_dir is not None else cfg.get("out", "results")
    try:
        rows, sweeps = EXPERIMENTS[name].runner(cfg, seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    _write_outputs(out, name, rows, sweeps, cfg_bytes, seed)
    for r in rows:
        status = "pass" if r.passed else "FAIL"
        print(f"[{status}] {name}:{r.name} value={r.value:.6g} tol={r.tolerance:.6g}")
    return 0 if all(r.passed for r in rows) else 1


def main(argv=None) -> int:
    threads = os.environ.get("TOOL_THREADS")
    if threads:
        try:
            import numba

            numba.set_num_threads(max(1, int(threads)))
        except (ImportError, ValueError):
            pass
    parser = argparse.ArgumentParser(prog="csquant", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run one experiment from a JSON config")
    run_p.add_argument("--config", required=True)
    run_p.add_argument("--out", default=None)
    run_p.add_argument("--seed", type=int, default=None)
    sub.add_parser("list", help="list the experiment registry")
    args = parser.parse_args(argv)
    if args.command == "list":
        print(list_experiments())
        return 0
    return run_experiment(args.config, args.out, args.seed)


if __name__ == "__main__":
    sys.exit(main())
