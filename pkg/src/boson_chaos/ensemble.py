"""Disorder-ensemble orchestration: seeded phases, parallel realizations,
deterministic aggregation, and the experiment runners behind the CLI.

Reproducibility contract: identical RunConfig (including master seed)
produces byte-identical output files, independent of the worker count.
Phases come from counter-based streams keyed by (master seed, realization
index), so adding realizations never perturbs earlier ones; per-realization
payloads are gathered in index order and reduced with fixed-shape numpy
operations.
"""

import logging
import multiprocessing
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from functools import lru_cache
from pathlib import Path

import numpy as np
import psutil

from . import __version__
from .classify import StateProfiles, pr_quantile_states, select_extremes
from .dynamics import (
    DEFAULT_BIN_WIDTH,
    AnalyticInputs,
    GaussianLdosFit,
    HoleReport,
    LdosHistogram,
    PowerLawFit,
    TimeGrid,
    analytic_sp,
    asymptote_with_degeneracies,
    average_ldos,
    detect_hole,
    energy_bins,
    eta_from_samples,
    fit_gaussian,
    fit_power_law,
    mean_dos_in_window,
    rolling_average,
    survival_probability,
)
from .fock import BasisTable, build_basis, check_state, DEFAULT_DIM_CAP
from .hamiltonian import ModelParams, assemble, spectral_bounds
from .output import SCHEMA_VERSION, state_label, write_csv, write_json
from .spectral import (
    diagonalize,
    dos_histogram,
    pooled_mean_ratio,
    ratio_vs_energy,
    spacing_ratios,
    trim_levels,
)

log = logging.getLogger("boson_chaos")

DEFAULT_REALIZATIONS = 40
DEFAULT_SEED = 20240617
ETA_STABLE_RANGE = (0.3, 1.8)


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    """Everything an experiment needs; serialized verbatim into outputs."""

    n_particles: int
    n_sites: int
    w_values: tuple = ()
    realizations: int = DEFAULT_REALIZATIONS
    master_seed: int = DEFAULT_SEED
    j: float | None = None
    u: float | None = None
    beta: float | None = None
    delta_e: float = DEFAULT_BIN_WIDTH
    t_min: float = 0.1
    t_max: float = 1e6
    points_per_decade: int = 100
    rolling_window: int = 25
    trim: float = 0.10
    dos_bins: int = 50
    ratio_window: int | None = None
    nu_window_sigmas: float = 1.0
    workers: int | None = None
    max_dim: int = DEFAULT_DIM_CAP

    def __post_init__(self):
        if self.realizations < 1:
            raise ValueError("need at least one realization")
        object.__setattr__(self, "w_values", tuple(float(w) for w in self.w_values))

    @property
    def w_single(self) -> float:
        if len(self.w_values) != 1:
            raise ValueError(f"expected exactly one disorder value, got {self.w_values}")
        return self.w_values[0]

    def params(self, phi: float, w: float | None = None) -> ModelParams:
        return ModelParams.for_system(
            self.n_particles, self.n_sites,
            w=self.w_single if w is None else w,
            phi=phi, j=self.j, u=self.u, beta=self.beta,
        )

    def time_grid(self) -> TimeGrid:
        return TimeGrid(self.t_min, self.t_max, self.points_per_decade)

    def to_dict(self) -> dict:
        # the worker count is execution telemetry, not physics: it must not
        # enter snapshots, or runs with different pool sizes could never be
        # byte-identical
        return {f.name: getattr(self, f.name) for f in fields(self)
                if f.name != "workers"}

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = dict(data)
        data.pop("workers", None)
        data["w_values"] = tuple(data.get("w_values", ()))
        return cls(**data)


@dataclass
class EnsembleResult:
    """In-memory result of one experiment.

    The creation timestamp stays in memory only; serialized payloads must
    be reproducible byte-for-byte, so they carry the config and code
    version instead.
    """

    config: RunConfig
    phis: np.ndarray
    seed_keys: list
    outputs: dict
    version: str = __version__
    created_at: float = field(default_factory=time.time)


def sample_phases(master_seed: int, count: int) -> np.ndarray:
    """Uniform phases on [0, 2*pi) from counter-based streams keyed by
    (master_seed, realization index)."""
    if count < 1:
        raise ValueError("need at least one phase")
    phis = np.empty(count)
    for i in range(count):
        gen = np.random.Generator(np.random.Philox(key=np.array([master_seed, i], dtype=np.uint64)))
        phis[i] = gen.uniform(0.0, 2.0 * np.pi)
    return phis


def seed_keys(master_seed: int, count: int) -> list:
    return [(int(master_seed), i) for i in range(count)]


# ---------------------------------------------------------------------------
# realization workers
# ---------------------------------------------------------------------------

@lru_cache(maxsize=4)
def _cached_basis(n_particles: int, n_sites: int, max_dim: int) -> BasisTable:
    return build_basis(n_particles, n_sites, max_dim)


def _realization_task(task: dict) -> dict:
    """Compute one disorder realization; run in a worker process.

    Modes: "evals" (spectrum only), "survival" (spectrum + per-state
    eigenbasis weights + SP curves), "classify" (diagonal + per-state IPR),
    "eta_pr" (spectrum + per-state IPR + per-state LDoS masses on fixed
    bins).
    """
    cfg = RunConfig.from_dict(task["config"])
    index = task["index"]
    phi = task["phi"]
    table = _cached_basis(cfg.n_particles, cfg.n_sites, cfg.max_dim)
    params = cfg.params(phi, w=task.get("w"))
    ham = assemble(params, table)
    mode = task["mode"]
    try:
        decomp = diagonalize(ham, compute_vectors=(mode != "evals"))
    except RuntimeError as err:
        raise RuntimeError(
            f"realization {index} failed (phi={phi!r}, "
            f"seed key=({cfg.master_seed},{index})): {err}"
        ) from err

    out = {"index": index, "evals": decomp.eigenvalues}
    if mode == "evals":
        return out

    vecs = decomp.eigenvectors
    if mode == "survival":
        times = TimeGrid(cfg.t_min, cfg.t_max, cfg.points_per_decade).points
        weights, curves = [], []
        for rank in task["state_ranks"]:
            w = vecs[rank, :] ** 2
            weights.append(w)
            if task.get("compute_sp", True):
                curves.append(survival_probability(w, decomp.eigenvalues, times))
        out["weights"] = np.stack(weights)
        if curves:
            out["sp"] = np.stack(curves)
        return out

    squared = vecs * vecs
    row_defect = np.abs(squared.sum(axis=1) - 1.0).max()
    if row_defect > 1e-10:
        raise RuntimeError(
            f"realization {index}: eigenvector rows deviate from unit norm by {row_defect:.3e}"
        )
    ipr_vec = np.einsum("ij,ij->i", squared, squared)
    if mode == "classify":
        out["diag"] = ham.diag
        out["ipr"] = ipr_vec
        return out
    if mode == "eta_pr":
        # levels are ascending, so bins are contiguous column segments
        edges = np.asarray(task["bin_edges"])
        idx = np.searchsorted(decomp.eigenvalues, edges)
        cs = np.concatenate([np.zeros((table.dim, 1)), np.cumsum(squared, axis=1)], axis=1)
        out["ipr"] = ipr_vec
        out["masses"] = cs[:, idx[1:]] - cs[:, idx[:-1]]
        out["counts"] = (idx[1:] - idx[:-1]).astype(float)
        return out
    raise ValueError(f"unknown realization mode {mode!r}")


def resolve_workers(config: RunConfig, dim: int, with_vectors: bool) -> int:
    """Worker count: explicit setting, or cores capped by realization count
    and by a dense-solve memory estimate."""
    if config.workers is not None:
        return max(int(config.workers), 1)
    per_solve = (5 if with_vectors else 3) * dim * dim * 8
    mem_cap = max(int(psutil.virtual_memory().available // max(per_solve, 1)), 1)
    return max(min(os.cpu_count() or 1, config.realizations, mem_cap), 1)


def _run_tasks(tasks: list, workers: int) -> list:
    """Execute realization tasks, returning payloads in task order."""
    if workers <= 1:
        results = []
        for t in tasks:
            results.append(_realization_task(t))
            log.debug("realization %d/%d done", t["index"] + 1, len(tasks))
        return results
    ctx = multiprocessing.get_context("spawn")
    with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
        return list(pool.map(_realization_task, tasks))


def _ensemble_payloads(config: RunConfig, mode: str, w: float | None = None,
                       **extra) -> tuple[np.ndarray, list]:
    phis = sample_phases(config.master_seed, config.realizations)
    tasks = [
        {"config": config.to_dict(), "index": i, "phi": float(phis[i]),
         "mode": mode, "w": w, **extra}
        for i in range(config.realizations)
    ]
    dim = _cached_basis(config.n_particles, config.n_sites, config.max_dim).dim
    workers = resolve_workers(config, dim, with_vectors=(mode != "evals"))
    log.info("running %d realizations (mode=%s, dim=%d, workers=%d)",
             config.realizations, mode, dim, workers)
    payloads = _run_tasks(tasks, workers)
    return phis, payloads


# ---------------------------------------------------------------------------
# per-state survival analysis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StateAnalysis:
    """Everything derived for one initial state from one ensemble."""

    state: tuple
    times: np.ndarray
    sp_raw: np.ndarray      # (realizations, times) per-realization curves
    sp_mean: np.ndarray
    sp_rolled: np.ndarray
    sp_analytic: np.ndarray
    ldos_exact: tuple[np.ndarray, np.ndarray]  # pooled (E, mass/realizations)
    ldos_smooth: LdosHistogram
    ldos_fit: GaussianLdosFit
    ipr: float
    pr: float
    eta: float
    nu_bar: float
    hole: HoleReport | None
    power_law: PowerLawFit | None
    degenerate_pairs: int
    asymptote_corrected: float
    notes: list


def analyze_state(config: RunConfig, state: tuple, evals_sets: list,
                  weight_sets: list, sp_curves: np.ndarray) -> StateAnalysis:
    """Reduce per-realization spectra/weights/SP curves for one state to the
    averaged survival curve, LDoS, analytic overlay, and diagnostics."""
    times = config.time_grid().points
    notes = []

    sp_mean = np.mean(sp_curves, axis=0)
    sp_rolled = rolling_average(sp_mean, config.rolling_window)

    ipr_each = [float(np.sum(w * w)) for w in weight_sets]
    pr_each = [1.0 / v for v in ipr_each]
    ipr = float(np.mean(ipr_each))
    pr = float(np.mean(pr_each))

    corrected, degenerate = 0.0, 0
    for e, w in zip(evals_sets, weight_sets):
        value, pairs = asymptote_with_degeneracies(w, e)
        corrected += value
        degenerate += pairs
    corrected /= len(evals_sets)
    if degenerate:
        notes.append(f"{degenerate} exactly degenerate level pairs; "
                     "corrected asymptote reported alongside the IPR")

    pooled_e = np.concatenate(evals_sets)
    pooled_m = np.concatenate(weight_sets) / len(weight_sets)
    order = np.argsort(pooled_e, kind="stable")
    ldos_exact = (pooled_e[order], pooled_m[order])

    ldos_smooth = average_ldos(evals_sets, weight_sets, config.delta_e)
    ldos_fit = fit_gaussian(ldos_smooth)
    if ldos_fit.method != "least-squares":
        notes.append("Gaussian fit fell back to moment matching")

    eta = eta_from_samples(evals_sets, weight_sets, config.delta_e)
    nu_bar = mean_dos_in_window(evals_sets, ldos_fit.center,
                                config.nu_window_sigmas * ldos_fit.sigma)

    inputs = AnalyticInputs(ipr=ipr, eta=eta, nu_bar=nu_bar, ldos_fit=ldos_fit)
    sp_ana = analytic_sp(inputs, times)
    if not config.time_grid().covers_heisenberg(inputs.heisenberg_time):
        notes.append(
            f"grid ends at {config.t_max:g} < 10x Heisenberg time "
            f"{inputs.heisenberg_time:g}; late-time diagnostics may be unreliable"
        )

    try:
        # skip the post-decay oscillation transient, which undershoots the floor
        hole = detect_hole(times, sp_rolled, ipr, eta,
                           search_start=inputs.heisenberg_time / 50.0,
                           sustain_points=max(int(round(0.75 * config.points_per_decade)), 1))
    except ValueError as err:
        hole = None
        notes.append(f"hole detection skipped: {err}")

    # power-law window: after the Gaussian decay, until the rolled curve
    # durably reaches the asymptote scale (low-PR states) or the hole entry
    power_law = None
    t_lo = 3.0 / ldos_fit.sigma
    ended = np.nonzero((times >= t_lo) & (sp_rolled <= 1.25 * ipr))[0]
    t_hi = float(times[ended[0]]) if ended.size else float(times[-1])
    try:
        power_law = fit_power_law(times, sp_rolled, (t_lo, t_hi))
    except ValueError as err:
        notes.append(f"power-law fit skipped: {err}")

    return StateAnalysis(
        state=tuple(state), times=times, sp_raw=np.asarray(sp_curves),
        sp_mean=sp_mean, sp_rolled=sp_rolled, sp_analytic=sp_ana,
        ldos_exact=ldos_exact, ldos_smooth=ldos_smooth,
        ldos_fit=ldos_fit, ipr=ipr, pr=pr, eta=eta, nu_bar=nu_bar, hole=hole,
        power_law=power_law, degenerate_pairs=degenerate,
        asymptote_corrected=corrected, notes=notes,
    )


def survival_ensemble(config: RunConfig, states: list) -> tuple[EnsembleResult, list[StateAnalysis]]:
    """Full survival pipeline for explicit initial states (in memory)."""
    if not states:
        raise ValueError("no initial states given")
    table = _cached_basis(config.n_particles, config.n_sites, config.max_dim)
    ranks = [table.rank(check_state(s, config.n_particles, config.n_sites)) for s in states]
    phis, payloads = _ensemble_payloads(config, "survival", state_ranks=ranks)
    evals_sets = [p["evals"] for p in payloads]
    analyses = []
    for si, state in enumerate(states):
        weight_sets = [p["weights"][si] for p in payloads]
        sp_curves = np.stack([p["sp"][si] for p in payloads])
        analyses.append(analyze_state(config, tuple(int(n) for n in state),
                                      evals_sets, weight_sets, sp_curves))
    result = EnsembleResult(config=config, phis=phis,
                            seed_keys=seed_keys(config.master_seed, config.realizations),
                            outputs={"analyses": analyses})
    return result, analyses


def classify_ensemble(config: RunConfig) -> StateProfiles:
    """Profile all basis states (crowding, mean energy, PR) over the ensemble."""
    table = _cached_basis(config.n_particles, config.n_sites, config.max_dim)
    _, payloads = _ensemble_payloads(config, "classify")
    states = table.states.astype(float)
    crowding = np.sum(states * states, axis=1) / table.n_particles
    energy = np.mean(np.stack([p["diag"] for p in payloads]), axis=0) / table.n_particles
    ipr_stack = np.stack([p["ipr"] for p in payloads])
    return StateProfiles(
        table=table, crowding=crowding, energy_per_particle=energy,
        pr=np.mean(1.0 / ipr_stack, axis=0), ipr=np.mean(ipr_stack, axis=0),
        realizations=config.realizations,
    )


# ---------------------------------------------------------------------------
# serialization helpers
# ---------------------------------------------------------------------------

def _config_preamble(config: RunConfig, command: str) -> str:
    import json

    snapshot = {"schema_version": SCHEMA_VERSION, "version": __version__,
                "command": command, "config": config.to_dict()}
    return "# config " + json.dumps(snapshot, sort_keys=True, separators=(",", ":"))


def _write_config(out_dir: Path, config: RunConfig, command: str, extras: dict | None = None) -> None:
    payload = {"schema_version": SCHEMA_VERSION, "version": __version__,
               "command": command, "config": config.to_dict()}
    if extras:
        payload.update(extras)
    write_json(out_dir / "config.json", payload)


def load_config(path) -> tuple[RunConfig, dict]:
    """Reload a config snapshot written by any runner."""
    from .output import read_json

    payload = read_json(path)
    return RunConfig.from_dict(payload["config"]), payload


def _hole_dict(hole: HoleReport | None):
    if hole is None:
        return None
    return {"present": hole.present, "depth": hole.depth, "t_min": hole.t_min,
            "t_end": hole.t_end, "ipr": hole.ipr, "eta": hole.eta,
            "threshold": hole.threshold, "asymptote_band": hole.asymptote_band}


def _power_law_dict(fit: PowerLawFit | None):
    if fit is None:
        return None
    return {"exponent": fit.exponent, "prefactor": fit.prefactor,
            "rms_residual": fit.rms_residual, "n_points": fit.n_points,
            "used_peaks": fit.used_peaks, "good": fit.good}


def write_state_analysis(out_dir: Path, config: RunConfig, analysis: StateAnalysis,
                         command: str) -> None:
    label = state_label(analysis.state)
    preamble = _config_preamble(config, command)
    write_csv(
        out_dir / f"survival_{label}.csv",
        ["t", "sp_mean", "sp_rolled", "sp_analytic"],
        zip(analysis.times, analysis.sp_mean, analysis.sp_rolled, analysis.sp_analytic),
        preamble=preamble,
    )
    exact_rows = [("exact", e, m) for e, m in zip(*analysis.ldos_exact)]
    smooth_rows = [("smooth", c, m) for c, m in
                   zip(analysis.ldos_smooth.centers, analysis.ldos_smooth.masses)]
    write_csv(out_dir / f"ldos_{label}.csv", ["kind", "e", "mass"],
              exact_rows + smooth_rows, preamble=preamble)
    write_json(out_dir / f"analysis_{label}.json", {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "command": command,
        "config": config.to_dict(),
        "state": list(analysis.state),
        "ipr": analysis.ipr,
        "pr": analysis.pr,
        "eta": analysis.eta,
        "nu_bar": analysis.nu_bar,
        "heisenberg_time": 2 * np.pi * analysis.nu_bar,
        "gaussian_fit": {"center": analysis.ldos_fit.center,
                         "sigma": analysis.ldos_fit.sigma,
                         "rss": analysis.ldos_fit.rss,
                         "method": analysis.ldos_fit.method},
        "hole": _hole_dict(analysis.hole),
        "power_law": _power_law_dict(analysis.power_law),
        "degenerate_pairs": analysis.degenerate_pairs,
        "asymptote_corrected": analysis.asymptote_corrected,
        "delta_e": config.delta_e,
        "rolling_window": config.rolling_window,
        "master_seed": config.master_seed,
        "notes": analysis.notes,
    })


# ---------------------------------------------------------------------------
# experiment runners
# ---------------------------------------------------------------------------

def run_ratio_sweep(config: RunConfig, out_dir) -> EnsembleResult:
    """Trimmed mean spacing ratio versus disorder strength."""
    if not config.w_values:
        raise ValueError("ratio sweep needs at least one disorder value")
    for w in config.w_values:
        if w <= 0:
            raise ValueError(
                "W = 0 is excluded: without disorder the model splits into "
                "invariant subspaces whose spectra must be analyzed separately"
            )
    out_dir = Path(out_dir)
    rows = []
    phis = None
    for w in config.w_values:
        phis, payloads = _ensemble_payloads(config, "evals", w=w)
        evals_sets = [p["evals"] for p in payloads]
        mean, stderr, count = pooled_mean_ratio(evals_sets, config.trim)
        degenerate = sum(spacing_ratios(trim_levels(e, config.trim)).degenerate_pairs
                         for e in evals_sets)
        rows.append((w, mean, stderr, count, degenerate))
        log.info("W=%g: mean ratio %.4f +- %.4f", w, mean, stderr)
    _write_config(out_dir, config, "ratio-sweep")
    write_csv(out_dir / "ratios_vs_W.csv",
              ["w", "mean_ratio", "stderr", "n_ratios", "degenerate_pairs"],
              rows, preamble=_config_preamble(config, "ratio-sweep"))
    return EnsembleResult(config=config, phis=phis,
                          seed_keys=seed_keys(config.master_seed, config.realizations),
                          outputs={"rows": rows})


def run_ratio_energy(config: RunConfig, out_dir) -> EnsembleResult:
    """Energy-resolved mean ratio plus the density-of-states histogram."""
    w = config.w_single
    if w <= 0:
        raise ValueError("W = 0 is excluded (invariant subspaces); use W > 0")
    out_dir = Path(out_dir)
    phis, payloads = _ensemble_payloads(config, "evals", w=w)
    evals_sets = [p["evals"] for p in payloads]
    dim = evals_sets[0].size
    window = config.ratio_window or max(dim // 12, 2)
    profile = ratio_vs_energy(evals_sets, window, config.n_particles)
    centers, density = dos_histogram(evals_sets, config.n_particles, config.dos_bins)
    _write_config(out_dir, config, "ratio-energy", {"window_levels": window})
    preamble = _config_preamble(config, "ratio-energy")
    write_csv(out_dir / "ratio_vs_energy.csv",
              ["energy_per_particle", "mean_ratio", "n_ratios"],
              profile, preamble=preamble)
    write_csv(out_dir / "dos.csv", ["energy_per_particle", "density"],
              zip(centers, density), preamble=preamble)
    return EnsembleResult(config=config, phis=phis,
                          seed_keys=seed_keys(config.master_seed, config.realizations),
                          outputs={"profile": profile, "dos": (centers, density)})


def run_classify(config: RunConfig, out_dir) -> StateProfiles:
    """Write profiles.csv: one row per basis state."""
    out_dir = Path(out_dir)
    profiles = classify_ensemble(config)
    dim = profiles.dim
    rows = [
        (state_label(profiles.table.state(k)), profiles.crowding[k],
         profiles.energy_per_particle[k], profiles.pr[k], profiles.pr[k] / dim,
         profiles.ipr[k])
        for k in range(dim)
    ]
    _write_config(out_dir, config, "classify")
    write_csv(out_dir / "profiles.csv",
              ["state", "crowding", "energy_per_particle", "pr", "pr_over_dim", "ipr"],
              rows, preamble=_config_preamble(config, "classify"))
    return profiles


def resolve_states(config: RunConfig, states: list | None,
                   c_range: tuple[float, float] | None, k: int | None) -> list[tuple]:
    """Explicit occupation states, or extreme-PR selection within a crowding
    window (which requires a classification pass over the same ensemble)."""
    if states:
        return [check_state(s, config.n_particles, config.n_sites) for s in states]
    if c_range is None:
        raise ValueError("give explicit states or a crowding range for selection")
    profiles = classify_ensemble(config)
    top, bottom = select_extremes(profiles, c_range[0], c_range[1], k or 1)
    ranks = top + bottom
    return [profiles.table.state(r) for r in ranks]


def run_survival(config: RunConfig, out_dir, states: list | None = None,
                 c_range: tuple[float, float] | None = None,
                 k: int | None = None) -> list[StateAnalysis]:
    """Survival-probability pipeline; emits per-state CSV/JSON files."""
    if config.w_single <= 0:
        raise ValueError("survival runs need W > 0")
    out_dir = Path(out_dir)
    chosen = resolve_states(config, states, c_range, k)
    _, analyses = survival_ensemble(config, chosen)
    _write_config(out_dir, config, "survival",
                  {"states": [list(s) for s in chosen]})
    for analysis in analyses:
        write_state_analysis(out_dir, config, analysis, "survival")
    return analyses


def run_pr_sweep(config: RunConfig, out_dir, c_value: float, k: int = 6) -> list[StateAnalysis]:
    """Survival curves across a PR-ordered family of fixed-crowding states."""
    out_dir = Path(out_dir)
    profiles = classify_ensemble(config)
    ranks = pr_quantile_states(profiles, c_value, k)
    states = [profiles.table.state(r) for r in ranks]
    _, analyses = survival_ensemble(config, states)
    depths = [a.hole.depth if a.hole is not None else float("nan") for a in analyses]
    finite = [d for d in depths if np.isfinite(d)]
    monotone = bool(all(b >= a - 0.1 * abs(a) for a, b in zip(finite, finite[1:])))
    _write_config(out_dir, config, "pr-sweep",
                  {"c_value": c_value, "states": [list(s) for s in states]})
    rows = []
    for rank, analysis in zip(ranks, analyses):
        write_state_analysis(out_dir, config, analysis, "pr-sweep")
        rows.append((state_label(analysis.state), profiles.pr[rank], analysis.ipr,
                     analysis.hole.depth if analysis.hole else float("nan"),
                     analysis.hole.present if analysis.hole else False))
    write_csv(out_dir / "pr_sweep_summary.csv",
              ["state", "pr", "ipr", "hole_depth", "hole_present"],
              rows, preamble=_config_preamble(config, "pr-sweep"))
    write_json(out_dir / "pr_sweep.json", {
        "schema_version": SCHEMA_VERSION, "version": __version__,
        "command": "pr-sweep", "config": config.to_dict(),
        "c_value": c_value, "states": [list(s) for s in states],
        "pr": [float(profiles.pr[r]) for r in ranks],
        "hole_depths": depths, "hole_depth_monotone": monotone,
    })
    return analyses


def eta_scan_values(de_min: float = 0.2, de_max: float = 1.8, de_step: float = 0.05) -> np.ndarray:
    n = int(round((de_max - de_min) / de_step))
    return de_min + de_step * np.arange(n + 1)


def run_eta_scan(config: RunConfig, out_dir, state, de_values=None) -> dict:
    """eta versus the Riemann-sum bin width, with the stable-range summary."""
    out_dir = Path(out_dir)
    occ = check_state(state, config.n_particles, config.n_sites)
    table = _cached_basis(config.n_particles, config.n_sites, config.max_dim)
    rank = table.rank(occ)
    de_values = eta_scan_values() if de_values is None else np.asarray(de_values, float)
    if np.any(de_values <= 0):
        raise ValueError("bin widths must be positive")
    _, payloads = _ensemble_payloads(config, "survival", state_ranks=[rank],
                                     compute_sp=False)
    evals_sets = [p["evals"] for p in payloads]
    weight_sets = [p["weights"][0] for p in payloads]
    etas = np.array([eta_from_samples(evals_sets, weight_sets, de) for de in de_values])
    stable = (de_values >= ETA_STABLE_RANGE[0]) & (de_values <= ETA_STABLE_RANGE[1])
    if not stable.any():
        stable = np.ones_like(stable)
    mean = float(etas[stable].mean())
    spread = float(etas[stable].std(ddof=1)) if stable.sum() > 1 else 0.0
    summary = {
        "schema_version": SCHEMA_VERSION, "version": __version__,
        "command": "eta-scan", "config": config.to_dict(),
        "state": list(occ), "eta_mean": mean, "eta_std": spread,
        "stable_range": list(ETA_STABLE_RANGE),
        "relative_dispersion": spread / mean if mean else float("nan"),
    }
    _write_config(out_dir, config, "eta-scan", {"state": list(occ)})
    write_csv(out_dir / "eta_scan.csv", ["delta_e", "eta"],
              zip(de_values, etas), preamble=_config_preamble(config, "eta-scan"))
    write_json(out_dir / "eta_scan.json", summary)
    summary["table"] = (de_values, etas)
    return summary


def run_eta_vs_pr(config: RunConfig, out_dir) -> np.ndarray:
    """(PR, eta, C) for every basis state; eta on a-priori fixed bins."""
    out_dir = Path(out_dir)
    table = _cached_basis(config.n_particles, config.n_sites, config.max_dim)
    lo, hi = spectral_bounds(config.params(0.0), table)
    edges = energy_bins(lo, hi, config.delta_e)
    _, payloads = _ensemble_payloads(config, "eta_pr", bin_edges=edges)
    n_real = len(payloads)
    mass = np.sum(np.stack([p["masses"] for p in payloads]), axis=0)
    count = np.sum(np.stack([p["counts"] for p in payloads]), axis=0)
    ipr_stack = np.stack([p["ipr"] for p in payloads])
    pr = np.mean(1.0 / ipr_stack, axis=0)

    rho = mass / (n_real * config.delta_e)          # (dim, bins)
    nu = count / (n_real * config.delta_e)          # (bins,)
    occupied = nu > 0
    integral = config.delta_e * np.sum(
        rho[:, occupied] ** 2 / nu[occupied], axis=1)
    eta = 1.0 / integral

    states = table.states.astype(float)
    crowding = np.sum(states * states, axis=1) / table.n_particles
    rows = [(state_label(table.state(kk)), pr[kk], eta[kk], crowding[kk])
            for kk in range(table.dim)]
    _write_config(out_dir, config, "eta-pr")
    write_csv(out_dir / "eta_vs_pr.csv", ["state", "pr", "eta", "crowding"],
              rows, preamble=_config_preamble(config, "eta-pr"))
    return np.column_stack([pr, eta, crowding])
