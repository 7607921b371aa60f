"""Parameter sweeps over runtime, control strength, and pulse length.

Each sweep propagates the configured gate over a grid, averages the
quality factor over noise realizations, and returns an ordered table of
rows plus per-realization records.  Seeding is positional: realization k
of grid point j derives its generator from SeedSequence([master_seed, j,
k]), so results are independent of execution order and thread count, and
a (config, master_seed) pair reproduces output files byte for byte.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from ._version import __version__
from .control import (RNG_DESCRIPTION, ControlKind, KickSchedule, PulseTrain,
                      generate_segments, make_kicks, mean_control, net_area,
                      resonance_condition)
from .hamiltonians import GateKind, GateSpec, Schedule, dark_states
from .holonomy import berry_closed_form, evaluate_holonomy, wrap_angle
from .propagation import StepPolicy, propagate_lab

DEFAULT_RESONANCE_TOL = 1e-6

SWEEP_VARIABLES = ("T", "mean_control", "dt")


@dataclass(frozen=True)
class ExperimentConfig:
    gate: GateSpec
    control: PulseTrain
    sweep_variable: str
    grid: tuple
    realizations: int = 1
    master_seed: int = 0
    policy: StepPolicy = StepPolicy()

    def __post_init__(self):
        if self.sweep_variable not in SWEEP_VARIABLES:
            raise ValueError(f"sweep_variable must be one of {SWEEP_VARIABLES}, "
                             f"got {self.sweep_variable!r}")
        if not self.grid:
            raise ValueError("grid must be nonempty")
        if any(a >= b for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("grid must be strictly ascending")
        if self.realizations < 1:
            raise ValueError(f"realizations must be >= 1, got {self.realizations}")


@dataclass(frozen=True)
class SweepRow:
    x: float
    f_mean: float
    f_min: float
    f_max: float
    gamma_measured_mean: float
    gamma_ideal: float
    overlap_mean: float
    resonant: bool | None
    nearest_n: int | None
    seed_base: int


@dataclass(frozen=True)
class RealizationRecord:
    grid_index: int
    realization_index: int
    x: float
    seed: int
    gamma_measured: float
    overlap_abs: float
    f: float
    steps: int
    mean_control_measured: float | None = None


@dataclass(frozen=True)
class SweepResult:
    rows: tuple
    records: tuple
    total_steps: int


@dataclass(frozen=True)
class KickEquivalenceReport:
    kick_count: int
    max_unitary_diff: float
    net_area_positive: float
    net_area_alternating: float
    f_positive: float
    f_alternating: float
    steps: int


def realization_seed(master_seed: int, grid_index: int, realization_index: int) -> int:
    """64-bit seed for realization (j, k); stable across platforms."""
    ss = np.random.SeedSequence([master_seed, grid_index, realization_index])
    return int(ss.generate_state(1, np.uint64)[0])


def _run_jobs(jobs, worker, n_threads: int):
    if n_threads <= 1:
        return [worker(job) for job in jobs]
    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        return list(pool.map(worker, jobs))


def _assemble_rows(cfg: ExperimentConfig, records, annotate=None):
    """Collapse per-realization records into one row per grid point."""
    rows = []
    for j, x in enumerate(cfg.grid):
        here = [r for r in records if r.grid_index == j]
        fs = [r.f for r in here]
        gamma_ideal = berry_closed_form(cfg.gate.schedule.a)
        # average phases relative to the ideal one so wrap-around cannot skew
        rel = [wrap_angle(r.gamma_measured - gamma_ideal) for r in here]
        gamma_mean = wrap_angle(gamma_ideal + sum(rel) / len(rel))
        resonant, nearest = annotate(x) if annotate else (None, None)
        rows.append(SweepRow(
            x=x,
            f_mean=sum(fs) / len(fs),
            f_min=min(fs),
            f_max=max(fs),
            gamma_measured_mean=gamma_mean,
            gamma_ideal=gamma_ideal,
            overlap_mean=sum(r.overlap_abs for r in here) / len(here),
            resonant=resonant,
            nearest_n=nearest,
            seed_base=realization_seed(cfg.master_seed, j, 0),
        ))
    return tuple(rows)


def _propagate_record(cfg, spec, train, j, k, x):
    seed = realization_seed(cfg.master_seed, j, k)
    segments = generate_segments(replace(train, seed=seed), spec.schedule.T)
    result = propagate_lab(spec, segments, policy=cfg.policy)
    dark = dark_states(spec, 0.0)[-1]
    hol = evaluate_holonomy(result.U, dark, berry_closed_form(spec.schedule.a))
    measured = None
    if train.kind is not ControlKind.NO_CONTROL:
        measured = mean_control(segments)
    return RealizationRecord(grid_index=j, realization_index=k, x=x, seed=seed,
                             gamma_measured=hol.gamma_measured,
                             overlap_abs=hol.overlap_abs, f=hol.f,
                             steps=result.steps_taken,
                             mean_control_measured=measured)


def sweep_runtime(cfg: ExperimentConfig, n_threads: int = 1) -> SweepResult:
    """Quality factor versus runtime T, no control."""
    if cfg.control.kind is not ControlKind.NO_CONTROL:
        raise ValueError("runtime sweep requires a no_control train")
    if cfg.sweep_variable != "T":
        raise ValueError("runtime sweep expects sweep_variable 'T'")

    def worker(jk):
        j, k = jk
        T = cfg.grid[j]
        spec = replace(cfg.gate, schedule=Schedule(cfg.gate.schedule.a, T))
        return _propagate_record(cfg, spec, cfg.control, j, k, T)

    jobs = [(j, k) for j in range(len(cfg.grid)) for k in range(cfg.realizations)]
    records = tuple(_run_jobs(jobs, worker, n_threads))
    return SweepResult(_assemble_rows(cfg, records), records,
                       sum(r.steps for r in records))


def sweep_mean_control(cfg: ExperimentConfig, n_threads: int = 1) -> SweepResult:
    """Quality factor versus average positive-square control strength.

    The grid holds target mean values; at duty 50% the pulse amplitude is
    J = 2 * target (the per-segment random factor averages to 1), and the
    realized time average is recorded per realization.
    """
    if cfg.control.kind is not ControlKind.POSITIVE_SQUARE:
        raise ValueError("mean-control sweep requires a positive_square train")
    if cfg.sweep_variable != "mean_control":
        raise ValueError("mean-control sweep expects sweep_variable 'mean_control'")
    T = cfg.gate.schedule.T
    ratio = T / cfg.control.dt
    if abs(ratio - round(ratio)) > 1e-9 * ratio:
        raise ValueError(f"dt {cfg.control.dt} does not divide T {T}")

    def worker(jk):
        j, k = jk
        target = cfg.grid[j]
        train = replace(cfg.control, J=2.0 * target)
        return _propagate_record(cfg, cfg.gate, train, j, k, target)

    jobs = [(j, k) for j in range(len(cfg.grid)) for k in range(cfg.realizations)]
    records = tuple(_run_jobs(jobs, worker, n_threads))
    return SweepResult(_assemble_rows(cfg, records), records,
                       sum(r.steps for r in records))


def sweep_dt_zero_energy(cfg: ExperimentConfig, n_threads: int = 1,
                         resonance_tol: float = DEFAULT_RESONANCE_TOL) -> SweepResult:
    """Quality factor versus half-period dt of the zero-energy alternating train.

    Rows are annotated with whether J*dt sits on a 2*pi*n resonance.
    """
    if cfg.control.kind is not ControlKind.ZERO_ENERGY_ALTERNATING:
        raise ValueError("dt sweep requires a zero_energy_alternating train")
    if cfg.sweep_variable != "dt":
        raise ValueError("dt sweep expects sweep_variable 'dt'")

    def worker(jk):
        j, k = jk
        dt = cfg.grid[j]
        train = replace(cfg.control, dt=dt)
        return _propagate_record(cfg, cfg.gate, train, j, k, dt)

    jobs = [(j, k) for j in range(len(cfg.grid)) for k in range(cfg.realizations)]
    records = tuple(_run_jobs(jobs, worker, n_threads))
    annotate = lambda dt: resonance_condition(cfg.control.J, dt, resonance_tol)
    return SweepResult(_assemble_rows(cfg, records, annotate), records,
                       sum(r.steps for r in records))


def compare_positive_vs_zero_energy(cfg: ExperimentConfig) -> KickEquivalenceReport:
    """Propagate identical kick times with all-positive vs alternating signs.

    The two final unitaries agree exactly (each exp(-i*pi*H) equals
    exp(+i*pi*H) on an integer spectrum) while the net control areas are
    m*pi versus 0 or pi -- control at zero net energy cost.
    """
    if cfg.control.kind not in (ControlKind.DELTA_KICK_POSITIVE,
                                ControlKind.DELTA_KICK_ALTERNATING):
        raise ValueError("kick comparison requires a delta-kick train")
    T = cfg.gate.schedule.T
    jitter = cfg.control.p / 2.0
    positive = make_kicks(ControlKind.DELTA_KICK_POSITIVE, T, cfg.control.dt,
                          seed=cfg.master_seed, jitter=jitter)
    alternating = KickSchedule(positive.times,
                               tuple((-1) ** i for i in range(len(positive.times))),
                               positive.area)
    segments = generate_segments(PulseTrain(ControlKind.NO_CONTROL), T)
    res_pos = propagate_lab(cfg.gate, segments, kicks=positive, policy=cfg.policy)
    res_alt = propagate_lab(cfg.gate, segments, kicks=alternating, policy=cfg.policy)
    dark = dark_states(cfg.gate, 0.0)[-1]
    gamma_ideal = berry_closed_form(cfg.gate.schedule.a)
    return KickEquivalenceReport(
        kick_count=len(positive.times),
        max_unitary_diff=float(np.max(np.abs(res_pos.U - res_alt.U))),
        net_area_positive=net_area(segments, positive),
        net_area_alternating=net_area(segments, alternating),
        f_positive=evaluate_holonomy(res_pos.U, dark, gamma_ideal).f,
        f_alternating=evaluate_holonomy(res_alt.U, dark, gamma_ideal).f,
        steps=res_pos.steps_taken + res_alt.steps_taken,
    )


CSV_HEADER = ("x,f_mean,f_min,f_max,gamma_measured_mean,gamma_ideal,"
              "overlap_mean,resonant,nearest_n,seed_base")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return f"{value:.12g}"


def write_csv(rows, path) -> None:
    """Deterministic CSV: grid order, 12 significant digits, LF endings."""
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join(_fmt(v) for v in (
            r.x, r.f_mean, r.f_min, r.f_max, r.gamma_measured_mean,
            r.gamma_ideal, r.overlap_mean, r.resonant, r.nearest_n, r.seed_base)))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def config_to_dict(cfg: ExperimentConfig) -> dict:
    gate = {"kind": cfg.gate.kind.value, "a": cfg.gate.schedule.a,
            "T": cfg.gate.schedule.T}
    if cfg.gate.kind is GateKind.PHYSICAL_FOUR:
        gate["j12"] = cfg.gate.j12
        gate["j13"] = cfg.gate.j13
    return {
        "gate": gate,
        "control": {"kind": cfg.control.kind.value, "J": cfg.control.J,
                    "dt": cfg.control.dt, "p": cfg.control.p,
                    "seed": cfg.control.seed},
        "sweep_variable": cfg.sweep_variable,
        "grid": list(cfg.grid),
        "realizations": cfg.realizations,
        "master_seed": cfg.master_seed,
        "policy": {"substeps_per_segment": cfg.policy.substeps_per_segment,
                   "max_step": cfg.policy.max_step},
    }


def _take(mapping: dict, allowed: dict, where: str) -> dict:
    unknown = set(mapping) - set(allowed)
    if unknown:
        raise ValueError(f"unknown {where} keys: {sorted(unknown)}")
    out = dict(allowed)
    out.update(mapping)
    missing = [k for k, v in out.items() if v is _REQUIRED]
    if missing:
        raise ValueError(f"missing required {where} keys: {missing}")
    return out


_REQUIRED = object()


def config_from_dict(data: dict) -> ExperimentConfig:
    """Strict parser for the declarative config format; unknown keys error."""
    top = _take(data, {"gate": _REQUIRED, "control": _REQUIRED,
                       "sweep_variable": _REQUIRED, "grid": _REQUIRED,
                       "realizations": 1, "master_seed": 0, "policy": {}},
                "config")
    g = _take(top["gate"], {"kind": _REQUIRED, "a": _REQUIRED, "T": _REQUIRED,
                            "j12": 0.0, "j13": 0.0}, "gate")
    gate = GateSpec(kind=GateKind(g["kind"]),
                    schedule=Schedule(float(g["a"]), float(g["T"])),
                    j12=float(g["j12"]), j13=float(g["j13"]))
    c = _take(top["control"], {"kind": _REQUIRED, "J": 0.0, "dt": 0.0,
                               "p": 0.0, "seed": 0}, "control")
    control = PulseTrain(kind=ControlKind(c["kind"]), J=float(c["J"]),
                         dt=float(c["dt"]), p=float(c["p"]), seed=int(c["seed"]))
    p = _take(top["policy"], {"substeps_per_segment": 20, "max_step": None}, "policy")
    policy = StepPolicy(substeps_per_segment=int(p["substeps_per_segment"]),
                        max_step=None if p["max_step"] is None else float(p["max_step"]))
    return ExperimentConfig(gate=gate, control=control,
                            sweep_variable=str(top["sweep_variable"]),
                            grid=tuple(float(x) for x in top["grid"]),
                            realizations=int(top["realizations"]),
                            master_seed=int(top["master_seed"]),
                            policy=policy)


def write_json_bundle(result: SweepResult, cfg: ExperimentConfig, path) -> None:
    """Machine-readable mirror of the sweep: rows, realizations, config echo."""
    bundle = {
        "revision": __version__,
        "rng": RNG_DESCRIPTION,
        "config": config_to_dict(cfg),
        "rows": [{
            "x": r.x, "f_mean": r.f_mean, "f_min": r.f_min, "f_max": r.f_max,
            "gamma_measured_mean": r.gamma_measured_mean,
            "gamma_ideal": r.gamma_ideal, "overlap_mean": r.overlap_mean,
            "resonant": r.resonant, "nearest_n": r.nearest_n,
            "seed_base": r.seed_base,
        } for r in result.rows],
        "realizations": [{
            "grid_index": r.grid_index, "realization_index": r.realization_index,
            "x": r.x, "seed": r.seed, "gamma_measured": r.gamma_measured,
            "overlap_abs": r.overlap_abs, "f": r.f, "steps": r.steps,
            "mean_control_measured": r.mean_control_measured,
        } for r in result.records],
        "total_steps": result.total_steps,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(bundle, fh, indent=2, sort_keys=True)
        fh.write("\n")
