"""Experiment harness: configs, error-decay sweeps, stability trials, verification.

A sweep fixes a signal and a filter, then for a growing number of subspaces
N measures the reconstruction error of the quantized stream under the
canonical and the order-matched (Sobolev) left inverses, next to the
memoryless baseline. Results stream to CSV row by row, with a gnuplot
script overlaying the reference decay curves (2/N and 100/N^2 at order 2,
10^4/N^3 at order 3).
"""

import csv
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import filters as _filters
from .alphabets import frame_alphabets, simplex_alphabet
from .block_ops import cofactor_norm
from .duals import canonical_left_inverse, l_dr_norm, reconstruct, sobolev_left_inverse
from .errors import BadData, BadParameter
from .frames import BlockVector, FusionFrame, example_frame_r3, random_frame
from .sigma_delta import ffsd_run, memoryless_run

CSV_HEADER = ["N", "err_canonical", "err_sobolev", "err_memoryless",
              "max_state_norm", "apriori_bound", "l_dr_norm"]


@dataclass
class ExperimentConfig:
    """Parameters of one error-decay sweep.

    sigma and alpha accept the string "auto": alpha resolves to
    min(alpha1, alpha2) - 1e-3 rounded to 3 decimals for the frame's
    largest subspace dimension, and sigma to the smallest integer with
    cosh(pi / sqrt(sigma)) <= alpha.
    """

    order: int
    delta: float
    signal: tuple
    n_grid: tuple
    sigma: object = "auto"
    alpha: object = "auto"
    frame_kind: str = "r3_family"
    frame_path: str = None
    frame_seed: int = 0
    frame_dims: tuple = ()
    frame_ambient_dim: int = None
    out_csv: str = None
    plot_script: str = None
    allow_large_signal: bool = False
    trial_seed: int = 0

    def to_dict(self):
        frame = {"kind": self.frame_kind}
        if self.frame_kind == "file":
            frame["path"] = self.frame_path
        if self.frame_kind == "random":
            frame["seed"] = self.frame_seed
            frame["dims"] = list(self.frame_dims)
            frame["ambient_dim"] = self.frame_ambient_dim
        return {
            "order": self.order,
            "sigma": self.sigma,
            "delta": self.delta,
            "alpha": self.alpha,
            "signal": list(self.signal),
            "frame": frame,
            "n_grid": list(self.n_grid),
            "out_csv": self.out_csv,
            "plot_script": self.plot_script,
            "allow_large_signal": self.allow_large_signal,
            "trial_seed": self.trial_seed,
        }

    @classmethod
    def from_dict(cls, data):
        try:
            frame = data.get("frame", {"kind": "r3_family"})
            kind = frame.get("kind", "r3_family")
            cfg = cls(
                order=int(data["order"]),
                delta=float(data["delta"]),
                signal=tuple(float(v) for v in data["signal"]),
                n_grid=tuple(int(n) for n in data["n_grid"]),
                sigma=data.get("sigma", "auto"),
                alpha=data.get("alpha", "auto"),
                frame_kind=kind,
                frame_path=frame.get("path"),
                frame_seed=int(frame.get("seed", 0)),
                frame_dims=tuple(int(m) for m in frame.get("dims", ())),
                frame_ambient_dim=(int(frame["ambient_dim"])
                                   if frame.get("ambient_dim") is not None else None),
                out_csv=data.get("out_csv"),
                plot_script=data.get("plot_script"),
                allow_large_signal=bool(data.get("allow_large_signal", False)),
                trial_seed=int(data.get("trial_seed", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise BadData(f"malformed experiment config: {exc}") from exc
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise BadData(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def validate(self):
        if self.order < 1:
            raise BadParameter("order must be at least 1")
        if not self.n_grid:
            raise BadParameter("n_grid must be nonempty")
        if self.frame_kind not in ("r3_family", "file", "random"):
            raise BadParameter(f"unknown frame kind {self.frame_kind!r}")
        if self.frame_kind == "file" and not self.frame_path:
            raise BadParameter("frame kind 'file' needs a path")
        if self.frame_kind == "random" and (not self.frame_dims
                                            or self.frame_ambient_dim is None):
            raise BadParameter("frame kind 'random' needs dims and ambient_dim")
        d = self.ambient_dim()
        if len(self.signal) != d:
            raise BadParameter(f"signal must have dimension {d}")
        if any(n < max(d, 3 if self.frame_kind == "r3_family" else 1)
               for n in self.n_grid):
            raise BadParameter("every N in n_grid must be at least the ambient dimension")
        if self.sigma != "auto" and int(self.sigma) < 1:
            raise BadParameter("sigma must be 'auto' or a positive integer")
        if self.alpha != "auto" and not float(self.alpha) > 1.0:
            raise BadParameter("alpha must be 'auto' or a scalar above 1")
        signal_norm = float(np.linalg.norm(self.signal))
        if signal_norm > self.delta:
            if not self.allow_large_signal:
                raise BadParameter(
                    f"signal norm {signal_norm:.4g} exceeds delta {self.delta}; "
                    "set allow_large_signal to run anyway (no stability guarantee)")
            warnings.warn(f"signal norm {signal_norm:.4g} exceeds delta {self.delta}; "
                          "the state-norm bound does not apply", UserWarning)

    def ambient_dim(self):
        if self.frame_kind == "r3_family":
            return 3
        if self.frame_kind == "random":
            return self.frame_ambient_dim
        return self._file_frame().ambient_dim

    def _file_frame(self):
        if not hasattr(self, "_loaded_frame"):
            self._loaded_frame = FusionFrame.load_json(self.frame_path)
        return self._loaded_frame

    def build_frame(self, n_blocks):
        if self.frame_kind == "r3_family":
            return example_frame_r3(n_blocks)
        if self.frame_kind == "random":
            dims = [self.frame_dims[i % len(self.frame_dims)] for i in range(n_blocks)]
            return random_frame(self.frame_ambient_dim, dims, self.frame_seed)
        full = self._file_frame()
        if n_blocks > len(full):
            raise BadParameter(f"file frame has only {len(full)} subspaces, need {n_blocks}")
        return full.prefix(n_blocks)

    def max_subspace_dim(self):
        if self.frame_kind == "r3_family":
            return 2
        if self.frame_kind == "random":
            return max(self.frame_dims)
        return self._file_frame().max_dim

    def resolve(self):
        """Fix 'auto' parameters and return (filter, stability_params)."""
        d_star = self.max_subspace_dim()
        base = _filters.stability_params(d_star, self.delta)
        if self.alpha == "auto":
            alpha = round(min(base.alpha1, base.alpha2) - 1e-3, 3)
        else:
            alpha = float(self.alpha)
        stability = _filters.stability_params(d_star, self.delta, alpha)
        sigma = _filters.min_sigma_for_alpha(alpha) if self.sigma == "auto" else int(self.sigma)
        f = _filters.build_filter(self.order, sigma)
        report = _filters.feasibility_report(f, alpha)
        if not report["passed"]:
            warnings.warn(
                f"filter l1 norm {report['h_l1']:.6g} is not below alpha {alpha}; "
                "the state-norm bound is not certified", UserWarning)
        return f, stability


# Default grids start below the tap supports (N < 51, then 51 <= N < 201) so the
# runs exercise every tap-activation regime before the fully rth-order tail.
def example1_config(**overrides):
    """Second-order sweep on the R^3 plane family (the first reference experiment)."""
    base = dict(order=2, delta=0.1, sigma=50, alpha=1.101,
                signal=(1 / 25, math.pi / 57, 1 / (2 * math.sqrt(57))),
                n_grid=(30, 60, 120, 210, 300, 420, 600, 840, 1200, 1700, 2001))
    base.update(overrides)
    return ExperimentConfig(**base)


def example2_config(**overrides):
    """Third-order sweep on the R^3 plane family (the second reference experiment)."""
    base = dict(order=3, delta=0.1, sigma=50, alpha=1.101,
                signal=(1 / 25, math.pi / 57, 1 / (2 * math.sqrt(57))),
                n_grid=(40, 120, 300, 450, 700, 1000, 1500, 2200, 3000))
    base.update(overrides)
    return ExperimentConfig(**base)


@dataclass
class ResultRow:
    n: int
    err_canonical: float
    err_sobolev: float
    err_memoryless: float
    max_state_norm: float
    apriori_bound: float
    l_dr_norm: float

    def as_list(self):
        return [self.n, self.err_canonical, self.err_sobolev, self.err_memoryless,
                self.max_state_norm, self.apriori_bound, self.l_dr_norm]


def decode_indices(alphabets, indices):
    """Turn a stream of alphabet indices back into ambient blocks."""
    blocks = np.empty((len(indices), alphabets[0].subspace.ambient_dim))
    for t, k in enumerate(indices):
        elements = alphabets[t].elements
        k = int(k)
        if not 0 <= k < len(elements):
            raise BadData(f"index {k} out of range for alphabet {t}")
        blocks[t] = elements[k]
    return BlockVector(blocks)


def write_index_stream(path, indices):
    """One unsigned integer per line; the entire serialized quantized stream."""
    with open(path, "w") as fh:
        fh.write("\n".join(str(int(k)) for k in indices))
        fh.write("\n")


def _single_row(cfg, f, stability, n_blocks):
    frame = cfg.build_frame(n_blocks)
    alphabets = frame_alphabets(frame)
    x = np.asarray(cfg.signal, dtype=float)
    y = frame.analysis(x)

    run = ffsd_run(frame, f, y, alphabets=alphabets, stability=stability)
    q = decode_indices(alphabets, run.q_indices)  # exercise the serialized-index path

    canonical = canonical_left_inverse(frame)
    sobolev = sobolev_left_inverse(frame, f.order)
    err_canonical = float(np.linalg.norm(x - reconstruct(canonical, q)))
    err_sobolev = float(np.linalg.norm(x - reconstruct(sobolev, q)))

    base = memoryless_run(frame, y, alphabets=alphabets)
    err_memoryless = float(np.linalg.norm(x - reconstruct(canonical, base.q)))

    ldr = l_dr_norm(frame, sobolev, f.order)
    bound = cofactor_norm(frame, f) * stability.c_bound * math.sqrt(n_blocks) * ldr
    return ResultRow(n=n_blocks, err_canonical=err_canonical, err_sobolev=err_sobolev,
                     err_memoryless=err_memoryless, max_state_norm=run.max_state_norm,
                     apriori_bound=bound, l_dr_norm=ldr)


def run_experiment(cfg, csv_path=None, progress=None):
    """Run the sweep over cfg.n_grid, streaming rows to CSV as they finish.

    Returns the list of rows. csv_path overrides cfg.out_csv; rows written
    so far stay on disk if a later N fails.
    """
    f, stability = cfg.resolve()
    csv_path = csv_path or cfg.out_csv
    rows = []
    writer = fh = None
    if csv_path:
        fh = open(csv_path, "w", newline="")
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        fh.flush()
    try:
        for n_blocks in sorted(cfg.n_grid):
            row = _single_row(cfg, f, stability, n_blocks)
            rows.append(row)
            if writer is not None:
                writer.writerow([row.n] + [f"{v:.17e}" for v in row.as_list()[1:]])
                fh.flush()
            if progress is not None:
                progress(row)
    finally:
        if fh is not None:
            fh.close()
    if csv_path and cfg.plot_script:
        write_plot_script(cfg.plot_script, csv_path, cfg.order)
    return rows


def write_plot_script(path, csv_path, order):
    """Emit a gnuplot script for the sweep with the order's reference curves."""
    if order == 3:
        refs = "2.0/x title '2/N' dashtype 2, 1e4/x**3 title '10^4/N^3' dashtype 3"
    else:
        refs = "2.0/x title '2/N' dashtype 2, 100.0/x**2 title '100/N^2' dashtype 3"
    lines = [
        "set logscale xy",
        "set xlabel 'N'",
        "set ylabel 'reconstruction error'",
        "set datafile separator ','",
        "set key bottom left",
        f"plot '{csv_path}' using 1:2 with linespoints title 'canonical', \\",
        f"     '{csv_path}' using 1:3 with linespoints title 'sobolev', \\",
        f"     '{csv_path}' using 1:4 with linespoints title 'memoryless', \\",
        f"     {refs}",
        "pause -1",
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_result_csv(path):
    """Rows of a sweep CSV as dicts with numeric values."""
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise BadData("CSV file is empty")
        for rec in reader:
            try:
                out.append({k: (int(v) if k == "N" else float(v))
                            for k, v in rec.items()})
            except (TypeError, ValueError) as exc:
                raise BadData(f"non-numeric CSV entry: {exc}") from exc
    return out


def _column(row, name):
    if isinstance(row, dict):
        if name not in row:
            raise BadData(f"no column named {name!r}")
        return row[name]
    attr = "n" if name == "N" else name
    if not hasattr(row, attr):
        raise BadData(f"no column named {name!r}")
    return getattr(row, attr)


def fit_slope(rows, column, min_n=None):
    """Least-squares slope of log10(column) against log10(N).

    min_n drops rows below a threshold before fitting (useful when the
    early grid points sit in a lower effective-order regime).
    """
    pts = [(_column(r, "N"), _column(r, column)) for r in rows]
    if min_n is not None:
        pts = [(n, e) for n, e in pts if n >= min_n]
    if len(pts) < 3:
        raise BadData("need at least 3 rows to fit a slope")
    ns = np.array([p[0] for p in pts], dtype=float)
    errs = np.array([p[1] for p in pts], dtype=float)
    if np.any(errs <= 0) or not np.all(np.isfinite(errs)):
        raise BadData("slope fit needs positive finite errors")
    return float(np.polyfit(np.log10(ns), np.log10(errs), 1)[0])


def stability_trials(trials, cfg, n_blocks=None, seed=None):
    """Empirical state-norm check: random signals in the delta ball.

    Runs the loop on `trials` pseudo-random signals with norm at most delta
    on the largest grid size (or n_blocks) and compares the worst state
    norm against the certified bound. The verdict is the report, not an
    exception: FAIL here means the loop broke its own certified bound.
    """
    trials = int(trials)
    if trials < 0:
        raise BadParameter("trials must be nonnegative")
    f, stability = cfg.resolve()
    n_blocks = int(n_blocks) if n_blocks is not None else max(cfg.n_grid)
    report = {
        "trials": trials,
        "n_blocks": n_blocks,
        "order": f.order,
        "sigma": f.sigma,
        "delta": stability.delta,
        "alpha": stability.alpha,
        "c_bound": stability.c_bound,
        "max_state_norm": 0.0,
        "violations": 0,
        "verdict": "PASS",
    }
    if trials == 0:
        return report
    frame = cfg.build_frame(n_blocks)
    alphabets = frame_alphabets(frame)
    rng = np.random.default_rng(cfg.trial_seed if seed is None else seed)
    d = frame.ambient_dim
    worst = 0.0
    violations = 0
    for _ in range(trials):
        direction = rng.standard_normal(d)
        direction /= max(np.linalg.norm(direction), 1e-300)
        x = stability.delta * rng.random() ** (1.0 / d) * direction
        run = ffsd_run(frame, f, frame.analysis(x), alphabets=alphabets)
        worst = max(worst, run.max_state_norm)
        if run.max_state_norm > stability.c_bound + 1e-9:
            violations += 1
    report["max_state_norm"] = worst
    report["violations"] = violations
    report["verdict"] = "PASS" if violations == 0 else "FAIL"
    return report
