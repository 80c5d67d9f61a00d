"""
Brute-force Monte Carlo oracle for the drawdown functionals.

Paths of X are simulated from exponential jump epochs at rate a with Exponential(c)
downward jumps. Between epochs the drift and diffusion advance on a dt grid; when
sigma = 0 the motion between epochs is linear and is advanced in one exact step, with
exact crossing times and premium flows. Only the drawdown Y = S - X is tracked:

    Y <- max(Y - dX, 0),   dS = max(dX - Y, 0).

Paths are simulated in batches seeded from SeedSequence(seed).spawn(n_batches) and
concatenated in batch order, so results do not depend on the number of worker threads.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from errors import DomainError
from models.scale import ScaleEvaluator
from pricing.drawdown import check_interval
from schemas.contract import CdsTerms, SwitchTerms
from schemas.model import JumpDiffusionModel
from schemas.numerics import PathConfig
from schemas.report import MartingaleReport, MartingaleRow, McEstimate

logger = logging.getLogger(__name__)

# discount factor at the default horizon
DISCOUNT_FLOOR = 1e-8
CENSORED_WARNING = 1e-3


def resolve_horizon(cfg: PathConfig, rate: float) -> float:
    """Simulated-time cap: cfg.horizon, or ln(1 / DISCOUNT_FLOOR) / rate."""
    if cfg.horizon is not None:
        return cfg.horizon
    if rate <= 0.0:
        raise DomainError("an explicit horizon is required when the discount rate is 0")
    return math.log(1.0 / DISCOUNT_FLOOR) / rate


@dataclass(frozen=True)
class PathSample:
    """
    Per-path outcome of a simulation.

    Attributes:
        unit: Index of the independent sample each path belongs to (antithetic pairs share one).
        tau_b: Default time, inf when the path reached the horizon first.
        tau_h: First time Y < h, inf when it never happened.
        y_at_h: Drawdown at tau_h, nan when it never happened.
        premium_before: int_0^{min(tau_h, tau_b)} exp(-r t) dS_t.
        premium_after: int_{tau_h}^{tau_b} exp(-r t) dS_t, zero when tau_h never happened.
        censored: Paths alive at the horizon.
        record_t: Shape (k, n); min(t_j, stopping time) for each record time t_j.
        record_y: Shape (k, n); drawdown at record_t.
        horizon: Simulated-time cap.
        rate: Discount rate of the premium flows.
    """
    unit: np.ndarray
    tau_b: np.ndarray
    tau_h: np.ndarray
    y_at_h: np.ndarray
    premium_before: np.ndarray
    premium_after: np.ndarray
    censored: np.ndarray
    record_t: np.ndarray
    record_y: np.ndarray
    horizon: float
    rate: float

    @property
    def n_paths(self) -> int:
        return int(self.unit.size)

    @property
    def premium_total(self) -> np.ndarray:
        return self.premium_before + self.premium_after

    @property
    def censored_mass(self) -> float:
        """Censored fraction weighted by the discount factor at the horizon."""
        return float(self.censored.mean()) * math.exp(-self.rate * self.horizon)


def _drift_flow(mu: float, r: float, start: np.ndarray, end: np.ndarray) -> np.ndarray:
    # int_start^end exp(-r t) mu dt
    if r == 0.0:
        return mu * (end - start)
    return (mu / r) * (np.exp(-r * start) - np.exp(-r * end))


class _Batch:
    """State of one independently seeded batch of paths."""

    def __init__(
        self,
        model: JumpDiffusionModel,
        y0: float,
        b: float,
        h: Optional[float],
        r: float,
        dt: float,
        horizon: float,
        reflect: bool,
        stop_at_h: bool,
        record_times: np.ndarray,
        n_units: int,
        antithetic: bool,
        seed: np.random.SeedSequence,
    ):
        self.model, self.b, self.h, self.r = model, b, h, r
        self.dt, self.horizon = dt, horizon
        self.reflect, self.stop_at_h = reflect, stop_at_h
        self.times = record_times
        self.rng = np.random.default_rng(seed)
        self.exact = model.sigma == 0.0

        self.m = n_units
        self.antithetic = antithetic
        n = 2 * n_units if antithetic else n_units
        self.unit_of = np.tile(np.arange(n_units), 2) if antithetic else np.arange(n_units)

        # per independent unit: clock, time to next jump, next record index
        self.t = np.zeros(n_units)
        self.rem = self.rng.exponential(1.0 / model.jump_rate, n_units)
        self.rec_idx = np.zeros(n_units, dtype=int)

        self.y = np.full(n, float(y0))
        self.alive = np.ones(n, dtype=bool)
        self.tau_b = np.full(n, np.inf)
        self.tau_h = np.full(n, np.inf)
        self.y_at_h = np.full(n, np.nan)
        self.prem_before = np.zeros(n)
        self.prem_after = np.zeros(n)
        self.censored = np.zeros(n, dtype=bool)
        k = record_times.size
        self.rec_t = np.full((k, n), np.nan)
        self.rec_y = np.full((k, n), np.nan)

        if h is not None and y0 <= h:
            # started in the stopping region: tau_h^- = 0
            self.tau_h[:] = 0.0
            self.y_at_h[:] = y0
            if stop_at_h:
                self._freeze(np.arange(n), np.zeros(n), self.y.copy())
        self._take_records(np.arange(n_units), at_zero=True)

    def _paths_of(self, units: np.ndarray) -> np.ndarray:
        return np.concatenate([units, units + self.m]) if self.antithetic else units

    def _freeze(self, paths: np.ndarray, t_stop: np.ndarray, y_stop: np.ndarray) -> None:
        # stopped paths keep their stopping state in every record not yet taken
        self.alive[paths] = False
        pending = self.rec_idx[self.unit_of[paths]]
        for j in range(self.times.size):
            mask = pending <= j
            self.rec_t[j, paths[mask]] = t_stop[mask]
            self.rec_y[j, paths[mask]] = y_stop[mask]

    def _take_records(self, units: np.ndarray, at_zero: bool = False) -> None:
        if not self.times.size or not units.size:
            return
        while True:
            idx = self.rec_idx[units]
            open_ = idx < self.times.size
            due = open_.copy()
            due[open_] = self.times[idx[open_]] <= self.t[units[open_]]
            if at_zero:
                due &= self.t[units] == 0.0
            if not due.any():
                return
            du = units[due]
            paths = self._paths_of(du)
            live = paths[self.alive[paths]]
            j = self.rec_idx[self.unit_of[live]]
            self.rec_t[j, live] = self.times[j]
            self.rec_y[j, live] = self.y[live]
            self.rec_idx[du] += 1

    def _advance(self, paths: np.ndarray, t0: np.ndarray, step: np.ndarray, z: np.ndarray) -> None:
        mu, sigma, h, r = self.model.mu, self.model.sigma, self.h, self.r
        y = self.y[paths]

        if self.exact:
            if h is not None:
                s_h = (y - h) / mu
                hit = ~np.isfinite(self.tau_h[paths]) & (s_h <= step)
                self.tau_h[paths[hit]] = t0[hit] + s_h[hit]
                self.y_at_h[paths[hit]] = h
            if self.reflect:
                s_0 = y / mu
                reaches_max = s_0 < step
                flow = np.where(reaches_max, _drift_flow(mu, r, t0 + np.minimum(s_0, step), t0 + step), 0.0)
                after = self.tau_h[paths] <= t0 + s_0
                self.prem_after[paths] += np.where(after, flow, 0.0)
                self.prem_before[paths] += np.where(after, 0.0, flow)
                y_new = np.maximum(y - mu * step, 0.0)
            else:
                y_new = y - mu * step
        else:
            d_x = mu * step + sigma * np.sqrt(step) * z
            if self.reflect:
                flow = np.exp(-r * (t0 + step)) * np.maximum(d_x - y, 0.0)
                after = np.isfinite(self.tau_h[paths])
                self.prem_after[paths] += np.where(after, flow, 0.0)
                self.prem_before[paths] += np.where(after, 0.0, flow)
                y_new = np.maximum(y - d_x, 0.0)
            else:
                y_new = y - d_x
            if h is not None:
                hit = ~np.isfinite(self.tau_h[paths]) & (y_new < h)
                self.tau_h[paths[hit]] = t0[hit] + step[hit]
                self.y_at_h[paths[hit]] = y_new[hit]

        self.y[paths] = y_new

        if self.stop_at_h and h is not None:
            stopped = np.isfinite(self.tau_h[paths]) & self.alive[paths]
            if stopped.any():
                sp = paths[stopped]
                self._freeze(sp, self.tau_h[sp], self.y_at_h[sp])

        if not self.exact:
            crossed = self.alive[paths] & (y_new > self.b)
            if crossed.any():
                self._default(paths[crossed], (t0 + step)[crossed])

    def _default(self, paths: np.ndarray, when: np.ndarray) -> None:
        self.tau_b[paths] = when
        self._freeze(paths, when, self.y[paths].copy())

    def run(self) -> PathSample:
        model = self.model
        while True:
            unit_alive = self.alive[: self.m] | self.alive[self.m:] if self.antithetic else self.alive
            units = np.flatnonzero(unit_alive)
            if not units.size:
                break
            t_u = self.t[units]
            idx = self.rec_idx[units]
            open_ = idx < self.times.size
            next_rec = np.full(units.size, np.inf)
            next_rec[open_] = self.times[idx[open_]]
            to_horizon = self.horizon - t_u
            to_record = next_rec - t_u
            step = np.minimum(np.minimum(self.rem[units], to_horizon), to_record)
            if not self.exact:
                step = np.minimum(step, self.dt)

            z = self.rng.standard_normal(units.size) if not self.exact else np.zeros(units.size)
            paths = self._paths_of(units)
            steps = np.tile(step, 2) if self.antithetic else step
            starts = np.tile(t_u, 2) if self.antithetic else t_u
            normals = np.concatenate([z, -z]) if self.antithetic else z
            live = self.alive[paths]
            self._advance(paths[live], starts[live], steps[live], normals[live])

            jumps = (step == self.rem[units]) & (step < to_horizon)
            t_new = t_u + step
            t_new = np.where(step == to_record, next_rec, t_new)
            t_new = np.where(step == to_horizon, self.horizon, t_new)
            self.t[units] = t_new
            self.rem[units] -= step

            jumping = units[jumps]
            if jumping.size:
                sizes = self.rng.exponential(1.0 / model.jump_decay, jumping.size)
                self.rem[jumping] = self.rng.exponential(1.0 / model.jump_rate, jumping.size)
                jp = self._paths_of(jumping)
                js = np.tile(sizes, 2) if self.antithetic else sizes
                keep = self.alive[jp]
                jp, js = jp[keep], js[keep]
                self.y[jp] += js
                defaulted = jp[self.y[jp] > self.b]
                if defaulted.size:
                    self._default(defaulted, self.t[self.unit_of[defaulted]])

            self._take_records(units[step == to_record])

            at_horizon = units[step == to_horizon]
            if at_horizon.size:
                hp = self._paths_of(at_horizon)
                hp = hp[self.alive[hp]]
                self.censored[hp] = True
                self._freeze(hp, np.full(hp.size, self.horizon), self.y[hp].copy())

        return PathSample(
            unit=self.unit_of.copy(),
            tau_b=self.tau_b,
            tau_h=self.tau_h,
            y_at_h=self.y_at_h,
            premium_before=self.prem_before,
            premium_after=self.prem_after,
            censored=self.censored,
            record_t=self.rec_t,
            record_y=self.rec_y,
            horizon=self.horizon,
            rate=self.r,
        )


def _batch_units(cfg: PathConfig) -> List[int]:
    per_unit = 2 if cfg.antithetic else 1
    total = max(1, cfg.n_paths // per_unit)
    size = max(1, cfg.batch_size // per_unit)
    return [min(size, total - start) for start in range(0, total, size)]


def simulate_paths(
    model: JumpDiffusionModel,
    y0: float,
    b: float,
    r: float,
    cfg: PathConfig,
    h: Optional[float] = None,
    reflect: bool = True,
    stop_at_h: bool = False,
    record_times: Sequence[float] = (),
    horizon: Optional[float] = None,
) -> PathSample:
    """
    Simulate drawdown paths started at Y_0 = y0 until default, the horizon, or tau_h^- when
    stop_at_h is set.

    :param model: The jump-diffusion model.
    :param y0: Initial drawdown in [0, b].
    :param b: Default level; paths stop when Y > b.
    :param r: Discount rate of the premium flows.
    :param cfg: Path settings.
    :param h: Optional lower threshold; tau_h = inf{t : Y_t < h}.
    :param reflect: False freezes the running maximum, so Y = S_0 - X is the unreflected process.
    :param stop_at_h: Stop each path at tau_h.
    :param record_times: Increasing times at which the stopped state is recorded.
    :param horizon: Overrides the horizon resolved from cfg.
    :return: Concatenated per-path outcomes.
    """
    if not b > 0.0:
        raise DomainError(f"default level b must be > 0, got {b}")
    y0 = check_interval("y0", y0, 0.0, b)
    if h is not None:
        if reflect and not h > 0.0:
            raise DomainError(f"threshold h must be > 0 for the reflected drawdown, got {h}")
        check_interval("h", h, 0.0, b)
    times = np.asarray(sorted(record_times), dtype=float)
    if times.size and times[0] < 0.0:
        raise DomainError("record times must be >= 0")
    cap = horizon if horizon is not None else resolve_horizon(cfg, r)

    sizes = _batch_units(cfg)
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(sizes))

    def run(args: Tuple[int, np.random.SeedSequence]) -> PathSample:
        n_units, seed = args
        return _Batch(
            model, y0, b, h, r, cfg.dt, cap, reflect, stop_at_h, times, n_units, cfg.antithetic, seed
        ).run()

    if cfg.workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            batches = list(pool.map(run, zip(sizes, seeds)))
    else:
        batches = [run(args) for args in zip(sizes, seeds)]

    offsets = np.cumsum([0] + sizes[:-1])
    sample = PathSample(
        unit=np.concatenate([batch.unit + off for batch, off in zip(batches, offsets)]),
        tau_b=np.concatenate([batch.tau_b for batch in batches]),
        tau_h=np.concatenate([batch.tau_h for batch in batches]),
        y_at_h=np.concatenate([batch.y_at_h for batch in batches]),
        premium_before=np.concatenate([batch.premium_before for batch in batches]),
        premium_after=np.concatenate([batch.premium_after for batch in batches]),
        censored=np.concatenate([batch.censored for batch in batches]),
        record_t=np.concatenate([batch.record_t for batch in batches], axis=1),
        record_y=np.concatenate([batch.record_y for batch in batches], axis=1),
        horizon=cap,
        rate=r,
    )
    logger.debug("simulated %d paths in %d batches", sample.n_paths, len(sizes))
    return sample


def estimate(sample: PathSample, values: np.ndarray) -> McEstimate:
    """
    Mean and standard error of per-path values, averaging antithetic partners first.
    """
    counts = np.bincount(sample.unit)
    per_unit = np.bincount(sample.unit, weights=values) / counts
    n_units = per_unit.size
    std_error = float(per_unit.std(ddof=1) / math.sqrt(n_units)) if n_units > 1 else 0.0
    return McEstimate(
        mean=float(per_unit.mean()),
        std_error=std_error,
        n_effective=n_units,
        censored_fraction=float(sample.censored.mean()),
    )


def _warn_censored(sample: PathSample) -> None:
    # censored paths are truncated at the horizon; their weight is bounded by the discount there
    if sample.censored_mass > CENSORED_WARNING:
        logger.warning(
            "%.2e of the paths reached the horizon %.4g before default (discounted weight %.2e)",
            float(sample.censored.mean()), sample.horizon, sample.censored_mass,
        )


def _discounted(times: np.ndarray, r: float) -> np.ndarray:
    finite = np.isfinite(times)
    return np.where(finite, np.exp(-r * np.where(finite, times, 0.0)), 0.0)


def simulate_drawdown_functionals(
    model: JumpDiffusionModel,
    y0: float,
    b: float,
    h: Optional[float],
    r: float,
    cfg: PathConfig,
    payoff: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> Dict[str, McEstimate]:
    """
    Estimate the drawdown functionals from one set of paths.

    Keys: "exit_up" (exp(-r tau_b)), "max_increase" (int exp(-r t) dS), and when h is given
    "down_before_up", "up_before_down" and, with a payoff, "candidate_J"
    (exp(-r tau_h) payoff(Y_{tau_h}) on tau_h <= tau_b).
    """
    sample = simulate_paths(model, y0, b, r, cfg, h=h)
    _warn_censored(sample)
    disc_b = _discounted(sample.tau_b, r)
    results = {
        "exit_up": estimate(sample, disc_b),
        "max_increase": estimate(sample, sample.premium_total),
    }
    if h is not None:
        down_first = np.isfinite(sample.tau_h) & (sample.tau_h <= sample.tau_b)
        disc_h = np.where(down_first, _discounted(sample.tau_h, r), 0.0)
        results["down_before_up"] = estimate(sample, disc_h)
        results["up_before_down"] = estimate(sample, np.where(sample.tau_b <= sample.tau_h, disc_b, 0.0))
        if payoff is not None:
            level = np.where(down_first, sample.y_at_h, h)
            results["candidate_J"] = estimate(sample, disc_h * np.asarray(payoff(level)))
    return results


def simulate_exit_functional(
    model: JumpDiffusionModel, x0: float, b: float, u: float, cfg: PathConfig
) -> McEstimate:
    """
    Estimate E_x[exp(-u T_b^+); T_b^+ < T_0^-] by simulating X directly.

    X is tracked through its distance to the upper barrier, b - X, which is the drawdown
    of a path whose running maximum is frozen at b.
    """
    x0 = check_interval("x0", x0, 0.0, b)
    sample = simulate_paths(model, b - x0, b, u, cfg, h=0.0, reflect=False, stop_at_h=True)
    _warn_censored(sample)
    up_first = np.isfinite(sample.tau_h) & (sample.tau_h < sample.tau_b)
    return estimate(sample, np.where(up_first, _discounted(sample.tau_h, u), 0.0))


def switch_cash_flows(sample: PathSample, terms: CdsTerms, switch: SwitchTerms) -> np.ndarray:
    """
    Realized discounted cash flow of the switchable contract when switching at tau_h:

        -int_0^{theta ^ tau_b} e^{-rt} p dS + e^{-r tau_b}(alpha_hat 1{theta <= tau_b} + alpha 1{theta > tau_b})
        - 1{theta <= tau_b} (int_theta^{tau_b} e^{-rt} p_hat dS + e^{-r theta} gamma).
    """
    r = terms.r
    p_hat = terms.p + switch.p_tilde
    alpha_hat = terms.alpha + switch.alpha_tilde
    switched = np.isfinite(sample.tau_h) & (sample.tau_h <= sample.tau_b)
    disc_b = _discounted(sample.tau_b, r)
    disc_theta = np.where(switched, _discounted(sample.tau_h, r), 0.0)
    default_leg = disc_b * np.where(switched, alpha_hat, terms.alpha)
    after_leg = np.where(switched, p_hat * sample.premium_after + disc_theta * switch.gamma, 0.0)
    return -terms.p * sample.premium_before + default_leg - after_leg


def rearranged_cash_flows(sample: PathSample, terms: CdsTerms, switch: SwitchTerms) -> np.ndarray:
    """
    The same cash flow written as the outright contract plus the switch-option payoff:

        [-int_0^{tau_b} e^{-rt} p dS + alpha e^{-r tau_b}]
        + 1{theta <= tau_b} (-int_theta^{tau_b} e^{-rt} p_tilde dS + e^{-r tau_b} alpha_tilde - e^{-r theta} gamma).
    """
    r = terms.r
    switched = np.isfinite(sample.tau_h) & (sample.tau_h <= sample.tau_b)
    disc_b = _discounted(sample.tau_b, r)
    disc_theta = np.where(switched, _discounted(sample.tau_h, r), 0.0)
    outright = -terms.p * sample.premium_total + terms.alpha * disc_b
    option = -switch.p_tilde * sample.premium_after + switch.alpha_tilde * disc_b - disc_theta * switch.gamma
    return outright + np.where(switched, option, 0.0)


def switch_contract_value_mc(
    model: JumpDiffusionModel,
    terms: CdsTerms,
    switch: SwitchTerms,
    h: float,
    y0: float,
    cfg: PathConfig,
) -> McEstimate:
    """Estimate the value of the switchable contract under the threshold rule theta = tau_h^-."""
    sample = simulate_paths(model, y0, terms.b, terms.r, cfg, h=h)
    _warn_censored(sample)
    return estimate(sample, switch_cash_flows(sample, terms, switch))


def martingale_scan(
    model: JumpDiffusionModel,
    y0: float,
    b: float,
    h: float,
    u: float,
    times: Sequence[float],
    cfg: PathConfig,
    evaluator: Optional[ScaleEvaluator] = None,
) -> MartingaleReport:
    """
    Estimate E[exp(-u (t ^ tau)) W(b - Y_{t ^ tau})] and the Z analogue, tau = tau_h^- ^ tau_b^+,
    at each time and flag pairs of times whose estimates differ by more than 3 combined SE.
    """
    times = sorted(float(t) for t in times)
    if not times:
        raise DomainError("martingale_scan needs at least one time")
    ev = evaluator if evaluator is not None else ScaleEvaluator(model, u)
    check_interval("y0", y0, h, b)
    sample = simulate_paths(
        model, y0, b, u, cfg, h=h, stop_at_h=True, record_times=times, horizon=max(times[-1], cfg.dt)
    )

    rows = []
    for j, t in enumerate(times):
        disc = np.exp(-u * sample.record_t[j])
        gap = b - sample.record_y[j]
        rows.append(
            MartingaleRow(
                t=t,
                w_functional=estimate(sample, disc * np.asarray(ev.W(gap))),
                z_functional=estimate(sample, disc * np.asarray(ev.Z(gap))),
            )
        )

    flagged = []
    for i in range(len(rows)):
        for k in range(i + 1, len(rows)):
            for attr in ("w_functional", "z_functional"):
                first, second = getattr(rows[i], attr), getattr(rows[k], attr)
                combined = math.hypot(first.std_error, second.std_error)
                if abs(first.mean - second.mean) > 3.0 * combined:
                    flagged.append((rows[i].t, rows[k].t))
                    break
    return MartingaleReport(rows=rows, flagged_pairs=flagged)


def dt_sensitivity(
    model: JumpDiffusionModel,
    y0: float,
    b: float,
    h: Optional[float],
    r: float,
    cfg: PathConfig,
    payoff: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> Dict[str, float]:
    """
    Shift of each estimate when dt is halved, in units of the combined standard error.
    """
    coarse = simulate_drawdown_functionals(model, y0, b, h, r, cfg, payoff)
    fine = simulate_drawdown_functionals(model, y0, b, h, r, cfg.model_copy(update={"dt": cfg.dt / 2.0}), payoff)
    shifts = {}
    for key, first in coarse.items():
        second = fine[key]
        combined = math.hypot(first.std_error, second.std_error)
        diff = abs(first.mean - second.mean)
        shifts[key] = diff / combined if combined > 0.0 else (0.0 if diff == 0.0 else math.inf)
    return shifts
