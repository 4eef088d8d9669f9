"""One aircraft-versus-missile engagement stepped at the simulator rate."""

import logging
import math

import numpy as np

from src.config import Settings
from src.data.observation import encode_observation
from src.data.records import EpisodeOutcome, EpisodeRecord, StepRow
from src.errors import GeometryError, SimulationError
from src.harness.scenarios import ScenarioSpec
from src.harness.tasks import RewardContext, TaskSpec, TerminationRules
from src.models.strategy import Decision, Strategy
from src.sim import rewards
from src.sim.aircraft import ControlAction, load_factor, step_aircraft, turn_rates
from src.sim.geometry import (
    LosSmoother,
    RelativeGeometry,
    relative_geometry,
    segment_min_range,
)
from src.sim.missile import (
    GuidanceMemory,
    Outcome,
    check_outcome,
    guidance_command,
    step_missile,
)
from src.sim.rewards import RewardBreakdown

logger = logging.getLogger(__name__)


class Engagement:
    """Mutable per-episode simulation state.

    Each ``advance`` moves the aircraft, then lets the missile guide on the
    updated aircraft state, then checks the fuze over the straight-line relative
    motion of the step.
    """

    def __init__(self, spec: ScenarioSpec, settings: Settings, rules: TerminationRules) -> None:
        self.spec = spec
        self.settings = settings
        self.rules = rules
        self.dt = settings.sim.dt
        self.guidance = spec.guidance(settings.guidance.lethal_radius)
        self.aircraft = spec.initial_aircraft()
        self.missile = spec.initial_missile(self.aircraft)
        self.memory = GuidanceMemory()
        self.smoother = LosSmoother()
        self.steps = 0
        self.missile_overload = 0.0
        self.max_missile_overload = 0.0
        self.aircraft_overload = 1.0
        self.outcome: EpisodeOutcome | None = None
        self.end_reason = ""
        self.truncated = False
        self.rel = self._measure(prev_unit=None)
        self.initial_rel = self.rel
        self.min_range = self.rel.range

    @property
    def done(self) -> bool:
        return self.outcome is not None

    @property
    def elapsed(self) -> float:
        return self.steps * self.dt

    def _measure(self, prev_unit: np.ndarray | None) -> RelativeGeometry:
        return relative_geometry(
            self.aircraft.position,
            self.aircraft.velocity,
            self.aircraft.heading,
            self.missile.position,
            self.missile.velocity,
            prev_unit=prev_unit,
            dt=self.dt,
            smoother=self.smoother,
        )

    def advance(self, action: ControlAction) -> None:
        if self.done:
            raise SimulationError("engagement already finished")
        params = self.settings.aircraft
        action = action.clamped()
        self.aircraft_overload = load_factor(
            self.aircraft, turn_rates(self.aircraft, action, params), params.g0
        )
        delta_start = self.missile.position - self.aircraft.position

        self.aircraft = step_aircraft(self.aircraft, action, params, self.dt)
        command = guidance_command(
            self.missile,
            self.aircraft.position,
            self.aircraft.velocity,
            self.memory,
            self.guidance,
            self.dt,
            self.settings.guidance.g0,
        )
        self.memory = command.memory
        self.missile = step_missile(
            self.missile,
            (command.horizontal_accel, command.vertical_accel),
            self.dt,
            self.settings.guidance.cos_floor,
        )
        self.steps += 1
        self.missile_overload = command.overload
        self.max_missile_overload = max(self.max_missile_overload, command.overload)

        closest = segment_min_range(delta_start, self.missile.position - self.aircraft.position)
        self.min_range = min(self.min_range, closest)
        try:
            self.rel = self._measure(prev_unit=self.rel.los_unit)
        except GeometryError:
            # exact coincidence is a hit; keep the last valid geometry for logging
            logger.debug(f"Coincident positions at step {self.steps}")
        self._update_status(closest)

    def _update_status(self, closest: float) -> None:
        rules = self.rules
        fuze = check_outcome(
            self.aircraft.position,
            self.missile,
            lethal_radius=self.guidance.lethal_radius,
            effective_time=self.settings.sim.effective_time if rules.apply_expiry else math.inf,
            closest_range=closest,
        )
        if fuze is Outcome.HIT:
            self._finish(EpisodeOutcome.HIT, "hit")
        elif self.aircraft.altitude < self.settings.sim.min_altitude:
            self._finish(EpisodeOutcome.GROUND_IMPACT, "ground")
        elif fuze is Outcome.EXPIRED:
            self._finish(EpisodeOutcome.SURVIVED, "expired")
        elif rules.range_floor is not None and self.rel.range < rules.range_floor:
            self._finish(EpisodeOutcome.SURVIVED, "range_floor")
        elif rules.azimuth_exit_deg is not None and abs(self.rel.azimuth) < math.radians(
            rules.azimuth_exit_deg
        ):
            self._finish(EpisodeOutcome.SURVIVED, "azimuth_exit")
        elif self.steps >= rules.max_steps:
            self._finish(EpisodeOutcome.SURVIVED, "max_steps")
            self.truncated = True

    def _finish(self, outcome: EpisodeOutcome, reason: str) -> None:
        self.outcome = outcome
        self.end_reason = reason

    def abort(self, message: str) -> None:
        self._finish(EpisodeOutcome.ABORTED, "aborted")
        logger.warning(f"Episode aborted at step {self.steps}: {message}")

    def reward(self, task: TaskSpec) -> RewardBreakdown:
        """Reward for the step just taken, including the terminal term when it ends."""
        cfg = self.settings.rewards
        breakdown = task.step_reward(
            RewardContext(self.aircraft, self.rel, self.missile_overload), cfg
        )
        if task.terminal_reward and self.done and self.outcome is not EpisodeOutcome.ABORTED:
            breakdown = breakdown.merged(
                rewards.reward_baseline_terminal(
                    self.outcome is EpisodeOutcome.HIT, self.min_range, cfg
                )
            )
        return breakdown


def _row(eng: Engagement, decision: Decision, breakdown: RewardBreakdown | None) -> StepRow:
    a, m, act = eng.aircraft, eng.missile, decision.action
    return StepRow(
        t=eng.elapsed,
        aircraft_x=float(a.position[0]),
        aircraft_y=float(a.position[1]),
        aircraft_z=float(a.position[2]),
        aircraft_speed=a.speed,
        roll=a.roll,
        pitch=a.pitch,
        heading=a.heading,
        missile_x=float(m.position[0]),
        missile_y=float(m.position[1]),
        missile_z=float(m.position[2]),
        missile_speed=m.speed,
        missile_heading=m.heading,
        missile_pitch=m.pitch,
        stage=decision.stage,
        elevator=act.elevator,
        aileron=act.aileron,
        rudder=act.rudder,
        throttle=act.throttle,
        range=eng.rel.range,
        azimuth=eng.rel.azimuth,
        los_rate=eng.rel.los_rate,
        aircraft_overload=eng.aircraft_overload,
        missile_overload=eng.missile_overload,
        reward=breakdown.total if breakdown is not None else 0.0,
        reward_terms=breakdown.as_row() if breakdown is not None else {},
    )


def run_episode(
    spec: ScenarioSpec,
    strategy: Strategy,
    settings: Settings,
    rules: TerminationRules,
    *,
    task: TaskSpec | None = None,
    record_rows: bool = True,
    probe_range: float | None = None,
) -> EpisodeRecord:
    """Fly ``strategy`` against the missile of ``spec`` until an end condition fires.

    The strategy is queried every ``sim.action_repeat`` steps and its action held
    in between. ``probe_range`` captures the aircraft roll the first time the
    range drops to that value.
    """
    eng = Engagement(spec, settings, rules)
    strategy.reset()
    repeat = settings.sim.action_repeat
    rows: list[StepRow] = []
    sums: dict[str, float] = {}
    total = 0.0
    roll_at_probe: float | None = None
    diagnostic: str | None = None
    decision: Decision | None = None
    try:
        while not eng.done:
            if decision is None or eng.steps % repeat == 0:
                obs = encode_observation(eng.aircraft, eng.missile)
                decision = strategy.decide(obs, eng.rel, eng.aircraft)
            eng.advance(decision.action)
            breakdown = eng.reward(task) if task is not None else None
            if breakdown is not None:
                total += breakdown.total
                for name, value in breakdown.terms.items():
                    sums[name] = sums.get(name, 0.0) + value
            if probe_range is not None and roll_at_probe is None and eng.rel.range <= probe_range:
                roll_at_probe = eng.aircraft.roll
            if record_rows:
                rows.append(_row(eng, decision, breakdown))
    except SimulationError as e:
        diagnostic = str(e)
        eng.abort(diagnostic)

    if eng.outcome is None:
        raise SimulationError("episode loop exited without an outcome")
    return EpisodeRecord(
        scenario_hash=spec.fingerprint(),
        strategy=strategy.name,
        outcome=eng.outcome,
        end_reason=eng.end_reason,
        steps=eng.steps,
        min_range=eng.min_range,
        max_missile_overload=eng.max_missile_overload,
        final_range=eng.rel.range,
        total_reward=total,
        initial_speed=spec.aircraft_speed,
        final_speed=eng.aircraft.speed,
        initial_azimuth=eng.initial_rel.azimuth,
        final_azimuth=eng.rel.azimuth,
        final_roll=eng.aircraft.roll,
        roll_at_probe=roll_at_probe,
        diagnostic=diagnostic,
        reward_sums=sums,
        rows=rows,
    )
