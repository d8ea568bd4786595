"""Flat ``key = value`` experiment configuration."""

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

from eeot.bounds import MODES
from eeot.errors import ConfigError

SWEEP_PARAMS = ("p", "alpha", "T", "pi1")

DEFAULTS = {
    "N": 100,
    "s": 10.0,
    "sigma": 1.0,
    "pi1": 0.5,
    "alpha": 0.3,
    "p": 0.5,
    "T": None,  # None = recompute the optimal threshold at every point
    "trials": 100_000,
    "seed": 1,
    "mode": "assumption1",
    "output_path": None,
}

_INT_KEYS = {"N", "trials", "seed"}
_FLOAT_KEYS = {"s", "sigma", "pi1", "alpha", "p"}
_SWEEP_KEYS = {"sweep.param", "sweep.from", "sweep.to", "sweep.step"}


@dataclass(frozen=True)
class Sweep:
    param: str
    start: float
    stop: float
    step: float

    def values(self) -> Tuple[float, ...]:
        count = math.floor((self.stop - self.start) / self.step + 1e-9) + 1
        # round away the accumulated binary noise of start + i*step
        return tuple(round(self.start + i * self.step, 12) for i in range(count))


@dataclass(frozen=True)
class ExperimentConfig:
    N: int = 100
    s: float = 10.0
    sigma: float = 1.0
    pi1: float = 0.5
    alpha: float = 0.3
    p: float = 0.5
    T: Optional[float] = None
    trials: int = 100_000
    seed: int = 1
    mode: str = "assumption1"
    sweep: Optional[Sweep] = None
    output_path: Optional[str] = None
    # keys given explicitly, with their line numbers
    explicit: Tuple[Tuple[str, int], ...] = field(default=(), compare=False)

    def line_of(self, key):
        return dict(self.explicit).get(key)

    def points(self):
        """(sweep value, config with that value applied) for every sweep point."""
        if self.sweep is None:
            return [(math.nan, self)]
        return [(x, replace(self, **{self.sweep.param: x})) for x in self.sweep.values()]

    def validate(self) -> "ExperimentConfig":
        def bad(key, message):
            raise ConfigError(message, key=key, line=self.line_of(key))

        if self.N < 1:
            bad("N", f"must be a positive integer, got {self.N}")
        if self.trials < 1:
            bad("trials", f"must be at least 1, got {self.trials}")
        if not 0 <= self.seed < 2**64:
            bad("seed", f"must be an unsigned 64-bit integer, got {self.seed}")
        if not self.s > 0:
            bad("s", f"must be positive, got {self.s}")
        if not self.sigma > 0:
            bad("sigma", f"must be positive, got {self.sigma}")
        if self.mode not in MODES:
            bad("mode", f"must be one of {MODES}, got {self.mode!r}")
        if self.sweep is not None:
            sw = self.sweep
            if sw.param not in SWEEP_PARAMS:
                bad("sweep.param", f"must be one of {SWEEP_PARAMS}, got {sw.param!r}")
            if not sw.step > 0:
                bad("sweep.step", f"must be positive, got {sw.step}")
            if sw.stop < sw.start:
                bad("sweep.to", f"range {sw.start}..{sw.stop} is empty")
        swept = self.sweep.param if self.sweep else None
        for value, point in self.points():
            where = f" at sweep value {value}" if swept else ""

            def check(key, ok, message):
                if not ok:
                    bad("sweep.from" if key == swept else key, message + where)

            check("pi1", 0.0 < point.pi1 < 1.0, f"pi1 must lie in (0, 1), got {point.pi1}")
            check("alpha", 0.0 <= point.alpha <= 1.0, f"alpha must lie in [0, 1], got {point.alpha}")
            check("p", 0.0 <= point.p <= 1.0, f"p must lie in [0, 1], got {point.p}")
            check(
                "p" if swept == "p" else "alpha",
                point.alpha * point.p < 0.5,
                f"alpha*p must be below 0.5, got {point.alpha * point.p}",
            )
            if point.T is not None:
                check("T", 0 < point.T < point.N, f"T must lie in (0, N={point.N}), got {point.T}")
        return self


def _number(key, raw, lineno, kind):
    try:
        if kind is int:
            value = int(raw, 0)
        else:
            value = float(raw)
    except ValueError:
        raise ConfigError(f"malformed number {raw!r}", key=key, line=lineno) from None
    if kind is float and not math.isfinite(value):
        raise ConfigError(f"number must be finite, got {raw!r}", key=key, line=lineno)
    return value


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a flat ``key = value`` configuration.

    ``#`` starts a comment. Unknown keys, duplicates, malformed numbers and
    out-of-range values raise :class:`ConfigError` naming the key and line.
    """
    values = dict(DEFAULTS)
    sweep = {}
    seen = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", line=lineno)
        key, raw = (part.strip() for part in line.split("=", 1))
        if key in seen:
            raise ConfigError(f"duplicate key (first set on line {seen[key]})", key=key, line=lineno)
        seen[key] = lineno
        if key in _INT_KEYS:
            values[key] = _number(key, raw, lineno, int)
        elif key in _FLOAT_KEYS:
            values[key] = _number(key, raw, lineno, float)
        elif key == "T":
            values[key] = None if raw.lower() == "optimal" else _number(key, raw, lineno, float)
        elif key == "mode":
            values[key] = raw
        elif key == "output_path":
            values[key] = raw
        elif key == "sweep.param":
            sweep["param"] = raw
        elif key in _SWEEP_KEYS:
            sweep[key.split(".", 1)[1]] = _number(key, raw, lineno, float)
        else:
            raise ConfigError("unknown key", key=key, line=lineno)

    sweep_obj = None
    if sweep:
        missing = [k for k in ("param", "from", "to", "step") if k not in sweep]
        if missing:
            raise ConfigError(
                f"incomplete sweep, missing {', '.join('sweep.' + k for k in missing)}",
                key=f"sweep.{missing[0]}",
            )
        sweep_obj = Sweep(sweep["param"], sweep["from"], sweep["to"], sweep["step"])
    cfg = ExperimentConfig(**values, sweep=sweep_obj, explicit=tuple(seen.items()))
    return cfg.validate()
