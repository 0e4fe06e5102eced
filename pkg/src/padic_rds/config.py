"""
Experiment configuration.

RdsSpec is the experiment definition shared by every module. ExperimentConfig
mirrors it and adds the simulation and pattern parameters used by the CLI; it
is read from a JSON/YAML file and overridden by command-line flags.
Validation collects every violation before failing.
"""
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import yaml
from pydantic import (BaseModel, ConfigDict, Field, ValidationError,
                      field_validator, model_validator)
from sympy import isprime

from . import rds_logging as logging
from .errors import ConfigurationError
from .padic import DEFAULT_PRECISION, PadicInt, coerce
from .unity import primitive_root

logger = logging.getLogger(__name__)

DEFAULT_BIT_GENERATOR = "PCG64"
SUPPORTED_BIT_GENERATORS = ("PCG64", "PCG64DXSM", "Philox", "SFC64", "MT19937")
# ExperimentConfig keys, aliases included, that are validated as RdsSpec fields
SPEC_FIELDS = frozenset({"p", "s", "exponents", "q", "probabilities", "precision", "seed", "bit_generator"})


def to_fraction(value: Any) -> Fraction:
    """Exact rational from an int, a Fraction, a decimal/fraction string or a float."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # through repr so 0.2 means 1/5, not the nearest binary float
        return Fraction(repr(value))
    return Fraction(value)


def fraction_text(x: Fraction) -> str:
    """Rational as "num/den", also for integers."""
    return f"{x.numerator}/{x.denominator}"


def split_list(value: Any) -> Any:
    """Accept "a,b,c" strings as lists (CLI and config-file convenience)."""
    if isinstance(value, str):
        return [v.strip() for v in value.split(",") if v.strip()]
    return value


class RdsSpec(BaseModel):
    """The monomial RDS x -> x^{s(omega)} with s = s_j drawn with probability q_j."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    p: int
    exponents: Tuple[int, ...]
    probabilities: Tuple[Fraction, ...] = ()
    precision: int = Field(DEFAULT_PRECISION, ge=1)
    seed: int = 0
    bit_generator: str = DEFAULT_BIT_GENERATOR

    # single-field checks stay in field validators; only the length match needs the model

    @field_validator("p")
    @classmethod
    def _check_prime(cls, value: int) -> int:
        if value < 2 or not isprime(value):
            raise ValueError(f"p must be a prime, got {value}")
        return value

    @field_validator("exponents", mode="before")
    @classmethod
    def _split_exponents(cls, value):
        return split_list(value)

    @field_validator("exponents")
    @classmethod
    def _check_exponents(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        violations = []
        if not value:
            violations.append("at least one exponent is required")
        bad = [s for s in value if s < 2]
        if bad:
            violations.append(f"exponents must be >= 2, got {bad}")
        if len(set(value)) != len(value):
            violations.append(f"exponents must be pairwise distinct, got {list(value)}")
        if violations:
            raise ValueError("; ".join(violations))
        return value

    @field_validator("probabilities", mode="before")
    @classmethod
    def _parse_probabilities(cls, value):
        value = split_list(value)
        if value is None:
            return ()
        try:
            return tuple(to_fraction(v) for v in value)
        except (ValueError, ZeroDivisionError, TypeError) as e:
            raise ValueError(f"probabilities must be rationals: {e}") from e

    @field_validator("probabilities")
    @classmethod
    def _check_probabilities(cls, value: Tuple[Fraction, ...]) -> Tuple[Fraction, ...]:
        violations = []
        if any(q <= 0 for q in value):
            violations.append(f"probabilities must be positive, got {[str(q) for q in value]}")
        if value and sum(value) != 1:
            violations.append(f"probabilities must sum to 1, they sum to {sum(value)}")
        if violations:
            raise ValueError("; ".join(violations))
        return value

    @field_validator("seed")
    @classmethod
    def _check_seed(cls, value: int) -> int:
        if not 0 <= value < 2 ** 64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {value}")
        return value

    @field_validator("bit_generator")
    @classmethod
    def _check_bit_generator(cls, value: str) -> str:
        if value not in SUPPORTED_BIT_GENERATORS:
            raise ValueError(f"bit_generator must be one of {SUPPORTED_BIT_GENERATORS}, got {value!r}")
        return value

    @model_validator(mode="before")
    @classmethod
    def _default_uniform(cls, data):
        if isinstance(data, dict) and not data.get("probabilities"):
            exponents = split_list(data.get("exponents")) or []
            if exponents:
                data = {**data, "probabilities": [Fraction(1, len(exponents))] * len(exponents)}
        return data

    @model_validator(mode="after")
    def _check_invariants(self):
        if len(self.probabilities) != len(self.exponents):
            raise ValueError(f"{len(self.exponents)} exponents but {len(self.probabilities)} probabilities")
        if not self.has_attracting_exponent:
            logger.warning(f"no exponent in {self.exponents} is divisible by p={self.p}: "
                           "sphere dynamics are isometric, attraction claims are suppressed")
        return self

    @property
    def m(self) -> int:
        return len(self.exponents)

    @property
    def has_attracting_exponent(self) -> bool:
        return any(s % self.p == 0 for s in self.exponents)

    def probability_floats(self) -> np.ndarray:
        probs = np.array([float(q) for q in self.probabilities])
        return probs / probs.sum()

    def with_seed(self, seed: int) -> "RdsSpec":
        return self.model_copy(update={"seed": seed})

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "p": self.p,
            "exponents": list(self.exponents),
            "probabilities": [fraction_text(q) for q in self.probabilities],
            "precision": self.precision,
            "seed": self.seed,
            "bit_generator": self.bit_generator,
        }


class PatternConfig(BaseModel):
    """One interference-pattern run: a single orbit seen through g, plus uniform y noise."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    spec: RdsSpec
    u0: PadicInt
    n_particles: int = 10_000
    burn_in: Optional[int] = None
    y_range: Tuple[float, float] = (0.0, 1.0)
    x_bins: int = 200
    y_bins: int = 50
    tolerance_digits: Optional[int] = None

    @model_validator(mode="before")
    @classmethod
    def _coerce_u0(cls, data):
        if isinstance(data, dict) and "u0" in data and isinstance(data.get("spec"), RdsSpec):
            spec = data["spec"]
            data = {**data, "u0": coerce(data["u0"], spec.p, spec.precision)}
        return data

    @model_validator(mode="after")
    def _check_invariants(self):
        violations = []
        a, b = self.y_range
        if not a < b:
            violations.append(f"y_range must satisfy a < b, got [{a}, {b}]")
        if self.n_particles < 1:
            violations.append(f"n_particles must be >= 1, got {self.n_particles}")
        if self.x_bins < 1 or self.y_bins < 1:
            violations.append(f"bins must be >= 1, got {self.x_bins}x{self.y_bins}")
        if self.effective_burn_in < 0 or self.effective_burn_in >= self.n_particles:
            violations.append(f"burn_in must lie in [0, n_particles), got {self.effective_burn_in}")
        if (self.u0.p, self.u0.K) != (self.spec.p, self.spec.precision):
            violations.append(f"u0 {self.u0} does not match p={self.spec.p}, K={self.spec.precision}")
        if self.tolerance_digits is not None and not 0 <= self.tolerance_digits <= self.spec.precision:
            violations.append(f"tolerance_digits must lie in [0, K], got {self.tolerance_digits}")
        if violations:
            raise ValueError("; ".join(violations))
        return self

    @property
    def effective_burn_in(self) -> int:
        return default_burn_in(self.spec.p) if self.burn_in is None else self.burn_in

    @property
    def effective_tolerance_digits(self) -> int:
        return self.spec.precision // 2 if self.tolerance_digits is None else self.tolerance_digits


def default_burn_in(p: int) -> int:
    return 10 * (p - 1)


class ExperimentConfig(BaseModel):
    """Everything one CLI invocation needs; mirrors RdsSpec plus run parameters."""
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    p: int
    exponents: List[int] = Field(alias="s")
    probabilities: Optional[List[str]] = Field(default=None, alias="q")
    precision: int = DEFAULT_PRECISION
    seed: int = 0
    bit_generator: str = DEFAULT_BIT_GENERATOR
    u0: Optional[str] = None
    steps: int = Field(1000, ge=0)
    trials: int = Field(1, ge=1)
    workers: int = Field(1, ge=1)
    empirical_steps: int = Field(100_000, ge=1)
    burn_in: Optional[int] = None
    n_particles: int = 10_000
    y_min: float = 0.0
    y_max: float = 1.0
    x_bins: int = 200
    y_bins: int = 50
    tolerance_digits: Optional[int] = None
    check_seeds: Optional[List[int]] = None
    out_dir: Optional[str] = None

    @field_validator("exponents", "check_seeds", mode="before")
    @classmethod
    def _split_lists(cls, value):
        return split_list(value)

    @field_validator("probabilities", mode="before")
    @classmethod
    def _split_probabilities(cls, value):
        value = split_list(value)
        return None if value is None else [str(v) for v in value]

    @field_validator("u0", mode="before")
    @classmethod
    def _u0_text(cls, value):
        return None if value is None else str(value)

    def rds_spec(self) -> RdsSpec:
        return RdsSpec(p=self.p, exponents=self.exponents, probabilities=self.probabilities,
                       precision=self.precision, seed=self.seed, bit_generator=self.bit_generator)

    def initial_state(self, spec: RdsSpec) -> PadicInt:
        """u0 from the config, or xi + p (a sphere point off the attractor) by default."""
        if self.u0 is None:
            return coerce(primitive_root(spec.p) + spec.p, spec.p, spec.precision)
        return coerce(self.u0, spec.p, spec.precision)

    def pattern_config(self, spec: RdsSpec) -> PatternConfig:
        return PatternConfig(spec=spec, u0=self.initial_state(spec), n_particles=self.n_particles,
                             burn_in=self.burn_in, y_range=(self.y_min, self.y_max),
                             x_bins=self.x_bins, y_bins=self.y_bins,
                             tolerance_digits=self.tolerance_digits)


def load_config_file(path: str) -> Dict[str, Any]:
    """Read a JSON or YAML experiment file into a dict."""
    config_path = Path(path)
    if config_path.suffix not in ('.yaml', '.yml', '.json'):
        raise ConfigurationError([f"unsupported config file extension {config_path.suffix!r}"], str(config_path))
    logger.info(f"Loading experiment config from {config_path}")
    with open(config_path) as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigurationError([str(e)], str(config_path)) from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigurationError(["top level must be a mapping of option names to values"], str(config_path))
    return data


def validation_messages(error: ValidationError) -> List[str]:
    messages = []
    for err in error.errors():
        location = ".".join(str(part) for part in err.get("loc", ())) or "config"
        messages.append(f"{location}: {err['msg']}")
    return messages


def build_experiment_config(config_file: Optional[str] = None,
                            overrides: Optional[Dict[str, Any]] = None) -> Tuple[ExperimentConfig, RdsSpec]:
    """File values, then flag overrides, validated together.

    Raises:
        ConfigurationError: listing every violation found
    """
    data: Dict[str, Any] = load_config_file(config_file) if config_file else {}
    for alias, name in (("s", "exponents"), ("q", "probabilities")):
        if alias in data:
            data[name] = data.pop(alias)
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    violations: List[str] = []
    try:
        config = ExperimentConfig(**data)
    except ValidationError as e:
        # the experiment fields are reported by the RdsSpec pass below
        violations += [message for err, message in zip(e.errors(), validation_messages(e))
                       if not err["loc"] or err["loc"][0] not in SPEC_FIELDS]
    try:
        spec = RdsSpec(**{k: v for k, v in data.items() if k in RdsSpec.model_fields})
    except ValidationError as e:
        violations += validation_messages(e)
    if violations:
        raise ConfigurationError(violations, config_file)
    return config, spec
