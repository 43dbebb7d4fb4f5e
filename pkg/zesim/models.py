"""
Data models for zesim.
Defines configuration records, tolerance constants and the JSON payload
schemas shared by the library and the command-line front end.
"""
from dataclasses import dataclass, field, fields, asdict
from typing import List, Dict, Any, Iterable, Optional, Tuple
from pathlib import Path
import json
import math
import os

import numpy as np
import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator


THREADS_ENV = "ZESIM_THREADS"


class ZesimError(Exception):
    """Base class for every error raised by zesim."""


class ConfigError(ZesimError):
    """Raised when a configuration file cannot be applied."""


class PayloadError(ZesimError, ValueError):
    """Raised when a JSON document does not match the expected schema."""


def _typed(cls: type, data: Dict[str, Any]) -> Dict[str, Any]:
    """Convert values to the type of the matching field default (YAML reads 1e-8 as a string)."""
    defaults = {fld.name: fld.default for fld in fields(cls)}
    return {key: type(defaults[key])(value) if key in defaults else value for key, value in data.items()}


@dataclass
class Tolerances:
    """Numeric tolerance constants used across the package."""
    hermitian: float = 1e-12
    channel: float = 1e-9
    rank: float = 1e-9
    psd: float = 1e-9
    certificate: float = 1e-9
    strict_margin: float = 1e-9
    feasibility: float = 1e-6

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Tolerances':
        return cls(**_typed(cls, data))


@dataclass
class SolverOptions:
    """Interior-point solver options."""
    gap_tol: float = 1e-8
    feas_tol: float = 1e-8
    max_iter: int = 200
    relaxed_tol: float = 1e-6  # accept numerical-failure results this close
    stall_window: int = 10

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SolverOptions':
        return cls(**_typed(cls, data))

    def validate(self) -> List[str]:
        errors = []
        if not self.gap_tol > 0:
            errors.append(f"gap_tol must be positive, got {self.gap_tol}")
        if not self.feas_tol > 0:
            errors.append(f"feas_tol must be positive, got {self.feas_tol}")
        if self.max_iter < 1:
            errors.append(f"max_iter must be at least 1, got {self.max_iter}")
        if self.relaxed_tol < max(self.gap_tol, self.feas_tol):
            errors.append("relaxed_tol must not be tighter than gap_tol/feas_tol")
        if self.stall_window < 2:
            errors.append(f"stall_window must be at least 2, got {self.stall_window}")
        return errors


def _section(name: str, data: Any, known: Iterable[str]) -> Dict[str, Any]:
    """Check that ``data`` is a mapping whose keys are all in ``known``."""
    if not isinstance(data, dict):
        raise ConfigError(f"{name} must be a mapping, got {type(data).__name__}")
    unknown = sorted(str(key) for key in set(data) - set(known))
    if unknown:
        raise ConfigError(f"unknown key(s) in {name}: {', '.join(unknown)}")
    return data


def _default_threads() -> int:
    return max(1, min(4, os.cpu_count() or 1))


@dataclass
class ZesimConfig:
    """Manages zesim configuration."""
    solver: SolverOptions = field(default_factory=SolverOptions)
    tolerances: Tolerances = field(default_factory=Tolerances)
    slack: float = 1e-6
    dimension_cap: int = 1296
    threads: int = field(default_factory=_default_threads)
    config_path: Optional[str] = None

    def __post_init__(self):
        if isinstance(self.solver, dict):
            self.solver = SolverOptions.from_dict(self.solver)
        if isinstance(self.tolerances, dict):
            self.tolerances = Tolerances.from_dict(self.tolerances)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'solver': self.solver.to_dict(),
            'tolerances': self.tolerances.to_dict(),
            'slack': self.slack,
            'dimension_cap': self.dimension_cap,
            'threads': self.threads,
        }

    def load(self) -> 'ZesimConfig':
        """Read settings from ``config_path`` (YAML or JSON). Missing file keeps defaults."""
        if not self.config_path:
            return self
        path = Path(self.config_path)
        if not path.exists():
            return self
        try:
            with open(path, 'r', encoding='utf-8') as f:
                if path.suffix in ('.yaml', '.yml'):
                    data = yaml.safe_load(f) or {}
                else:
                    data = json.load(f)
        except (yaml.YAMLError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot parse {path}: {e}") from e
        if isinstance(data, dict) and 'zesim' in data:
            data = data['zesim']
        data = _section(str(path), data, ('solver', 'tolerances', 'slack', 'dimension_cap', 'threads'))
        try:
            if 'solver' in data:
                solver = _section('solver', data['solver'], (fld.name for fld in fields(SolverOptions)))
                self.solver = SolverOptions.from_dict({**self.solver.to_dict(), **solver})
            if 'tolerances' in data:
                tolerances = _section('tolerances', data['tolerances'], (fld.name for fld in fields(Tolerances)))
                self.tolerances = Tolerances.from_dict({**self.tolerances.to_dict(), **tolerances})
            self.slack = float(data.get('slack', self.slack))
            self.dimension_cap = int(data.get('dimension_cap', self.dimension_cap))
            self.threads = int(data.get('threads', self.threads))
        except (TypeError, ValueError) as e:
            raise ConfigError(f"invalid value in {path}: {e}") from e
        return self

    def save(self) -> Path:
        if not self.config_path:
            raise ZesimError("config_path is not set")
        path = Path(self.config_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            if path.suffix in ('.yaml', '.yml'):
                yaml.dump({'zesim': self.to_dict()}, f, default_flow_style=False, sort_keys=False)
            else:
                json.dump({'zesim': self.to_dict()}, f, indent=2)
        return path

    def from_env(self, environ: Optional[Dict[str, str]] = None) -> 'ZesimConfig':
        """Apply ``ZESIM_THREADS`` when set to a positive integer."""
        env = os.environ if environ is None else environ
        raw = env.get(THREADS_ENV)
        if raw:
            try:
                threads = int(raw)
            except ValueError:
                raise ZesimError(f"{THREADS_ENV} must be an integer, got {raw!r}")
            if threads < 1:
                raise ZesimError(f"{THREADS_ENV} must be positive, got {threads}")
            self.threads = threads
        return self

    def validate(self) -> List[str]:
        errors = list(self.solver.validate())
        for name, value in self.tolerances.to_dict().items():
            if not value > 0:
                errors.append(f"Tolerance {name} must be positive, got {value}")
        if not self.slack > 0:
            errors.append(f"slack must be positive, got {self.slack}")
        if self.dimension_cap < 1:
            errors.append(f"dimension_cap must be positive, got {self.dimension_cap}")
        if self.threads < 1:
            errors.append(f"threads must be positive, got {self.threads}")
        return errors

    @classmethod
    def create_default(cls, config_path: Optional[str] = None) -> 'ZesimConfig':
        return cls(config_path=config_path)


DEFAULT_TOLERANCES = Tolerances()


def load_config(config_path: Optional[str] = None) -> ZesimConfig:
    """Load configuration from file and environment."""
    config = ZesimConfig(config_path=config_path).load().from_env()
    errors = config.validate()
    if errors:
        raise ZesimError("Invalid configuration: " + "; ".join(errors))
    return config


# ============================================================================
# JSON payloads
# ============================================================================

class MatrixPayload(BaseModel):
    """Row-major complex matrix: ``{"rows", "cols", "re", "im"}``."""
    rows: int = Field(ge=1)
    cols: int = Field(ge=1)
    re: List[float]
    im: List[float] = Field(default_factory=list)

    @model_validator(mode='after')
    def _check_shape(self) -> 'MatrixPayload':
        size = self.rows * self.cols
        if len(self.re) != size:
            raise ValueError(f"expected {size} real entries, got {len(self.re)}")
        if self.im and len(self.im) != size:
            raise ValueError(f"expected {size} imaginary entries, got {len(self.im)}")
        if not all(math.isfinite(x) for x in self.re + self.im):
            raise ValueError("matrix entries must be finite")
        return self

    def to_array(self) -> np.ndarray:
        out = np.array(self.re, dtype=complex)
        if self.im:
            out = out + 1j * np.array(self.im, dtype=float)
        return out.reshape(self.rows, self.cols)

    @classmethod
    def from_array(cls, matrix: np.ndarray) -> 'MatrixPayload':
        m = np.atleast_2d(np.asarray(matrix, dtype=complex))
        return cls(
            rows=m.shape[0],
            cols=m.shape[1],
            re=[float(x) for x in m.real.ravel()],
            im=[float(x) for x in m.imag.ravel()],
        )


class GraphPayload(BaseModel):
    """A Choi-Kraus operator space given by Kraus matrices or support vectors."""
    dimA: int = Field(ge=1)
    dimB: int = Field(ge=1)
    kraus_basis: Optional[List[MatrixPayload]] = None
    support_vectors: Optional[List[List[Tuple[float, float]]]] = None

    @model_validator(mode='after')
    def _one_source(self) -> 'GraphPayload':
        if (self.kraus_basis is None) == (self.support_vectors is None):
            raise ValueError("exactly one of kraus_basis or support_vectors is required")
        if self.kraus_basis is not None:
            for m in self.kraus_basis:
                if (m.rows, m.cols) != (self.dimB, self.dimA):
                    raise ValueError(f"Kraus matrices must be {self.dimB}x{self.dimA}")
        if self.support_vectors is not None:
            for v in self.support_vectors:
                if len(v) != self.dimA * self.dimB:
                    raise ValueError(f"support vectors must have length {self.dimA * self.dimB}")
        return self

    def kraus_arrays(self) -> List[np.ndarray]:
        return [m.to_array() for m in self.kraus_basis or []]

    def vector_arrays(self) -> List[np.ndarray]:
        return [np.array([complex(re, im) for re, im in v]) for v in self.support_vectors or []]


class ChannelPayload(BaseModel):
    """A channel given by its Kraus operators."""
    dimA: int = Field(ge=1)
    dimB: int = Field(ge=1)
    kraus: List[MatrixPayload] = Field(min_length=1)

    def kraus_arrays(self) -> List[np.ndarray]:
        return [m.to_array() for m in self.kraus]


class ClassicalGraphPayload(BaseModel):
    """Bipartite graph adjacency, indexed ``[b][a]``."""
    adjacency: List[List[bool]] = Field(min_length=1)

    @field_validator('adjacency')
    @classmethod
    def _rectangular(cls, value: List[List[bool]]) -> List[List[bool]]:
        widths = {len(row) for row in value}
        if len(widths) != 1 or 0 in widths:
            raise ValueError("adjacency must be a non-empty rectangular matrix")
        return value


class CertificatePayload(BaseModel):
    """Lower (S, U) or upper (V, T) certificate."""
    kind: str
    S: Optional[MatrixPayload] = None
    U: Optional[MatrixPayload] = None
    V: Optional[MatrixPayload] = None
    T: Optional[MatrixPayload] = None
    bound: Optional[float] = None
    margins: Dict[str, float] = Field(default_factory=dict)

    @model_validator(mode='after')
    def _check_kind(self) -> 'CertificatePayload':
        if self.kind == 'lower':
            if self.S is None or self.U is None:
                raise ValueError("lower certificates need S and U")
        elif self.kind == 'upper':
            if self.V is None or self.T is None:
                raise ValueError("upper certificates need V and T")
        else:
            raise ValueError(f"unknown certificate kind: {self.kind}")
        return self


class ResultPayload(BaseModel):
    """Result document written by ``zesim sigma --json``."""
    value: Optional[float]
    dualValue: Optional[float]
    status: str
    certificates: Dict[str, Any] = Field(default_factory=dict)


def parse_payload(model: type, data: Any) -> Any:
    """Validate ``data`` against a payload model, raising PayloadError."""
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise PayloadError(f"Invalid {model.__name__}: {e}") from e


def load_payload(model: type, file_path: str) -> Any:
    """Read a JSON (or YAML) file into a payload model."""
    path = Path(file_path)
    if not path.exists():
        raise PayloadError(f"File not found: {file_path}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            if path.suffix in ('.yaml', '.yml'):
                data = yaml.safe_load(f)
            else:
                data = json.load(f)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise PayloadError(f"Could not parse {file_path}: {e}") from e
    return parse_payload(model, data)
