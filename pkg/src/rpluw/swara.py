"""SWARA and fuzzy SWARA criterion weighting plus weighted-sum parent scoring."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence


class MCDMError(ValueError):
    """Invalid importance data or a malformed scoring request."""


class WeightConfigError(MCDMError):
    """Unknown preset, inverted bounds or similar configuration fault."""


class NoCandidate(LookupError):
    """Raised by :func:`select_parent` when there is nothing to choose from."""


@dataclass(frozen=True)
class CriterionSpec:
    name: str
    orientation: str  # "benefit" or "cost"
    index: int


DEFAULT_CRITERIA = (
    CriterionSpec("Energy", "benefit", 0),
    CriterionSpec("Depth", "cost", 1),
    CriterionSpec("Hop Count", "cost", 2),
    CriterionSpec("Link Metrics", "benefit", 3),
    CriterionSpec("Other Metrics", "cost", 4),
)
CRITERION_NAMES = tuple(c.name for c in DEFAULT_CRITERIA)


@dataclass(frozen=True)
class TriangularFuzzyNumber:
    lower: float
    modal: float
    upper: float

    def __post_init__(self):
        if not self.lower <= self.modal <= self.upper:
            raise MCDMError(f"triangular fuzzy number needs lower <= modal <= upper, got "
                            f"({self.lower}, {self.modal}, {self.upper})")

    @classmethod
    def crisp(cls, x: float) -> "TriangularFuzzyNumber":
        return cls(x, x, x)

    def __add__(self, other: "TriangularFuzzyNumber") -> "TriangularFuzzyNumber":
        return TriangularFuzzyNumber(self.lower + other.lower, self.modal + other.modal,
                                     self.upper + other.upper)

    def __truediv__(self, other: "TriangularFuzzyNumber") -> "TriangularFuzzyNumber":
        if other.lower <= 0:
            raise MCDMError(f"fuzzy divisor must be strictly positive, lower={other.lower}")
        return TriangularFuzzyNumber(self.lower / other.upper, self.modal / other.modal,
                                     self.upper / other.lower)


ONE = TriangularFuzzyNumber(1.0, 1.0, 1.0)


@dataclass(frozen=True)
class WeightVector:
    weights: tuple[float, ...]
    provenance: str
    names: tuple[str, ...] = CRITERION_NAMES
    # intermediates of the SWARA chain, empty for presets
    k: tuple = ()
    q: tuple = ()

    def __post_init__(self):
        if len(self.names) != len(self.weights):
            raise MCDMError("weights and criterion names differ in length")
        tol = 1e-5 if self.provenance.startswith("preset") else 1e-9
        if any(not 0.0 < w <= 1.0 for w in self.weights):
            raise MCDMError(f"weights must lie in (0, 1]: {self.weights}")
        if abs(sum(self.weights) - 1.0) > tol:
            raise MCDMError(f"weights sum to {sum(self.weights)!r}, not 1")

    def __len__(self):
        return len(self.weights)

    def __iter__(self):
        return iter(self.weights)

    def __getitem__(self, i):
        return self.weights[i]

    def reordered(self, names: Sequence[str]) -> "WeightVector":
        """The same weights re-aligned to ``names`` (e.g. the default criterion order)."""
        lookup = dict(zip(self.names, self.weights))
        missing = set(names) ^ set(lookup)
        if missing:
            raise MCDMError(f"criterion names do not match: {sorted(missing)}")
        return WeightVector(tuple(lookup[n] for n in names), self.provenance, tuple(names))


def swara_weights(s_values: Sequence[float], names: Sequence[str] | None = None) -> WeightVector:
    """Crisp SWARA.

    ``s_values`` holds the comparative importance of each criterion against
    the previous one, criteria ordered most important first; its length is
    one less than the number of criteria.
    """
    s = [float(x) for x in s_values]
    for j, x in enumerate(s, start=2):
        if not x >= 0:
            raise MCDMError(f"comparative importance s_{j} must be >= 0, got {x}")
    k = [1.0] + [x + 1.0 for x in s]
    q = [1.0]
    for kj in k[1:]:
        q.append(q[-1] / kj)
    total = math.fsum(q)
    w = tuple(qj / total for qj in q)
    names = tuple(names) if names is not None else _default_names(len(w))
    return WeightVector(w, "swara", names, tuple(k), tuple(q))


def defuzzify(t: TriangularFuzzyNumber, method: str = "centroid") -> float:
    if method != "centroid":
        raise WeightConfigError(f"unknown defuzzification method {method!r}")
    return (t.lower + t.modal + t.upper) / 3.0


def fuzzy_swara_weights(s_values: Sequence[TriangularFuzzyNumber], names: Sequence[str] | None = None,
                        defuzz: str = "centroid") -> WeightVector:
    """Fuzzy SWARA with triangular importance ratios.

    q_j are propagated in fuzzy arithmetic, defuzzified, then normalised.
    Degenerate (crisp) inputs give the crisp SWARA weights.
    """
    for j, t in enumerate(s_values, start=2):
        if t.lower < 0:
            raise MCDMError(f"comparative importance s_{j} must be >= 0, got {t}")
    k = [ONE] + [t + ONE for t in s_values]
    q = [ONE]
    for kj in k[1:]:
        q.append(q[-1] / kj)
    crisp = [defuzzify(qj, defuzz) for qj in q]
    total = math.fsum(crisp)
    w = tuple(c / total for c in crisp)
    names = tuple(names) if names is not None else _default_names(len(w))
    return WeightVector(w, "fuzzy-swara", names, tuple(k), tuple(q))


def _default_names(n: int) -> tuple[str, ...]:
    if n == len(CRITERION_NAMES):
        return CRITERION_NAMES
    return tuple(f"C{i + 1}" for i in range(n))


# Published vectors, kept as text so they can be emitted at their printed precision.
PRESET_TEXT = {
    "preset-paper-swara": ("0.086279", "0.158697", "0.291407", "0.343035", "0.120582"),
    "preset-paper-fuzzy": ("0.088090", "0.162029", "0.296526", "0.330238", "0.123114"),
}
_PRESET_ALIASES = {
    "paper-swara": "preset-paper-swara",
    "paper-fuzzy": "preset-paper-fuzzy",
    "swara": "preset-paper-swara",
    "fuzzy": "preset-paper-fuzzy",
}


def preset_weights(scheme: str) -> WeightVector:
    key = _PRESET_ALIASES.get(scheme, scheme)
    if key not in PRESET_TEXT:
        raise WeightConfigError(f"unknown weight preset {scheme!r}; choose one of {sorted(PRESET_TEXT)}")
    return WeightVector(tuple(float(x) for x in PRESET_TEXT[key]), key)


# ---------------------------------------------------------------- attributes

ATTRIBUTES = ("hop_count", "residual_energy_j", "arssi_db", "delay_s", "etx", "delivery_rate", "depth_m")


@dataclass(frozen=True)
class AttributeSnapshot:
    hop_count: float
    residual_energy_j: float
    arssi_db: float
    delay_s: float
    etx: float
    delivery_rate: float
    depth_m: float

    def __post_init__(self):
        if self.etx < 1:
            raise MCDMError(f"etx must be >= 1, got {self.etx}")
        if not 0.0 <= self.delivery_rate <= 1.0:
            raise MCDMError(f"delivery_rate must lie in [0, 1], got {self.delivery_rate}")
        if self.hop_count < 0:
            raise MCDMError(f"hop_count must be >= 0, got {self.hop_count}")


DEFAULT_BOUNDS: Mapping[str, tuple[float, float]] = {
    "residual_energy_j": (0.0, 50.0),
    "depth_m": (0.0, 500.0),
    "hop_count": (0.0, 32.0),
    "delay_s": (0.0, 10.0),
    "etx": (1.0, 10.0),
    "arssi_db": (-120.0, -30.0),
    "delivery_rate": (0.0, 1.0),
}


def check_bounds(bounds: Mapping[str, tuple[float, float]]):
    for name, (lo, hi) in bounds.items():
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise WeightConfigError(f"bounds for {name} must be finite with min < max, got ({lo}, {hi})")


def empirical_bounds(snapshots: Iterable[AttributeSnapshot],
                     fallback: Mapping[str, tuple[float, float]] = DEFAULT_BOUNDS) -> dict[str, tuple[float, float]]:
    """Per-attribute (min, max) over the candidate set.

    An attribute whose observed values do not spread falls back to the static
    bounds. Delivery rate is already a ratio and always uses ``[0, 1]``.
    """
    snaps = list(snapshots)
    out = {}
    for name in ATTRIBUTES:
        if name == "delivery_rate" or len(snaps) < 2:
            out[name] = fallback[name]
            continue
        vals = [getattr(s, name) for s in snaps]
        lo, hi = min(vals), max(vals)
        out[name] = (lo, hi) if lo < hi else fallback[name]
    return out


def _benefit(x, lo, hi):
    return min(1.0, max(0.0, (x - lo) / (hi - lo)))


def _cost(x, lo, hi):
    return min(1.0, max(0.0, (hi - x) / (hi - lo)))


def normalize_attributes(snapshot: AttributeSnapshot,
                         bounds: Mapping[str, tuple[float, float]] = DEFAULT_BOUNDS) -> tuple[float, ...]:
    """Collapse the seven routing attributes onto the five criteria, each in [0, 1].

    Order: Energy, Depth, Hop Count, Link Metrics, Other Metrics. Link Metrics
    is the mean of normalised ARSSI, ETX and delivery rate; Other Metrics is
    the normalised delay.
    """
    check_bounds(bounds)
    b = bounds
    link = (_benefit(snapshot.arssi_db, *b["arssi_db"])
            + _cost(snapshot.etx, *b["etx"])
            + _benefit(snapshot.delivery_rate, *b["delivery_rate"])) / 3.0
    return (
        _benefit(snapshot.residual_energy_j, *b["residual_energy_j"]),
        _cost(snapshot.depth_m, *b["depth_m"]),
        _cost(snapshot.hop_count, *b["hop_count"]),
        link,
        _cost(snapshot.delay_s, *b["delay_s"]),
    )


def node_value(normalized: Sequence[float], weights: WeightVector | Sequence[float]) -> float:
    w = list(weights)
    if len(normalized) != len(w):
        raise MCDMError(f"criterion vector has {len(normalized)} entries, weights have {len(w)}")
    return math.fsum(x * wk for x, wk in zip(normalized, w))


def select_parent(candidates: Iterable[tuple[int, float]]):
    """Argmax of NodeValue; ties go to the lowest node id."""
    best = None
    for node_id, value in candidates:
        if best is None or value > best[1] or (value == best[1] and node_id < best[0]):
            best = (node_id, value)
    if best is None:
        raise NoCandidate("no candidate parents")
    return best[0]


# ---------------------------------------------------------------- assessment files

@dataclass
class Assessment:
    """Ordered criteria (most important first) with their comparative importance."""

    names: list[str] = field(default_factory=list)
    crisp: list[float] = field(default_factory=list)
    fuzzy: list[TriangularFuzzyNumber] = field(default_factory=list)
    is_fuzzy: bool = False

    def weights(self) -> WeightVector:
        if self.is_fuzzy:
            return fuzzy_swara_weights(self.fuzzy[1:], self.names)
        return swara_weights(self.crisp[1:], self.names)


def parse_assessment(text: str) -> Assessment:
    """Parse a criteria-assessment file.

    One criterion per line, most important first, ``name: s`` for crisp or
    ``name: l, m, u`` for triangular values. The first criterion carries no
    value (or ``-``). ``#`` starts a comment.
    """
    out = Assessment()
    kinds = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, sep, rest = line.partition(":")
        name = name.strip()
        if (not sep and out.names) or not name:
            raise MCDMError(f"line {lineno}: expected 'criterion: value', got {raw!r}")
        if name in out.names:
            raise MCDMError(f"line {lineno}: duplicate criterion {name!r}")
        rest = rest.strip()
        first = not out.names
        out.names.append(name)
        if first and rest in ("", "-"):
            out.crisp.append(0.0)
            out.fuzzy.append(TriangularFuzzyNumber.crisp(0.0))
            continue
        if rest in ("", "-"):
            raise MCDMError(f"line {lineno}: criterion {name!r} needs a comparative importance")
        try:
            parts = [float(p) for p in rest.split(",")]
        except ValueError:
            raise MCDMError(f"line {lineno}: cannot parse {rest!r} as numbers") from None
        try:
            if len(parts) == 1:
                kinds.add("crisp")
                out.crisp.append(parts[0])
                out.fuzzy.append(TriangularFuzzyNumber.crisp(parts[0]))
            elif len(parts) == 3:
                kinds.add("fuzzy")
                tfn = TriangularFuzzyNumber(*parts)
                out.fuzzy.append(tfn)
                out.crisp.append(tfn.modal)
            else:
                raise MCDMError(f"expected 1 or 3 values, got {len(parts)}")
        except MCDMError as exc:
            raise MCDMError(f"line {lineno}: {exc}") from None
        if min(parts) < 0:
            raise MCDMError(f"line {lineno}: comparative importance must be >= 0")
    if not out.names:
        raise MCDMError("assessment file lists no criteria")
    out.is_fuzzy = "fuzzy" in kinds
    return out
