"""Seeded generator of table pairs and of labeled training corpora.

Every generated table shares ``age`` and ``gender`` with its partner, and
is one of two kinds:

registry
    an identified table covering the whole age range uniformly, carrying a
    unique ``record_id`` column (fully unique, like a patient register).
cohort
    a de-identified table whose ages cluster around a centre (truncated
    normal).  Its spread follows from the row count and a target peak
    density (rows per age/gender cell at the mode), so cohorts are dense
    in the middle and sparse in the tails.

When two cohorts are paired they model neighbouring age bands: each centre
sits ``cohort_separation`` standard deviations away from a shared boundary
age, so the sources meet only in their sparse tails.  A registry is paired
with a cohort placed anywhere in the age range.

Corpus labels come from actually running :func:`joinguard.assess.assess_pair`
on every generated pair.
"""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import IO, Iterable

import numpy as np

from .assess import assess_pair
from .errors import AssessmentError, JoinExplosionError
from .join import JoinSpec, default_max_rows
from .tabular import ColumnSpec, IDENTIFIER, QUASI_IDENTIFIER, ATTRIBUTE, Table

log = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
CORPUS_FORMAT = "joinguard-corpus/1"


def splitmix64(x: int) -> int:
    """The SplitMix64 finalizer; a fixed 64-bit mixing function."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def pair_seed_for(master_seed: int, index: int) -> int:
    return (master_seed & MASK64) ^ splitmix64(index)


def _range(value, name, lo=None, hi=None, integer=False):
    if len(value) != 2:
        raise ValueError(f"{name} must be a (low, high) pair")
    a, b = value
    if a > b:
        raise ValueError(f"{name} is empty: {value!r}")
    if lo is not None and a < lo:
        raise ValueError(f"{name} lower bound must be >= {lo}")
    if hi is not None and b > hi:
        raise ValueError(f"{name} upper bound must be <= {hi}")
    if integer and not (float(a).is_integer() and float(b).is_integer()):
        raise ValueError(f"{name} bounds must be integers")
    return (int(a), int(b)) if integer else (float(a), float(b))


@dataclass(frozen=True)
class GeneratorParams:
    rows_a: tuple = (100, 2000)
    rows_b: tuple = (100, 2000)
    age_range: tuple = (18, 90)
    gender_values: int = 2
    extra_cols_a: tuple = (1, 1)
    extra_cols_b: tuple = (1, 1)
    cardinality: tuple = (4, 10)
    duplicate_rate: tuple = (0.0, 0.02)
    id_column_prob: float = 0.2
    cohort_density: tuple = (8.0, 40.0)
    cohort_separation: tuple = (2.75, 3.75)
    max_retries: int = 25

    def __post_init__(self):
        fix = lambda name, v: object.__setattr__(self, name, v)
        fix("rows_a", _range(self.rows_a, "rows_a", lo=1, integer=True))
        fix("rows_b", _range(self.rows_b, "rows_b", lo=1, integer=True))
        fix("age_range", _range(self.age_range, "age_range", integer=True))
        fix("extra_cols_a", _range(self.extra_cols_a, "extra_cols_a", lo=0, integer=True))
        fix("extra_cols_b", _range(self.extra_cols_b, "extra_cols_b", lo=0, integer=True))
        fix("cardinality", _range(self.cardinality, "cardinality", lo=1, integer=True))
        fix("duplicate_rate", _range(self.duplicate_rate, "duplicate_rate", lo=0.0, hi=0.9))
        fix("cohort_density", _range(self.cohort_density, "cohort_density"))
        fix("cohort_separation", _range(self.cohort_separation, "cohort_separation", lo=0.0))
        if self.cohort_density[0] <= 0:
            raise ValueError("cohort_density must be positive")
        if self.gender_values < 1:
            raise ValueError("gender_values must be >= 1")
        if not (0.0 <= self.id_column_prob <= 1.0):
            raise ValueError("id_column_prob must lie in [0, 1]")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, data: dict) -> "GeneratorParams":
        return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in data.items()})


def _gender_tokens(k: int) -> list[str]:
    return ["F", "M"] if k == 2 else [f"G{i}" for i in range(k)]


def _truncated_normal_ages(rng, n, centre, sd, lo, hi):
    ages = np.rint(rng.normal(centre, sd, n))
    bad = (ages < lo) | (ages > hi)
    while bad.any():
        ages[bad] = np.rint(rng.normal(centre, sd, int(bad.sum())))
        bad = (ages < lo) | (ages > hi)
    return ages.astype(np.int64)


def _cohort_sd(n, density, gender_values):
    # peak cell count = n / (gender_values * sd * sqrt(2 pi))
    return float(np.clip(n / (gender_values * density * math.sqrt(2 * math.pi)), 1.0, 20.0))


def _build_table(rng, label, kind, n, centre, sd, params: GeneratorParams, extra_cols) -> Table:
    lo, hi = params.age_range
    if kind == "registry":
        ages = rng.integers(lo, hi + 1, n)
    else:
        ages = _truncated_normal_ages(rng, n, centre, sd, lo, hi)
    genders = rng.integers(0, params.gender_values, n)
    n_extra = int(rng.integers(extra_cols[0], extra_cols[1] + 1))
    cards = rng.integers(params.cardinality[0], params.cardinality[1] + 1, n_extra)
    extras = [rng.integers(0, c, n) for c in cards]

    gtok = _gender_tokens(params.gender_values)
    rows = [
        [str(a), gtok[g]] + [f"v{int(e[i])}" for e in extras]
        for i, (a, g) in enumerate(zip(ages.tolist(), genders.tolist()))
    ]
    rate = float(rng.uniform(*params.duplicate_rate))
    n_dup = min(int(rate * n), n - 1)
    if n_dup > 0:
        targets = np.sort(rng.choice(np.arange(1, n), size=n_dup, replace=False))
        sources = (rng.random(n_dup) * targets).astype(np.int64)
        for t, s in zip(targets.tolist(), sources.tolist()):
            rows[t] = list(rows[s])

    columns = [ColumnSpec("age", QUASI_IDENTIFIER), ColumnSpec("gender", QUASI_IDENTIFIER)]
    columns += [ColumnSpec(f"attr{j + 1}", ATTRIBUTE) for j in range(n_extra)]
    if kind == "registry":
        columns.append(ColumnSpec("record_id", IDENTIFIER))
        for i, row in enumerate(rows):
            row.append(f"{label}{i:05d}")
    return Table(tuple(columns), tuple(map(tuple, rows)), label)


def pair_kinds(params: GeneratorParams, pair_seed: int) -> tuple[str, str]:
    rng = np.random.default_rng([pair_seed & MASK64, 0])
    return tuple("registry" if rng.random() < params.id_column_prob else "cohort" for _ in "ab")


def generate_pair(params: GeneratorParams, pair_seed: int, attempt: int = 0):
    """Return ``(table_a, table_b, join_spec)`` for one seed.

    The table kinds depend on ``pair_seed`` only; ``attempt`` re-draws the
    layout and contents (used to replace pairs whose join is empty).
    """
    kind_a, kind_b = pair_kinds(params, pair_seed)
    rng = np.random.default_rng([pair_seed & MASK64, 1, attempt])
    lo, hi = params.age_range

    n_a = int(rng.integers(params.rows_a[0], params.rows_a[1] + 1))
    n_b = int(rng.integers(params.rows_b[0], params.rows_b[1] + 1))
    sd_a = _cohort_sd(n_a, rng.uniform(*params.cohort_density), params.gender_values)
    sd_b = _cohort_sd(n_b, rng.uniform(*params.cohort_density), params.gender_values)
    if kind_a == "cohort" and kind_b == "cohort":
        margin = min(12.0, (hi - lo) / 4)
        boundary = rng.uniform(lo + margin, hi - margin)
        side = 1.0 if rng.random() < 0.5 else -1.0
        centre_a = boundary - side * rng.uniform(*params.cohort_separation) * sd_a
        centre_b = boundary + side * rng.uniform(*params.cohort_separation) * sd_b
    else:
        margin = min(7.0, (hi - lo) / 4)
        centre_a, centre_b = rng.uniform(lo + margin, hi - margin, 2)

    a = _build_table(rng, "A", kind_a, n_a, centre_a, sd_a, params, params.extra_cols_a)
    b = _build_table(rng, "B", kind_b, n_b, centre_b, sd_b, params, params.extra_cols_b)
    return a, b, JoinSpec.on("age", "gender", max_output_rows=default_max_rows())


@dataclass(frozen=True)
class LabeledExample:
    features: tuple
    target: float
    pair_seed: int
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "features": list(self.features),
            "target": self.target,
            "pair_seed": self.pair_seed,
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LabeledExample":
        return cls(tuple(data["features"]), data["target"], data["pair_seed"], data.get("meta", {}))


@dataclass
class LabeledCorpus:
    examples: list
    master_seed: int
    params: GeneratorParams
    skipped: int = 0

    def __len__(self):
        return len(self.examples)

    def split(self, train_fraction: float = 0.8):
        """Split by pair index: the first ``train_fraction`` of pairs train."""
        cut = int(round(len(self.examples) * train_fraction))
        mk = lambda ex: LabeledCorpus(ex, self.master_seed, self.params, 0)
        return mk(self.examples[:cut]), mk(self.examples[cut:])


def label_pair(params: GeneratorParams, index: int, master_seed: int):
    """Generate and label pair ``index``; returns a LabeledExample or None if skipped."""
    seed = pair_seed_for(master_seed, index)
    for attempt in range(params.max_retries + 1):
        a, b, spec = generate_pair(params, seed, attempt)
        try:
            result = assess_pair(a, b, spec)
        except (AssessmentError, JoinExplosionError):
            continue
        kinds = pair_kinds(params, seed)
        return LabeledExample(
            features=(result.report_a.distinct_ratio, result.report_b.distinct_ratio),
            target=result.signal,
            pair_seed=seed,
            meta={
                "index": index,
                "attempt": attempt,
                "kinds": list(kinds),
                "rows_a": a.n_rows,
                "rows_b": b.n_rows,
                "rows_ab": result.report_ab.n_rows,
                "u_ab": result.report_ab.distinct_ratio,
            },
        )
    return None


def _label_star(args):
    return label_pair(*args)


def generate_corpus(
    params: GeneratorParams, n_pairs: int, master_seed: int, workers: int = 1
) -> LabeledCorpus:
    """Label ``n_pairs`` generated pairs.

    Pair ``i`` uses seed ``master_seed XOR splitmix64(i)``, so the result is
    the same for any ``workers`` count.
    """
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    jobs = [(params, i, master_seed) for i in range(n_pairs)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_label_star, jobs, chunksize=8))
    else:
        results = [label_pair(*job) for job in jobs]
    examples = [r for r in results if r is not None]
    skipped = n_pairs - len(examples)
    if skipped:
        log.warning("skipped %d of %d pairs after %d retries", skipped, n_pairs, params.max_retries)
    return LabeledCorpus(examples, master_seed, params, skipped)


def dump_corpus(corpus: LabeledCorpus) -> str:
    """JSON-lines text: one header record, then one example per line."""
    header = {
        "format": CORPUS_FORMAT,
        "master_seed": corpus.master_seed,
        "params": corpus.params.to_dict(),
        "n_examples": len(corpus.examples),
        "skipped": corpus.skipped,
    }
    lines = [json.dumps({"corpus": header}, sort_keys=True)]
    lines += [json.dumps(ex.to_dict(), sort_keys=True) for ex in corpus.examples]
    return "\n".join(lines) + "\n"


def load_corpus(source: str | IO | Iterable[str]) -> LabeledCorpus:
    """Parse corpus JSON-lines; the header record is optional."""
    if isinstance(source, str):
        source = source.splitlines()
    elif hasattr(source, "read"):
        source = source.read().splitlines()
    master_seed, params, skipped = 0, GeneratorParams(), 0
    examples = []
    for lineno, line in enumerate(source, 1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            if "corpus" in record:
                head = record["corpus"]
                master_seed = head.get("master_seed", 0)
                params = GeneratorParams.from_dict(head.get("params", {}))
                skipped = head.get("skipped", 0)
            else:
                examples.append(LabeledExample.from_dict(record))
        except (ValueError, KeyError, TypeError) as exc:
            raise ValueError(f"corpus line {lineno}: {exc}") from None
    return LabeledCorpus(examples, master_seed, params, skipped)
