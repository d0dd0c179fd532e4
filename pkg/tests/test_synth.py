import json
import random

import jsonschema
import pytest

from joinguard.assess import assess_pair, leakage_signal
from joinguard.join import join
from joinguard.metrics import uniqueness_report
from joinguard.synth import (
    GeneratorParams,
    LabeledCorpus,
    dump_corpus,
    generate_corpus,
    generate_pair,
    load_corpus,
    pair_kinds,
    pair_seed_for,
    splitmix64,
)


@pytest.fixture(scope="module")
def corpus500():
    return generate_corpus(GeneratorParams(), 500, 7)


def test_splitmix64_reference_values():
    # first outputs of the SplitMix64 generator seeded with 0
    assert splitmix64(0) == 0xE220A8397B1DCDAF
    assert splitmix64(0x9E3779B97F4A7C15) == 0x6E789E6AA1B965F4


def test_pair_seed_mixing():
    assert pair_seed_for(7, 0) == 7 ^ splitmix64(0)
    assert len({pair_seed_for(7, i) for i in range(1000)}) == 1000


def test_pair_shape_and_keys():
    a, b, spec = generate_pair(GeneratorParams(), 11)
    for t in (a, b):
        assert t.column_names[:2] == ("age", "gender")
        ages = {int(r[0]) for r in t.rows}
        assert min(ages) >= 18 and max(ages) <= 90
        assert {r[1] for r in t.rows} <= {"F", "M"}
    assert spec.keys == (("age", "age"), ("gender", "gender"))
    assert spec.kind == "inner"


def test_pair_is_deterministic():
    p = GeneratorParams()
    assert generate_pair(p, 5) == generate_pair(p, 5)
    assert generate_pair(p, 5, 1) != generate_pair(p, 5, 0)


def test_id_column_forces_uniqueness():
    p = GeneratorParams(duplicate_rate=(0.0, 0.0), id_column_prob=1.0)
    for seed in range(5):
        a, b, _ = generate_pair(p, seed)
        assert "record_id" in a.column_names
        assert uniqueness_report(a).distinct_ratio == 1.0
        assert uniqueness_report(b).distinct_ratio == 1.0


def test_duplication_breaks_uniqueness():
    p = GeneratorParams(rows_a=(100, 100), duplicate_rate=(0.5, 0.5), id_column_prob=0.0)
    a, _, _ = generate_pair(p, 1)
    assert uniqueness_report(a).distinct_ratio < 1.0


def test_kinds_do_not_depend_on_attempt():
    p = GeneratorParams(id_column_prob=0.5)
    for seed in range(20):
        kinds = pair_kinds(p, seed)
        for attempt in range(3):
            a, b, _ = generate_pair(p, seed, attempt)
            assert ("record_id" in a.column_names) == (kinds[0] == "registry")
            assert ("record_id" in b.column_names) == (kinds[1] == "registry")


@pytest.mark.parametrize(
    "kwargs",
    [
        {"rows_a": (10, 5)},
        {"rows_b": (0, 5)},
        {"duplicate_rate": (0.0, 0.95)},
        {"id_column_prob": 1.5},
        {"gender_values": 0},
        {"cohort_density": (0.0, 4.0)},
        {"max_retries": -1},
        {"age_range": (18,)},
    ],
)
def test_params_validation(kwargs):
    with pytest.raises(ValueError):
        GeneratorParams(**kwargs)


def test_params_dict_round_trip():
    p = GeneratorParams(rows_a=(5, 9), duplicate_rate=(0.1, 0.2))
    assert GeneratorParams.from_dict(json.loads(json.dumps(p.to_dict()))) == p


def test_single_example_recomposition():
    corpus = generate_corpus(GeneratorParams(), 1, 123)
    (ex,) = corpus.examples
    a, b, spec = generate_pair(corpus.params, ex.pair_seed, ex.meta["attempt"])
    u_a = uniqueness_report(a).distinct_ratio
    u_b = uniqueness_report(b).distinct_ratio
    u_ab = uniqueness_report(join(a, b, spec)).distinct_ratio
    assert ex.features == (u_a, u_b)
    assert ex.target == leakage_signal(u_a, u_b, u_ab)


def test_corpus_rejects_zero_pairs():
    with pytest.raises(ValueError):
        generate_corpus(GeneratorParams(), 0, 1)


def test_serial_and_parallel_agree():
    p = GeneratorParams(rows_a=(50, 300), rows_b=(50, 300))
    serial = generate_corpus(p, 24, 9, workers=1)
    parallel = generate_corpus(p, 24, 9, workers=3)
    assert dump_corpus(serial) == dump_corpus(parallel)


def test_skipped_pairs_are_counted():
    # one-row tables on a wide age range almost never meet
    p = GeneratorParams(rows_a=(1, 1), rows_b=(1, 1), id_column_prob=1.0, max_retries=0)
    corpus = generate_corpus(p, 10, 2)
    assert corpus.skipped == 10 - len(corpus.examples)
    assert corpus.skipped > 0


def test_corpus_byte_identical_and_round_trip(corpus500, schema):
    text = dump_corpus(corpus500)
    assert text == dump_corpus(generate_corpus(GeneratorParams(), 500, 7))
    lines = text.splitlines()
    jsonschema.validate(json.loads(lines[0]), schema("corpus_header"))
    example_schema = schema("corpus_example")
    for line in lines[1:]:
        jsonschema.validate(json.loads(line), example_schema)
    again = load_corpus(text)
    assert again.examples == corpus500.examples
    assert again.params == corpus500.params
    assert dump_corpus(again) == text


def test_corpus_invariants_and_coverage(corpus500):
    assert len(corpus500) + corpus500.skipped == 500
    for ex in corpus500.examples:
        assert all(0.0 < f <= 1.0 for f in ex.features)
        assert -1.0 <= ex.target <= 1.0
    ua = [ex.features[0] for ex in corpus500.examples]
    assert min(ua) <= 0.2 and max(ua) == 1.0


def test_label_integrity(corpus500):
    rng = random.Random(0)
    for ex in rng.sample(corpus500.examples, 20):
        a, b, spec = generate_pair(corpus500.params, ex.pair_seed, ex.meta["attempt"])
        r = assess_pair(a, b, spec)
        assert r.signal == ex.target
        assert (r.report_a.distinct_ratio, r.report_b.distinct_ratio) == ex.features


def test_split_is_by_index(corpus500):
    train, test = corpus500.split(0.8)
    assert len(train) == round(len(corpus500) * 0.8)
    assert train.examples + test.examples == corpus500.examples
    assert isinstance(test, LabeledCorpus)


def test_load_corpus_errors():
    with pytest.raises(ValueError, match="line 1"):
        load_corpus("{not json}\n")
    with pytest.raises(ValueError, match="line 2"):
        load_corpus('{"corpus": {}}\n{"features": [0.5, 0.5]}\n')
