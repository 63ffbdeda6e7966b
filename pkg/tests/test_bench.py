"""Benchmark harness: spec parsing, domain refs, timing, result tables."""

import json

import pytest

from elang.bench import (
    REFERENCE_INSTANCES_AT_15,
    domain_label,
    enrich_with_conclusions,
    ground_for,
    inject_irrelevant,
    load_spec,
    parse_spec,
    resolve_domain,
    run_experiment,
    time_answer,
)
from elang.grounding import ground
from elang.model import HProp
from elang.specfiles import SpecError


def spec_text(**overrides):
    base = {
        "name": "t",
        "family": "representation",
        "domain": "corpus:zoo_direct.e",
        "scenario": "corpus:chain_scenario.e",
        "query": "skeptical { animal_pos(dumpo,p3) holds-at 3 } horizon 4",
        "repeats": "1",
    }
    base.update(overrides)
    lines = []
    for k, v in base.items():
        if v is None:
            continue
        if isinstance(v, (list, tuple)):
            lines += ["%s = %s" % (k, item) for item in v]
        else:
            lines.append("%s = %s" % (k, v))
    return "\n".join(lines) + "\n"


def test_parse_spec_fields():
    spec = parse_spec(spec_text(inject=["0", "2"], sizes="3 5", budget="100", slice="on"))
    assert spec.family == "representation"
    assert spec.domains == ["corpus:zoo_direct.e"]
    assert spec.inject == [0, 2]
    assert spec.sizes == [3, 5]
    assert spec.budget == 100
    assert spec.slice is True
    assert spec.repeats == 1


def test_parse_spec_rejects_bad_values():
    with pytest.raises(SpecError):
        parse_spec(spec_text(family="nonsense"))
    with pytest.raises(SpecError):
        parse_spec(spec_text(slice="maybe"))
    with pytest.raises(SpecError):
        parse_spec(spec_text(backend="z3"))
    with pytest.raises(SpecError):
        parse_spec(spec_text() + "\n[extra]\nname = x\n")


def test_resolve_domain_refs(tmp_path):
    d = resolve_domain("corpus:bulb.e")
    assert "light" in d.signature.fluents
    gen = resolve_domain("gen:indirect:4")
    assert len(gen.signature.sorts["position"]) == 4
    assert "feed_animal" not in gen.signature.actions
    fed = resolve_domain("gen:dual:3:feed")
    assert "feed_animal" in fed.signature.actions
    path = tmp_path / "tiny.e"
    path.write_text("fluent f.\nf holds-at 0.\n")
    assert "f" in resolve_domain(str(path)).signature.fluents
    with pytest.raises(SpecError):
        resolve_domain("corpus:no_such_domain.e")
    with pytest.raises(SpecError):
        resolve_domain("gen:bogus:4")


def test_domain_label():
    assert domain_label("corpus:zoo_direct.e") == "zoo_direct"
    assert domain_label("gen:dual:6:feed") == "dual-6-feed"
    assert domain_label("/some/dir/file.e") == "file"


def test_inject_irrelevant_adds_disjoint_occurrences():
    domain = resolve_domain("gen:dual:3:feed")
    base_occ = sum(isinstance(p, HProp) for p in domain.propositions)
    bigger = inject_irrelevant(domain, 3, horizon=6)
    occs = [p for p in bigger.propositions if isinstance(p, HProp)]
    assert len(occs) == base_occ + 3
    assert all(o.action.name == "feed_animal" for o in occs[base_occ:])
    # the original description is untouched
    assert sum(isinstance(p, HProp) for p in domain.propositions) == base_occ
    with pytest.raises(SpecError):
        inject_irrelevant(resolve_domain("gen:dual:3"), 1, horizon=6)


def test_enrich_keeps_only_necessary_conclusions():
    from elang.bench import assemble

    domain = assemble("corpus:zoo_direct.e", ["corpus:chain_scenario.e"])
    theory = ground(domain, 4)
    probes = [
        "animal_pos(dumpo,p3) holds-at 3.",   # forced by the move chain
        "animal_pos(dumpo,p2) holds-at 3.",   # false at 3
    ]
    enriched, added = enrich_with_conclusions(domain, theory, probes, budget=None)
    assert added == 1
    assert len(enriched.propositions) == len(domain.propositions) + 1


def test_time_answer_median_and_determinism():
    from elang.bench import assemble

    domain = assemble("corpus:bulb.e", [])
    theory = ground(domain, 4)
    timed = time_answer(
        theory,
        "credulous { light holds-at 3 } horizon 4",
        domain,
        repeats=3,
        budget=None,
        backend="engine",
        use_slice=False,
    )
    assert timed.answer == "true"
    assert len(timed.runs) == 3
    assert timed.median_s == sorted(timed.runs)[1]


def test_reference_constant():
    assert REFERENCE_INSTANCES_AT_15 == 25000


def test_representation_family_end_to_end(tmp_path):
    spec = parse_spec(spec_text(domain=["corpus:zoo_direct.e"], repeats="1"))
    table = run_experiment(spec)
    assert table.columns[0] == "domain"
    assert len(table.rows) == 1
    row = table.rows[0]
    assert row["domain"] == "zoo_direct"
    assert row["fragment"] is True
    assert row["agree"] is True
    paths = table.write(tmp_path)
    tsv = (tmp_path / "t.tsv").read_text()
    assert tsv.startswith("%")
    meta = json.loads(tsv.splitlines()[0][1:].strip())
    assert meta["name"] == "t" and meta["family"] == "representation"
    header = tsv.splitlines()[1].split("\t")
    cells = dict(zip(header, tsv.splitlines()[2].split("\t")))
    assert cells["fragment"] == "yes" and cells["agree"] == "yes"
    lines = (tmp_path / "t.jsonl").read_text().splitlines()
    assert json.loads(lines[0])["record"] == "meta"
    assert json.loads(lines[1])["domain"] == "zoo_direct"
    assert {p.name for p in paths} == {"t.tsv", "t.jsonl"}


def test_scaling_family_small_sizes():
    text = spec_text(
        family="scaling",
        domain=None,
        scenario="corpus:chain_scenario.e",
        variant="direct",
        sizes="3 4",
        horizon="4",
        query="credulous { animal_pos(dumpo,p3) holds-at 3 } horizon 4",
    )
    table = run_experiment(parse_spec(text))
    assert [r["positions"] for r in table.rows] == [3, 4]
    row = table.rows[0]
    assert row["total_instances"] > 0
    assert row["atoms"] > 0
    assert "reference_instances" not in row
    assert row["answer_q0"] == "true"
    # the reference constant appears only on the size-15 row
    tsv_rows = table.to_tsv().splitlines()[2:]
    ref_col = table.columns.index("reference_instances")
    assert {line.split("\t")[ref_col] for line in tsv_rows} == {"-"}


def test_irrelevance_family_small():
    text = spec_text(
        family="irrelevance",
        domain="gen:dual:3:feed",
        scenario="corpus:chain_scenario.e",
        slice="on",
        inject=["0", "1"],
        horizon="4",
        query="skeptical { animal_pos(dumpo,p3) holds-at 3 } horizon 4",
    )
    table = run_experiment(parse_spec(text))
    assert [r["injected"] for r in table.rows] == [0, 1]
    assert all(row["agree"] is True for row in table.rows)


def test_completeness_family_small():
    text = spec_text(
        family="completeness",
        domain="corpus:zoo_direct.e",
        scenario="corpus:chain_scenario.e",
        horizon="4",
        enrich="animal_pos(dumpo,p3) holds-at 3.",
        query="skeptical { animal_pos(dumpo,p3) holds-at 3 } horizon 4",
    )
    table = run_experiment(parse_spec(text))
    assert [r["level"] for r in table.rows] == ["base", "enriched"]
    base, enriched = table.rows
    assert base["added_observations"] == 0
    assert enriched["added_observations"] == 1
    assert base["answer"] == enriched["answer"] == "true"


def test_load_spec_roundtrip(tmp_path):
    p = tmp_path / "probe.spec"
    p.write_text(spec_text())
    spec = load_spec(p)
    assert spec.name == "t"
