import json

import pytest

from config import SCENARIO_DIR, EnumLimits
from platform_model import IN, OUT, Interval, Mapping, validate_mapping
from scenario import (
    ScenarioError,
    Thresholds,
    load_scenario,
    parse_link,
    parse_scenario,
    save_scenario,
    scenario_to_dict,
    serialize_scenario,
)

MINIMAL = {
    "pipeline": {"w": [1, 2], "delta": [1, 1, 1]},
    "platform": {"processors": [{"id": "P1", "speed": 1, "failure_prob": 0.5}], "bandwidth": 2},
}


def _parse(doc):
    return parse_scenario(json.dumps(doc))


class TestBundledScenarios:
    def test_split_latency(self, split_pipeline, split_platform, split_mapping):
        scenario = load_scenario(SCENARIO_DIR / "split_latency.json")
        assert scenario.pipeline == split_pipeline
        assert scenario.platform == split_platform
        assert scenario.mapping == split_mapping
        assert scenario.limits is None

    def test_reliable_split(self, reliable_pipeline, reliable_platform, reliable_mapping):
        scenario = load_scenario(SCENARIO_DIR / "reliable_split.json")
        assert scenario.pipeline == reliable_pipeline
        assert scenario.platform == reliable_platform
        assert scenario.mapping == reliable_mapping
        assert scenario.thresholds == Thresholds(max_latency=22, max_failure_prob=0.2)
        assert scenario.limits == EnumLimits(max_processors=11, max_intervals=2)

    @pytest.mark.parametrize("path", sorted(SCENARIO_DIR.glob("*.json")), ids=lambda p: p.stem)
    def test_mappings_are_valid(self, path):
        scenario = load_scenario(path)
        assert validate_mapping(scenario.pipeline, scenario.platform, scenario.mapping) is None


class TestParse:
    def test_minimal_document(self):
        scenario = _parse(MINIMAL)
        assert scenario.mapping is None
        assert scenario.thresholds == Thresholds()
        assert scenario.platform.bandwidth == {(IN, "P1"): 2, ("P1", OUT): 2}

    def test_bandwidth_table_leaves_other_links_absent(self):
        doc = json.loads(json.dumps(MINIMAL))
        doc["platform"]["processors"].append({"id": "P2", "speed": 2, "failure_prob": 0.1})
        doc["platform"]["bandwidth"] = {"in->P1": 1, "P1 -> P2": 3, "P2->out": 1}
        platform = _parse(doc).platform
        assert platform.bw("P1", "P2") == 3
        assert platform.bw("P2", "P1") is None
        assert platform.bw(IN, "P2") is None

    def test_mapping_section(self):
        doc = dict(MINIMAL, mapping={"intervals": [{"from": 1, "to": 2, "procs": ["P1"]}]})
        assert _parse(doc).mapping == Mapping((Interval(1, 2, ("P1",)),))

    def test_syntax_error_has_position(self):
        with pytest.raises(ScenarioError) as excinfo:
            parse_scenario('{\n  "pipeline": ,\n}', source="bad.json")
        assert excinfo.value.line == 2
        assert excinfo.value.column is not None
        assert str(excinfo.value).startswith("bad.json:2:")

    def test_delta_length(self):
        doc = json.loads(json.dumps(MINIMAL))
        doc["pipeline"]["delta"] = [1, 1]
        with pytest.raises(ScenarioError, match="delta must have n\\+1 = 3 entries \\(got 2\\)"):
            _parse(doc)

    def test_missing_section(self):
        with pytest.raises(ScenarioError, match="platform"):
            _parse({"pipeline": MINIMAL["pipeline"]})

    def test_unknown_field(self):
        doc = json.loads(json.dumps(MINIMAL))
        doc["pipeline"]["stages"] = 2
        with pytest.raises(ScenarioError, match="pipeline.stages"):
            _parse(doc)

    @pytest.mark.parametrize("value", [0, -1])
    def test_non_positive_speed(self, value):
        doc = json.loads(json.dumps(MINIMAL))
        doc["platform"]["processors"][0]["speed"] = value
        with pytest.raises(ScenarioError, match="speed"):
            _parse(doc)

    def test_failure_prob_out_of_range(self):
        doc = json.loads(json.dumps(MINIMAL))
        doc["platform"]["processors"][0]["failure_prob"] = 1.2
        with pytest.raises(ScenarioError, match="failure_prob"):
            _parse(doc)

    def test_unknown_link_endpoint(self):
        doc = json.loads(json.dumps(MINIMAL))
        doc["platform"]["bandwidth"] = {"in->P1": 1, "P1->P7": 1, "P1->out": 1}
        with pytest.raises(ScenarioError, match="P7"):
            _parse(doc)

    def test_reserved_processor_id(self):
        doc = json.loads(json.dumps(MINIMAL))
        doc["platform"]["processors"][0]["id"] = "out"
        with pytest.raises(ScenarioError):
            _parse(doc)

    @pytest.mark.parametrize("key", ["P1-P2", "->P2", "P1->P2->out"])
    def test_bad_link_keys(self, key):
        with pytest.raises(ValueError):
            parse_link(key)


class TestSerialize:
    @pytest.mark.parametrize("path", sorted(SCENARIO_DIR.glob("*.json")), ids=lambda p: p.stem)
    def test_reads_back_unchanged(self, path):
        scenario = load_scenario(path)
        assert parse_scenario(serialize_scenario(scenario)) == scenario

    def test_uniform_clique_written_as_scalar(self):
        scenario = load_scenario(SCENARIO_DIR / "reliable_split.json")
        assert scenario_to_dict(scenario)["platform"]["bandwidth"] == 1

    def test_link_table_order(self):
        scenario = load_scenario(SCENARIO_DIR / "split_latency.json")
        keys = list(scenario_to_dict(scenario)["platform"]["bandwidth"])
        assert keys == ["in->P1", "in->P2", "P1->P2", "P1->out", "P2->out"]

    def test_save(self, tmp_path):
        scenario = _parse(MINIMAL)
        path = save_scenario(scenario, tmp_path / "nested" / "copy.json")
        assert load_scenario(path) == scenario
