import json
from pathlib import Path

import pytest

traitlens = pytest.importorskip("traitlens")

FIXTURE = Path(__file__).resolve().parents[1] / "data" / "fixture"


def curated():
    p = traitlens.Project((FIXTURE / "story.txt").read_text(encoding="utf-8"))
    p.load_resources(embeddings=FIXTURE / "embeddings.txt")
    p.import_annotations((FIXTURE / "annotations.json").read_text(encoding="utf-8"))
    gold = json.loads((FIXTURE / "gold.json").read_text(encoding="utf-8"))
    for group, label in (("characters", "character"), ("contexts", "context")):
        for key, ids in gold[group].items():
            p.label(ids[0], label)
            p.name(ids[0], gold["names"][key])
            for other in ids[1:]:
                p.merge(other, ids[0])
    return p


def test_text_round_trip():
    story = (FIXTURE / "story.txt").read_text(encoding="utf-8")
    p = traitlens.Project(story)
    assert p.text() == story
    assert p.text(0, 7) == "CHAPTER"
    assert p.state == "empty"
    assert len(p.summary()["chapters"]) == 3


def test_workflow_and_views():
    p = curated()
    assert len(p.clusters()["characters"]) == 3
    with pytest.raises(traitlens.TraitlensError):
        p.matrix("presence")
    p.analyze()
    assert p.state == "current"
    m = p.matrix("presence")
    assert [row["character"] for row in m["rows"]] == ["mara-1", "tobias-1", "hester-1"]
    assert m["columns"] == [0, 1, 2]
    csv = p.matrix("presence", format="csv")
    assert csv.startswith("character,0,1,2\r\n")
    sentence = p.matrix("sentiment", level="sentence", chapter=1)
    assert len(sentence["columns"]) == 15
    zone = p.wordzone("mara-1")
    assert zone["entries"][0]["rank"] == 1
    assert "tobias-1" in p.cooccurrence("mara-1", 0)
    assert p.contexts(max_rows=2)["max_rows"] == 2


def test_errors_carry_codes():
    p = curated()
    with pytest.raises(traitlens.TraitlensError) as info:
        p.merge("mara-1", "mara-1")
    assert info.value.code == "SelfMerge"
    p.analyze()
    with pytest.raises(traitlens.TraitlensError) as info:
        p.matrix("action_change", level="sentence", chapter=0)
    assert info.value.code == "UnsupportedCombination"
    with pytest.raises(traitlens.TraitlensError) as info:
        traitlens.Project("   ")
    assert info.value.code == "EmptyDocument"


def test_save_and_load(tmp_path):
    p = curated()
    p.analyze()
    path = tmp_path / "story.tlproj"
    p.save(path)
    back = traitlens.Project.load(path)
    assert back.dumps() == p.dumps()
    assert back.matrix("speech") == p.matrix("speech")
