import pytest

from voxaug.metrics import MetricRecord
from voxaug.stats import RankEntry
from voxaug.tables import read_metrics, write_metrics, write_ranks


def _rec(subject, model, region, dice, hd95):
    return MetricRecord(subject, model, region, dice, hd95)


ROWS = [
    _rec("s2", "A", "WT", 0.9, 1.5),
    _rec("s1", "B", "ET", 0.25, 373.0),
    _rec("s1", "A", "TC", 1.0, 0.0),
]


def test_round_trip_and_sorting(tmp_path):
    path = tmp_path / "m.csv"
    write_metrics(ROWS, path)
    back = read_metrics(path)
    assert back == sorted(ROWS, key=lambda r: (r.subject_id, r.model_id, r.region))
    header = path.read_text().splitlines()[0]
    assert header == "subject_id,model_id,region,dice,hd95_mm"


def test_floats_survive_exactly(tmp_path):
    path = tmp_path / "m.csv"
    rows = [_rec("s", "m", "WT", 1 / 3, 2.0 / 7.0)]
    write_metrics(rows, path)
    back = read_metrics(path)
    assert back[0].dice == 1 / 3
    assert back[0].hd95_mm == 2.0 / 7.0


def test_append_extends_table(tmp_path):
    path = tmp_path / "m.csv"
    write_metrics(ROWS[:2], path)
    write_metrics(ROWS[2:], path, append=True)
    assert len(read_metrics(path)) == 3
    assert path.read_text().count("subject_id") == 1


def test_append_to_missing_file_writes_header(tmp_path):
    path = tmp_path / "fresh.csv"
    write_metrics(ROWS, path, append=True)
    assert read_metrics(path) == sorted(ROWS, key=lambda r: (r.subject_id, r.model_id, r.region))


def test_append_rejects_foreign_header(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ValueError, match="existing header"):
        write_metrics(ROWS, path, append=True)


def test_read_rejects_bad_header(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("subject,model,region,dice,hd95\n")
    with pytest.raises(ValueError, match="bad header"):
        read_metrics(path)


def test_read_reports_line_numbers(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text(
        "subject_id,model_id,region,dice,hd95_mm\n"
        "s1,A,WT,0.5,1.0\n"
        "s1,A,TC,0.5\n"
    )
    with pytest.raises(ValueError, match=r"m\.csv:3: expected 5 fields"):
        read_metrics(path)


def test_read_validates_values_with_line_numbers(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text(
        "subject_id,model_id,region,dice,hd95_mm\n"
        "s1,A,WT,1.5,1.0\n"
    )
    with pytest.raises(ValueError, match=r"m\.csv:2:"):
        read_metrics(path)


def test_write_ranks(tmp_path):
    path = tmp_path / "r.csv"
    write_ranks([RankEntry("A", 1.0), RankEntry("B", 2.5)], path)
    assert path.read_text() == "model_id,rank_score\nA,1.0\nB,2.5\n"
