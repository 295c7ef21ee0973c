"""Project persistence: save/open round trips, refresh, locking, log file."""

from __future__ import annotations

import json

import pytest

from facetprep.engine import AddRow, ReplaceValue, SetVisibility
from facetprep.errors import (
    CorruptLogLine,
    FormatVersionUnsupported,
    MissingFile,
    ProjectLocked,
)
from facetprep.project import (
    FAVOURITES_FILE,
    LOG_FILE,
    PROJECT_FILE,
    Project,
    StoreSession,
    read_project,
    record_for,
    save_project,
)
from facetprep.sparql import Favourite, SparqlSource
from tests.conftest import HOTEL_CSV, NEW_HOTEL_CELLS


@pytest.fixture
def hotel_project(tmp_path):
    source_path = tmp_path / "hotels.csv"
    source_path.write_bytes(HOTEL_CSV)
    project = Project(
        name="hotels",
        kind="single-file",
        source={"path": str(source_path)},
        favourites=[Favourite("cars", SparqlSource("http://example.org/sparql", "SELECT ?a WHERE {}"))],
    )
    save_project(project, tmp_path / "projects")
    return tmp_path / "projects" / "hotels"


class TestSaveOpen:
    def test_layout(self, hotel_project):
        assert (hotel_project / PROJECT_FILE).is_file()
        assert (hotel_project / LOG_FILE).is_file()
        assert (hotel_project / FAVOURITES_FILE).is_file()
        assert (hotel_project / LOG_FILE).read_bytes() == b""

    def test_round_trip_modulo_timestamps(self, hotel_project):
        project = read_project(hotel_project)
        assert project.name == "hotels"
        assert project.kind == "single-file"
        assert project.source["delimiter"] == "comma"
        assert [f.label for f in project.favourites] == ["cars"]
        assert project.log == []

    def test_open_materializes(self, hotel_project):
        with StoreSession.open(hotel_project) as store:
            assert len(store.session.dataset.rows) == 9
            assert store.outcomes_on_open == []

    def test_missing_project_file(self, tmp_path):
        (tmp_path / "empty").mkdir()
        with pytest.raises(MissingFile):
            read_project(tmp_path / "empty")

    def test_unsupported_version(self, hotel_project):
        payload = json.loads((hotel_project / PROJECT_FILE).read_text())
        payload["format_version"] = 99
        (hotel_project / PROJECT_FILE).write_text(json.dumps(payload))
        with pytest.raises(FormatVersionUnsupported):
            read_project(hotel_project)

    def test_unknown_log_type(self, hotel_project):
        (hotel_project / LOG_FILE).write_text('{"seq":1,"type":"Quux","params":{}}\n')
        with pytest.raises(CorruptLogLine) as err:
            read_project(hotel_project)
        assert err.value.line_no == 1

    def test_non_increasing_seq(self, hotel_project):
        lines = [
            '{"seq":1,"type":"RemoveEmptyRows","params":{}}',
            '{"seq":1,"type":"RemoveEmptyRows","params":{}}',
        ]
        (hotel_project / LOG_FILE).write_text("\n".join(lines) + "\n")
        with pytest.raises(CorruptLogLine) as err:
            read_project(hotel_project)
        assert err.value.line_no == 2


class TestLiveLog:
    def test_apply_appends_one_line(self, hotel_project):
        with StoreSession.open(hotel_project) as store:
            store.apply(SetVisibility("Rooms", False))
            store.apply(AddRow(NEW_HOTEL_CELLS))
        lines = (hotel_project / LOG_FILE).read_text().splitlines()
        assert len(lines) == 2
        first = json.loads(lines[0])
        assert list(first) == ["seq", "type", "params", "recorded_at"]
        assert (first["seq"], first["type"]) == (1, "SetVisibility")

    def test_undo_truncates_file(self, hotel_project):
        with StoreSession.open(hotel_project) as store:
            store.apply(SetVisibility("Rooms", False))
            store.apply(AddRow(NEW_HOTEL_CELLS))
            store.undo()
        lines = (hotel_project / LOG_FILE).read_text().splitlines()
        assert len(lines) == 1
        assert json.loads(lines[0])["type"] == "SetVisibility"

    def test_redo_appends_again(self, hotel_project):
        with StoreSession.open(hotel_project) as store:
            store.apply(SetVisibility("Rooms", False))
            store.undo()
            store.redo()
        lines = (hotel_project / LOG_FILE).read_text().splitlines()
        assert len(lines) == 1

    def test_reopen_replays_saved_log(self, hotel_project):
        with StoreSession.open(hotel_project) as store:
            store.apply(ReplaceValue("Location", "Iraklio", "Heraklion"))
            dataset_at_save = store.session.dataset
            store.save()
        with StoreSession.open(hotel_project) as store:
            assert store.session.dataset == dataset_at_save

    def test_save_preserves_recorded_at(self, hotel_project):
        with StoreSession.open(hotel_project) as store:
            store.apply(SetVisibility("Rooms", False))
            stamp = json.loads((hotel_project / LOG_FILE).read_text())["recorded_at"]
            store.save()
        assert json.loads((hotel_project / LOG_FILE).read_text())["recorded_at"] == stamp


class TestLock:
    def test_second_writer_rejected(self, hotel_project):
        with StoreSession.open(hotel_project):
            with pytest.raises(ProjectLocked):
                StoreSession.open(hotel_project)

    def test_readers_allowed_alongside_writer(self, hotel_project):
        with StoreSession.open(hotel_project):
            reader = StoreSession.open(hotel_project, write=False)
            assert len(reader.session.dataset.rows) == 9

    def test_read_only_sessions_cannot_mutate(self, hotel_project):
        reader = StoreSession.open(hotel_project, write=False)
        with pytest.raises(ProjectLocked):
            reader.apply(SetVisibility("Rooms", False))

    def test_lock_released_on_close(self, hotel_project):
        StoreSession.open(hotel_project).close()
        with StoreSession.open(hotel_project):
            pass


class TestRefresh:
    def test_identical_source_all_applied(self, hotel_project):
        with StoreSession.open(hotel_project) as store:
            store.apply(ReplaceValue("Location", "Iraklio", "Heraklion"))
            outcomes = store.refresh()
        assert [o.status for o in outcomes] == ["applied"]

    def test_source_grew_a_row(self, hotel_project, tmp_path):
        with StoreSession.open(hotel_project) as store:
            store.apply(SetVisibility("Rooms", False))
            bigger = tmp_path / "hotels2.csv"
            extra = ",".join(NEW_HOTEL_CELLS).replace("Mitsis Laguna Resort & Spa", '"X"')
            bigger.write_bytes(HOTEL_CSV + extra.encode() + b"\n")
            outcomes = store.refresh({"path": str(bigger)})
            assert all(o.applied for o in outcomes)
            assert len(store.session.dataset.rows) == 10
            assert not store.session.dataset.facet("Rooms").visible
        # the new descriptor was persisted
        assert read_project(hotel_project).source["path"] == str(bigger)

    def test_vanished_replace_target_skips(self, hotel_project, tmp_path):
        with StoreSession.open(hotel_project) as store:
            store.apply(ReplaceValue("Location", "Iraklio", "Heraklion"))
            trimmed = tmp_path / "hotels3.csv"
            lines = HOTEL_CSV.decode().splitlines()
            kept = [l for l in lines if ",Iraklio," not in l]
            trimmed.write_text("\n".join(kept) + "\n")
            outcomes = store.refresh({"path": str(trimmed)})
        assert [o.status for o in outcomes] == ["skipped"]

    def test_open_never_mutates_source(self, hotel_project):
        source = read_project(hotel_project).source["path"]
        before = open(source, "rb").read()
        with StoreSession.open(hotel_project) as store:
            store.apply(SetVisibility("Rooms", False))
            store.save()
        assert open(source, "rb").read() == before


class TestRecordSerialization:
    def test_compact_fixed_key_order(self):
        record = record_for(3, SetVisibility("Rooms", False), "2026-01-01T00:00:00+00:00")
        from facetprep.project import dumps_record

        assert dumps_record(record) == (
            '{"seq":3,"type":"SetVisibility","params":{"facet":"Rooms","visible":false},'
            '"recorded_at":"2026-01-01T00:00:00+00:00"}'
        )
