import io
import json

import pytest

from rpys_lab import (Config, MergeDecision, advance, apply_decision,
                      cluster_refs, create_session, export_clusters_csv,
                      export_spectrum_csv, load, parse_corpus_refs,
                      parse_wos_export, save, session_spectrum)
from rpys_lab.errors import (CorruptSession, EmptyCorpus, UnknownCluster,
                             UnsupportedVersion)

from synth import make_corpus, synthetic_refs


def csv_bytes(snapshot, which="spectrum"):
    buf = io.BytesIO()
    if which == "spectrum":
        export_spectrum_csv(snapshot, buf)
    else:
        export_clusters_csv(snapshot, buf)
    return buf.getvalue()


@pytest.fixture
def ui_session(ui_corpus):
    return create_session(ui_corpus, Config())


def smith_cluster_ids(snapshot):
    return sorted(c.cluster_id for c in snapshot.partition
                  if c.rpy == 2003 and c.canonical.first_author == "SMITH A")


class TestSessionLifecycle:
    def test_create_is_version_one(self, ui_session):
        assert ui_session.version == 1
        assert ui_session.decisions == ()
        assert ui_session.corpus_ref

    def test_same_corpus_and_config_give_identical_partitions(self, ui_corpus):
        a = create_session(ui_corpus, Config())
        b = create_session(ui_corpus, Config())
        assert a.partition == b.partition
        assert a == b

    def test_empty_corpus_rejected(self):
        empty = parse_wos_export(b"")
        with pytest.raises(EmptyCorpus):
            create_session(empty)

    def test_zero_refs_corpus_spectrum_is_empty_corpus_error(self):
        corpus = make_corpus([(2010, [])])
        snapshot = create_session(corpus)
        with pytest.raises(EmptyCorpus):
            session_spectrum(snapshot)

    def test_advance_bumps_version_and_keeps_input(self, ui_session):
        before_hash = hash(ui_session)
        ids = smith_cluster_ids(ui_session)
        after = advance(ui_session, MergeDecision.merge(ids, timestamp="t1"))
        assert after.version == 2
        assert len(after.decisions) == 1
        assert ui_session.version == 1
        assert ui_session.decisions == ()
        assert hash(ui_session) == before_hash

    def test_invalid_decision_leaves_snapshot_usable(self, ui_session):
        with pytest.raises(UnknownCluster):
            advance(ui_session, MergeDecision.merge(["nope", "also-nope"]))
        assert ui_session.version == 1

    def test_merge_then_split_restores_partition(self, ui_session):
        ids = smith_cluster_ids(ui_session)
        keep = next(c for c in ui_session.partition if c.cluster_id == ids[0])
        merged = advance(ui_session, MergeDecision.merge(ids, timestamp="t"))
        big = next(c for c in merged.partition if len(c.members) >= 2
                   and c.rpy == 2003 and c.canonical.first_author == "SMITH A")
        split_back = advance(merged, MergeDecision.split(
            big.cluster_id, [m.raw_id for m in keep.members], timestamp="t2"))
        assert split_back.partition == ui_session.partition
        assert split_back.version == 3

    def test_ten_decision_replay_matches_incremental(self):
        refs = synthetic_refs(21, 80)
        base = cluster_refs(refs, 0.75)
        # Decisions: merge pairs of singleton clusters, then split one back.
        snapshot_partition = base
        decisions = []
        singles = [c.cluster_id for c in base if len(c.members) == 1]
        for i in range(9):
            d = MergeDecision.merge(singles[2 * i:2 * i + 2],
                                    timestamp=f"t{i}")
            snapshot_partition = apply_decision(snapshot_partition, d)
            decisions.append(d)
        merged_cluster = next(c for c in snapshot_partition
                              if len(c.members) == 2)
        d = MergeDecision.split(merged_cluster.cluster_id,
                                [merged_cluster.members[0].raw_id],
                                timestamp="t9")
        snapshot_partition = apply_decision(snapshot_partition, d)
        decisions.append(d)

        replayed = base
        for d in decisions:
            replayed = apply_decision(replayed, d)
        assert replayed == snapshot_partition


class TestPersistence:
    def test_round_trip_fresh_session(self, ui_session, tmp_path):
        path = tmp_path / "s.session.json"
        save(ui_session, path)
        assert load(path) == ui_session

    def test_round_trip_preserves_decisions_in_order(self, ui_session, tmp_path):
        ids = smith_cluster_ids(ui_session)
        s2 = advance(ui_session, MergeDecision.merge(ids, timestamp="t1"))
        big = next(c for c in s2.partition if c.rpy == 2003
                   and len(c.members) >= 2)
        s3 = advance(s2, MergeDecision.split(
            big.cluster_id, [big.members[0].raw_id], timestamp="t2"))
        path = tmp_path / "s.session.json"
        save(s3, path)
        loaded = load(path)
        assert loaded == s3
        assert [d.timestamp for d in loaded.decisions] == ["t1", "t2"]
        assert loaded.version == 3

    def test_truncated_file_is_corrupt(self, ui_session, tmp_path):
        path = tmp_path / "s.session.json"
        save(ui_session, path)
        data = path.read_bytes()
        path.write_bytes(data[:len(data) // 2])
        with pytest.raises(CorruptSession):
            load(path)

    def test_tampered_payload_is_corrupt(self, ui_session, tmp_path):
        path = tmp_path / "s.session.json"
        save(ui_session, path)
        doc = json.loads(path.read_text())
        doc["payload"]["session"]["version"] = 99
        path.write_text(json.dumps(doc))
        with pytest.raises(CorruptSession):
            load(path)

    def test_unknown_format_version(self, ui_session, tmp_path):
        path = tmp_path / "s.session.json"
        save(ui_session, path)
        doc = json.loads(path.read_text())
        doc["format_version"] = 2
        path.write_text(json.dumps(doc))
        with pytest.raises(UnsupportedVersion):
            load(path)

    def test_replay_soundness_after_load(self, ui_session, tmp_path):
        ids = smith_cluster_ids(ui_session)
        s2 = advance(ui_session, MergeDecision.merge(ids, timestamp="t"))
        path = tmp_path / "s.session.json"
        save(s2, path)
        loaded = load(path)
        replayed = cluster_refs(parse_corpus_refs(loaded.corpus),
                                loaded.config.threshold)
        for d in loaded.decisions:
            replayed = apply_decision(replayed, d)
        assert replayed == loaded.partition


class TestCsvExport:
    def test_spectrum_csv_ui_fixture(self, ui_session):
        data = csv_bytes(ui_session).decode()
        lines = data.split("\n")
        assert lines[0] == "rpy,ncr,deviation"
        assert lines[1:6] == [
            "2001,1,0.000000",
            "2002,1,0.000000",
            "2003,5,4.000000",
            "2004,1,0.000000",
            "2005,1,0.000000",
        ]
        assert lines[6] == ""

    def test_empty_spectrum_header_only(self):
        corpus = make_corpus([(2010, ["ANONYMOUS REPORT"])])
        snapshot = create_session(corpus)
        assert csv_bytes(snapshot) == b"rpy,ncr,deviation\n"

    def test_byte_count_returned(self, ui_session):
        buf = io.BytesIO()
        count = export_spectrum_csv(ui_session, buf)
        assert count == len(buf.getvalue()) > 0

    def test_clusters_csv_header_and_sorting(self, ui_session):
        import csv as csv_mod
        text = csv_bytes(ui_session, "clusters").decode()
        rows = list(csv_mod.reader(io.StringIO(text)))
        assert rows[0] == ["cluster_id", "canonical", "rpy", "n_cr",
                           "perc_yr", "perc_all", "n_top10", "n_top25",
                           "n_top50"]
        keys = [(int(r[2]), r[0]) for r in rows[1:]]
        assert keys == sorted(keys)
        # canonical strings contain commas, so rows must be quoted
        assert all('"' in line for line in text.splitlines()[1:])

    def test_canonical_with_comma_quoted(self, ui_session):
        data = csv_bytes(ui_session, "clusters").decode()
        assert '"Smith A, 2003, J DOC, V10, P1"' in data

    def test_exports_deterministic(self, ui_corpus, tmp_path):
        a = create_session(ui_corpus, Config())
        b = create_session(ui_corpus, Config())
        assert csv_bytes(a) == csv_bytes(b)
        assert csv_bytes(a, "clusters") == csv_bytes(b, "clusters")

    def test_deviation_rounding_six_places(self):
        # ncr [1, 1, 2, 1] gives an even truncated window at index 1:
        # median of sorted [1, 1, 1, 2] is 1.0 -> deviation 0.000000,
        # and index 2 window [1,1,2,1] -> median 1.0 -> deviation 1.000000.
        records = [(2010, ["A, 2000, W", "B, 2001, X", "C, 2002, Y",
                           "D, 2003, Z"]),
                   (2011, ["C2, 2002, Y2"])]
        snapshot = create_session(make_corpus(records))
        lines = csv_bytes(snapshot).decode().splitlines()
        assert lines[3] == "2002,2,1.000000"
