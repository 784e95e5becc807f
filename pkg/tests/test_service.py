import threading

import pytest
from fastapi.testclient import TestClient

from rpys_lab import load
from rpys_lab.service import DatasetStore, create_app

from synth import make_wos_text


@pytest.fixture
def client():
    return TestClient(create_app(DatasetStore()), raise_server_exceptions=False)


def upload(client, content: str, fmt: str = "auto") -> str:
    response = client.post("/datasets", json={"content": content, "format": fmt})
    assert response.status_code == 200, response.text
    return response.json()["dataset_id"]


@pytest.fixture
def wos_dataset(client, wos_bytes):
    return upload(client, wos_bytes.decode())


@pytest.fixture
def ui_dataset(client, ui_fixture_bytes):
    return upload(client, ui_fixture_bytes.decode())


def hirsch_cluster_ids(client, dataset_id):
    rows = client.get(
        f"/datasets/{dataset_id}/years/2005/clusters").json()["clusters"]
    return sorted(r["cluster_id"] for r in rows
                  if "Hirsch" in r["canonical"])


class TestUpload:
    def test_wos_upload_counts(self, client, wos_bytes):
        response = client.post("/datasets", json={
            "content": wos_bytes.decode(), "format": "auto"})
        body = response.json()
        assert body["version"] == 1
        assert body["n_publications"] == 3
        assert body["n_refs"] == 12

    def test_unknown_format_is_bad_request(self, client):
        response = client.post("/datasets", json={
            "content": "nothing here", "format": "auto"})
        assert response.status_code == 400
        assert response.json()["code"] == "BadRequest"

    def test_invalid_body_is_bad_request(self, client):
        response = client.post("/datasets", json={"nope": 1})
        assert response.status_code == 400
        assert response.json()["code"] == "BadRequest"


class TestReads:
    def test_spectrum_dense_with_version(self, client, wos_dataset):
        body = client.get(f"/datasets/{wos_dataset}/spectrum").json()
        assert body["version"] == 1
        points = body["spectrum"]
        assert points[0]["rpy"] == 1965
        assert points[-1]["rpy"] == 2014
        assert len(points) == 50
        by_year = {p["rpy"]: p["ncr"] for p in points}
        assert by_year[2005] == 4
        assert by_year[1965] == 3

    def test_spectrum_range_filter(self, client, wos_dataset):
        body = client.get(f"/datasets/{wos_dataset}/spectrum",
                          params={"min_rpy": 1965, "max_rpy": 1970}).json()
        assert [p["rpy"] for p in body["spectrum"]] == list(range(1965, 1971))

    def test_spectrum_of_refless_dataset_is_bad_request(self, client):
        dataset = upload(client, make_wos_text([(2010, [])]), fmt="wos")
        response = client.get(f"/datasets/{dataset}/spectrum")
        assert response.status_code == 400
        assert response.json()["code"] == "BadRequest"

    def test_unknown_dataset_404(self, client):
        response = client.get("/datasets/nope/spectrum")
        assert response.status_code == 404
        assert response.json()["code"] == "NotFound"

    def test_peaks_with_top_clusters(self, client, wos_dataset):
        body = client.get(f"/datasets/{wos_dataset}/peaks").json()
        assert body["version"] == 1
        top = body["peaks"][0]
        assert top["rpy"] == 2005
        assert top["deviation"] == 4.0
        assert top["top_clusters"][0]["n_cr"] == 3
        assert "Hirsch" in top["top_clusters"][0]["canonical"]

    def test_year_clusters_with_indicators(self, client, wos_dataset):
        body = client.get(
            f"/datasets/{wos_dataset}/years/2005/clusters",
            params={"top": 10}).json()
        rows = body["clusters"]
        assert len(rows) == 2
        assert rows[0]["n_cr"] == 3
        assert {"perc_yr", "perc_all", "n_top10"} <= set(rows[0])

    def test_cluster_detail(self, client, wos_dataset):
        cid = hirsch_cluster_ids(client, wos_dataset)[0]
        body = client.get(f"/datasets/{wos_dataset}/clusters/{cid}").json()
        cluster = body["cluster"]
        assert cluster["rpy"] == 2005
        assert len(cluster["members"]) >= 1
        assert sum(cluster["citing_year_profile"].values()) == cluster["n_cr"]

    def test_unknown_cluster_404(self, client, wos_dataset):
        response = client.get(f"/datasets/{wos_dataset}/clusters/beef")
        assert response.status_code == 404

    def test_read_idempotence(self, client, wos_dataset):
        a = client.get(f"/datasets/{wos_dataset}/spectrum")
        b = client.get(f"/datasets/{wos_dataset}/spectrum")
        assert a.content == b.content
        a = client.get(f"/datasets/{wos_dataset}/export/clusters.csv")
        b = client.get(f"/datasets/{wos_dataset}/export/clusters.csv")
        assert a.content == b.content

    def test_segments_endpoint(self, client):
        refs = []
        for i in range(30):
            year = 1950 + i
            for j in range(1 + i // 10):
                refs.append(f"Author A{i}x{j}, {year}, JOURNAL {i} {j}, V1, P1")
        dataset = upload(client, make_wos_text([(2010, refs)]), fmt="wos")
        body = client.get(f"/datasets/{dataset}/segments",
                          params={"k_max": 3, "min_len": 5}).json()
        fit = body["fit"]
        assert fit["k"] >= 1
        assert len(fit["segments"]) == fit["k"]
        assert fit["segments"][0]["start_rpy"] == 1950

    def test_segments_too_short_is_bad_request(self, client, ui_dataset):
        response = client.get(f"/datasets/{ui_dataset}/segments",
                              params={"min_len": 10})
        assert response.status_code == 400


class TestDecisions:
    def test_merge_increments_version_and_updates_spectrum(
            self, client, wos_dataset):
        ids = hirsch_cluster_ids(client, wos_dataset)
        assert len(ids) == 2
        before = client.get(f"/datasets/{wos_dataset}/spectrum").json()
        ncr_before = {p["rpy"]: p["ncr"] for p in before["spectrum"]}
        assert ncr_before[2005] == 4

        response = client.post(f"/datasets/{wos_dataset}/decisions", json={
            "kind": "merge", "clusters": ids, "expected_version": 1})
        assert response.status_code == 200
        assert response.json()["version"] == 2

        after = client.get(f"/datasets/{wos_dataset}/spectrum").json()
        assert after["version"] == 2
        ncr_after = {p["rpy"]: p["ncr"] for p in after["spectrum"]}
        assert ncr_after[2005] == 3

    def test_stale_pinned_version_conflicts(self, client, wos_dataset):
        ids = hirsch_cluster_ids(client, wos_dataset)
        response = client.post(f"/datasets/{wos_dataset}/decisions", json={
            "kind": "merge", "clusters": ids, "expected_version": 7})
        assert response.status_code == 409
        assert response.json()["code"] == "Conflict"
        assert client.get(
            f"/datasets/{wos_dataset}/spectrum").json()["version"] == 1

    def test_unknown_target_is_bad_request(self, client, wos_dataset):
        response = client.post(f"/datasets/{wos_dataset}/decisions", json={
            "kind": "merge", "clusters": ["nope", "missing"]})
        assert response.status_code == 400

    def test_split_restores_counts(self, client, wos_dataset):
        ids = hirsch_cluster_ids(client, wos_dataset)
        client.post(f"/datasets/{wos_dataset}/decisions", json={
            "kind": "merge", "clusters": ids})
        merged = hirsch_cluster_ids(client, wos_dataset)
        assert len(merged) == 1
        detail = client.get(
            f"/datasets/{wos_dataset}/clusters/{merged[0]}").json()["cluster"]
        variant = [[m["citing_id"], m["position"]] for m in detail["members"]
                   if m["doi"] is None]
        response = client.post(f"/datasets/{wos_dataset}/decisions", json={
            "kind": "split", "cluster": merged[0], "members": variant,
            "expected_version": 2})
        assert response.status_code == 200
        assert response.json()["version"] == 3
        spectrum = client.get(f"/datasets/{wos_dataset}/spectrum").json()
        ncr = {p["rpy"]: p["ncr"] for p in spectrum["spectrum"]}
        assert ncr[2005] == 4

    def test_versions_history(self, client, wos_dataset):
        ids = hirsch_cluster_ids(client, wos_dataset)
        client.post(f"/datasets/{wos_dataset}/decisions", json={
            "kind": "merge", "clusters": ids, "note": "same work"})
        body = client.get(f"/datasets/{wos_dataset}/versions").json()
        assert body["version"] == 2
        assert len(body["history"]) == 1
        assert body["history"][0]["kind"] == "merge"
        assert body["history"][0]["note"] == "same work"
        assert body["history"][0]["version"] == 2

    def test_concurrent_disjoint_merges(self, client):
        # 16 singleton clusters in one year, merged pairwise by 8 workers.
        refs = [f"Author {chr(ord('A') + i)}, 1990, JOURNAL {i}, V{i + 1}, P{i + 1}"
                for i in range(16)]
        dataset = upload(client, make_wos_text([(2010, refs)]), fmt="wos")
        rows = client.get(f"/datasets/{dataset}/years/1990/clusters",
                          params={"top": 16}).json()["clusters"]
        ids = sorted(r["cluster_id"] for r in rows)
        assert len(ids) == 16

        statuses = []
        lock = threading.Lock()

        def worker(pair):
            response = client.post(f"/datasets/{dataset}/decisions", json={
                "kind": "merge", "clusters": list(pair)})
            with lock:
                statuses.append(response.status_code)

        threads = [threading.Thread(target=worker,
                                    args=((ids[2 * i], ids[2 * i + 1]),))
                   for i in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()

        accepted = sum(1 for s in statuses if s == 200)
        assert accepted == 8
        body = client.get(f"/datasets/{dataset}/versions").json()
        assert body["version"] == 1 + accepted
        assert len(body["history"]) == accepted


class TestExports:
    def test_spectrum_csv_matches_session_export(self, client, wos_bytes,
                                                 tmp_path):
        from rpys_lab.cli import main

        infile = tmp_path / "wos.txt"
        infile.write_bytes(wos_bytes)
        session = tmp_path / "s.session.json"
        assert main(["ingest", "--in", str(infile),
                     "--session", str(session)]) == 0
        csv_file = tmp_path / "spectrum.csv"
        assert main(["spectrum", "--session", str(session),
                     "--csv", str(csv_file)]) == 0

        client2 = TestClient(create_app(DatasetStore()))
        dataset = upload(client2, wos_bytes.decode())
        response = client2.get(f"/datasets/{dataset}/export/spectrum.csv")
        assert response.content == csv_file.read_bytes()
        assert response.headers["content-type"].startswith("text/csv")

    def test_clusters_csv_has_exact_header(self, client, wos_dataset):
        response = client.get(f"/datasets/{wos_dataset}/export/clusters.csv")
        first = response.content.split(b"\n", 1)[0]
        assert first == (b"cluster_id,canonical,rpy,n_cr,perc_yr,perc_all,"
                         b"n_top10,n_top25,n_top50")


class TestWriteThrough:
    def test_decisions_written_to_session_file(self, tmp_path, wos_bytes):
        from rpys_lab.cli import main

        infile = tmp_path / "wos.txt"
        infile.write_bytes(wos_bytes)
        session = tmp_path / "s.session.json"
        assert main(["ingest", "--in", str(infile),
                     "--session", str(session)]) == 0

        store = DatasetStore()
        snapshot = load(session)
        dataset_id = store.add(snapshot, path=str(session))
        client = TestClient(create_app(store))
        ids = hirsch_cluster_ids(client, dataset_id)
        client.post(f"/datasets/{dataset_id}/decisions", json={
            "kind": "merge", "clusters": ids})
        reloaded = load(session)
        assert reloaded.version == 2
        assert len(reloaded.decisions) == 1
