import threading

import httpx
import pytest

from pathlens import corpus, server, skipgram, sweep, synth, tsne
from pathlens.errors import PathlensError


@pytest.fixture(scope="module")
def gallery_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("gallery")
    spec = synth.SynthSpec(n_students=14, n_lessons=2, screens_per_lesson=8,
                           behavior="linear", noise=0.05, seed=7)
    events, _, _, metadata = synth.gen_corpus(spec)
    sequences = corpus.build_sequences(events)
    vocab = corpus.build_vocab(sequences)
    base = skipgram.SkipGramConfig(epochs=1, seed=1)
    tcfg = tsne.TsneConfig(perplexity=4.0, iterations=50, early_exaggeration_iters=20,
                           momentum_switch_iter=30, seed=1)
    sweep.run_sweep(sequences, vocab, sweep.SweepGrid((1, 2), (2, 3)), base, tcfg,
                    "joint", out, metadata=metadata)
    return out


def start_server(gallery):
    srv = server.serve(gallery, host="127.0.0.1", port=0)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    port = srv.server_address[1]
    return srv, f"http://127.0.0.1:{port}"


@pytest.fixture()
def live(gallery_dir):
    srv, url = start_server(gallery_dir)
    yield url
    srv.shutdown()
    srv.server_close()


class TestApi:
    def test_manifest_roundtrip(self, live):
        doc = httpx.get(f"{live}/api/manifest").raise_for_status().json()
        assert doc["format"] == "pathlens-gallery/1"
        assert len(doc["entries"]) == 4

    def test_points_fetch(self, live):
        doc = httpx.get(f"{live}/api/plots/w1-d2").raise_for_status().json()
        assert doc["format"] == "pathlens-points/1"
        assert {"token", "x", "y", "lesson", "kind", "group"} <= set(doc["points"][0])

    def test_unknown_plot_404(self, live):
        assert httpx.get(f"{live}/api/plots/nope").status_code == 404

    def test_unknown_api_404(self, live):
        assert httpx.get(f"{live}/api/bogus").status_code == 404

    def test_rating_post_then_visible(self, live):
        r = httpx.post(f"{live}/api/ratings", json={"plot_id": "w1-d3", "rating": 4})
        assert r.status_code == 200
        doc = httpx.get(f"{live}/api/manifest").json()
        ratings = {e["plot_id"]: e["rating"] for e in doc["entries"]}
        assert ratings["w1-d3"] == 4

    def test_invalid_rating_422(self, live):
        for payload in (
            {"plot_id": "w1-d2", "rating": 6},
            {"plot_id": "w1-d2", "rating": 0},
            {"plot_id": "w1-d2", "rating": "five"},
            {"plot_id": "w1-d2"},
            {"rating": 3},
        ):
            assert httpx.post(f"{live}/api/ratings", json=payload).status_code == 422

    def test_malformed_body_422(self, live):
        r = httpx.post(f"{live}/api/ratings", content=b"not json",
                       headers={"Content-Type": "application/json"})
        assert r.status_code == 422

    def test_rating_unknown_plot_404(self, live):
        r = httpx.post(f"{live}/api/ratings", json={"plot_id": "w9-d9", "rating": 3})
        assert r.status_code == 404


class TestPersistenceAndStatic:
    def test_rating_survives_restart(self, gallery_dir):
        srv, url = start_server(gallery_dir)
        try:
            httpx.post(f"{url}/api/ratings", json={"plot_id": "w2-d2", "rating": 5})
        finally:
            srv.shutdown()
            srv.server_close()
        srv2, url2 = start_server(gallery_dir)
        try:
            doc = httpx.get(f"{url2}/api/manifest").json()
            ratings = {e["plot_id"]: e["rating"] for e in doc["entries"]}
            assert ratings["w2-d2"] == 5
        finally:
            srv2.shutdown()
            srv2.server_close()

    def test_placeholder_index_without_viewer(self, live):
        r = httpx.get(f"{live}/")
        assert r.status_code == 200
        assert "gallery" in r.text

    def test_viewer_index_served_when_present(self, gallery_dir):
        viewer = gallery_dir / "viewer"
        viewer.mkdir(exist_ok=True)
        (viewer / "index.html").write_text("<html><body>viewer shell</body></html>")
        srv, url = start_server(gallery_dir)
        try:
            assert "viewer shell" in httpx.get(f"{url}/").text
            assert "viewer shell" in httpx.get(f"{url}/viewer/index.html").text
        finally:
            srv.shutdown()
            srv.server_close()

    def test_static_artifact_fetch(self, live):
        r = httpx.get(f"{live}/gallery.csv")
        assert r.status_code == 200
        assert r.headers["content-type"] == "text/csv"

    def test_path_traversal_blocked(self, live):
        assert httpx.get(f"{live}/../pyproject.toml").status_code == 404

    def test_missing_manifest_rejected(self, tmp_path):
        with pytest.raises(PathlensError):
            server.serve(tmp_path, port=0)


def test_concurrent_ratings_last_write_wins(live):
    import concurrent.futures

    def rate(value):
        return httpx.post(f"{live}/api/ratings",
                          json={"plot_id": "w2-d3", "rating": value}).status_code

    with concurrent.futures.ThreadPoolExecutor(max_workers=5) as pool:
        codes = list(pool.map(rate, [1, 2, 3, 4, 5] * 3))
    assert all(c == 200 for c in codes)
    doc = httpx.get(f"{live}/api/manifest").json()
    final = {e["plot_id"]: e["rating"] for e in doc["entries"]}["w2-d3"]
    assert final in (1, 2, 3, 4, 5)
