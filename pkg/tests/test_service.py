import base64
import json
import time

import pytest
from fastapi.testclient import TestClient

from apxsim.service import create_app

from helpers import blank_image, fill_rect, image_of


@pytest.fixture()
def client(tmp_path):
    app = create_app(data_dir=tmp_path / "data")
    with TestClient(app) as c:
        yield c


def page_png(w=120, h=100):
    arr = blank_image(w, h)
    fill_rect(arr, 30, 20, 60, 50, (200, 40, 40))   # a block
    fill_rect(arr, 10, 70, 110, 90, (90, 90, 90))   # a floor strip
    return image_of(arr).to_png()


def make_project(client, sim_type="kinematics", annotations=None):
    body = {"png": base64.b64encode(page_png()).decode(), "sim_type": sim_type}
    if annotations:
        body["annotations"] = annotations
    resp = client.post("/projects", json=body)
    assert resp.status_code == 201
    return resp.json()["project_id"]


def kinematics_session(client):
    pid = make_project(client)
    r = client.post(f"/projects/{pid}/segment", json={"prompts": [{"x": 45, "y": 35}]})
    assert r.status_code == 201
    block = r.json()["entity_id"]
    r = client.post(f"/projects/{pid}/segment", json={"prompts": [{"x": 50, "y": 80}]})
    floor = r.json()["entity_id"]
    client.post(f"/projects/{pid}/roles", json={"entity_id": block, "role": "dynamic-object",
                                                "params": {"mass": 1.0}})
    client.post(f"/projects/{pid}/roles", json={"entity_id": floor, "role": "static-object"})
    r = client.post(f"/projects/{pid}/sessions", json={})
    assert r.status_code == 201
    return pid, block, r.json()["session_id"]


def test_upload_project(client):
    resp = client.post("/projects", json={"png": base64.b64encode(page_png()).decode()})
    assert resp.status_code == 201
    body = resp.json()
    assert body["width"] == 120 and body["height"] == 100


def test_upload_rejects_bad_png(client):
    resp = client.post("/projects", json={"png": base64.b64encode(b"nope").decode()})
    assert resp.status_code == 400
    assert resp.json()["error"] == "schema_violation"


def test_segment_requires_positive_prompt(client):
    pid = make_project(client)
    resp = client.post(
        f"/projects/{pid}/segment",
        json={"prompts": [{"x": 45, "y": 35, "polarity": "negative"}]},
    )
    assert resp.status_code == 400
    assert resp.json()["error"] == "no_positive_prompt"


def test_segment_and_role_flow(client):
    pid = make_project(client)
    resp = client.post(f"/projects/{pid}/segment", json={"prompts": [{"x": 45, "y": 35}]})
    assert resp.status_code == 201
    body = resp.json()
    assert body["bbox"] == [30, 20, 60, 50]
    assert body["pixel_count"] == 30 * 30
    assert len(body["contour"]) >= 4

    resp = client.post(f"/projects/{pid}/roles", json={
        "entity_id": body["entity_id"], "role": "spring",
    })
    assert resp.status_code == 200

    resp = client.post(f"/projects/{pid}/roles", json={
        "entity_id": body["entity_id"], "role": "lens",
    })
    assert resp.status_code == 400
    assert resp.json()["error"] == "illegal_role_for_sim_type"


def test_unknown_project_404(client):
    assert client.get("/projects/zzz").status_code == 404


def test_export_import_round_trip(client):
    pid = make_project(client)
    client.post(f"/projects/{pid}/segment", json={"prompts": [{"x": 45, "y": 35}]})
    exported = client.get(f"/projects/{pid}/export").content
    resp = client.post("/projects/import", content=exported)
    assert resp.status_code == 201
    assert resp.json()["project_id"] == pid


def test_session_advance_and_contiguous_ticks(client):
    pid, block, sid = kinematics_session(client)
    with client.websocket_connect(f"/sessions/{sid}/stream") as ws:
        snap = json.loads(ws.receive_text())
        assert snap["type"] == "snapshot"
        client.post(f"/sessions/{sid}/advance", json={"ticks": 5})
        ticks = [json.loads(ws.receive_text())["tick"] for _ in range(5)]
        assert ticks == [1, 2, 3, 4, 5]


def test_command_atomicity_mass_and_inertia(client):
    pid, block, sid = kinematics_session(client)
    with client.websocket_connect(f"/sessions/{sid}/stream") as ws:
        ws.receive_text()  # snapshot
        client.post(f"/sessions/{sid}/advance", json={"ticks": 2})
        f1 = json.loads(ws.receive_text())
        f2 = json.loads(ws.receive_text())
        body0 = [b for b in f2["payload"]["world"]["bodies"] if b["id"] == block][0]
        resp = client.post(f"/sessions/{sid}/commands", json={
            "type": "set_parameter", "object": block, "key": "mass", "value": 2.0,
        })
        assert resp.json()["applied_tick"] == 3
        client.post(f"/sessions/{sid}/advance", json={"ticks": 1})
        f3 = json.loads(ws.receive_text())
        body1 = [b for b in f3["payload"]["world"]["bodies"] if b["id"] == block][0]
        # the frame shows the new mass together with the recomputed inertia
        assert body1["mass"] == 2.0
        assert abs(body1["inertia"] - 2.0 * body0["inertia"]) <= 1e-12


def test_illegal_command_for_kind(client):
    pid, block, sid = kinematics_session(client)
    resp = client.post(f"/sessions/{sid}/commands", json={
        "type": "edit_component_value", "component": "R1", "value": 5.0,
    })
    assert resp.status_code == 409
    assert resp.json()["error"] == "illegal_command_for_kind"


def test_idle_subscription_gets_single_snapshot(client):
    pid, block, sid = kinematics_session(client)
    with client.websocket_connect(f"/sessions/{sid}/stream") as ws:
        snap = json.loads(ws.receive_text())
        assert snap["type"] == "snapshot"
        assert snap["payload"]["full"] is True


def test_two_subscribers_identical_sequences(client):
    pid, block, sid = kinematics_session(client)
    with client.websocket_connect(f"/sessions/{sid}/stream") as ws1:
        with client.websocket_connect(f"/sessions/{sid}/stream") as ws2:
            ws1.receive_text()
            ws2.receive_text()
            client.post(f"/sessions/{sid}/advance", json={"ticks": 4})
            seq1 = [ws1.receive_text() for _ in range(4)]
            seq2 = [ws2.receive_text() for _ in range(4)]
            p1 = [json.dumps(json.loads(t)["payload"], sort_keys=True) for t in seq1]
            p2 = [json.dumps(json.loads(t)["payload"], sort_keys=True) for t in seq2]
            assert p1 == p2


def test_realtime_streaming_rate(client):
    pid, block, sid = kinematics_session(client)
    with client.websocket_connect(f"/sessions/{sid}/stream") as ws:
        ws.receive_text()
        client.post(f"/sessions/{sid}/run")
        time.sleep(1.2)
        client.post(f"/sessions/{sid}/pause")
        client.delete(f"/sessions/{sid}")  # close event terminates the drain
        events = []
        try:
            while len(events) < 500:
                events.append(json.loads(ws.receive_text()))
        except Exception:
            pass
        frames = [e for e in events if e["type"] == "frame"]
        ticks = [f["tick"] for f in frames]
        assert ticks == list(range(ticks[0], ticks[0] + len(ticks)))
        # frames produced inside a one-second window of wall timestamps
        t0 = frames[0]["ts"]
        in_window = [f for f in frames if t0 <= f["ts"] < t0 + 1.0]
        assert abs(len(in_window) - 60) <= 3


def test_deterministic_replay(client):
    pid, block, sid = kinematics_session(client)

    def drive(ws):
        payloads = []
        client.post(f"/sessions/{sid}/advance", json={"ticks": 3})
        payloads += [json.loads(ws.receive_text())["payload"] for _ in range(3)]
        client.post(f"/sessions/{sid}/commands", json={
            "type": "set_parameter", "object": block, "key": "mass", "value": 2.5,
        })
        client.post(f"/sessions/{sid}/advance", json={"ticks": 2})
        payloads += [json.loads(ws.receive_text())["payload"] for _ in range(2)]
        client.post(f"/sessions/{sid}/commands", json={
            "type": "drag", "body": block, "x_px": 80, "y_px": 20,
        })
        client.post(f"/sessions/{sid}/advance", json={"ticks": 4})
        payloads += [json.loads(ws.receive_text())["payload"] for _ in range(4)]
        return payloads

    with client.websocket_connect(f"/sessions/{sid}/stream") as ws:
        ws.receive_text()
        original = drive(ws)
        log = client.get(f"/sessions/{sid}/log").json()["log"]

        client.post(f"/sessions/{sid}/reset")
        ws.receive_text()  # reset snapshot
        replayed = []
        tick = 0
        for entry in log:
            gap = entry["tick"] - 1 - tick
            if gap > 0:
                client.post(f"/sessions/{sid}/advance", json={"ticks": gap})
                replayed += [json.loads(ws.receive_text())["payload"] for _ in range(gap)]
                tick += gap
            client.post(f"/sessions/{sid}/commands", json=entry["command"])
        remaining = 9 - tick
        client.post(f"/sessions/{sid}/advance", json={"ticks": remaining})
        replayed += [json.loads(ws.receive_text())["payload"] for _ in range(remaining)]

    a = [json.dumps(p, sort_keys=True) for p in original]
    b = [json.dumps(p, sort_keys=True) for p in replayed]
    assert a == b  # bit-identical frame payloads


def test_session_isolation(client):
    pid, block, sid1 = kinematics_session(client)
    resp = client.post(f"/projects/{pid}/sessions", json={})
    sid2 = resp.json()["session_id"]

    with client.websocket_connect(f"/sessions/{sid1}/stream") as ws1:
        ws1.receive_text()
        client.post(f"/sessions/{sid1}/advance", json={"ticks": 3})
        solo = [json.loads(ws1.receive_text())["payload"] for _ in range(3)]

    client.post(f"/sessions/{sid1}/reset")
    with client.websocket_connect(f"/sessions/{sid1}/stream") as ws1:
        ws1.receive_text()
        # hammer the sibling session between ticks of the first
        client.post(f"/sessions/{sid2}/commands", json={
            "type": "set_parameter", "object": block, "key": "mass", "value": 3.0,
        })
        client.post(f"/sessions/{sid1}/advance", json={"ticks": 1})
        client.post(f"/sessions/{sid2}/advance", json={"ticks": 5})
        client.post(f"/sessions/{sid1}/advance", json={"ticks": 2})
        interleaved = [json.loads(ws1.receive_text())["payload"] for _ in range(3)]

    assert [json.dumps(p, sort_keys=True) for p in solo] == [
        json.dumps(p, sort_keys=True) for p in interleaved
    ]


def test_circuit_session_with_dangling_terminal_409(client):
    pid = make_project(client, sim_type="circuits")
    netlist_doc = {
        "nodes": ["n0", "n1"],
        "ref": "n0",
        "components": [
            {"id": "V1", "kind": "battery", "value": 6.0, "unit": "volt",
             "a": "n0", "b": "n1", "plus": "n0"},
        ],
        "warnings": [{"kind": "dangling_terminal", "component": "R1", "terminal": [10, 20]}],
    }
    r = client.post(f"/projects/{pid}/netlist/edit", json={"action": "replace", "netlist": netlist_doc})
    assert r.status_code == 200
    r = client.post(f"/projects/{pid}/sessions", json={})
    sid = r.json()["session_id"]
    r = client.post(f"/sessions/{sid}/run")
    assert r.status_code == 409
    assert r.json()["details"]["warnings"][0]["component"] == "R1"


def test_circuit_session_event_driven(client):
    pid = make_project(client, sim_type="circuits")
    netlist_doc = {
        "nodes": ["n0", "n1"],
        "ref": "n1",
        "components": [
            {"id": "V1", "kind": "battery", "value": 6.0, "unit": "volt",
             "a": "n0", "b": "n1", "plus": "n0"},
            {"id": "R1", "kind": "resistor", "value": 3.0, "unit": "ohm",
             "a": "n0", "b": "n1", "plus": None},
        ],
    }
    client.post(f"/projects/{pid}/netlist/edit", json={"action": "replace", "netlist": netlist_doc})
    sid = client.post(f"/projects/{pid}/sessions", json={}).json()["session_id"]
    client.post(f"/sessions/{sid}/run")
    frame = client.get(f"/sessions/{sid}/frame").json()
    assert frame["payload"]["solution"]["currents"]["R1"] == 2.0
    client.post(f"/sessions/{sid}/commands", json={
        "type": "edit_component_value", "component": "R1", "value": 6.0,
    })
    frame = client.get(f"/sessions/{sid}/frame").json()
    assert frame["payload"]["solution"]["currents"]["R1"] == 1.0


def optics_page():
    arr = blank_image(420, 260)
    fill_rect(arr, 257, 60, 263, 200, (40, 80, 220))     # lens strip
    fill_rect(arr, 153, 90, 167, 132, (30, 160, 60))     # object
    fill_rect(arr, 207, 127, 213, 133, (200, 30, 30))    # focal marker left
    fill_rect(arr, 307, 127, 313, 133, (200, 30, 30))    # focal marker right
    return image_of(arr).to_png()


def test_optics_session_drag_resolves_same_tick(client):
    resp = client.post("/projects", json={
        "png": base64.b64encode(optics_page()).decode(), "sim_type": "optics",
    })
    pid = resp.json()["project_id"]

    def seg(x, y):
        return client.post(f"/projects/{pid}/segment",
                           json={"prompts": [{"x": x, "y": y}]}).json()["entity_id"]

    lens = seg(260, 80)
    obj = seg(160, 100)
    f1 = seg(210, 130)
    f2 = seg(310, 130)
    for eid, role in ((lens, "lens"), (obj, "projected-object"),
                      (f1, "focal-point"), (f2, "focal-point")):
        r = client.post(f"/projects/{pid}/roles", json={"entity_id": eid, "role": role})
        assert r.status_code == 200, r.text
    sid = client.post(f"/projects/{pid}/sessions", json={}).json()["session_id"]
    client.post(f"/sessions/{sid}/run")
    frame = client.get(f"/sessions/{sid}/frame").json()
    assert frame["payload"]["rays"], "principal rays expected in the frame"
    d_i_before = frame["payload"]["image"]["distance"]

    ack = client.post(f"/sessions/{sid}/commands", json={
        "type": "drag", "entity": obj, "x_px": 120, "y_px": 100,
    }).json()["applied_tick"]
    frame = client.get(f"/sessions/{sid}/frame").json()
    assert frame["tick"] == ack  # event-driven: re-solved at the very ack tick
    assert frame["payload"]["image"]["distance"] != d_i_before


def animation_page():
    import numpy as np

    arr = blank_image(320, 240)
    yy, xx = np.mgrid[0:240, 0:320]
    ring = np.abs(np.sqrt((xx - 160.0) ** 2 + (yy - 120.0) ** 2) - 60.0) <= 1.5
    for c in range(3):
        arr[:, :, c] = np.where(ring, 0, arr[:, :, c])
    fill_rect(arr, 40, 40, 56, 56, (230, 140, 30))
    return image_of(arr).to_png()


def test_animation_session_with_tracks(client):
    resp = client.post("/projects", json={
        "png": base64.b64encode(animation_page()).decode(), "sim_type": "animation",
    })
    pid = resp.json()["project_id"]
    orbit = client.post(f"/projects/{pid}/segment",
                        json={"prompts": [{"x": 220, "y": 120}]}).json()["entity_id"]
    sprite = client.post(f"/projects/{pid}/segment",
                         json={"prompts": [{"x": 48, "y": 48}]}).json()["entity_id"]
    client.post(f"/projects/{pid}/roles", json={"entity_id": orbit, "role": "path"})
    r = client.post(f"/projects/{pid}/tracks", json={
        "assignments": [{"object_id": sprite, "path_id": orbit, "speed": 40.0}],
    })
    assert r.status_code == 200, r.text
    sid = client.post(f"/projects/{pid}/sessions", json={}).json()["session_id"]
    client.post(f"/sessions/{sid}/advance", json={"ticks": 30})
    frame = client.get(f"/sessions/{sid}/frame").json()
    pose = frame["payload"]["poses"][sprite]
    # half a second at 40 px/s moved the sprite 20 px along the orbit
    import math

    r0 = math.hypot(pose["x"] - 160.0, pose["y"] - 120.0)
    assert abs(r0 - 60.0) <= 3.0


def test_nudge_binding_command_updates_live_world(client):
    pid, block, sid = kinematics_session(client)
    # binding created after the session exists: make a fresh session after it
    client.post(f"/projects/{pid}/segment", json={"prompts": [{"x": 45, "y": 35}]})
    resp = client.post("/projects", json={
        "png": base64.b64encode(page_png()).decode(), "sim_type": "kinematics",
        "annotations": {"tokens": [
            {"id": "tok1", "value": "1.0", "unit": "kg", "bbox": [1, 1, 20, 9]},
        ]},
    })
    pid2 = resp.json()["project_id"]
    b2 = client.post(f"/projects/{pid2}/segment",
                     json={"prompts": [{"x": 45, "y": 35}]}).json()["entity_id"]
    client.post(f"/projects/{pid2}/roles", json={
        "entity_id": b2, "role": "dynamic-object", "params": {"mass": 1.0}})
    bind = client.post(f"/projects/{pid2}/bindings", json={
        "token_id": "tok1", "path": f"{b2}.mass", "min": 0.1, "max": 10.0, "step": 0.02,
    }).json()
    sid2 = client.post(f"/projects/{pid2}/sessions", json={}).json()["session_id"]
    client.post(f"/sessions/{sid2}/commands", json={
        "type": "nudge_binding", "binding": bind["binding_id"], "delta_px": 100,
    })
    client.post(f"/sessions/{sid2}/advance", json={"ticks": 1})
    frame = client.get(f"/sessions/{sid2}/frame").json()
    body = [b for b in frame["payload"]["world"]["bodies"] if b["id"] == b2][0]
    assert body["mass"] == 3.0  # 1.0 + 100 px * 0.02/px


def test_circuit_extract_endpoint_full_flow(client, tmp_path):
    # render a synthetic circuit page, then drive extraction over HTTP
    from apxsim.cli.corpus import generate_corpus

    generate_corpus(tmp_path / "c", "circuits", 1, 5)
    case = tmp_path / "c" / "case_000"
    png = (case / "page.png").read_bytes()
    ann = json.loads((case / "page.ann.json").read_text())
    pid = client.post("/projects", json={
        "png": base64.b64encode(png).decode(),
        "sim_type": "circuits",
        "annotations": ann,
    }).json()["project_id"]

    netlist = client.post(f"/projects/{pid}/netlist/extract").json()
    assert netlist["components"]
    assert not netlist.get("warnings")

    sid = client.post(f"/projects/{pid}/sessions", json={}).json()["session_id"]
    r = client.post(f"/sessions/{sid}/run")
    assert r.status_code == 200
    frame = client.get(f"/sessions/{sid}/frame").json()
    currents = frame["payload"]["solution"]["currents"]
    truth = json.loads((case / "truth.json").read_text())
    truth_currents = truth["solution"]["currents"]
    assert len(currents) == len(truth_currents)
    got = sorted(abs(v) for v in currents.values())
    want = sorted(abs(v) for v in truth_currents.values())
    for g, w in zip(got, want):
        assert abs(g - w) <= 1e-6


def test_netlist_connect_disconnect_edits(client):
    pid = make_project(client, sim_type="circuits")
    base = {
        "nodes": ["n0", "n1"],
        "ref": "n1",
        "components": [
            {"id": "V1", "kind": "battery", "value": 6.0, "unit": "volt",
             "a": "n0", "b": "n1", "plus": "n0"},
            {"id": "R1", "kind": "resistor", "value": 3.0, "unit": "ohm",
             "a": "n0", "b": "n1", "plus": None},
        ],
    }
    client.post(f"/projects/{pid}/netlist/edit", json={"action": "replace", "netlist": base})

    r = client.post(f"/projects/{pid}/netlist/edit", json={
        "action": "disconnect", "component": "R1"})
    assert [c["id"] for c in r.json()["components"]] == ["V1"]

    r = client.post(f"/projects/{pid}/netlist/edit", json={
        "action": "connect", "component": "R2", "kind": "resistor",
        "value": 2.0, "a": "n0", "b": "n1"})
    assert {c["id"] for c in r.json()["components"]} == {"V1", "R2"}

    sid = client.post(f"/projects/{pid}/sessions", json={}).json()["session_id"]
    client.post(f"/sessions/{sid}/run")
    frame = client.get(f"/sessions/{sid}/frame").json()
    assert frame["payload"]["solution"]["currents"]["R2"] == 3.0

    r = client.post(f"/projects/{pid}/netlist/edit", json={
        "action": "disconnect", "component": "nope"})
    assert r.status_code == 404


def test_delete_session_closes_stream(client):
    pid, block, sid = kinematics_session(client)
    with client.websocket_connect(f"/sessions/{sid}/stream") as ws:
        ws.receive_text()
        client.delete(f"/sessions/{sid}")
        with pytest.raises(Exception):
            for _ in range(3):
                ws.receive_text()
    assert client.get(f"/sessions/{sid}").status_code == 404
