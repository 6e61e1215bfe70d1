import io
import math
import random

import pytest

from factories import random_map

from viewprune.map_model import MapGraph, Pose2D, View
from viewprune.persistence import (DuplicateIdError, MalformedRecordError, MapFormatError,
                                   MapVersionError, dumps_map, load_map, loads_map, save_map)


def test_empty_map():
    text = dumps_map(MapGraph())
    assert text.count("\n") == 1 and text.startswith("viewmap-v1")
    assert loads_map(text) == MapGraph()


def test_two_views_in_id_order():
    g = MapGraph()
    c = g.new_component()
    g.insert_view(c.id, View(9, Pose2D(1, 2, 0.5), "day"))
    g.insert_view(c.id, View(4, Pose2D(0.1, 0.2, -0.3), "night"))
    lines = [l for l in dumps_map(g).splitlines() if l.startswith("view ")]
    assert [l.split()[1] for l in lines] == ["4", "9"]


def test_round_trip_random_maps():
    rng = random.Random(7)
    for _ in range(50):
        g = random_map(rng)
        text = dumps_map(g)
        back = loads_map(text)
        assert back == g
        assert dumps_map(back) == text


def test_file_and_stream():
    g = random_map(random.Random(3))
    buf = io.StringIO()
    n = save_map(g, buf)
    assert n == len(buf.getvalue().encode())
    buf.seek(0)
    assert load_map(buf) == g


def test_save_to_path(tmp_path):
    g = random_map(random.Random(4))
    save_map(g, tmp_path / "m.txt")
    assert load_map(tmp_path / "m.txt") == g


def test_floats_survive_exactly():
    g = MapGraph()
    c = g.new_component()
    x = 0.1 + 0.2
    g.insert_view(c.id, View(1, Pose2D(x, math.pi / 3, 1e-17), "day"))
    v = loads_map(dumps_map(g)).view(1)
    assert v.pose.x == x and v.pose.y == math.pi / 3 and v.pose.theta == 1e-17


HEADER = "viewmap-v1 env=t runs=2\ncomponent 1 runs=2\n"
VIEW = ("view {id} comp=1 x=0 y=0 th={th} appearance=day n_obs_cur=0 created_run=1"
        " created_at=0 n_runs=2 n_obs_runs=1 reloc=0\n")


def test_duplicate_view_id():
    with pytest.raises(DuplicateIdError):
        loads_map(HEADER + VIEW.format(id=1, th=0) + VIEW.format(id=1, th=0))


def test_duplicate_component():
    with pytest.raises(DuplicateIdError):
        loads_map(HEADER + "component 1 runs=1\n")


def test_theta_normalized_with_warning():
    g = loads_map(HEADER + VIEW.format(id=1, th=4.0) + VIEW.format(id=2, th=0.5))
    assert g.view(1).pose.theta == pytest.approx(4.0 - 2 * math.pi)
    assert g.load_warnings == 1


@pytest.mark.parametrize("text,kind", [
    ("viewmap-v2\n", MapVersionError),
    ("component 1\n", MapVersionError),
    ("", MapVersionError),
    ("viewmap-v1 colour=red\n", MapVersionError),
    (HEADER + "vew 1\n", MalformedRecordError),
    (HEADER + VIEW.format(id=1, th="abc"), MalformedRecordError),
    (HEADER + VIEW.format(id=1, th="nan"), MalformedRecordError),
    (HEADER + "view 3 comp=1 x=0\n", MalformedRecordError),
    (HEADER + VIEW.format(id=1, th=0).replace("comp=1", "comp=5"), MalformedRecordError),
    (HEADER + VIEW.format(id=1, th=0).replace("n_obs_runs=1", "n_obs_runs=3"),
     MalformedRecordError),
])
def test_errors(text, kind):
    with pytest.raises(kind) as exc:
        loads_map(text)
    assert isinstance(exc.value, MapFormatError)


def test_error_names_line():
    with pytest.raises(MalformedRecordError) as exc:
        loads_map(HEADER + "\n# note\n" + VIEW.format(id=1, th="x"))
    assert exc.value.line == 5 and "line 5" in str(exc.value)


def test_header_fields_optional():
    g = loads_map("viewmap-v1\ncomponent 3\n" + VIEW.format(id=8, th=0).replace("comp=1", "comp=3"))
    assert g.next_view_id == 9 and g.next_component_id == 4 and g.run_index == 0


def test_rejects_spaces_in_keys():
    g = MapGraph(env_id="two words")
    with pytest.raises(ValueError):
        dumps_map(g)
