import dataclasses
import json
from pathlib import Path

import numpy as np
import pytest

from gluelocus import cli, curvelang, frames
from gluelocus import scene as sc

FIXTURES = Path(__file__).parent / "fixtures"


def surface_frame(src, orientation=1, singular=(), interval=(-1.0, 1.0)):
    return frames.frame_from_surface(curvelang.parse(src), orientation,
                                     [frames.SingularParam(t0, m) for t0, m in singular], interval)


_SCENES = {}


def gallery_scene(name, frame_source=None):
    """Built scene for a bundled example, cached across tests."""
    key = (name, frame_source)
    if key not in _SCENES:
        cfg = sc.load_config(cli.gallery_path(f"{name}.json"))
        if frame_source:
            cfg = dataclasses.replace(cfg, frame_source=frame_source)
        _SCENES[key] = sc.build_scene(cfg)
    return _SCENES[key]


_REPORTS = {}


def gallery_report(name):
    if name not in _REPORTS:
        _REPORTS[name] = sc.make_report(gallery_scene(name))
    return _REPORTS[name]


@pytest.fixture(scope="session")
def sympy_fixture():
    return json.loads((FIXTURES / "sympy_invariants.json").read_text())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
