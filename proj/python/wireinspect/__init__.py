"""Wire harness colour-sequence inspection.

Thin wrappers over the native core: specs, view configs and results travel
as plain dicts; images are H x W x 3 uint8 numpy arrays.
"""

import json

from . import _core
from ._core import Error, Profile, read_png, write_png

__all__ = [
    "Error",
    "Profile",
    "connector_roi",
    "expected_verdict",
    "generate",
    "inspect",
    "read_png",
    "segment",
    "train",
    "write_png",
]


def generate(spec, variant="none"):
    """Render a synthetic harness. Returns (frame, truth boxes, orientation)."""
    frame, boxes, orientation = _core.generate(json.dumps(spec), variant)
    return frame, json.loads(boxes), orientation


def expected_verdict(spec, variant):
    return _core.expected_verdict(json.dumps(spec), variant)


def connector_roi(spec):
    x, y, w, h = _core.connector_roi(json.dumps(spec))
    return {"x": x, "y": y, "width": w, "height": h}


def segment(cropped, expected_wires):
    path, boxes, detail = _core.segment(cropped, expected_wires)
    return {"path": path, "boxes": json.loads(boxes), "detail": detail}


def train(views_config, samples, profile_id=""):
    """samples[v][s] is training frame s of view v."""
    return _core.train(json.dumps(views_config), samples, profile_id)


def inspect(frames, profile):
    return json.loads(_core.inspect(list(frames), profile))
