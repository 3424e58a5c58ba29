"""JSON file formats and deterministic artifact writers.

Channel file::

    {"cards": [X1, X2, X3, Y1, Y2], "w": [... row-major (x1,x2,x3,y1,y2) ...]}

Z-channel file (``cards`` fixes the reshape)::

    {"w2": [... (x1,x2,x3,y2) ...], "w1": [... (y2,x3,y1) ...], "cards": [...]}

Distribution file: one object or ``{"distributions": [...]}`` of objects::

    {"scheme": "theorem1", "cards": {"U1p": 2, ...},
     "factors": {"U1p|": [...], "U1|U1p": [...], ...}, "label": "..."}

Each factor array is flat, row-major over ``parents + children``.

Inequality-system file::

    {"vars": ["x", "y", "z"],
     "rows": [{"coeffs": {"x": 1, "z": -1}, "sense": "<=", "const": 2}, ...],
     "keep": ["x", "y"]}          # or "eliminate": ["z"]
"""

from __future__ import annotations

import csv
import hashlib
import io as _io
import json
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np

from . import __version__
from .channel import ChannelSpec, ZChannelSpec, lift_z_channel, validate_channel
from .distributions import FactoredDistribution, scheme_factors
from .errors import LengthMismatch, UnknownVariable, ValidationError
from .region import InequalitySystem, RatePolytope


class FileFormatError(ValidationError):
    pass


def read_json(path) -> Any:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise FileFormatError(f"{path}: invalid JSON ({e})") from None


def _field(doc: Mapping, key: str, what: str):
    if not isinstance(doc, Mapping) or key not in doc:
        raise FileFormatError(f"{what} is missing field {key!r}")
    return doc[key]


def _flat(values, what: str) -> np.ndarray:
    try:
        arr = np.asarray(values, dtype=float).ravel()
    except (TypeError, ValueError):
        raise FileFormatError(f"{what} must be a numeric array") from None
    return arr


def channel_from_dict(doc: Mapping, name: str = "") -> ChannelSpec:
    """Plain or Z channel; Z channels come back lifted with ``degraded_z``."""
    name = str(doc.get("name", name)) if isinstance(doc, Mapping) else name
    if isinstance(doc, Mapping) and "w2" in doc:
        return lift_z_channel(z_channel_from_dict(doc, name))
    cards = _field(doc, "cards", "channel file")
    return validate_channel(cards, _flat(_field(doc, "w", "channel file"), "w"), name)


def z_channel_from_dict(doc: Mapping, name: str = "") -> ZChannelSpec:
    w2 = _flat(_field(doc, "w2", "Z-channel file"), "w2")
    w1 = _flat(_field(doc, "w1", "Z-channel file"), "w1")
    if "cards" in doc:
        c = [int(x) for x in doc["cards"]]
        if len(c) != 5:
            raise ValidationError(f"expected 5 cardinalities, got {len(c)}")
        x1, x2, x3, y1, y2 = c
    else:
        raise FileFormatError("Z-channel file needs 'cards' to reshape w2 and w1")
    if w2.size != x1 * x2 * x3 * y2:
        raise LengthMismatch(f"w2 has {w2.size} entries, expected {x1 * x2 * x3 * y2}")
    if w1.size != y2 * x3 * y1:
        raise LengthMismatch(f"w1 has {w1.size} entries, expected {y2 * x3 * y1}")
    return ZChannelSpec(w2.reshape(x1, x2, x3, y2), w1.reshape(y2, x3, y1), name=name)


def load_channel(path) -> ChannelSpec:
    return channel_from_dict(read_json(path), name=Path(path).stem)


def channel_to_dict(ch: ChannelSpec) -> dict:
    return {"cards": list(ch.cards), "w": [float(x) for x in ch.w.ravel()]}


def z_channel_to_dict(z: ZChannelSpec) -> dict:
    return {"cards": list(z.cards), "w2": [float(x) for x in z.w2.ravel()],
            "w1": [float(x) for x in z.w1.ravel()]}


def distribution_from_dict(doc: Mapping) -> FactoredDistribution:
    scheme = str(_field(doc, "scheme", "distribution"))
    cards = {str(k): int(v) for k, v in dict(_field(doc, "cards", "distribution")).items()}
    raw = dict(_field(doc, "factors", "distribution"))
    factors = {}
    for f in scheme_factors(scheme):
        if f.kind == "channel" or f.key not in raw:
            continue
        shape = tuple(cards.get(v, 0) for v in f.parents + f.children)
        arr = _flat(raw[f.key], f"factor {f.key}")
        if arr.size != int(np.prod(shape)):
            raise LengthMismatch(f"factor {f.key} has {arr.size} entries, expected {int(np.prod(shape))}")
        factors[f.key] = arr.reshape(shape)
    # unknown keys surface as SignatureMismatch from the constructor
    for k in raw:
        factors.setdefault(k, np.asarray(raw[k], dtype=float))
    return FactoredDistribution(scheme, cards, factors, label=str(doc.get("label", "")))


def distribution_to_dict(fd: FactoredDistribution) -> dict:
    return {
        "scheme": fd.scheme,
        "label": fd.label,
        "cards": dict(fd.cards),
        "factors": {k: [float(x) for x in np.ravel(v)] for k, v in fd.factors.items()},
    }


def load_distributions(path) -> list[FactoredDistribution]:
    doc = read_json(path)
    docs = doc["distributions"] if isinstance(doc, Mapping) and "distributions" in doc else [doc]
    if not docs:
        raise FileFormatError("distribution file lists no distributions")
    return [distribution_from_dict(d) for d in docs]


def system_from_dict(doc: Mapping) -> tuple[InequalitySystem, tuple[str, ...]]:
    """The system and the variables to keep."""
    vars = [str(v) for v in _field(doc, "vars", "system file")]
    rows = []
    for k, r in enumerate(_field(doc, "rows", "system file")):
        coeffs = _field(r, "coeffs", f"row {k}")
        if not isinstance(coeffs, Mapping):
            coeffs = list(coeffs)
            if len(coeffs) != len(vars):
                raise LengthMismatch(f"row {k} has {len(coeffs)} coefficients for {len(vars)} variables")
            coeffs = dict(zip(vars, coeffs))
        rows.append(({str(v): float(c) for v, c in coeffs.items()}, str(r.get("sense", "<=")),
                     float(_field(r, "const", f"row {k}")), str(r.get("label", f"r{k}"))))
    sys = InequalitySystem.build(vars, rows, name=str(doc.get("name", "")))
    if "keep" in doc:
        keep = tuple(str(v) for v in doc["keep"])
    elif "eliminate" in doc:
        gone = {str(v) for v in doc["eliminate"]}
        keep = tuple(v for v in vars if v not in gone)
    else:
        raise FileFormatError("system file needs 'keep' or 'eliminate'")
    unknown = [v for v in keep if v not in vars]
    if unknown:
        raise UnknownVariable(f"cannot keep undeclared variables {unknown}")
    return sys, keep


# -- artifacts -----------------------------------------------------------

def canonical_json(obj: Any) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2, allow_nan=True) + "\n"


def _plain(obj):
    if isinstance(obj, Mapping):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def config_hash(config: Mapping) -> str:
    return hashlib.sha256(json.dumps(_plain(config), sort_keys=True).encode()).hexdigest()[:16]


def header(config: Mapping) -> dict:
    return {"tool": "rrlab", "version": __version__, "config_hash": config_hash(config),
            "seed": config.get("seed"), "config": _plain(dict(config))}


def write_json(path, payload: Mapping, config: Mapping) -> Path:
    path = Path(path)
    path.write_text(canonical_json({"header": header(config), **payload}))
    return path


def write_csv(path, columns: Iterable[str], rows: Iterable[Iterable], config: Mapping) -> Path:
    """CSV with ``#`` comment lines carrying version, config hash and seed."""
    h = header(config)
    buf = _io.StringIO()
    buf.write(f"# rrlab {h['version']}\n# config_hash {h['config_hash']}\n# seed {h['seed']}\n")
    buf.write(f"# config {json.dumps(h['config'], sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(columns))
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    path = Path(path)
    path.write_text(buf.getvalue())
    return path


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return x


def polytope_to_dict(poly: RatePolytope) -> dict:
    return {
        "empty": poly.is_empty,
        "vertices": [list(v) for v in poly.vertices],
        "halfplanes": [{"a1": h[0], "a2": h[1], "c": h[2]} for h in poly.halfplanes],
    }
