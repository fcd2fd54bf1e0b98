"""JSON and CSV (de)serialization.

Complex numbers are written as ``[re, im]`` pairs. System files hold ``E, A, N``
as nested row-major arrays, ``B`` as an ``n x 1`` column and ``C`` as a
``1 x n`` row. Python's float repr round-trips exactly, so JSON -> object ->
JSON is bit-identical for finite values.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .core import BilinearSystem, GeneratorPair
from .pencil import LoewnerData, MultiTupleSet
from .rom import MomentMatchingROM
from .sim import SimulationTrace


def encode(a):
    """Recursively turn complex scalars/arrays into ``[re, im]`` pairs."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim == 0:
        z = complex(arr)
        return [float(z.real), float(z.imag)]
    return [encode(x) for x in arr]


def _is_pair(x):
    return (isinstance(x, (list, tuple)) and len(x) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x))


def decode(obj, depth: int):
    """Inverse of :func:`encode` for an array of ``depth`` dimensions.

    Plain real numbers are accepted in place of ``[re, 0]`` pairs.
    """
    if depth == 0:
        if _is_pair(obj):
            return complex(obj[0], obj[1])
        if isinstance(obj, (int, float)) and not isinstance(obj, bool):
            return complex(obj)
        if isinstance(obj, str):
            return complex(obj.replace(" ", ""))
        raise ValueError(f"cannot read {obj!r} as a complex number")
    if not isinstance(obj, (list, tuple)):
        raise ValueError(f"expected a nested list of depth {depth}, got {obj!r}")
    return [decode(x, depth - 1) for x in obj]


def _array(obj, depth):
    return np.array(decode(obj, depth), dtype=complex)


def system_to_dict(sys: BilinearSystem, meta=None) -> dict:
    d = {
        "E": encode(sys.E),
        "A": encode(sys.A),
        "N": encode(sys.N),
        "B": encode(sys.B.reshape(-1, 1)),
        "C": encode(sys.C.reshape(1, -1)),
    }
    if meta is not None:
        d["meta"] = meta
    return d


def system_from_dict(d: dict) -> BilinearSystem:
    missing = [k for k in ("E", "A", "N", "B", "C") if k not in d]
    if missing:
        raise ValueError(f"system file lacks keys {missing}")
    return BilinearSystem(
        _array(d["E"], 2), _array(d["A"], 2), _array(d["N"], 2),
        _array(d["B"], 2), _array(d["C"], 2),
    )


def generator_to_dict(gen: GeneratorPair) -> dict:
    return {"lambda": encode(gen.lam), "R": encode(gen.R), "mu": encode(gen.mu), "L": encode(gen.L)}


def generator_from_dict(d: dict) -> GeneratorPair:
    lam = _array(d["lambda"], 1)
    mu = _array(d["mu"], 1)
    R = _array(d["R"], 1) if "R" in d else np.ones(len(lam))
    L = _array(d["L"], 1) if "L" in d else np.ones(len(mu))
    return GeneratorPair(lam, R, mu, L)


def tuples_to_dict(t: MultiTupleSet) -> dict:
    return {"left": [encode(x) for x in t.left], "right": [encode(x) for x in t.right]}


def tuples_from_dict(d: dict) -> MultiTupleSet:
    return MultiTupleSet(left=[decode(x, 1) for x in d["left"]],
                         right=[decode(x, 1) for x in d["right"]])


def mm_rom_to_dict(rom: MomentMatchingROM) -> dict:
    d = rom.data
    return {
        "kind": "moment_matching",
        "kappa": rom.kappa,
        "rho": rom.rho,
        "Lw": encode(d.Lw),
        "Lws": encode(d.Lws),
        "T": encode(d.T),
        "V": encode(d.V),
        "W": encode(d.W),
        "generator": generator_to_dict(rom.gen),
    }


def mm_rom_from_dict(d: dict) -> MomentMatchingROM:
    gen = generator_from_dict(d["generator"])
    if int(d["rho"]) != gen.rho:
        raise ValueError("rho does not match the stored generator")
    data = LoewnerData(
        Lw=_array(d["Lw"], 2), Lws=_array(d["Lws"], 2), T=_array(d["T"], 2),
        V=_array(d["V"], 1), W=_array(d["W"], 1),
    )
    return MomentMatchingROM(data=data, kappa=int(d["kappa"]), gen=gen)


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=1) + "\n", encoding="utf-8")


def load_system(path) -> BilinearSystem:
    return system_from_dict(read_json(path))


def save_system(path, sys: BilinearSystem, meta=None):
    write_json(path, system_to_dict(sys, meta))


def load_generator(path) -> GeneratorPair:
    return generator_from_dict(read_json(path))


def save_generator(path, gen: GeneratorPair):
    write_json(path, generator_to_dict(gen))


def load_model(path):
    """A :class:`BilinearSystem` or a :class:`MomentMatchingROM`, by schema."""
    d = read_json(path)
    if d.get("kind") == "moment_matching":
        return mm_rom_from_dict(d)
    return system_from_dict(d)


def read_points(path):
    """JSON list of point tuples; each point a number or ``[re, im]`` pair.

    ``[[2, 1]]`` is one tuple of two real points; ``[[[2, 1]]]`` is one tuple
    holding the single point ``2+1j``.
    """
    raw = read_json(path)
    if not isinstance(raw, list) or not all(isinstance(t, list) for t in raw):
        raise ValueError("points file must hold a JSON list of tuples")
    return [tuple(decode(t, 1)) for t in raw]


TRACE_HEADER = ["t", "u_re", "u_im", "y_re", "y_im"]


def write_trace_csv(fh, trace: SimulationTrace):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(TRACE_HEADER)
    for t, u, y in zip(trace.t, trace.u, trace.y):
        w.writerow([repr(float(v)) for v in (t, u.real, u.imag, y.real, y.imag)])


def read_trace_csv(path, state_dim: int = 0) -> SimulationTrace:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != TRACE_HEADER:
        raise ValueError(f"{path}: expected header {','.join(TRACE_HEADER)}")
    data = np.array([[float(v) for v in r] for r in rows[1:]])
    if data.ndim != 2 or data.shape[0] < 2:
        raise ValueError(f"{path}: need at least two samples")
    return SimulationTrace(t=data[:, 0], u=data[:, 1] + 1j * data[:, 2],
                           y=data[:, 3] + 1j * data[:, 4], state_dim=state_dim)
