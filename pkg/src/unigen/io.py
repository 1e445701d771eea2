"""JSON encoding for problems, targets, words, completed bases and nets.

Output is canonical: keys sorted, floats written with 17 significant digits,
so serialize -> parse -> serialize is byte-identical. Complex matrix entries
are ``[re, im]`` pairs in row-major nested lists; plain numbers are accepted
on input.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict
from pathlib import Path
from typing import Any

import numpy as np

from .algebra import GeneratorSet
from .completion import CompletedBasis, ConjugationWord, ExtendedElement
from .errors import UnigenError
from .matrix import frozen
from .synthesis import CoverageStats, CoverNet, NetConfig
from .words import GeneratorWord

NET_FORMAT = "unigen-net/1"
BASIS_FORMAT = "unigen-basis/1"


class FormatError(UnigenError, ValueError):
    """Malformed input file; the message names the position or field."""


# --- canonical writer --------------------------------------------------------


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x!r}")
    text = format(x, ".17g")
    if text == "-0":
        text = "0"
    return text


def _encode(obj: Any, indent: int | None, level: int) -> str:
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = [(str(k), v) for k, v in obj.items()]
        items.sort(key=lambda kv: kv[0])
        parts = [f"{json.dumps(k)}: {_encode(v, indent, level + 1)}" for k, v in items]
        return _join(parts, "{", "}", indent, level)
    if isinstance(obj, (list, tuple, np.ndarray)):
        parts = [_encode(v, indent, level + 1) for v in obj]
        # numeric leaves stay on one line to keep matrices readable
        flat = all(_is_scalar(v) or (isinstance(v, (list, tuple)) and all(_is_scalar(x) for x in v)) for v in obj)
        return _join(parts, "[", "]", None if flat else indent, level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _is_scalar(v) -> bool:
    return not isinstance(v, (dict, list, tuple, np.ndarray))


def _join(parts: list[str], open_: str, close: str, indent: int | None, level: int) -> str:
    if not parts:
        return open_ + close
    if indent is None:
        return open_ + ", ".join(parts) + close
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    return open_ + "\n" + ",\n".join(pad + p for p in parts) + "\n" + end + close


def dumps(obj: Any, indent: int | None = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def write_json(path, obj: Any) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path) -> Any:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


# --- matrices ---------------------------------------------------------------


def encode_matrix(M) -> list:
    M = np.asarray(M)
    return [[[float(np.real(z)), float(np.imag(z))] for z in row] for row in M]


def decode_matrix(data, where: str = "matrix") -> np.ndarray:
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise FormatError(f"{where}: expected a non-empty list of rows")
    n = len(data)
    out = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(data):
        if len(row) != n:
            raise FormatError(f"{where}[{i}]: row has {len(row)} entries, expected {n}")
        for j, z in enumerate(row):
            if isinstance(z, (int, float)) and not isinstance(z, bool):
                out[i, j] = float(z)
            elif isinstance(z, list) and len(z) == 2 and all(isinstance(c, (int, float)) for c in z):
                out[i, j] = complex(z[0], z[1])
            else:
                raise FormatError(f"{where}[{i}][{j}]: expected a number or [re, im] pair")
    if not np.all(np.isfinite(out)):
        raise FormatError(f"{where}: non-finite entry")
    return out


def _is_matrix(data) -> bool:
    return isinstance(data, list) and bool(data) and isinstance(data[0], list) and bool(data[0]) and (
        isinstance(data[0][0], (int, float)) or (isinstance(data[0][0], list) and len(data[0][0]) == 2
                                                 and isinstance(data[0][0][0], (int, float)))
    )


# --- problems and targets -----------------------------------------------------


def encode_problem(gens: GeneratorSet, expected_algebra_dim: int | None = None) -> dict:
    return {
        "dim": gens.dim,
        "structure": gens.structure.value,
        "generators": [encode_matrix(g) for g in gens.elements],
        "labels": list(gens.labels),
        "expected_algebra_dim": expected_algebra_dim,
    }


def decode_problem(data) -> tuple[GeneratorSet, int | None]:
    if not isinstance(data, dict):
        raise FormatError("problem: expected a JSON object")
    for key in ("dim", "structure", "generators"):
        if key not in data:
            raise FormatError(f"problem: missing field '{key}'")
    dim = data["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise FormatError("problem.dim: expected a positive integer")
    if not isinstance(data["generators"], list) or not data["generators"]:
        raise FormatError("problem.generators: expected a non-empty list")
    mats = []
    for k, g in enumerate(data["generators"]):
        M = decode_matrix(g, f"problem.generators[{k}]")
        if M.shape != (dim, dim):
            raise FormatError(f"problem.generators[{k}]: shape {M.shape} does not match dim {dim}")
        mats.append(M)
    expected = data.get("expected_algebra_dim")
    if expected is not None and not isinstance(expected, int):
        raise FormatError("problem.expected_algebra_dim: expected an integer")
    try:
        gens = GeneratorSet.from_matrices(mats, data.get("labels"), data["structure"])
    except (UnigenError, ValueError) as exc:
        raise FormatError(f"problem.generators: {exc}") from exc
    return gens, expected


def load_problem(path) -> tuple[GeneratorSet, int | None]:
    return decode_problem(read_json(path))


def decode_targets(data) -> list[np.ndarray]:
    """Targets from ``{"targets": [M, ...]}``, ``{"target": M}`` or a bare matrix/list.

    A bare top-level list is read as a single matrix when it looks like one;
    use the ``targets`` key to remove the ambiguity for 2x2 real entries.
    """
    if isinstance(data, dict):
        if "targets" in data:
            items = data["targets"]
            if not isinstance(items, list) or not items:
                raise FormatError("targets: expected a non-empty list of matrices")
            return [decode_matrix(d, f"targets[{k}]") for k, d in enumerate(items)]
        for key in ("target", "matrix"):
            if key in data:
                return [decode_matrix(data[key], key)]
        raise FormatError("target: expected 'target', 'targets' or 'matrix'")
    if _is_matrix(data):
        return [decode_matrix(data, "target")]
    if isinstance(data, list) and data:
        return [decode_matrix(d, f"targets[{k}]") for k, d in enumerate(data)]
    raise FormatError("target: expected a matrix or a list of matrices")


def load_targets(path) -> list[np.ndarray]:
    return decode_targets(read_json(path))


def encode_targets(targets) -> dict:
    return {"targets": [encode_matrix(t) for t in targets]}


# --- words --------------------------------------------------------------------


def encode_letters(letters) -> list:
    return [[int(i), float(t)] for i, t in letters]


def decode_letters(data, where: str = "letters") -> tuple[tuple[int, float], ...]:
    if not isinstance(data, list):
        raise FormatError(f"{where}: expected a list of [index, time] pairs")
    out = []
    for k, item in enumerate(data):
        if not (isinstance(item, list) and len(item) == 2 and isinstance(item[0], int)
                and isinstance(item[1], (int, float))):
            raise FormatError(f"{where}[{k}]: expected [index, time]")
        out.append((int(item[0]), float(item[1])))
    return tuple(out)


def encode_word(word: GeneratorWord, error: float | None = None) -> dict:
    return {
        "letters": encode_letters(word.letters),
        "length": word.length,
        "bound": word.bound_used,
        "error": float(word.product_error if error is None else error),
    }


def decode_word(data) -> GeneratorWord:
    if not isinstance(data, dict) or "letters" not in data:
        raise FormatError("word: expected an object with 'letters'")
    err = data.get("error", 0.0)
    return GeneratorWord(decode_letters(data["letters"], "word.letters"), data.get("bound"), float(err or 0.0))


# --- completed basis ------------------------------------------------------------


def encode_basis(basis: CompletedBasis) -> dict:
    return {
        "format": BASIS_FORMAT,
        "problem": encode_problem(basis.generators, basis.n),
        "extended": [
            {
                "element": encode_matrix(e.element),
                "factors": encode_letters(e.word.factors),
                "core_index": e.word.core_index,
                "conjugator": e.conjugator,
                "core": e.core,
                "t": e.t,
                "score": e.score,
            }
            for e in basis.extended
        ],
    }


def decode_basis(data) -> CompletedBasis:
    if not isinstance(data, dict) or data.get("format") != BASIS_FORMAT:
        raise FormatError(f"basis: expected format '{BASIS_FORMAT}'")
    gens, _ = decode_problem(data["problem"])
    extended = []
    for k, e in enumerate(data["extended"]):
        M = decode_matrix(e["element"], f"basis.extended[{k}].element")
        if gens.is_real:
            M = M.real
        word = ConjugationWord(decode_letters(e["factors"]), int(e["core_index"]))
        extended.append(ExtendedElement(frozen(M), word, int(e["conjugator"]), int(e["core"]),
                                        float(e["t"]), float(e["score"])))
    return CompletedBasis(gens, tuple(extended))


# --- nets ---------------------------------------------------------------------------


def encode_net(net: CoverNet, gens: GeneratorSet) -> dict:
    return {
        "format": NET_FORMAT,
        "radius": net.radius,
        "seed": net.config.seed,
        "config": asdict(net.config),
        "generators": [encode_matrix(g) for g in gens.elements],
        "coverage": asdict(net.coverage_stats),
        "points": [
            {"element": encode_matrix(K), "letters": encode_letters(w.letters)}
            for K, w in zip(net.elements, net.words)
        ],
    }


def decode_net(data, gens: GeneratorSet) -> CoverNet:
    if not isinstance(data, dict) or data.get("format") != NET_FORMAT:
        raise FormatError(f"net cache: expected format '{NET_FORMAT}'")
    stored = [decode_matrix(g, "net.generators") for g in data["generators"]]
    if len(stored) != gens.m or any(not np.array_equal(a, b) for a, b in zip(stored, gens.elements)):
        raise FormatError("net cache: generators differ from the problem")
    elements = np.array([decode_matrix(p["element"], f"net.points[{k}]") for k, p in enumerate(data["points"])])
    if gens.is_real:
        elements = elements.real
    words = tuple(GeneratorWord(decode_letters(p["letters"]), None, 0.0) for p in data["points"])
    return CoverNet(frozen(elements), words, float(data["radius"]), CoverageStats(**data["coverage"]),
                    NetConfig(**data["config"]))
