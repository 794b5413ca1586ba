"""JSON file formats.

Matrices are ``{"dim": d, "entries": [[[re, im], ...], ...]}`` (row-major).
Rationals are written as ``"p/q"`` strings; readers also accept plain numbers.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .games import SynchronousGame, SyncQuantumStrategy, uniform_distribution
from .graph import GameGraph
from .indepset import IndependentSetGame, IndepStrategy


class FormatError(ValueError):
    """A file does not parse against its format."""


def _need(obj: dict, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise FormatError(f"{where}: missing field {key!r}")
    return obj[key]


def _num(x):
    if isinstance(x, int) and not isinstance(x, bool):
        return x
    if isinstance(x, float):
        return x
    raise FormatError(f"expected a number, got {x!r}")


# --- rationals ---------------------------------------------------------------

def dump_scalar(x):
    if isinstance(x, Fraction):
        return str(x)
    return float(x)


def load_scalar(x, where: str = "value"):
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError):
            raise FormatError(f"{where}: cannot parse rational {x!r}") from None
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise FormatError(f"{where}: expected a number or 'p/q' string, got {x!r}")
    return Fraction(x) if isinstance(x, int) else x


def load_distribution(rows, n: int, where: str = "distribution") -> np.ndarray:
    if not isinstance(rows, list) or len(rows) != n or any(not isinstance(r, list) or len(r) != n for r in rows):
        raise FormatError(f"{where}: expected a {n}x{n} matrix")
    vals = [[load_scalar(x, f"{where}[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(rows)]
    flat = [x for r in vals for x in r]
    if all(isinstance(x, Fraction) for x in flat):
        pi = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(n):
                pi[i, j] = vals[i][j]
        return pi
    return np.array([[float(x) for x in r] for r in vals])


# --- matrices ------------------------------------------------------------------

def dump_matrix(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {
        "dim": int(m.shape[0]),
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }


def load_matrix(obj, where: str = "matrix") -> np.ndarray:
    d = _need(obj, "dim", where)
    rows = _need(obj, "entries", where)
    if not isinstance(d, int) or d < 1:
        raise FormatError(f"{where}: dim must be a positive integer")
    if not isinstance(rows, list) or len(rows) != d:
        raise FormatError(f"{where}: expected {d} rows")
    out = np.empty((d, d), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != d:
            raise FormatError(f"{where}: row {i} must have {d} entries")
        for j, z in enumerate(row):
            if not isinstance(z, list) or len(z) != 2:
                raise FormatError(f"{where}[{i}][{j}]: expected [re, im]")
            out[i, j] = complex(_num(z[0]), _num(z[1]))
    return out


def dump_operators(ops) -> dict:
    ops = [np.asarray(x) for x in ops]
    return {"dim": int(ops[0].shape[0]) if ops else 0, "operators": [dump_matrix(x) for x in ops]}


def load_operators(obj, where: str = "operators") -> list[np.ndarray]:
    d = _need(obj, "dim", where)
    mats = [load_matrix(x, f"{where}[{k}]") for k, x in enumerate(_need(obj, "operators", where))]
    if any(m.shape[0] != d for m in mats):
        raise FormatError(f"{where}: operator dimension differs from dim={d}")
    return mats


# --- games ---------------------------------------------------------------------

def _labels(x, where):
    if isinstance(x, int) and not isinstance(x, bool):
        if x < 1:
            raise FormatError(f"{where}: count must be positive")
        return list(range(x))
    if isinstance(x, list) and x:
        return [tuple(v) if isinstance(v, list) else v for v in x]
    raise FormatError(f"{where}: expected a positive count or a label list")


def game_to_json(g: SynchronousGame) -> dict:
    return {
        "questions": list(g.questions),
        "answers": list(g.answers),
        "distribution": [[dump_scalar(x) for x in row] for row in g.distribution],
        "losing_pairs": [
            [g.questions[q], g.questions[q2], g.answers[a], g.answers[a2]]
            for q, q2, a, a2 in g.losing_pairs()
        ],
    }


def game_from_json(obj: dict) -> SynchronousGame:
    where = "game"
    questions = _labels(_need(obj, "questions", where), "questions")
    answers = _labels(_need(obj, "answers", where), "answers")
    nq = len(questions)
    dist = _need(obj, "distribution", where)
    if dist == "uniform":
        pi = uniform_distribution(nq)
    elif dist == "diag_weighted":
        pi = np.empty((nq, nq), dtype=object)
        for i in range(nq):
            for j in range(nq):
                pi[i, j] = Fraction(int(i == j), 2 * nq) + Fraction(1, 2 * nq * nq)
    else:
        pi = load_distribution(dist, nq)
    qi = {q: i for i, q in enumerate(questions)}
    ai = {a: i for i, a in enumerate(answers)}
    losing = []
    for k, tup in enumerate(_need(obj, "losing_pairs", where)):
        if not isinstance(tup, list) or len(tup) != 4:
            raise FormatError(f"losing_pairs[{k}]: expected [q, q', a, a']")
        q, q2, a, a2 = (tuple(x) if isinstance(x, list) else x for x in tup)
        try:
            losing.append((qi[q], qi[q2], ai[a], ai[a2]))
        except KeyError as e:
            raise FormatError(f"losing_pairs[{k}]: unknown label {e.args[0]!r}") from None
    return SynchronousGame.from_losing_pairs(questions, answers, pi, losing)


# --- graphs and independent set games ------------------------------------------

def _vertex_json(v):
    return list(v) if isinstance(v, tuple) else v


def graph_to_json(x: GameGraph) -> dict:
    return {
        "vertices": [_vertex_json(v) for v in x.vertices],
        "edges": [[_vertex_json(x.vertices[i]), _vertex_json(x.vertices[j])] for i, j in x.edges()],
    }


def graph_from_json(obj: dict) -> GameGraph:
    vertices = _need(obj, "vertices", "graph")
    edges = _need(obj, "edges", "graph")
    if not isinstance(vertices, list) or not isinstance(edges, list):
        raise FormatError("graph: vertices and edges must be arrays")
    for k, e in enumerate(edges):
        if not isinstance(e, list) or len(e) != 2:
            raise FormatError(f"edges[{k}]: expected a vertex pair")
    return GameGraph.from_edges(vertices, edges)


def isgame_to_json(game: IndependentSetGame) -> dict:
    out = {"graph": graph_to_json(game.graph), "t": game.t, "weighting": game.weighting}
    if game.source is not None:
        out["source"] = game_to_json(game.source)
    return out


def isgame_from_json(obj: dict) -> IndependentSetGame:
    graph = graph_from_json(_need(obj, "graph", "independent set game"))
    t = _need(obj, "t", "independent set game")
    weighting = obj.get("weighting", "diagonal")
    if not isinstance(t, int) or isinstance(t, bool):
        raise FormatError("t must be an integer")
    source = game_from_json(obj["source"]) if "source" in obj else None
    return IndependentSetGame(graph, t, weighting, source)


# --- strategies ------------------------------------------------------------------

def sync_strategy_to_json(s: SyncQuantumStrategy, g: SynchronousGame | None = None) -> dict:
    out = {"dim": s.dim, "pvms": [[dump_matrix(m) for m in fam] for fam in s.ops]}
    if g is not None:
        out["questions"] = list(g.questions)
        out["answers"] = list(g.answers)
    return out


def sync_strategy_from_json(obj: dict) -> SyncQuantumStrategy:
    d = _need(obj, "dim", "strategy")
    fams = _need(obj, "pvms", "strategy")
    if not isinstance(fams, list) or not fams:
        raise FormatError("strategy: pvms must be a nonempty array")
    mats = [[load_matrix(m, f"pvms[{q}][{a}]") for a, m in enumerate(fam)] for q, fam in enumerate(fams)]
    if len({len(f) for f in mats}) != 1:
        raise FormatError("strategy: every question needs the same number of answers")
    ops = np.array(mats)
    if ops.shape[-1] != d:
        raise FormatError(f"strategy: operators are {ops.shape[-1]}-dimensional, dim says {d}")
    return SyncQuantumStrategy(ops)


def indep_strategy_to_json(s: IndepStrategy) -> dict:
    return {
        "dim": s.dim,
        "t": s.t,
        "vertices": [_vertex_json(v) for v in s.vertices],
        "pvms": [[dump_matrix(m) for m in fam] for fam in s.ops],
    }


def indep_strategy_from_json(obj: dict) -> IndepStrategy:
    d = _need(obj, "dim", "strategy")
    t = _need(obj, "t", "strategy")
    vertices = _need(obj, "vertices", "strategy")
    fams = _need(obj, "pvms", "strategy")
    if not isinstance(fams, list) or len(fams) != t:
        raise FormatError(f"strategy: expected {t} families in pvms")
    mats = []
    for i, fam in enumerate(fams):
        if not isinstance(fam, list) or len(fam) != len(vertices):
            raise FormatError(f"pvms[{i}]: expected one matrix per vertex ({len(vertices)})")
        mats.append([load_matrix(m, f"pvms[{i}][{v}]") for v, m in enumerate(fam)])
    ops = np.array(mats, dtype=complex)
    if ops.shape[-1] != d:
        raise FormatError(f"strategy: operators are {ops.shape[-1]}-dimensional, dim says {d}")
    return IndepStrategy(ops, vertices)


# --- reports and files -------------------------------------------------------------

def to_jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {k: to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    return x


def read_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise FormatError(f"{path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from None


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(to_jsonable(obj), indent=1) + "\n")

