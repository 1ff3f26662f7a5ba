"""Input formats: DIMACS CNF, set-cover text, hypergraph text, AMO JSON.

All parsers report precise locations on malformed input and validate
monotonicity and the structural caps (arity, degree, edge size) that the
engines rely on.  Serializers invert the parsers up to structural equality
of the parsed instance.

Grammars (``#`` starts a comment in the text formats; blank lines are
skipped except where noted):

* DIMACS (monotone): standard ``p cnf <vars> <clauses>`` header,
  ``c`` comment lines, clauses as 1-based positive literals terminated by
  0, possibly spanning lines.  Negative literals are rejected.
* Set cover: header line ``<sets> <elements>``, then exactly <sets> data
  lines; line i lists the 1-based element ids covered by set i and may be
  empty (an empty set).  Sets become variables, elements become clauses.
* Hypergraph: header line ``<vertices> <edges>``, then <edges> data lines
  of 1-based vertex ids.  Parallel edges are allowed; an edge line must
  name at least one vertex.
* AMO JSON: object with ``n_vars`` (int), ``constraints`` (list of lists
  of 0-based variable ids, arity <= 4) and optional ``pins`` (object
  mapping variable id to 0 or 1).
"""

from __future__ import annotations

import json

from .amo import ARITY_LIMIT, AmoInstance, Hypergraph
from .cnf import FREE, PINNED_ONE, MonotoneCnf
from .errors import FormatError, NegativeLiteralError

FORMATS = ("dimacs", "setcover", "hypergraph", "amojson")


# ----------------------------------------------------------------------------
# DIMACS
# ----------------------------------------------------------------------------


def parse_dimacs(text: str) -> MonotoneCnf:
    n_vars = None
    n_clauses = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("c"):
            continue
        if stripped.startswith("p"):
            if n_vars is not None:
                raise FormatError("duplicate problem line", line=lineno)
            parts = stripped.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise FormatError("malformed problem line, expected 'p cnf V C'", line=lineno)
            try:
                n_vars, n_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise FormatError("non-integer counts in problem line", line=lineno)
            if n_vars < 0 or n_clauses < 0:
                raise FormatError("negative counts in problem line", line=lineno)
            continue
        if n_vars is None:
            raise FormatError("clause before problem line", line=lineno)
        for col, tok in _tokens(line, lineno):
            try:
                lit = int(tok)
            except ValueError:
                raise FormatError(f"invalid token {tok!r}", line=lineno, col=col)
            if lit == 0:
                clauses.append(current)
                current = []
            elif lit < 0:
                raise NegativeLiteralError(
                    f"negative literal {lit}: only monotone CNF is supported",
                    line=lineno,
                    col=col,
                )
            else:
                if lit > n_vars:
                    raise FormatError(f"literal {lit} exceeds declared variable count", line=lineno, col=col)
                current.append(lit - 1)
    if n_vars is None:
        raise FormatError("missing problem line")
    if current:
        raise FormatError("last clause is not terminated by 0")
    if len(clauses) != n_clauses:
        raise FormatError(f"declared {n_clauses} clauses but found {len(clauses)}")
    return MonotoneCnf.from_raw(n_vars, clauses)


def _tokens(line: str, lineno: int):
    col = 1
    for tok in line.split():
        yield line.index(tok, col - 1) + 1, tok
        col = line.index(tok, col - 1) + len(tok) + 1


def to_dimacs(cnf: MonotoneCnf) -> str:
    lines = [f"p cnf {cnf.n_vars} {len(cnf.clauses)}"]
    for c in cnf.clauses:
        lines.append(" ".join(str(v + 1) for v in c) + " 0")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------------
# Set-cover text (dual view: sets are variables, elements are clauses)
# ----------------------------------------------------------------------------


def parse_setcover(text: str) -> MonotoneCnf:
    lines = text.splitlines()
    data: list[tuple[int, str]] = []
    for lineno, line in enumerate(lines, start=1):
        body = line.split("#", 1)[0]
        data.append((lineno, body))
    # header is the first non-blank data line; set lines follow verbatim
    # (a blank line there is an empty set, so only leading blanks skip)
    idx = 0
    while idx < len(data) and not data[idx][1].strip():
        idx += 1
    if idx == len(data):
        raise FormatError("missing header line '<sets> <elements>'")
    lineno, header = data[idx]
    parts = header.split()
    if len(parts) != 2:
        raise FormatError("header must be '<sets> <elements>'", line=lineno)
    try:
        n_sets, n_elements = int(parts[0]), int(parts[1])
    except ValueError:
        raise FormatError("non-integer header counts", line=lineno)
    if n_sets < 0 or n_elements < 0:
        raise FormatError("negative header counts", line=lineno)
    if len(data) - idx - 1 < n_sets:
        raise FormatError(f"expected {n_sets} set lines after the header")
    covers: list[list[int]] = [[] for _ in range(n_elements)]
    for s in range(n_sets):
        lineno, body = data[idx + 1 + s]
        for col, tok in _tokens(body, lineno):
            try:
                e = int(tok)
            except ValueError:
                raise FormatError(f"invalid element id {tok!r}", line=lineno, col=col)
            if not 1 <= e <= n_elements:
                raise FormatError(f"element id {e} out of range 1..{n_elements}", line=lineno, col=col)
            covers[e - 1].append(s)
    for s in range(n_sets + 1, len(data) - idx):
        lineno, body = data[idx + s]
        if body.strip():
            raise FormatError("trailing content after the declared set lines", line=lineno)
    return MonotoneCnf.from_raw(n_sets, [sorted(set(c)) for c in covers])


def to_setcover(cnf: MonotoneCnf) -> str:
    sets: list[list[int]] = [[] for _ in range(cnf.n_vars)]
    for e, clause in enumerate(cnf.clauses, start=1):
        for v in clause:
            sets[v].append(e)
    lines = [f"{cnf.n_vars} {len(cnf.clauses)}"]
    lines.extend(" ".join(map(str, s)) for s in sets)
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------------
# Hypergraph text
# ----------------------------------------------------------------------------


def parse_hypergraph(text: str) -> Hypergraph:
    rows: list[tuple[int, str]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if body:
            rows.append((lineno, body))
    if not rows:
        raise FormatError("missing header line '<vertices> <edges>'")
    lineno, header = rows[0]
    parts = header.split()
    if len(parts) != 2:
        raise FormatError("header must be '<vertices> <edges>'", line=lineno)
    try:
        n_vertices, n_edges = int(parts[0]), int(parts[1])
    except ValueError:
        raise FormatError("non-integer header counts", line=lineno)
    if len(rows) - 1 != n_edges:
        raise FormatError(f"declared {n_edges} edges but found {len(rows) - 1}")
    edges = []
    for lineno, body in rows[1:]:
        edge = []
        for col, tok in _tokens(body, lineno):
            try:
                v = int(tok)
            except ValueError:
                raise FormatError(f"invalid vertex id {tok!r}", line=lineno, col=col)
            if not 1 <= v <= n_vertices:
                raise FormatError(f"vertex id {v} out of range 1..{n_vertices}", line=lineno, col=col)
            edge.append(v - 1)
        if not edge:
            raise FormatError("empty hyperedge", line=lineno)
        edges.append(edge)
    return Hypergraph.from_raw(n_vertices, edges)


def to_hypergraph_text(h: Hypergraph) -> str:
    lines = [f"{h.n_vertices} {len(h.edges)}"]
    lines.extend(" ".join(str(v + 1) for v in e) for e in h.edges)
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------------
# AMO JSON
# ----------------------------------------------------------------------------


def parse_amo_json(text: str) -> AmoInstance:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc.msg}", line=exc.lineno, col=exc.colno)
    if not isinstance(obj, dict):
        raise FormatError("top-level JSON value must be an object")
    try:
        n_vars = int(obj["n_vars"])
    except (KeyError, TypeError, ValueError):
        raise FormatError("missing or invalid 'n_vars'")
    constraints = obj.get("constraints", [])
    if not isinstance(constraints, list) or not all(
        isinstance(c, list) and all(isinstance(v, int) for v in c) for c in constraints
    ):
        raise FormatError("'constraints' must be a list of lists of ints")
    for c in constraints:
        if len(c) > ARITY_LIMIT:
            raise FormatError(f"constraint {c} exceeds arity {ARITY_LIMIT}")
    pins_obj = obj.get("pins", {})
    if not isinstance(pins_obj, dict):
        raise FormatError("'pins' must be an object mapping variable id to 0/1")
    pins: dict[int, int] = {}
    for key, val in pins_obj.items():
        try:
            v = int(key)
        except ValueError:
            raise FormatError(f"invalid pinned variable id {key!r}")
        if val not in (0, 1):
            raise FormatError(f"pin value for x{v} must be 0 or 1")
        pins[v] = val
    try:
        return AmoInstance.from_raw(n_vars, constraints, pins)
    except ValueError as exc:
        raise FormatError(str(exc))


def to_amo_json(inst: AmoInstance) -> str:
    pins = {
        str(v): (1 if inst.pins[v] == PINNED_ONE else 0)
        for v in range(inst.n_vars)
        if inst.pins[v] != FREE
    }
    obj = {
        "n_vars": inst.n_vars,
        "constraints": [list(c) for c in inst.constraints],
        "pins": pins,
    }
    return json.dumps(obj, sort_keys=True) + "\n"


# ----------------------------------------------------------------------------
# Dispatch
# ----------------------------------------------------------------------------


def parse(data: bytes | str, fmt: str):
    """Parse raw input in the named format.

    Returns MonotoneCnf for 'dimacs'/'setcover', Hypergraph for
    'hypergraph', AmoInstance for 'amojson'.
    """
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    if fmt == "dimacs":
        return parse_dimacs(text)
    if fmt == "setcover":
        return parse_setcover(text)
    if fmt == "hypergraph":
        return parse_hypergraph(text)
    if fmt == "amojson":
        return parse_amo_json(text)
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def serialize(instance, fmt: str) -> str:
    if fmt == "dimacs":
        return to_dimacs(instance)
    if fmt == "setcover":
        return to_setcover(instance)
    if fmt == "hypergraph":
        return to_hypergraph_text(instance)
    if fmt == "amojson":
        return to_amo_json(instance)
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def guess_format(path: str) -> str | None:
    lowered = path.lower()
    if lowered.endswith(".cnf") or lowered.endswith(".dimacs"):
        return "dimacs"
    if lowered.endswith(".setcover") or lowered.endswith(".sc"):
        return "setcover"
    if lowered.endswith(".hg") or lowered.endswith(".hypergraph"):
        return "hypergraph"
    if lowered.endswith(".json"):
        return "amojson"
    return None
