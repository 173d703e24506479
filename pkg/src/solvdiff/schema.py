"""Versioned JSON objects read and written by the command line.

Every document carries ``"schema": 1`` and a ``"type"``:

* ``process``    ``{"kind": "CIR", "a": 1, "b": 1, "sigma": 1}``
* ``transform``  ``{"base": {...process fields...}, "rho": 0.4, "c": [1, 1, 0, 1]}``
* ``diffusion``  ``{"drift": "0", "vol": "x*(1-x)", "lo": 0, "hi": 1}``, with
  coefficients as arithmetic expressions in ``x`` and infinite ends written "inf"/"-inf"
* ``simconfig``  the fields of :class:`~solvdiff.montecarlo.SimConfig`
* ``specfun``    ``{"function": "kummer_m", "params": {"a": .., "b": ..}, "z": [...]}``
  where ``z`` may instead be ``{"lo": .., "hi": .., "n": ..}``

Unknown fields are rejected.
"""

import ast
from dataclasses import dataclass
import json
import math

import numpy as np

from . import montecarlo as mc
from . import processes as pr
from . import specfun as sf
from . import transform as tr
from .errors import DomainError, ParseError

SCHEMA = 1

_FUNCS = {name: getattr(np, name) for name in
          ("sqrt", "exp", "log", "sin", "cos", "tan", "sinh", "cosh", "tanh", "arctan", "abs", "maximum", "minimum")}
_CONSTS = {"pi": math.pi, "e": math.e}
_NODES = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd,
          ast.Constant, ast.Name, ast.Load, ast.Call)


def compile_expression(text):
    """Vectorized f(x) from an arithmetic expression in ``x``."""
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"bad expression {text!r}: {exc.msg} (column {exc.offset})") from None
    for node in ast.walk(tree):
        if not isinstance(node, _NODES):
            raise ParseError(f"{type(node).__name__} not allowed in expression {text!r}")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise ParseError(f"non-numeric constant in {text!r}")
        if isinstance(node, ast.Name) and node.id != "x" and node.id not in _FUNCS and node.id not in _CONSTS:
            raise ParseError(f"unknown name {node.id!r} in {text!r}")
        if isinstance(node, ast.Call) and not (isinstance(node.func, ast.Name) and node.func.id in _FUNCS):
            raise ParseError(f"only {sorted(_FUNCS)} may be called in {text!r}")
    code = compile(tree, "<expression>", "eval")

    def f(x):
        x = np.asarray(x, dtype=float)
        val = eval(code, {"__builtins__": {}}, {**_FUNCS, **_CONSTS, "x": x})
        return np.broadcast_to(np.asarray(val, dtype=float), x.shape).copy()

    return f


def _end(v):
    if isinstance(v, str) and v in ("inf", "-inf"):
        return float(v)
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return float(v)
    raise ParseError(f"interval end must be a number, 'inf' or '-inf', not {v!r}")


def _end_out(v):
    return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")


@dataclass(frozen=True)
class ExpressionDiffusion:
    drift: str
    vol: str
    lo: float
    hi: float

    def spec(self):
        return pr.DiffusionSpec(compile_expression(self.drift), compile_expression(self.vol),
                                pr.Interval(self.lo, self.hi), name=f"vol={self.vol}")


@dataclass(frozen=True)
class SpecfunJob:
    function: str
    params: tuple
    z: tuple

    FUNCTIONS = {"gauss_2f1": ("a", "b", "c"), "kummer_m": ("a", "b"), "tricomi_u": ("a", "b"),
                 "kummer_m_deriv": ("a", "b"), "tricomi_u_deriv": ("a", "b"), "gauss_2f1_deriv": ("a", "b", "c"),
                 "bessel_i": ("nu",), "bessel_k": ("nu",), "log_gamma": (), "digamma": ()}

    def evaluate(self):
        fn = getattr(sf, self.function)
        z = np.array(self.z, dtype=float)
        if self.function in ("log_gamma", "digamma"):
            return np.array([fn(v) for v in z])
        return np.asarray(fn(*[v for _, v in self.params], z), dtype=float)


def _check_keys(d, required, optional=()):
    extra = set(d) - set(required) - set(optional) - {"schema", "type"}
    if extra:
        raise ParseError(f"unknown field(s) {sorted(extra)}")
    missing = set(required) - set(d)
    if missing:
        raise ParseError(f"missing field(s) {sorted(missing)}")


def _process(d):
    d = dict(d)
    kind = d.get("kind")
    if kind not in pr.KINDS:
        raise ParseError(f"unknown process kind {kind!r}")
    fields = [k for k in pr.KINDS[kind].__dataclass_fields__]
    _check_keys({k: v for k, v in d.items() if k != "kind"}, [], fields)
    try:
        return pr.from_dict(d)
    except TypeError as exc:
        raise ParseError(str(exc)) from None


def from_document(d):
    """In-memory object for a parsed JSON document."""
    if not isinstance(d, dict):
        raise ParseError("top level must be a JSON object")
    if d.get("schema") != SCHEMA:
        raise ParseError(f"unsupported or missing schema version {d.get('schema')!r} (expected {SCHEMA})")
    kind = d.get("type")
    body = {k: v for k, v in d.items() if k not in ("schema", "type")}
    if kind == "process":
        return _process(body)
    if kind == "transform":
        _check_keys(body, ["base", "rho", "c"])
        if not isinstance(body["c"], list) or len(body["c"]) != 4:
            raise ParseError("c must be a list of four numbers")
        return tr.build_transform(_process(body["base"]), body["rho"], *body["c"])
    if kind == "diffusion":
        _check_keys(body, ["drift", "vol", "lo", "hi"])
        out = ExpressionDiffusion(str(body["drift"]), str(body["vol"]), _end(body["lo"]), _end(body["hi"]))
        out.spec()  # compile now so errors surface at load time
        return out
    if kind == "simconfig":
        _check_keys(body, ["dt", "n_paths", "horizon"], ["seed", "boundary_policy", "noise_substeps"])
        return mc.SimConfig(**body)
    if kind == "specfun":
        _check_keys(body, ["function", "params", "z"])
        names = SpecfunJob.FUNCTIONS.get(body["function"])
        if names is None:
            raise ParseError(f"unknown function {body['function']!r}; choose from {sorted(SpecfunJob.FUNCTIONS)}")
        params = body["params"]
        if not isinstance(params, dict) or set(params) != set(names):
            raise ParseError(f"{body['function']} needs params {list(names)}")
        z = body["z"]
        if isinstance(z, dict):
            _check_keys(z, ["lo", "hi", "n"])
            z = np.linspace(z["lo"], z["hi"], int(z["n"])).tolist()
        if not z:
            raise ParseError("z grid is empty")
        return SpecfunJob(body["function"], tuple((k, float(params[k])) for k in names), tuple(float(v) for v in z))
    raise ParseError(f"unknown document type {kind!r}")


def to_document(obj):
    if isinstance(obj, pr.BaseProcess):
        return {"schema": SCHEMA, "type": "process", **pr.to_dict(obj)}
    if isinstance(obj, tr.StochasticTransform):
        return {"schema": SCHEMA, "type": "transform", **tr.to_dict(obj)}
    if isinstance(obj, ExpressionDiffusion):
        return {"schema": SCHEMA, "type": "diffusion", "drift": obj.drift, "vol": obj.vol,
                "lo": _end_out(obj.lo), "hi": _end_out(obj.hi)}
    if isinstance(obj, mc.SimConfig):
        return {"schema": SCHEMA, "type": "simconfig", "dt": obj.dt, "n_paths": obj.n_paths, "horizon": obj.horizon,
                "seed": obj.seed, "boundary_policy": obj.boundary_policy.value, "noise_substeps": obj.noise_substeps}
    if isinstance(obj, SpecfunJob):
        return {"schema": SCHEMA, "type": "specfun", "function": obj.function, "params": dict(obj.params),
                "z": list(obj.z)}
    raise TypeError(f"no JSON form for {type(obj).__name__}")


def loads(text):
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        return from_document(d)
    except (TypeError, KeyError) as exc:
        raise ParseError(str(exc)) from None


def dumps(obj):
    return json.dumps(to_document(obj), indent=2) + "\n"


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def dump(obj, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))


def same(a, b):
    """Equality of in-memory objects by their JSON form (transforms hold callables)."""
    return to_document(a) == to_document(b)


def as_spec(obj):
    """DiffusionSpec for anything that describes a diffusion."""
    if isinstance(obj, pr.BaseProcess):
        return pr.to_spec(obj)
    if isinstance(obj, tr.StochasticTransform):
        return obj.target_spec()
    if isinstance(obj, ExpressionDiffusion):
        return obj.spec()
    raise DomainError(f"a {type(obj).__name__} does not describe a diffusion")
