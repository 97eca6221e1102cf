"""Ring-network topology and admissible vector fields.

A ring of n identical nodes couples node c to node c-r (mod n) for each
declared range r. Every node applies the same component map to its own
state and its inputs, so fields built here are cyclically equivariant by
construction; dihedral rings additionally require the range set to be
closed under r -> n-r.

Convention: network range r means "input from node c-r". In coefficient
space (module spectral) that input carries index j = (n-r) mod n, because
coefficient a_j weights x_{c+j}. The printed three- and five-node cubic
models couple each node to its predecessor, hence their linearizations
put the coupling strength at index n-1.
"""
from __future__ import annotations

import ast
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Mapping

import numpy as np

from .errors import ConfigError, DihedralAsymmetry, DimensionMismatch, InvalidRange
from .spectral import CouplingCoefficients


class Symmetry(Enum):
    CYCLIC = "Cyclic"
    DIHEDRAL = "Dihedral"


@dataclass(frozen=True)
class RingNetwork:
    """Topology descriptor: node count, coupling ranges, node dimension."""

    n: int
    ranges: frozenset[int]
    node_dim: int = 1
    symmetry: Symmetry = Symmetry.CYCLIC


def build_network(
    n: int,
    ranges,
    node_dim: int = 1,
    symmetry: Symmetry = Symmetry.CYCLIC,
    symmetrize: bool = False,
) -> RingNetwork:
    """Validated ring topology.

    Dihedral networks need ranges closed under r -> n-r; pass
    ``symmetrize=True`` to close the set instead of rejecting it.
    """
    if n < 2:
        raise ConfigError(f"need at least 2 nodes, got n={n}")
    if node_dim < 1:
        raise ConfigError(f"node_dim must be positive, got {node_dim}")
    rset = {int(r) for r in ranges}
    if not rset:
        raise ConfigError("ranges must be non-empty")
    for r in rset:
        if not 1 <= r <= n - 1:
            raise InvalidRange(f"range {r} outside [1, {n - 1}]")
    if symmetry is Symmetry.DIHEDRAL:
        mirrored = {n - r for r in rset}
        if symmetrize:
            rset |= mirrored
        elif mirrored != rset:
            raise DihedralAsymmetry(
                f"ranges {sorted(rset)} not closed under r -> {n}-r")
    return RingNetwork(n, frozenset(rset), node_dim, symmetry)


# ------------------------------------------------------------------
# vector fields
# ------------------------------------------------------------------

# node_rhs(X, inputs, lam, params) -> (n, l) array; X is (n, l) and
# inputs[r] is X rolled so row c holds the state of node c-r.
NodeRhs = Callable[[np.ndarray, Mapping[int, np.ndarray], float, Mapping[str, float]], np.ndarray]

# kernel_factory(params, lam) -> (offsets, weights, quad, cubic) for the
# fast scalar-ring integrator; None when no closed polynomial form exists.
KernelFactory = Callable[[Mapping[str, float], float], tuple]


class VectorField:
    """Admissible field on a ring network.

    Evaluation is pure: the instance is immutable after construction and
    safe to share across workers. ``with_params`` and ``negated`` return
    new instances.
    """

    def __init__(
        self,
        network: RingNetwork,
        node_rhs: NodeRhs,
        params: Mapping[str, float] | None = None,
        bifurcation_param: str = "lam",
        kernel_factory: KernelFactory | None = None,
        label: str = "custom",
        sign: float = 1.0,
    ):
        self.network = network
        self.params = dict(params or {})
        self.bifurcation_param = bifurcation_param
        self.label = label
        self._node_rhs = node_rhs
        self._kernel_factory = kernel_factory
        self._sign = float(sign)

    @property
    def dim(self) -> int:
        return self.network.n * self.network.node_dim

    def evaluate(self, state, lam: float) -> np.ndarray:
        state = np.asarray(state, dtype=float)
        if state.shape != (self.dim,):
            raise DimensionMismatch(
                f"state has shape {state.shape}, expected ({self.dim},)")
        x = state.reshape(self.network.n, self.network.node_dim)
        inputs = {r: np.roll(x, r, axis=0) for r in sorted(self.network.ranges)}
        out = self._node_rhs(x, inputs, float(lam), self.params)
        return self._sign * np.asarray(out, dtype=float).reshape(self.dim)

    def kernel_arrays(self, lam: float):
        """(offsets, weights, quad, cubic) for the fast integrator, or None."""
        if self._kernel_factory is None:
            return None
        offsets, weights, quad, cubic = self._kernel_factory(self.params, float(lam))
        return (np.asarray(offsets, dtype=np.int64),
                self._sign * np.asarray(weights, dtype=float),
                self._sign * float(quad), self._sign * float(cubic))

    def with_params(self, **updates: float) -> "VectorField":
        unknown = set(updates) - set(self.params)
        if unknown:
            raise ConfigError(f"unknown parameters {sorted(unknown)}")
        merged = {**self.params, **{k: float(v) for k, v in updates.items()}}
        return VectorField(self.network, self._node_rhs, merged,
                           self.bifurcation_param, self._kernel_factory,
                           self.label, self._sign)

    def negated(self) -> "VectorField":
        return VectorField(self.network, self._node_rhs, self.params,
                           self.bifurcation_param, self._kernel_factory,
                           self.label, -self._sign)


def evaluate_field(vf: VectorField, state, lam: float) -> np.ndarray:
    return vf.evaluate(state, lam)


def negate_field(vf: VectorField) -> VectorField:
    """The field -f; admissibility and equivariance are preserved."""
    return vf.negated()


def linear_coefficients(vf: VectorField, lam: float) -> CouplingCoefficients:
    """Circulant coefficients of the linearization at the origin.

    Available for fields with a polynomial kernel form (the built-in cubic
    rings), whose Jacobian at zero is exactly the linear coupling part.
    """
    arrays = vf.kernel_arrays(lam)
    if arrays is None:
        raise ConfigError(f"field '{vf.label}' has no closed linearization")
    offsets, weights, _, _ = arrays
    a = np.zeros(vf.network.n)
    for j, w in zip(offsets, weights):
        a[int(j)] += w
    return CouplingCoefficients(vf.network.n, a,
                                vf.network.symmetry is Symmetry.DIHEDRAL)


# ------------------------------------------------------------------
# built-in models
# ------------------------------------------------------------------

def cubic_ring(
    n: int,
    strengths: Mapping[int, float],
    quad: float = 0.0,
    lam: float = 0.0,
    symmetry: Symmetry = Symmetry.CYCLIC,
) -> VectorField:
    """dx_c/dt = lam*x_c + b*x_c^2 - x_c^3 + sum_r a_r x_{c-r}.

    Parameters are named ``a{r}`` per range plus ``b`` for the optional
    quadratic term (which breaks the x -> -x symmetry of the pure cubic).
    """
    network = build_network(n, set(strengths), 1, symmetry)
    params = {"lam": float(lam), "b": float(quad)}
    params.update({f"a{r}": float(s) for r, s in strengths.items()})
    rlist = sorted(strengths)

    def node_rhs(x, inputs, lam_value, p):
        own = x[:, 0]
        out = lam_value * own + p["b"] * own * own - own ** 3
        for r in rlist:
            out = out + p[f"a{r}"] * inputs[r][:, 0]
        return out[:, None]

    def kernel_factory(p, lam_value):
        offsets = [0] + [(n - r) % n for r in rlist]
        weights = [lam_value] + [p[f"a{r}"] for r in rlist]
        return offsets, weights, p["b"], -1.0

    return VectorField(network, node_rhs, params, "lam", kernel_factory,
                       label=f"cubic_ring_{n}")


def _printed_cubic(n: int, a: float, lam: float) -> VectorField:
    # predecessor coupling with a single strength named "a", exactly as in
    # the three- and five-node reference models
    network = build_network(n, {1}, 1, Symmetry.CYCLIC)
    params = {"lam": float(lam), "a": float(a)}

    def node_rhs(x, inputs, lam_value, p):
        own = x[:, 0]
        return (lam_value * own - own ** 3 + p["a"] * inputs[1][:, 0])[:, None]

    def kernel_factory(p, lam_value):
        return [0, n - 1], [lam_value, p["a"]], 0.0, -1.0

    return VectorField(network, node_rhs, params, "lam", kernel_factory,
                       label=f"cubic_z{n}")


def cubic_z3(a: float = -2.0, lam: float = 0.0) -> VectorField:
    """Three-node ring, dx_c/dt = lam*x_c - x_c^3 + a*x_{c-1}."""
    return _printed_cubic(3, a, lam)


def cubic_z5(a: float = -2.0, lam: float = 0.0) -> VectorField:
    """Five-node ring, dx_c/dt = lam*x_c - x_c^3 + a*x_{c-1}."""
    return _printed_cubic(5, a, lam)


# ------------------------------------------------------------------
# expression-defined fields
# ------------------------------------------------------------------

_ALLOWED_FUNCS: dict[str, Callable] = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan,
    "exp": np.exp, "log": np.log, "sqrt": np.sqrt,
    "tanh": np.tanh, "sinh": np.sinh, "cosh": np.cosh,
    "abs": np.abs, "arctan": np.arctan,
}
_ALLOWED_NODES = (
    ast.Expression, ast.BinOp, ast.UnaryOp, ast.Constant, ast.Name,
    ast.Call, ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow,
    ast.USub, ast.UAdd, ast.Load,
)


def compile_expression(text: str, names: set[str]) -> Callable[[dict], np.ndarray]:
    """Compile an arithmetic expression over whitelisted names.

    Supports +, -, *, /, **, the elementary functions above, and the
    constant ``pi``. Anything else is rejected up front.
    """
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse expression {text!r}: {exc}") from exc
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise ConfigError(
                f"expression {text!r}: {type(node).__name__} not allowed")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise ConfigError(f"expression {text!r}: non-numeric constant")
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _ALLOWED_FUNCS:
                raise ConfigError(f"expression {text!r}: unknown function call")
            if node.keywords:
                raise ConfigError(f"expression {text!r}: keyword arguments not allowed")
        if isinstance(node, ast.Name):
            if node.id not in names and node.id not in _ALLOWED_FUNCS and node.id != "pi":
                raise ConfigError(f"expression {text!r}: unknown name {node.id!r}")
    code = compile(tree, "<ring-model>", "eval")

    def run(env: dict) -> np.ndarray:
        scope = {"__builtins__": {}, "pi": math.pi}
        scope.update(_ALLOWED_FUNCS)
        scope.update(env)
        return eval(code, scope)  # noqa: S307 - AST-whitelisted above

    return run


def expression_field(
    network: RingNetwork,
    expressions,
    params: Mapping[str, float],
    bifurcation_param: str,
) -> VectorField:
    """Field from one expression per node component.

    Component m of node c may reference its own components ``x0``, ``x1``,
    ... (just ``x`` when node_dim is 1), the inputs ``in{r}`` resp.
    ``in{r}_{m}`` for each declared range r, and any parameter by name.
    Every node runs the same expressions, which keeps the field admissible.
    """
    l = network.node_dim
    if isinstance(expressions, str):
        expressions = [expressions]
    if len(expressions) != l:
        raise ConfigError(f"need {l} expressions for node_dim={l}, "
                          f"got {len(expressions)}")
    own_names = ["x"] if l == 1 else [f"x{m}" for m in range(l)]
    input_names = {}
    for r in sorted(network.ranges):
        if l == 1:
            input_names[(r, 0)] = f"in{r}"
        else:
            for m in range(l):
                input_names[(r, m)] = f"in{r}_{m}"
    reserved = set(own_names) | set(input_names.values()) | {"pi"}
    clash = reserved & set(params)
    if clash:
        raise ConfigError(f"parameter names {sorted(clash)} are reserved")
    allowed = reserved | set(params) | {bifurcation_param}
    compiled = [compile_expression(e, allowed) for e in expressions]

    def node_rhs(x, inputs, lam_value, p):
        env = dict(p)
        env[bifurcation_param] = lam_value
        for m, name in enumerate(own_names):
            env[name] = x[:, m]
        for (r, m), name in input_names.items():
            env[name] = inputs[r][:, m]
        cols = [np.broadcast_to(np.asarray(fn(env), dtype=float), (x.shape[0],))
                for fn in compiled]
        return np.stack(cols, axis=1)

    return VectorField(network, node_rhs, params, bifurcation_param,
                       kernel_factory=None, label="expression")


# ------------------------------------------------------------------
# configuration documents
# ------------------------------------------------------------------

_BUILTINS = {"cubic_z3", "cubic_z5", "cubic_ring"}


def network_from_config(cfg: Mapping) -> RingNetwork:
    try:
        n = int(cfg["n"])
        ranges = cfg.get("ranges", [1])
        node_dim = int(cfg.get("node_dim", 1))
        symmetry = Symmetry(cfg.get("symmetry", "Cyclic"))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad network config: {exc}") from exc
    return build_network(n, ranges, node_dim, symmetry,
                         symmetrize=bool(cfg.get("symmetrize", False)))


def field_from_config(cfg: Mapping) -> VectorField:
    """Build a vector field from a configuration document.

    ``model`` is a built-in name (cubic_z3, cubic_z5, cubic_ring) or an
    expression (list); ``params`` maps names to values and
    ``bifurcation_param`` singles out the swept parameter.
    """
    network = network_from_config(cfg)
    model = cfg.get("model", "cubic_ring")
    params = {k: float(v) for k, v in dict(cfg.get("params", {})).items()}
    bif = str(cfg.get("bifurcation_param", "lam"))

    if isinstance(model, str) and model in _BUILTINS:
        lam = params.pop(bif, 0.0)
        if model == "cubic_z3":
            vf = cubic_z3(a=params.pop("a", -2.0), lam=lam)
        elif model == "cubic_z5":
            vf = cubic_z5(a=params.pop("a", -2.0), lam=lam)
        else:
            strengths = {r: params.pop(f"a{r}", 0.0) for r in sorted(network.ranges)}
            vf = cubic_ring(network.n, strengths, quad=params.pop("b", 0.0),
                            lam=lam, symmetry=network.symmetry)
        if vf.network.n != network.n or not vf.network.ranges <= network.ranges:
            raise ConfigError(
                f"model {model} is incompatible with n={network.n}, "
                f"ranges={sorted(network.ranges)}")
        if params:
            raise ConfigError(f"unused parameters {sorted(params)} for {model}")
        return vf
    return expression_field(network, model, params, bif)
