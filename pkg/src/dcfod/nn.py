"""Feed-forward network building blocks with explicit reverse-mode gradients.

Everything runs on float64 numpy arrays in row-major layout (one sample per
row). Layers cache whatever their backward pass needs, so the usage pattern
is always ``forward(x, training=...)`` followed by ``backward(upstream)`` on
the same inputs. There is no general autodiff here, just the chain rule for
linear / ReLU / dropout stacks, which is all the model needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

Array = np.ndarray

_ACTIVATIONS = ("relu", "linear")


def as_matrix(values) -> Array:
    """Coerce to a 2-D float64 array, rejecting non-finite entries."""
    out = np.asarray(values, dtype=np.float64)
    if out.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError("matrix contains NaN or Inf entries")
    return out


def matmul(a: Array, b: Array) -> Array:
    """Matrix product with an explicit shape check."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("matmul expects 2-D operands")
    if a.shape[1] != b.shape[0]:
        raise ValueError(
            f"matmul shape mismatch: {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}"
        )
    return a @ b


def xavier_uniform(rng: np.random.Generator, out_dim: int, in_dim: int) -> Array:
    """Uniform init on [-a, a] with a = sqrt(6 / (fan_in + fan_out))."""
    bound = np.sqrt(6.0 / (in_dim + out_dim))
    return rng.uniform(-bound, bound, size=(out_dim, in_dim))


class Linear:
    """Affine map ``y = x @ W.T + b``, caching its input for backward."""

    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator):
        if in_dim < 1 or out_dim < 1:
            raise ValueError("layer widths must be positive")
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.weight = xavier_uniform(rng, out_dim, in_dim)
        self.bias = np.zeros(out_dim)
        self._input: Array | None = None

    def forward(self, x: Array) -> Array:
        self._input = x
        return x @ self.weight.T + self.bias

    def backward(self, grad_out: Array) -> tuple[Array, Array, Array]:
        """Return (grad_input, grad_weight, grad_bias) for the cached input."""
        if self._input is None:
            raise RuntimeError("Linear.backward called before forward")
        grad_w = grad_out.T @ self._input
        grad_b = grad_out.sum(axis=0)
        grad_x = grad_out @ self.weight
        return grad_x, grad_w, grad_b


class Mlp:
    """Multilayer perceptron: optional input dropout, hidden linear+activation
    layers, and a linear output layer.

    ``widths`` lists every layer width including input and output, e.g.
    ``(64, 500, 500, 2000, 4)``. Dropout uses inverted scaling (activations
    divided by the keep probability at train time) so evaluation mode is
    exactly the identity. The generator passed in is consumed first for
    weight initialization and then for dropout masks, which makes both
    bit-reproducible for a fixed seed.
    """

    def __init__(
        self,
        widths: tuple[int, ...] | list[int],
        rng: np.random.Generator,
        *,
        input_dropout: float = 0.0,
        activation: str = "relu",
    ):
        widths = tuple(int(w) for w in widths)
        if len(widths) < 2:
            raise ValueError("an MLP needs at least an input and an output width")
        if any(w < 1 for w in widths):
            raise ValueError("layer widths must be positive")
        if not 0.0 <= input_dropout < 1.0:
            raise ValueError("input dropout rate must lie in [0, 1)")
        if activation not in _ACTIVATIONS:
            raise ValueError(f"unknown activation {activation!r}")
        self.widths = widths
        self.input_dropout = float(input_dropout)
        self.activation = activation
        self.rng = rng
        self.layers = [
            Linear(widths[i], widths[i + 1], rng) for i in range(len(widths) - 1)
        ]
        self._preacts: list[Array] | None = None
        self._dropout_mask: Array | None = None

    @property
    def in_dim(self) -> int:
        return self.widths[0]

    @property
    def out_dim(self) -> int:
        return self.widths[-1]

    def parameters(self) -> list[Array]:
        """Flat parameter list [W0, b0, W1, b1, ...]; arrays are live views."""
        out: list[Array] = []
        for layer in self.layers:
            out.append(layer.weight)
            out.append(layer.bias)
        return out

    def forward(self, x: Array, training: bool = False) -> Array:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.in_dim:
            raise ValueError(
                f"input shape {x.shape} does not match first layer width {self.in_dim}"
            )
        if training and self.input_dropout > 0.0:
            keep = 1.0 - self.input_dropout
            mask = (self.rng.random(x.shape) >= self.input_dropout) / keep
            x = x * mask
            self._dropout_mask = mask
        else:
            self._dropout_mask = None
        preacts = []
        for layer in self.layers[:-1]:
            z = layer.forward(x)
            preacts.append(z)
            x = np.maximum(z, 0.0) if self.activation == "relu" else z
        out = self.layers[-1].forward(x)
        self._preacts = preacts
        return out

    def backward(self, grad_out: Array) -> tuple[Array, list[Array]]:
        """Backpropagate ``grad_out`` (same shape as the last forward output).

        Returns (grad_input, grads) with grads aligned with ``parameters()``.
        """
        if self._preacts is None:
            raise RuntimeError("Mlp.backward called before forward")
        grads: list[Array] = [None] * (2 * len(self.layers))  # type: ignore[list-item]
        g = np.asarray(grad_out, dtype=np.float64)
        for i in range(len(self.layers) - 1, -1, -1):
            g, gw, gb = self.layers[i].backward(g)
            grads[2 * i] = gw
            grads[2 * i + 1] = gb
            if i > 0 and self.activation == "relu":
                g = g * (self._preacts[i - 1] > 0.0)
        if self._dropout_mask is not None:
            g = g * self._dropout_mask
        return g, grads


def sgd_step(params: list[Array], grads: list[Array], lr: float) -> None:
    """In-place ``theta <- theta - lr * grad`` over matching lists."""
    if len(params) != len(grads):
        raise ValueError("parameter and gradient lists differ in length")
    for p, g in zip(params, grads):
        if p.shape != g.shape:
            raise ValueError(f"shape mismatch {p.shape} vs {g.shape}")
        p -= lr * g


class Adam:
    """Adam optimizer over a fixed parameter list (optional alternative to
    the plain gradient-descent updates; state persists across steps)."""

    def __init__(self, params: list[Array], beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        self.params = params
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, grads: list[Array], lr: float) -> None:
        if len(grads) != len(self.params):
            raise ValueError("gradient list length does not match parameters")
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        bias1 = 1.0 - b1 ** self.t
        bias2 = 1.0 - b2 ** self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            p -= lr * (m / bias1) / (np.sqrt(v / bias2) + self.eps)


@dataclass
class GradCheckReport:
    """Outcome of comparing analytic gradients against central differences."""

    block_errors: list[float]
    max_rel_error: float
    tolerance: float
    passed: bool
    messages: list[str] = field(default_factory=list)


def check_gradients(
    params: list[Array],
    loss_fn,
    grad_fn,
    *,
    step: float = 1e-5,
    tolerance: float = 1e-4,
) -> GradCheckReport:
    """Compare analytic gradients with central finite differences.

    ``loss_fn()`` must be a deterministic function of the current parameter
    values; ``grad_fn()`` must return gradients aligned with ``params``.
    Every entry of every block is perturbed by +/-step in place. The relative
    error uses max(|analytic|, |numeric|, 1e-6) as denominator so that
    near-zero gradients are compared on an absolute scale where central
    differences are dominated by roundoff anyway.
    """
    analytic = [np.array(g, dtype=np.float64, copy=True) for g in grad_fn()]
    if len(analytic) != len(params):
        raise ValueError("grad_fn returned a list of the wrong length")
    block_errors = []
    messages = []
    for bi, (p, g) in enumerate(zip(params, analytic)):
        if p.shape != g.shape:
            raise ValueError(f"gradient block {bi} has shape {g.shape}, expected {p.shape}")
        flat_p = p.reshape(-1)
        flat_g = g.reshape(-1)
        worst = 0.0
        for j in range(flat_p.size):
            orig = flat_p[j]
            flat_p[j] = orig + step
            loss_plus = loss_fn()
            flat_p[j] = orig - step
            loss_minus = loss_fn()
            flat_p[j] = orig
            numeric = (loss_plus - loss_minus) / (2.0 * step)
            denom = max(abs(flat_g[j]), abs(numeric), 1e-6)
            err = abs(flat_g[j] - numeric) / denom
            worst = max(worst, err)
        block_errors.append(worst)
        messages.append(f"block {bi} shape {p.shape}: max rel err {worst:.3e}")
    max_err = max(block_errors) if block_errors else 0.0
    return GradCheckReport(
        block_errors=block_errors,
        max_rel_error=max_err,
        tolerance=tolerance,
        passed=max_err < tolerance,
        messages=messages,
    )
