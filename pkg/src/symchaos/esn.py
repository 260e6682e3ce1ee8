"""Echo-state network surrogate: random reservoir, ridge readout, free run.

The reservoir update is the leaky tanh integrator

    R_{n+1} = (1 - alpha) R_n + alpha tanh(W_R R_n + W_in y_n)

driven either by teacher samples (training) or by the network's own
readout y_n = W_out [1; R_n] (free run). The readout is the only trained
part; W_R and W_in stay fixed after construction.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

D_MODEL = 3  # reservoir input/output dimension: the flow state (x, y, z)

_FORMAT_VERSION = 1


class EsnDivergenceError(RuntimeError):
    """Reservoir state or readout turned non-finite at ``step``.

    ``outputs`` holds the predictions made before the failure (free runs
    only), so callers can report on the surviving prefix.
    """

    def __init__(self, step: int, what: str = "output", outputs=None):
        super().__init__(f"non-finite {what} at step {step}")
        self.step = step
        self.outputs = outputs


@dataclass(frozen=True)
class EsnHyperParams:
    """Construction and training knobs for one network.

    ``use_bias`` selects the readout regressor: [1; R] (default) or the
    bare reservoir state.
    """
    n_res: int = 80
    leak_alpha: float = 0.3
    spectral_radius: float = 0.9
    input_scaling: float = 0.5
    density: float = 0.1
    ridge_beta: float = 1e-6
    washout: int = 2000
    train_len: int = 30_000
    seed: int = 0
    use_bias: bool = True

    def __post_init__(self):
        if self.n_res < 1:
            raise ValueError("n_res must be >= 1")
        if not 0.0 < self.leak_alpha <= 1.0:
            raise ValueError("leak_alpha must be in (0, 1]")
        if self.spectral_radius <= 0.0:
            raise ValueError("spectral_radius must be positive")
        if self.input_scaling <= 0.0:
            raise ValueError("input_scaling must be positive")
        if not 0.0 < self.density <= 1.0:
            raise ValueError("density must be in (0, 1]")
        if self.ridge_beta < 0.0:
            raise ValueError("ridge_beta must be >= 0")
        if self.washout < 0:
            raise ValueError("washout must be >= 0")


@dataclass(frozen=True, eq=False)
class TrainedEsn:
    """Immutable fitted network. ``final_state`` is the reservoir state at
    the end of training, the natural seed for a continuing free run."""
    W_R: np.ndarray            # (n_res, n_res)
    W_in: np.ndarray           # (n_res, 3)
    W_out: np.ndarray          # (3, 1 + n_res) with leading bias column
    hyper: EsnHyperParams
    final_state: np.ndarray | None = None


@dataclass
class EsnRunResult:
    """States and/or outputs of one run; lengths match the driving horizon."""
    states: np.ndarray | None   # (n, n_res) post-washout reservoir states
    outputs: np.ndarray | None  # (n, 3) readout predictions
    final_state: np.ndarray | None = None


def _power_radius(W: np.ndarray, n_iter: int, tol: float, seed: int):
    """Norm-ratio power iteration; (estimate, converged)."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(W.shape[0])
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return 0.0, False
    v /= nv
    prev = np.inf
    for _ in range(n_iter):
        w = W @ v
        est = float(np.linalg.norm(w))
        if est <= 1e-300:
            return 0.0, True
        if abs(est - prev) <= tol * est:
            return est, True
        prev = est
        v = w / est
    return prev, False


def spectral_radius(W: np.ndarray, n_iter: int = 1000, tol: float = 1e-9) -> float:
    """Largest eigenvalue magnitude of a square matrix.

    Power iteration with a restarted second attempt; random reservoirs
    usually carry a complex dominant eigen-pair, where the norm-ratio
    iterate oscillates forever, so non-convergence falls back to the
    exact spectrum instead of erroring. Deterministic.
    """
    est, ok = _power_radius(W, n_iter, tol, seed=0)
    if not ok:
        est, ok = _power_radius(W, n_iter, tol, seed=1)
    if not ok:
        est = float(np.max(np.abs(np.linalg.eigvals(W))))
    return est


def init_esn(hyper: EsnHyperParams) -> tuple[np.ndarray, np.ndarray]:
    """Draw (W_R, W_in) for the given hyperparameters.

    W_R: sparse with ``density`` fraction of entries uniform in
    [-0.5, 0.5], rescaled so its spectral radius equals
    ``hyper.spectral_radius``. W_in: dense uniform in
    [-input_scaling, input_scaling]. Same seed, same matrices.
    """
    ss = np.random.SeedSequence(hyper.seed)
    r_res, r_mask, r_in = (np.random.default_rng(s) for s in ss.spawn(3))
    n = hyper.n_res
    W = r_res.uniform(-0.5, 0.5, (n, n))
    keep = r_mask.uniform(size=(n, n)) < hyper.density
    W = np.where(keep, W, 0.0)
    rho = spectral_radius(W)
    if rho < 1e-12:
        raise ValueError(
            "reservoir draw has zero spectral radius; change seed or density")
    W *= hyper.spectral_radius / rho
    W_in = r_in.uniform(-hyper.input_scaling, hyper.input_scaling, (n, D_MODEL))
    return W, W_in


def teacher_run(matrices, hyper: EsnHyperParams, teacher) -> EsnRunResult:
    """Drive the reservoir with teacher samples from R_0 = 0.

    states[i] is the reservoir state after consuming teacher[washout+i],
    so states[i] pairs with target teacher[washout+i+1] for one-step-ahead
    fitting. ``final_state`` is the state after the last teacher sample.
    """
    W_R, W_in = matrices
    teacher = np.ascontiguousarray(teacher, dtype=float)
    if teacher.ndim != 2 or teacher.shape[1] != D_MODEL:
        raise ValueError(f"teacher must be (n, {D_MODEL})")
    L = teacher.shape[0]
    if L <= hyper.washout:
        raise ValueError("teacher no longer than washout")
    a = hyper.leak_alpha
    R = np.zeros(hyper.n_res)
    states = np.empty((L - hyper.washout, hyper.n_res))
    w = hyper.washout
    for n in range(L):
        R = (1.0 - a) * R + a * np.tanh(W_R @ R + W_in @ teacher[n])
        if n >= w:
            states[n - w] = R
    # tanh keeps R bounded, so non-finite values can only enter through
    # the teacher or the matrices; one post-hoc scan locates them.
    if not np.isfinite(states).all():
        bad = int(np.argwhere(~np.isfinite(states).all(axis=1))[0, 0])
        raise EsnDivergenceError(w + bad, "reservoir state")
    return EsnRunResult(states=states, outputs=None, final_state=R.copy())


def fit_readout(states, targets, ridge_beta: float,
                use_bias: bool = True) -> np.ndarray:
    """Ridge-regressed readout W_out mapping [1; R] (or R) to targets.

    Solves the regularized normal equations (X'X + beta I) W' = X'T with a
    symmetric positive-definite factorization. beta = 0 on a singular
    system raises, advising a positive ridge.
    """
    states = np.asarray(states, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if states.shape[0] != targets.shape[0]:
        raise ValueError("states and targets must align row-wise")
    if use_bias:
        X = np.hstack([np.ones((states.shape[0], 1)), states])
    else:
        X = states
    A = X.T @ X
    A[np.diag_indices_from(A)] += ridge_beta
    B = X.T @ targets
    try:
        W = cho_solve(cho_factor(A, lower=True), B)
    except np.linalg.LinAlgError as exc:
        raise ValueError(
            "normal equations singular; use ridge_beta > 0") from exc
    if not np.isfinite(W).all():
        raise ValueError("readout fit produced non-finite weights")
    if not use_bias:
        W = np.vstack([np.zeros((1, targets.shape[1])), W])
    return W.T


def train(hyper: EsnHyperParams, teacher) -> TrainedEsn:
    """init + teacher_run + fit_readout on one-step-ahead pairs."""
    matrices = init_esn(hyper)
    run = teacher_run(matrices, hyper, teacher)
    teacher = np.asarray(teacher, dtype=float)
    if run.states.shape[0] < 2:
        raise ValueError("not enough post-washout steps to fit")
    W_out = fit_readout(run.states[:-1], teacher[hyper.washout + 1:],
                        hyper.ridge_beta, hyper.use_bias)
    return TrainedEsn(W_R=matrices[0], W_in=matrices[1], W_out=W_out,
                      hyper=hyper, final_state=run.final_state)


def free_run(trained: TrainedEsn, R_init, horizon: int,
             record_states: bool = False) -> EsnRunResult:
    """Closed loop: y_n = W_out [1; R_n], fed back as the next input.

    outputs[k] is the prediction made from the k-th state; horizon 0 is
    allowed and yields empty outputs. States are only recorded on request
    (a million-step run would otherwise hold horizon x n_res doubles).
    """
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    hyper = trained.hyper
    a = hyper.leak_alpha
    W_R, W_in = trained.W_R, trained.W_in
    bias = trained.W_out[:, 0]
    W_r = trained.W_out[:, 1:]
    R = np.array(R_init, dtype=float)
    if R.shape != (hyper.n_res,):
        raise ValueError(f"R_init must have shape ({hyper.n_res},)")
    outputs = np.empty((horizon, D_MODEL))
    states = np.empty((horizon, hyper.n_res)) if record_states else None
    for k in range(horizon):
        y = bias + W_r @ R
        if not np.isfinite(y).all():
            raise EsnDivergenceError(k, outputs=outputs[:k].copy())
        outputs[k] = y
        R = (1.0 - a) * R + a * np.tanh(W_R @ R + W_in @ y)
        if record_states:
            states[k] = R
    return EsnRunResult(states=states, outputs=outputs, final_state=R.copy())


def save_esn(trained: TrainedEsn, path) -> None:
    """Single-file npz container; includes hyperparameters and seed."""
    final = trained.final_state
    np.savez(path,
             version=np.int64(_FORMAT_VERSION),
             W_R=trained.W_R, W_in=trained.W_in, W_out=trained.W_out,
             final_state=final if final is not None else np.empty(0),
             hyper=np.frombuffer(
                 json.dumps(asdict(trained.hyper)).encode(), dtype=np.uint8))


def load_esn(path) -> TrainedEsn:
    """Inverse of save_esn; the loaded model free-runs bit-identically."""
    with np.load(path) as z:
        version = int(z["version"])
        if version != _FORMAT_VERSION:
            raise ValueError(f"unsupported container version {version}")
        hyper = EsnHyperParams(**json.loads(bytes(z["hyper"]).decode()))
        final = z["final_state"]
        return TrainedEsn(W_R=z["W_R"], W_in=z["W_in"], W_out=z["W_out"],
                          hyper=hyper,
                          final_state=None if final.size == 0 else final)
