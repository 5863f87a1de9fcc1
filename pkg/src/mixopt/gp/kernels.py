"""Covariance kernels: exponentiated quadratic, Matérn-5/2 with ARD, and an
additive composite that pairs a time-only kernel with a joint kernel over all
inputs.

Feature layout convention for the composite variant: the LAST input coordinate
is log-time. The first child kernel sees only that coordinate; the second
child sees the full feature vector. The children's output scales play the role
of the two additive variance weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mixopt.exceptions import InputShapeError, ValidationError

EXPONENTIATED_QUADRATIC = "exponentiated_quadratic"
MATERN52_ARD = "matern52_ard"
ADDITIVE_COMPOSITE = "additive_composite"

_LEAF_VARIANTS = (EXPONENTIATED_QUADRATIC, MATERN52_ARD)
_SQRT5 = np.sqrt(5.0)


@dataclass(frozen=True)
class KernelParams:
    """Hyperparameters of a kernel, immutable after construction.

    For leaf variants ``output_scale`` is the variance multiplier and
    ``lengthscales`` holds one positive scale per input dimension (ARD) or a
    single shared scale. For the composite variant only ``children`` is
    meaningful (a pair: time kernel, joint kernel) and ``output_scale`` /
    ``lengthscales`` are ignored.
    """

    variant: str
    output_scale: float = 1.0
    lengthscales: tuple[float, ...] = (1.0,)
    children: tuple["KernelParams", "KernelParams"] | None = None

    def __post_init__(self):
        if self.variant in _LEAF_VARIANTS:
            if self.children is not None:
                raise ValidationError(f"leaf kernel {self.variant!r} cannot have children")
            if not (np.isfinite(self.output_scale) and self.output_scale > 0):
                raise ValidationError("output_scale must be strictly positive and finite")
            ls = np.asarray(self.lengthscales, dtype=float)
            if ls.ndim != 1 or ls.size == 0:
                raise ValidationError("lengthscales must be a non-empty 1-d sequence")
            if not (np.all(np.isfinite(ls)) and np.all(ls > 0)):
                raise ValidationError("all lengthscales must be strictly positive and finite")
            object.__setattr__(self, "lengthscales", tuple(float(v) for v in ls))
        elif self.variant == ADDITIVE_COMPOSITE:
            if self.children is None or len(self.children) != 2:
                raise ValidationError("additive composite requires exactly two children")
            time_child, joint_child = self.children
            if time_child.variant not in _LEAF_VARIANTS or joint_child.variant not in _LEAF_VARIANTS:
                raise ValidationError("composite children must be leaf kernels")
            if len(time_child.lengthscales) != 1:
                raise ValidationError("time child acts on the single log-time coordinate")
        else:
            raise ValidationError(f"unknown kernel variant {self.variant!r}")

    @property
    def total_output_scale(self) -> float:
        """Value of k(z, z): the prior variance at zero distance."""
        if self.variant == ADDITIVE_COMPOSITE:
            return sum(c.output_scale for c in self.children)
        return self.output_scale

    def input_dim(self) -> int | None:
        """Expected feature dimension, or None when any ARD width is accepted."""
        if self.variant == ADDITIVE_COMPOSITE:
            return len(self.children[1].lengthscales)
        if len(self.lengthscales) == 1:
            return None  # isotropic: broadcasts over any dimension
        return len(self.lengthscales)

    def to_dict(self) -> dict:
        if self.variant == ADDITIVE_COMPOSITE:
            return {
                "variant": self.variant,
                "children": [c.to_dict() for c in self.children],
            }
        return {
            "variant": self.variant,
            "output_scale": self.output_scale,
            "lengthscales": list(self.lengthscales),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KernelParams":
        if d["variant"] == ADDITIVE_COMPOSITE:
            kids = tuple(cls.from_dict(c) for c in d["children"])
            return cls(variant=ADDITIVE_COMPOSITE, children=kids)
        return cls(
            variant=d["variant"],
            output_scale=float(d["output_scale"]),
            lengthscales=tuple(float(v) for v in d["lengthscales"]),
        )


def rbf(output_scale: float = 1.0, lengthscales=(1.0,)) -> KernelParams:
    return KernelParams(EXPONENTIATED_QUADRATIC, output_scale, tuple(np.atleast_1d(lengthscales)))


def matern52(output_scale: float = 1.0, lengthscales=(1.0,)) -> KernelParams:
    return KernelParams(MATERN52_ARD, output_scale, tuple(np.atleast_1d(lengthscales)))


def composite_time_joint(time: KernelParams, joint: KernelParams) -> KernelParams:
    """Additive kernel alpha*k_time(log t, log t') + beta*k_joint over all features."""
    return KernelParams(ADDITIVE_COMPOSITE, children=(time, joint))


def _as_matrix(A, name: str) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A[None, :]
    if A.ndim != 2 or A.size == 0:
        raise InputShapeError(f"{name} must be a non-empty 2-d array, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValidationError(f"{name} contains non-finite values")
    return A


def _lengthscale_vector(params: KernelParams, d: int) -> np.ndarray:
    ls = np.asarray(params.lengthscales, dtype=float)
    if ls.size == 1:
        return np.full(d, ls[0])
    if ls.size != d:
        raise InputShapeError(
            f"kernel expects {ls.size} input dimensions, got {d}"
        )
    return ls


def _scaled_sqdist(A: np.ndarray, B: np.ndarray, ls: np.ndarray) -> np.ndarray:
    As = A / ls
    Bs = B / ls
    # (a-b)^2 = a^2 + b^2 - 2ab, clipped against tiny negative round-off
    d2 = (
        np.sum(As**2, axis=1)[:, None]
        + np.sum(Bs**2, axis=1)[None, :]
        - 2.0 * As @ Bs.T
    )
    return np.maximum(d2, 0.0)


def _leaf_matrix(params: KernelParams, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    ls = _lengthscale_vector(params, A.shape[1])
    d2 = _scaled_sqdist(A, B, ls)
    if params.variant == EXPONENTIATED_QUADRATIC:
        return params.output_scale * np.exp(-0.5 * d2)
    r = np.sqrt(d2)
    return params.output_scale * (1.0 + _SQRT5 * r + (5.0 / 3.0) * d2) * np.exp(-_SQRT5 * r)


def kernel_matrix(params: KernelParams, A, B) -> np.ndarray:
    """Cross-covariance matrix with entries k(A_i, B_j)."""
    A = _as_matrix(A, "A")
    B = _as_matrix(B, "B")
    if A.shape[1] != B.shape[1]:
        raise InputShapeError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    if params.variant == ADDITIVE_COMPOSITE:
        time_child, joint_child = params.children
        kt = _leaf_matrix(time_child, A[:, -1:], B[:, -1:])
        kj = _leaf_matrix(joint_child, A, B)
        return kt + kj
    return _leaf_matrix(params, A, B)


def kernel_eval(params: KernelParams, z, z_prime) -> float:
    """Scalar kernel evaluation k(z, z')."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    z_prime = np.atleast_1d(np.asarray(z_prime, dtype=float))
    if z.shape != z_prime.shape:
        raise InputShapeError(f"shape mismatch: {z.shape} vs {z_prime.shape}")
    return float(kernel_matrix(params, z[None, :], z_prime[None, :])[0, 0])


# ---------------------------------------------------------------------------
# flat log-parameter vector for optimization
# ---------------------------------------------------------------------------


def n_kernel_params(params: KernelParams) -> int:
    if params.variant == ADDITIVE_COMPOSITE:
        return sum(n_kernel_params(c) for c in params.children)
    return 1 + len(params.lengthscales)


def pack_log_params(params: KernelParams) -> np.ndarray:
    """Flatten to [log output_scale, log lengthscales...] per leaf, children first."""
    if params.variant == ADDITIVE_COMPOSITE:
        return np.concatenate([pack_log_params(c) for c in params.children])
    return np.log(np.concatenate([[params.output_scale], params.lengthscales]))


def unpack_log_params(template: KernelParams, theta: np.ndarray) -> KernelParams:
    """Inverse of pack_log_params, using `template` for structure."""
    theta = np.asarray(theta, dtype=float)
    if theta.size != n_kernel_params(template):
        raise InputShapeError(
            f"expected {n_kernel_params(template)} kernel parameters, got {theta.size}"
        )
    if template.variant == ADDITIVE_COMPOSITE:
        n0 = n_kernel_params(template.children[0])
        return KernelParams(
            ADDITIVE_COMPOSITE,
            children=(
                unpack_log_params(template.children[0], theta[:n0]),
                unpack_log_params(template.children[1], theta[n0:]),
            ),
        )
    vals = np.exp(theta)
    return KernelParams(template.variant, float(vals[0]), tuple(vals[1:]))


def lengthscale_mask(params: KernelParams) -> np.ndarray:
    """Boolean mask over the packed vector marking lengthscale entries."""
    if params.variant == ADDITIVE_COMPOSITE:
        return np.concatenate([lengthscale_mask(c) for c in params.children])
    return np.array([False] + [True] * len(params.lengthscales))


def _leaf_matrix_with_grads(params: KernelParams, A: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
    """Symmetric kernel matrix K(A, A) and dK/dtheta_i in packed order."""
    n, d = A.shape
    ls = _lengthscale_vector(params, d)
    As = A / ls
    # per-dimension scaled squared differences, needed for lengthscale grads
    d2_dims = [(As[:, i][:, None] - As[:, i][None, :]) ** 2 for i in range(d)]
    d2 = sum(d2_dims)
    if params.variant == EXPONENTIATED_QUADRATIC:
        K = params.output_scale * np.exp(-0.5 * d2)
        grads = [K]  # d/d log(output_scale)
        per_dim = [K * d2_i for d2_i in d2_dims]
    else:
        r = np.sqrt(np.maximum(d2, 0.0))
        e = np.exp(-_SQRT5 * r)
        K = params.output_scale * (1.0 + _SQRT5 * r + (5.0 / 3.0) * d2) * e
        grads = [K]
        common = params.output_scale * (5.0 / 3.0) * (1.0 + _SQRT5 * r) * e
        per_dim = [common * d2_i for d2_i in d2_dims]
    if len(params.lengthscales) == 1:
        grads.append(sum(per_dim))
    else:
        grads.extend(per_dim)
    return K, grads


def kernel_matrix_with_grads(params: KernelParams, A) -> tuple[np.ndarray, list[np.ndarray]]:
    """K(A, A) plus gradients w.r.t. the packed log parameters."""
    A = _as_matrix(A, "A")
    if params.variant == ADDITIVE_COMPOSITE:
        time_child, joint_child = params.children
        Kt, gt = _leaf_matrix_with_grads(time_child, A[:, -1:])
        Kj, gj = _leaf_matrix_with_grads(joint_child, A)
        return Kt + Kj, gt + gj
    return _leaf_matrix_with_grads(params, A)
