"""Decomposition quality metrics.

Per-layer L2 and the recombination scalars are computed in linear space;
the albedo comparison metrics (DSSIM and NRMSE, the standard pairing for
reflectance estimates) run in gamma space, matching how composites are
stored.  SSIM uses the reference constants: 11x11 Gaussian window with
sigma 1.5, K1 = 0.01, K2 = 0.03, dynamic range 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image import DEFAULT_GAMMA, ImageRGB, gamma_encode
from .model import LayerSet, recombination_residuals

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03

LAYER_NAMES = ("occlusion", "irradiance", "albedo", "specular")


def _as_array(img) -> np.ndarray:
    if isinstance(img, (ImageRGB,)) or hasattr(img, "data"):
        return np.asarray(img.data, dtype=np.float64)
    return np.asarray(img, dtype=np.float64)


def l2_loss(a, b) -> float:
    """Mean squared per-channel difference."""
    aa, bb = _as_array(a), _as_array(b)
    if aa.shape != bb.shape:
        raise ValueError(f"shape mismatch: {aa.shape} vs {bb.shape}")
    return float(np.mean((aa - bb) ** 2))


def nrmse(pred, ref, mode: str = "euclidean") -> float:
    """Root-mean-square error normalized by the reference.

    ``euclidean`` divides by the reference's Euclidean norm (so
    nrmse(2*ref, ref) == 1); ``minmax`` divides the RMSE by the
    reference's value range.
    """
    p, r = _as_array(pred), _as_array(ref)
    if p.shape != r.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {r.shape}")
    if mode == "euclidean":
        denom = float(np.linalg.norm(r.ravel()))
        if denom == 0.0:
            raise ValueError("reference has zero norm")
        return float(np.linalg.norm((p - r).ravel()) / denom)
    if mode == "minmax":
        denom = float(r.max() - r.min())
        if denom == 0.0:
            raise ValueError("reference has zero value range")
        return float(np.sqrt(np.mean((p - r) ** 2)) / denom)
    raise ValueError(f"unknown nrmse mode {mode!r}")


def _gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    half = (size - 1) / 2.0
    x = np.arange(size, dtype=np.float64) - half
    k = np.exp(-(x**2) / (2.0 * sigma**2))
    return k / k.sum()


def _filter_valid(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Separable valid-mode correlation along both spatial axes."""
    taps = kernel.size
    h, w = img.shape
    out_h = h - taps + 1
    rows = np.zeros((out_h, w), dtype=np.float64)
    for t in range(taps):
        rows += kernel[t] * img[t : t + out_h, :]
    out_w = w - taps + 1
    out = np.zeros((out_h, out_w), dtype=np.float64)
    for t in range(taps):
        out += kernel[t] * rows[:, t : t + out_w]
    return out


def ssim(a, b, data_range: float = 1.0) -> float:
    """Mean structural similarity over valid windows, averaged over channels."""
    aa, bb = _as_array(a), _as_array(b)
    if aa.shape != bb.shape:
        raise ValueError(f"shape mismatch: {aa.shape} vs {bb.shape}")
    if aa.ndim == 2:
        aa, bb = aa[..., None], bb[..., None]
    if aa.shape[0] < SSIM_WINDOW or aa.shape[1] < SSIM_WINDOW:
        raise ValueError(
            f"images must be at least {SSIM_WINDOW}x{SSIM_WINDOW} for SSIM"
        )
    kernel = _gaussian_kernel(SSIM_WINDOW, SSIM_SIGMA)
    c1 = (SSIM_K1 * data_range) ** 2
    c2 = (SSIM_K2 * data_range) ** 2
    scores = []
    for ch in range(aa.shape[2]):
        x, y = aa[..., ch], bb[..., ch]
        mu_x = _filter_valid(x, kernel)
        mu_y = _filter_valid(y, kernel)
        var_x = _filter_valid(x * x, kernel) - mu_x * mu_x
        var_y = _filter_valid(y * y, kernel) - mu_y * mu_y
        cov = _filter_valid(x * y, kernel) - mu_x * mu_y
        num = (2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)
        den = (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
        scores.append(float(np.mean(num / den)))
    return float(np.mean(scores))


def dssim(a, b, data_range: float = 1.0) -> float:
    """Structural dissimilarity, (1 - SSIM) / 2, in [0, 1]."""
    return (1.0 - ssim(a, b, data_range)) / 2.0


@dataclass(frozen=True)
class RecordScores:
    """Metrics of one decomposition against its ground truth."""

    layer_l2: dict[str, float]
    recombination: tuple[float, float, float]
    dssim_albedo: float
    nrmse_albedo: float


@dataclass(frozen=True)
class EvalReport:
    """Mean and standard deviation of record scores over a set."""

    count: int
    layer_l2_mean: dict[str, float]
    layer_l2_std: dict[str, float]
    recombination_mean: tuple[float, float, float]
    recombination_std: tuple[float, float, float]
    dssim_mean: float
    dssim_std: float
    nrmse_mean: float
    nrmse_std: float

    def format(self) -> str:
        lines = [
            "# lightlayers evaluation report",
            "# layer L2 in linear space; dssim/nrmse on gamma-encoded albedo",
            f"count={self.count}",
        ]
        for name in LAYER_NAMES:
            lines.append(f"l2.{name}.mean={self.layer_l2_mean[name]:.9g}")
            lines.append(f"l2.{name}.std={self.layer_l2_std[name]:.9g}")
        for i in range(3):
            lines.append(f"recombination.r{i + 1}.mean={self.recombination_mean[i]:.9g}")
            lines.append(f"recombination.r{i + 1}.std={self.recombination_std[i]:.9g}")
        lines.append(f"dssim.albedo.mean={self.dssim_mean:.9g}")
        lines.append(f"dssim.albedo.std={self.dssim_std:.9g}")
        lines.append(f"nrmse.albedo.mean={self.nrmse_mean:.9g}")
        lines.append(f"nrmse.albedo.std={self.nrmse_std:.9g}")
        return "\n".join(lines) + "\n"


def evaluate_decomposition(
    pred: LayerSet, gt: LayerSet, composite: ImageRGB
) -> RecordScores:
    """Score one predicted decomposition against ground truth.

    The composite must be linear (the same units the layers compose in).
    """
    if pred.width != gt.width or pred.height != gt.height:
        raise ValueError("prediction and ground truth dimensions differ")
    layer_l2 = {
        name: l2_loss(getattr(pred, name), getattr(gt, name)) for name in LAYER_NAMES
    }
    r1, r2, r3 = recombination_residuals(pred, composite)
    recombination = tuple(float(np.mean(r.data.astype(np.float64) ** 2)) for r in (r1, r2, r3))
    pred_alb = gamma_encode(pred.albedo, DEFAULT_GAMMA)
    gt_alb = gamma_encode(gt.albedo, DEFAULT_GAMMA)
    return RecordScores(
        layer_l2=layer_l2,
        recombination=recombination,
        dssim_albedo=dssim(pred_alb, gt_alb),
        nrmse_albedo=_nrmse_or_zero(pred_alb, gt_alb),
    )


def _nrmse_or_zero(pred, ref) -> float:
    """NRMSE that tolerates an identically-zero reference when pred matches."""
    p, r = _as_array(pred), _as_array(ref)
    if not r.any():
        return 0.0 if not p.any() else float("inf")
    return nrmse(p, r)


def summarize(scores: list[RecordScores]) -> EvalReport:
    if not scores:
        raise ValueError("cannot summarize an empty score list")
    l2_mean, l2_std = {}, {}
    for name in LAYER_NAMES:
        vals = np.array([s.layer_l2[name] for s in scores])
        l2_mean[name] = float(vals.mean())
        l2_std[name] = float(vals.std())
    rec = np.array([s.recombination for s in scores])
    ds = np.array([s.dssim_albedo for s in scores])
    nr = np.array([s.nrmse_albedo for s in scores])
    return EvalReport(
        count=len(scores),
        layer_l2_mean=l2_mean,
        layer_l2_std=l2_std,
        recombination_mean=tuple(rec.mean(axis=0)),
        recombination_std=tuple(rec.std(axis=0)),
        dssim_mean=float(ds.mean()),
        dssim_std=float(ds.std()),
        nrmse_mean=float(nr.mean()),
        nrmse_std=float(nr.std()),
    )
