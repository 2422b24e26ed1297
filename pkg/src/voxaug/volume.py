"""Core data model: volumes, label maps, samples, and synthetic phantoms.

Axis convention used everywhere in this package: arrays are indexed
``data[i, j, k]`` for the voxel at x=i, y=j, z=k. The first array axis is x.
On disk (NIfTI) x is the fastest-varying index; serialization handles the
reordering, in memory arrays are C-contiguous.

Image intensities are stored as float32 (the on-disk image datatype, so file
round-trips are bit-exact); label maps as uint8. All objects are treated as
immutable values: operations return new instances and never mutate arrays
in place.
"""

from dataclasses import dataclass, replace

import numpy as np

from .rng import RandomStream

RAW_LABELS = (0, 1, 2, 4)
CANONICAL_LABELS = (0, 1, 2, 3)

Shape3 = tuple[int, int, int]
Spacing3 = tuple[float, float, float]

CHANNEL_NAMES = ("t1", "t1ce", "t2", "flair")


def _check_spacing(spacing) -> Spacing3:
    spacing = tuple(float(s) for s in spacing)
    if len(spacing) != 3 or any(s <= 0 for s in spacing):
        raise ValueError(f"spacing must be 3 positive reals, got {spacing}")
    return spacing


@dataclass(frozen=True)
class Volume:
    """Dense 3D scalar grid with per-axis spacing in mm."""

    data: np.ndarray
    spacing: Spacing3 = (1.0, 1.0, 1.0)
    name: str = ""

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 3:
            raise ValueError(f"volume data must be 3-D, got shape {data.shape}")
        data = np.ascontiguousarray(data.astype(np.float32, copy=False))
        if not np.isfinite(data).all():
            bad = np.argwhere(~np.isfinite(data))[0]
            raise ValueError(f"non-finite voxel at index {tuple(int(v) for v in bad)}")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "spacing", _check_spacing(self.spacing))

    @property
    def shape(self) -> Shape3:
        return self.data.shape


@dataclass(frozen=True)
class LabelMap:
    """Dense 3D integer label grid.

    ``convention`` is "raw" for the acquisition alphabet {0, 1, 2, 4} or
    "canonical" for contiguous class ids {0, 1, 2, 3}.
    """

    data: np.ndarray
    spacing: Spacing3 = (1.0, 1.0, 1.0)
    convention: str = "raw"

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 3:
            raise ValueError(f"label data must be 3-D, got shape {data.shape}")
        if self.convention not in ("raw", "canonical"):
            raise ValueError(f"unknown label convention {self.convention!r}")
        alphabet = RAW_LABELS if self.convention == "raw" else CANONICAL_LABELS
        ok = np.isin(data, alphabet)
        if not ok.all():
            idx = np.argwhere(~ok)[0]
            val = data[tuple(idx)]
            raise ValueError(
                f"label value {int(val)} at voxel {tuple(int(v) for v in idx)} "
                f"not in {self.convention} alphabet {alphabet}"
            )
        data = np.ascontiguousarray(data.astype(np.uint8, copy=False))
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "spacing", _check_spacing(self.spacing))

    @property
    def shape(self) -> Shape3:
        return self.data.shape

    @property
    def alphabet(self) -> tuple[int, ...]:
        return RAW_LABELS if self.convention == "raw" else CANONICAL_LABELS


@dataclass(frozen=True)
class Sample:
    """Aligned bundle of image channels plus an optional label map.

    Canonical channel order is T1, T1Gd, T2, FLAIR, but any count >= 1 is
    accepted. All constituents must share shape and spacing exactly.
    """

    channels: tuple[Volume, ...]
    labels: LabelMap | None = None
    subject_id: str = ""

    def __post_init__(self):
        channels = tuple(self.channels)
        if not channels:
            raise ValueError("sample needs at least one channel")
        ref_shape, ref_spacing = channels[0].shape, channels[0].spacing
        for ch in channels[1:]:
            if ch.shape != ref_shape or ch.spacing != ref_spacing:
                raise ValueError(
                    f"channel grid mismatch: {ch.shape}/{ch.spacing} vs "
                    f"{ref_shape}/{ref_spacing}"
                )
        if self.labels is not None and (
            self.labels.shape != ref_shape or self.labels.spacing != ref_spacing
        ):
            raise ValueError("label map grid does not match channels")
        object.__setattr__(self, "channels", channels)

    @property
    def shape(self) -> Shape3:
        return self.channels[0].shape

    @property
    def spacing(self) -> Spacing3:
        return self.channels[0].spacing


@dataclass(frozen=True)
class ProbabilityVolume:
    """Per-voxel class probability vectors, shape (nx, ny, nz, C)."""

    data: np.ndarray
    spacing: Spacing3 = (1.0, 1.0, 1.0)

    def __post_init__(self):
        data = np.ascontiguousarray(np.asarray(self.data, dtype=np.float64))
        if data.ndim != 4 or data.shape[-1] < 2:
            raise ValueError(
                f"probability data must be (nx, ny, nz, C) with C >= 2, got {data.shape}"
            )
        if not np.isfinite(data).all():
            raise ValueError("non-finite probability value")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "spacing", _check_spacing(self.spacing))

    @property
    def shape(self) -> Shape3:
        return self.data.shape[:3]

    @property
    def num_classes(self) -> int:
        return self.data.shape[-1]

    def check_normalized(self, tol: float = 1e-5) -> None:
        """Raise if any voxel vector is negative or does not sum to 1 within tol."""
        if self.data.min() < 0:
            raise ValueError("negative class probability")
        sums = self.data.sum(axis=-1)
        off = np.abs(sums - 1.0).max()
        if off > tol:
            raise ValueError(f"probability vectors not normalized (max |sum-1| = {off:.3g})")


def normalize_minmax(vol: Volume) -> Volume:
    """Affinely map intensities to [0, 1]; a constant volume maps to zeros."""
    lo = float(vol.data.min())
    hi = float(vol.data.max())
    if hi == lo:
        return replace(vol, data=np.zeros_like(vol.data))
    return replace(vol, data=(vol.data - lo) / (hi - lo))


def center_offsets(shape: Shape3, patch_shape: Shape3) -> Shape3:
    """Per-axis start offset of the centered patch: floor((shape - patch) / 2)."""
    if any(p > s for p, s in zip(patch_shape, shape)):
        raise ValueError(f"patch exceeds volume: patch {tuple(patch_shape)} > shape {tuple(shape)}")
    if any(p < 1 for p in patch_shape):
        raise ValueError(f"patch shape must be positive, got {tuple(patch_shape)}")
    return tuple((s - p) // 2 for s, p in zip(shape, patch_shape))


def extract_center_patch(sample: Sample, patch_shape: Shape3) -> Sample:
    """Crop the centered patch_shape sub-grid from every channel and the labels."""
    off = center_offsets(sample.shape, patch_shape)
    sl = tuple(slice(o, o + p) for o, p in zip(off, patch_shape))

    def crop(arr):
        return np.ascontiguousarray(arr[sl])

    channels = tuple(replace(ch, data=crop(ch.data)) for ch in sample.channels)
    labels = None
    if sample.labels is not None:
        labels = replace(sample.labels, data=crop(sample.labels.data))
    return Sample(channels=channels, labels=labels, subject_id=sample.subject_id)


def raw_to_canonical_labels(labels: LabelMap) -> LabelMap:
    """Map the raw alphabet {0,1,2,4} to contiguous class ids {0,1,2,3}."""
    if labels.convention != "raw":
        raise ValueError("input label map is not in raw convention")
    lut = np.zeros(5, dtype=np.uint8)
    lut[[0, 1, 2, 4]] = [0, 1, 2, 3]
    return LabelMap(lut[labels.data], spacing=labels.spacing, convention="canonical")


def canonical_to_raw_labels(labels: LabelMap) -> LabelMap:
    """Inverse of :func:`raw_to_canonical_labels`."""
    if labels.convention != "canonical":
        raise ValueError("input label map is not in canonical convention")
    lut = np.array([0, 1, 2, 4], dtype=np.uint8)
    return LabelMap(lut[labels.data], spacing=labels.spacing, convention="raw")


def make_phantom(seed: int, shape: Shape3 = (64, 64, 64), subject_id: str = "") -> Sample:
    """Build a deterministic synthetic test subject.

    Four channels hold a smooth "brain" ellipsoid with channel-dependent
    intensity plus low-frequency texture; three nested "tumor" shells carry
    raw labels 4 (inner), 1 (middle), 2 (outer) on a zero background. The
    tumor center and texture depend on the seed only; intensities are
    min-max normalized to [0, 1].
    """
    shape = tuple(int(s) for s in shape)
    if len(shape) != 3 or any(s < 16 for s in shape):
        raise ValueError(f"phantom shape must be >= 16 per axis, got {shape}")
    stream = RandomStream(seed, ("phantom",))

    grids = np.meshgrid(*[np.arange(n, dtype=np.float64) for n in shape], indexing="ij")
    center = [(n - 1) / 2.0 for n in shape]
    half = [n / 2.0 for n in shape]

    # smooth brain envelope: 1 at center, 0 at the ellipsoid boundary
    axes = stream.uniform(0.80, 0.90, 3)
    rho2 = sum(((g - c) / (a * h)) ** 2 for g, c, a, h in zip(grids, center, axes, half))
    brain = np.clip(1.0 - rho2, 0.0, None)

    # low-frequency texture: a few random cosine waves, smooth by construction
    texture = np.zeros(shape)
    for _ in range(3):
        freq = stream.uniform(0.5, 1.5, 3)
        phase = stream.uniform(0.0, 2 * np.pi, 3)
        wave = np.ones(shape)
        for g, n, f, p in zip(grids, shape, freq, phase):
            wave = wave * np.cos(np.pi * f * g / n + p)
        texture += stream.uniform(0.05, 0.12) * wave

    # nested tumor shells, fully inside the brain envelope
    m = float(min(shape))
    r_inner = max(1.1, 0.066 * m)
    r_middle = 2.0 * r_inner
    r_outer = 3.0 * r_inner
    t_center = [c + stream.uniform(-0.28, 0.28) * h * 0.5 for c, h in zip(center, half)]
    squash = stream.uniform(0.9, 1.1, 3)
    dist = np.sqrt(sum(((g - tc) / s) ** 2 for g, tc, s in zip(grids, t_center, squash)))

    labels = np.zeros(shape, dtype=np.uint8)
    labels[dist < r_outer] = 2
    labels[dist < r_middle] = 1
    labels[dist < r_inner] = 4

    base = (0.55, 0.85, 0.70, 0.95)
    tumor_gain = (0.35, 0.60, 0.45, 0.25)
    channels = []
    for name, b, tg in zip(CHANNEL_NAMES, base, tumor_gain):
        bump = tg * np.exp(-((dist / r_outer) ** 2))
        intensity = b * brain + 0.5 * texture * brain + bump * (brain > 0)
        vol = Volume(intensity.astype(np.float32), name=name)
        channels.append(normalize_minmax(vol))

    sid = subject_id or f"phantom-{int(seed)}"
    return Sample(
        channels=tuple(channels),
        labels=LabelMap(labels, convention="raw"),
        subject_id=sid,
    )
