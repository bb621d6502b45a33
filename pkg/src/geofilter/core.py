"""Domain types, configuration and the trust-factor lifecycle shared by all experts.

All angles are stored in degrees and wrapped to (-180, 180].  Velocities are in
cm/s; pixel locations are frame-local with y growing downward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

PRUNED = None  # sentinel returned by trust_commit when an entity falls below Tr_c


def wrap_deg(angle: float) -> float:
    """Wrap an angle in degrees to the interval (-180, 180]."""
    return 180.0 - (180.0 - angle) % 360.0


@dataclass(frozen=True)
class PixelPoint:
    x: float
    y: float

    def __add__(self, other: "PixelPoint") -> "PixelPoint":
        return PixelPoint(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "PixelPoint") -> "PixelPoint":
        return PixelPoint(self.x - other.x, self.y - other.y)

    def scaled(self, s: float) -> "PixelPoint":
        return PixelPoint(self.x * s, self.y * s)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def dist(self, other: "PixelPoint") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def as_tuple(self) -> Tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class CameraModel:
    f: float  # focal length, pixels
    principal: PixelPoint  # frame origin
    width: float = 640.0
    height: float = 480.0

    def __post_init__(self):
        if self.f <= 0:
            raise ValueError("focal length must be positive")
        if not (0 <= self.principal.x <= self.width and 0 <= self.principal.y <= self.height):
            raise ValueError("principal point outside the frame")


@dataclass(frozen=True)
class ImuSample:
    v_v: float  # vehicle speed, cm/s
    a_v: float  # acceleration, cm/s^2
    omega: Tuple[float, float, float]  # (wx, wy, wz), radians per frame interval
    t_f: float = 1.0  # frame interval, s

    def __post_init__(self):
        if self.t_f <= 0:
            raise ValueError("frame interval must be positive")


@dataclass(frozen=True)
class TrustLadder:
    tr_c: int  # critical: prune below this
    tr_s: int  # standard: reliable
    tr_m: int  # maximum: cap, triggers ignorance regions

    def __post_init__(self):
        if not (0 <= self.tr_c < self.tr_s < self.tr_m):
            raise ValueError("trust ladder must satisfy 0 <= tr_c < tr_s < tr_m")


@dataclass(frozen=True)
class FilterConfig:
    camera: CameraModel
    circle_trust: TrustLadder = TrustLadder(2, 3, 5)
    square_trust: TrustLadder = TrustLadder(3, 5, 7)
    delta_v: float = 9.0  # angular error span, degrees
    delta_beta_1: float = 90.0  # case-1 couple angle offset, degrees
    delta_beta_2: float = 35.0  # case-2 alignment span, degrees
    mu_0: float = 25.0  # initial detection radius, pixels
    rho_c: float = 40.0  # minimum overlap percentage
    eps_beta_n: float = 20.0
    eps_beta_r: float = 50.0
    eps_beta_s: float = 20.0
    eps_beta: float = 20.0
    eps_v_n: float = 40.0
    eps_v_r: float = 100.0
    eps_v: float = 0.7
    eps_v_s: float = 0.7
    psi_lifetime: int = 1  # frames an ignorance region stays active
    px_per_cm: float = 5.0  # projection scale for velocity -> pixel displacement
    use_verbatim_eq1: bool = False

    def __post_init__(self):
        if not (0 < self.rho_c <= 100):
            raise ValueError("rho_c must be in (0, 100]")
        if self.psi_lifetime < 1:
            raise ValueError("psi_lifetime must be >= 1")
        for name in ("delta_v", "mu_0", "eps_beta_n", "eps_beta_r", "eps_beta_s",
                     "eps_beta", "eps_v_n", "eps_v_r", "eps_v", "eps_v_s"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass
class NormalEdge:
    loc: PixelPoint
    vel: float  # cm/s
    beta: float  # degrees, direction from the frame origin
    mu: float  # detection radius, pixels
    trust: int


@dataclass
class RebelEdge:
    loc: PixelPoint
    vel: float  # cm/s
    beta: float  # degrees, direction from own origin
    mu: float  # deviation angle, degrees
    origin: PixelPoint
    trust: int


@dataclass
class Circle:
    kind: str  # "normal" | "rebel"
    loc: PixelPoint
    radius: float
    vel: float
    beta: float
    trust: int
    members: List[int]
    origin: PixelPoint  # O_I for normal circles, mean member origin for rebels

    def __post_init__(self):
        if self.kind not in ("normal", "rebel"):
            raise ValueError("circle kind must be 'normal' or 'rebel'")


@dataclass
class Square:
    loc: PixelPoint  # center
    radii: Tuple[float, float]  # half-extents (x, y), pixels
    vel: float
    beta: float
    origin: PixelPoint
    trust: int


@dataclass
class IgnoranceRegion:
    loc: PixelPoint
    extent: Tuple[float, ...]  # (r,) for ty=1, (rx, ry) for ty=2
    ty: int  # 1 circular, 2 rectangular
    remaining_frames: int

    def __post_init__(self):
        if self.ty not in (1, 2):
            raise ValueError("ignorance region type must be 1 or 2")

    def contains(self, p: PixelPoint) -> bool:
        if self.ty == 1:
            return p.dist(self.loc) <= self.extent[0]
        return (abs(p.x - self.loc.x) <= self.extent[0]
                and abs(p.y - self.loc.y) <= self.extent[1])


@dataclass
class Collector:
    center: PixelPoint
    radius: float
    count: int = 1


@dataclass
class RebelAlignmentRow:
    """Rolling chain of rebel-candidate positions over at most 3 consecutive frames."""
    chain: List[Tuple[int, PixelPoint]]

    def last_frame(self) -> int:
        return self.chain[-1][0]


@dataclass
class FilterState:
    frame_index: int = -1
    chi: List[Tuple[PixelPoint, int]] = field(default_factory=list)
    collectors: List[Collector] = field(default_factory=list)
    psi: List[IgnoranceRegion] = field(default_factory=list)
    alpha: List[RebelAlignmentRow] = field(default_factory=list)
    normal_edges: List[NormalEdge] = field(default_factory=list)
    rebel_edges: List[RebelEdge] = field(default_factory=list)
    normal_circles: List[Circle] = field(default_factory=list)
    rebel_circles: List[Circle] = field(default_factory=list)
    squares: List[Square] = field(default_factory=list)


def trust_init(entity_class: str, ladder: TrustLadder) -> int:
    """Initial trust for a newly created entity.

    Normal edges and circles start at round(0.5 * (tr_c + tr_s)), half-up.
    Squares start at tr_s; rebels one above tr_s.
    """
    if entity_class in ("normal_edge", "normal_circle"):
        return (ladder.tr_c + ladder.tr_s + 1) // 2
    if entity_class == "square":
        return ladder.tr_s
    if entity_class == "rebel":
        return min(ladder.tr_s + 1, ladder.tr_m)
    raise ValueError(f"unknown entity class: {entity_class}")


def trust_commit(trust: int, delta: int, ladder: TrustLadder) -> Optional[int]:
    """Apply a +-1 trust update.  Returns PRUNED (None) when the result drops
    below tr_c, otherwise the new value clamped at tr_m."""
    new = trust + delta
    if new < ladder.tr_c:
        return PRUNED
    return min(new, ladder.tr_m)


# -- flat key=value config serialization ------------------------------------

_CONFIG_KEYS = (
    "f", "o_i_x", "o_i_y", "width", "height",
    "tr_c_c", "tr_c_s", "tr_c_m", "tr_s_c", "tr_s_s", "tr_s_m",
    "delta_v", "delta_beta_1", "delta_beta_2", "mu_0", "rho_c",
    "eps_beta_n", "eps_beta_r", "eps_beta_s", "eps_beta",
    "eps_v_n", "eps_v_r", "eps_v", "eps_v_s",
    "psi_lifetime", "px_per_cm", "use_verbatim_eq1",
)


def config_to_text(config: FilterConfig) -> str:
    cam = config.camera
    values = {
        "f": cam.f, "o_i_x": cam.principal.x, "o_i_y": cam.principal.y,
        "width": cam.width, "height": cam.height,
        "tr_c_c": config.circle_trust.tr_c, "tr_c_s": config.circle_trust.tr_s,
        "tr_c_m": config.circle_trust.tr_m,
        "tr_s_c": config.square_trust.tr_c, "tr_s_s": config.square_trust.tr_s,
        "tr_s_m": config.square_trust.tr_m,
        "delta_v": config.delta_v, "delta_beta_1": config.delta_beta_1,
        "delta_beta_2": config.delta_beta_2, "mu_0": config.mu_0,
        "rho_c": config.rho_c,
        "eps_beta_n": config.eps_beta_n, "eps_beta_r": config.eps_beta_r,
        "eps_beta_s": config.eps_beta_s, "eps_beta": config.eps_beta,
        "eps_v_n": config.eps_v_n, "eps_v_r": config.eps_v_r,
        "eps_v": config.eps_v, "eps_v_s": config.eps_v_s,
        "psi_lifetime": config.psi_lifetime, "px_per_cm": config.px_per_cm,
        "use_verbatim_eq1": int(config.use_verbatim_eq1),
    }
    lines = [f"{k}={values[k]:g}" if isinstance(values[k], float) else f"{k}={values[k]}"
             for k in _CONFIG_KEYS]
    return "\n".join(lines) + "\n"


def config_from_text(text: str) -> FilterConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()

    def fget(key, default):
        return float(values.get(key, default))

    def iget(key, default):
        return int(float(values.get(key, default)))

    camera = CameraModel(
        f=fget("f", 500.0),
        principal=PixelPoint(fget("o_i_x", 320.0), fget("o_i_y", 240.0)),
        width=fget("width", 640.0),
        height=fget("height", 480.0),
    )
    return FilterConfig(
        camera=camera,
        circle_trust=TrustLadder(iget("tr_c_c", 2), iget("tr_c_s", 3), iget("tr_c_m", 5)),
        square_trust=TrustLadder(iget("tr_s_c", 3), iget("tr_s_s", 5), iget("tr_s_m", 7)),
        delta_v=fget("delta_v", 9.0),
        delta_beta_1=fget("delta_beta_1", 90.0),
        delta_beta_2=fget("delta_beta_2", 35.0),
        mu_0=fget("mu_0", 25.0),
        rho_c=fget("rho_c", 40.0),
        eps_beta_n=fget("eps_beta_n", 20.0),
        eps_beta_r=fget("eps_beta_r", 50.0),
        eps_beta_s=fget("eps_beta_s", 20.0),
        eps_beta=fget("eps_beta", 20.0),
        eps_v_n=fget("eps_v_n", 40.0),
        eps_v_r=fget("eps_v_r", 100.0),
        eps_v=fget("eps_v", 0.7),
        eps_v_s=fget("eps_v_s", 0.7),
        psi_lifetime=iget("psi_lifetime", 1),
        px_per_cm=fget("px_per_cm", 5.0),
        use_verbatim_eq1=bool(iget("use_verbatim_eq1", 0)),
    )


def default_config() -> FilterConfig:
    return config_from_text("")
