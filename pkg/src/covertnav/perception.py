"""Synthetic object detections and the cover decision.

sense() stands in for a segmentation front-end: it emits one detection per
visible object, positioned in the robot frame (x right, y up, z forward) with
a distance-and-occlusion-driven confidence. detect_cover() then decides, in a
single pass, whether the robot currently counts as being in cover.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .objects import COVER_CLASSES, CoverClass, canonical_class
from .world import WorldState, line_of_sight, wrap_angle

CONFIDENCE_FLOOR = 0.85  # detections below this never qualify as cover
COVER_RANGE_M = 10.0  # in cover iff the nearest qualifying object is this close

# Synthetic camera model for bounding boxes.
IMAGE_WIDTH_PX = 640.0
IMAGE_HEIGHT_PX = 480.0
SENSOR_HEIGHT_M = 0.5

# Confidence model: base 1, fading with range, knocked down when the lower
# body of the object is hidden. Values are chosen to straddle the 0.85 gate.
CONF_RANGE_PENALTY = 0.3
CONF_OCCLUSION_PENALTY = 0.2


@dataclass(frozen=True)
class Detection:
    """One perceived object, mirroring the detection record format."""

    frame_id: int
    class_id: int
    class_name: str
    confidence: float
    x_min: float
    y_min: float
    x_max: float
    y_max: float
    object_id: int
    x_pos: float
    y_pos: float
    z_pos: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must be within [0, 1]")


@dataclass(frozen=True)
class CoverVerdict:
    """Outcome of the cover decision. cover_distance is inf when nothing qualifies."""

    is_cover: bool
    cover_distance: float
    nearest_object_id: int | None

    def __post_init__(self) -> None:
        if self.is_cover and not self.cover_distance <= COVER_RANGE_M:
            raise ValueError("is_cover requires cover_distance within range")


def cover_distance(
    robot: tuple[float, float, float], obj: tuple[float, float, float]
) -> float:
    """3D Euclidean distance between the robot and an object location."""
    return math.dist(robot, obj)


def detect_cover(
    detections: list[Detection] | tuple[Detection, ...],
    robot_loc: tuple[float, float, float],
) -> CoverVerdict:
    """Decide whether the robot is in cover, in one pass over the detections.

    Only cover-capable classes with confidence >= 0.85 are considered; the
    robot is in cover when the nearest such object is within 10 m (both
    thresholds inclusive). Distance ties break toward the lowest object_id.
    """
    best = math.inf
    best_id: int | None = None
    for det in detections:
        if canonical_class(det.class_name) not in COVER_CLASSES:
            continue
        if det.confidence < CONFIDENCE_FLOOR:
            continue
        dist = cover_distance(robot_loc, (det.x_pos, det.y_pos, det.z_pos))
        if dist < best or (dist == best and (best_id is None or det.object_id < best_id)):
            best = dist
            best_id = det.object_id
    return CoverVerdict(
        is_cover=best <= COVER_RANGE_M,
        cover_distance=best,
        nearest_object_id=best_id,
    )


def sense(
    world: WorldState,
    fov: float = math.pi,
    max_range: float = 20.0,
) -> list[Detection]:
    """Detect every object inside the field of view with a clear sight line.

    Detections are expressed in the robot frame (x right, y up, z forward),
    anchored at each object's base. Sight lines run from a sensor mounted
    SENSOR_HEIGHT_M above the robot to the object's mid height; an object
    whose midline is blocked is not detected at all, one whose lower body is
    blocked is detected with reduced confidence.
    """
    if not 0.0 < fov <= 2.0 * math.pi:
        raise ValueError("fov must be in (0, 2*pi]")
    if not max_range > 0.0:
        raise ValueError("max_range must be positive")
    robot = world.robot
    sensor = (robot.x, robot.y, robot.z + SENSOR_HEIGHT_M)
    detections: list[Detection] = []
    vfov = fov * IMAGE_HEIGHT_PX / IMAGE_WIDTH_PX
    for obj in world.objects:
        ox, oy, oz = obj.position
        dist = cover_distance((robot.x, robot.y, robot.z), obj.position)
        if dist > max_range:
            continue
        bearing = wrap_angle(math.atan2(oy - robot.y, ox - robot.x) - robot.heading)
        if abs(bearing) > fov / 2.0:
            continue
        mid = (ox, oy, oz + obj.obj_height / 2.0)
        if not line_of_sight(world, sensor, mid, ignore_object_id=obj.object_id):
            continue
        low = (ox, oy, oz + 0.1 * obj.obj_height)
        occluded = not line_of_sight(world, sensor, low, ignore_object_id=obj.object_id)
        confidence = 1.0 - CONF_RANGE_PENALTY * dist / max_range
        if occluded:
            confidence -= CONF_OCCLUSION_PENALTY
        confidence = min(1.0, max(0.0, confidence))

        # Robot-frame position: x right of heading, y up, z forward.
        dx, dy = ox - robot.x, oy - robot.y
        c, s = math.cos(robot.heading), math.sin(robot.heading)
        x_pos = dx * s - dy * c
        z_pos = dx * c + dy * s
        y_pos = oz - robot.z

        # Panoramic projection keeps boxes defined for any field of view.
        ground = max(math.hypot(dx, dy), 1e-6)
        x_center = (0.5 - bearing / fov) * IMAGE_WIDTH_PX
        half_w = (math.atan2(obj.footprint_radius, ground) / fov) * IMAGE_WIDTH_PX
        v_mid = math.atan2(oz + obj.obj_height / 2.0 - sensor[2], ground)
        y_center = (0.5 - v_mid / vfov) * IMAGE_HEIGHT_PX
        half_h = (math.atan2(obj.obj_height / 2.0, ground) / vfov) * IMAGE_HEIGHT_PX

        detections.append(
            Detection(
                frame_id=world.tick,
                class_id=list(CoverClass).index(obj.class_name),
                class_name=obj.class_name.value,
                confidence=confidence,
                x_min=x_center - half_w,
                y_min=y_center - half_h,
                x_max=x_center + half_w,
                y_max=y_center + half_h,
                object_id=obj.object_id,
                x_pos=x_pos,
                y_pos=y_pos,
                z_pos=z_pos,
            )
        )
    return detections


DETECTION_FIELDS = (
    "class_id",
    "class_name",
    "confidence",
    "x_min",
    "y_min",
    "x_max",
    "y_max",
    "object_id",
    "x_pos",
    "y_pos",
    "z_pos",
)


def detections_to_frame(frame_id: int, detections: list[Detection]) -> dict:
    """Serialize one frame of detections with the exact record field names."""
    return {
        "frame_id": frame_id,
        "detections": [
            {**{f: getattr(d, f) for f in DETECTION_FIELDS}, "kpts": []}
            for d in detections
        ],
    }


def frame_to_detections(frame: dict) -> list[Detection]:
    """Parse a serialized frame back into Detection records (kpts are dropped)."""
    frame_id = int(frame["frame_id"])
    out = []
    for rec in frame["detections"]:
        fields = {f: rec[f] for f in DETECTION_FIELDS}
        out.append(Detection(frame_id=frame_id, **fields))
    return out


def detections_to_yaml(frame_id: int, detections: list[Detection]) -> str:
    """Render one frame as a YAML document, field order preserved."""
    import yaml

    return yaml.safe_dump(detections_to_frame(frame_id, detections), sort_keys=False)


def detections_from_yaml(text: str) -> list[Detection]:
    import yaml

    return frame_to_detections(yaml.safe_load(text))
