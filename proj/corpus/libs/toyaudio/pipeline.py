from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple


class Problem:
    BINARY_CLASSIFICATION = 0
    MULTI_LABEL_CLASSIFICATION = 1


@dataclass
class Specifications:
    problem: int
    duration: float
    classes: Optional[Tuple[str, ...]] = None
    warm_up: Tuple[float, float] = (0.0, 0.0)


class SegmentationModel:
    def __init__(self, sample_rate: int = 16000):
        self.sample_rate = sample_rate
        self.specifications = Specifications(Problem.MULTI_LABEL_CLASSIFICATION, 5.0, ("spk1", "spk2"))
        self.frames: list[float] = []


class SpeakerDiarization:
    def __init__(self, segmentation: SegmentationModel, threshold: float = 0.5):
        self.segmentation = segmentation
        self.threshold = threshold
        self.min_duration_off = 0.0
