__version__ = "3.1.0"

from .pipeline import SegmentationModel, SpeakerDiarization, Specifications
