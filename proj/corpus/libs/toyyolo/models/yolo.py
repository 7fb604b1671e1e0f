from typing import Union

from toyyolo.models.common import C3, Conv


class DetectionModel:
    def __init__(self, nc: int = 80):
        self.nc = nc
        self.names: dict[int, str] = {i: f"class{i}" for i in range(nc)}
        self.model: list[Union[Conv, C3]] = [Conv(3, 16, 3, 2), C3(16, 32)]
        self.stride = (8.0, 16.0, 32.0)
