"""A tiny model library whose tensors reload their weights from disk."""

from . import utils

__version__ = "0.1.0"


def read_weights_to_tensor(cls, filename, shape):
    tensor = cls.__new__(cls)
    tensor.filename = filename
    tensor.shape = shape
    tensor.data = utils.load_floats(filename)
    return tensor


class Tensor:
    def __init__(self, filename: str, shape: tuple[int, ...]):
        self.filename = filename
        self.shape = shape

    def __reduce__(self):
        return (read_weights_to_tensor, (Tensor, self.filename, self.shape))


from .layers import Linear  # noqa: E402


class Model:
    def __init__(self, sizes: list[int]):
        self.name = "toy"
        self.layers: list[Linear] = [
            Linear(a, b) for a, b in zip(sizes, sizes[1:])
        ]
        self.head = Linear(sizes[-1], 1)
        self.dropout = 0.1
