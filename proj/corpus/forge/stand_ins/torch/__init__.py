"""Minimal stand-in for the parts of torch that shape its pickle output.

Only used to emit fixtures; it reproduces the callable names and persistent
storage references of the real serializer, not its numerics.
"""

from collections import OrderedDict

from . import _utils


class FloatStorage:
    def __init__(self, data):
        self.data = [float(x) for x in data]


def _contiguous_stride(size):
    stride, acc = [], 1
    for dim in reversed(size):
        stride.append(acc)
        acc *= dim
    return tuple(reversed(stride))


class Tensor:
    def __init__(self, data, size):
        self._storage = FloatStorage(data)
        self._size = tuple(size)
        self.requires_grad = False

    def __reduce_ex__(self, protocol):
        return (
            _utils._rebuild_tensor_v2,
            (self._storage, 0, self._size, _contiguous_stride(self._size),
             self.requires_grad, OrderedDict()),
        )


def zeros(*size):
    n = 1
    for d in size:
        n *= d
    return Tensor([0.0] * n, size)


def arange_like(*size, scale=0.01):
    n = 1
    for d in size:
        n *= d
    return Tensor([round(i * scale, 4) for i in range(n)], size)


from . import nn  # noqa: E402,F401
