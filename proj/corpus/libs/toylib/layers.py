from toylib import Tensor as T
from .utils import weight_path


class Linear:
    def __init__(self, n_in: int, n_out: int):
        self.weight: T = T(weight_path("w", n_in, n_out), (n_in, n_out))
        self.bias = T(weight_path("b", n_out), (n_out,))
        self.activation: str = "relu"
