import torch
from torch import nn


class ConvBlock(nn.Module):
    def __init__(self, c_in: int, c_out: int):
        super().__init__()
        self.weight = nn.Parameter(torch.zeros(c_out, c_in))
        self.activation = "relu"


class TinyNet(nn.Module):
    def __init__(self, num_classes: int = 2):
        super().__init__()
        self.stem = ConvBlock(3, 4)
        self.head = ConvBlock(4, num_classes)
        self.num_classes = num_classes
