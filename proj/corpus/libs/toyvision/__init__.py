__version__ = "0.9.0"

from .nets import ConvBlock, TinyNet
