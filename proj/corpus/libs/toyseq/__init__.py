__version__ = "1.2.0"

from .model import Seq2Seq
from .modules import Module, Encoder, Decoder, Attention
