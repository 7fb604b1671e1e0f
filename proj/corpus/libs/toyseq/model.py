from collections import OrderedDict

from . import modules as mod
from .vocab import Vocabulary


class Seq2Seq:
    def __init__(self, vocab: Vocabulary, dim: int = 4):
        self.vocab = vocab
        self.blocks: "OrderedDict[str, mod.Module]" = OrderedDict()
        self.config = {"dim": dim, "tied": False}
        self.blocks["enc"] = mod.Encoder(dim)
        self.blocks["dec"] = mod.Decoder(dim, len(vocab.itos))
        self.blocks["attn"] = mod.Attention(dim)
